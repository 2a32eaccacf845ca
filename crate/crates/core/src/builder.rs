//! Top-down ROBDD construction for `a₁ℓ₁ + ⋯ + aₙℓₙ ≤ K`, memoized by
//! right-hand-side intervals.
//!
//! Every level `l` keeps a [`LevelStore`] of disjoint `(interval, node)` pairs:
//! the node is the ROBDD of `a_l ℓ_l + ⋯ + aₙℓₙ ≤ M` for every `M` in the
//! interval. A call at level `l` with bound `K'` first looks `K'` up there and
//! only recurses on a miss, so each node is created exactly once.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use thiserror::Error;

use crate::interval::{terminal_interval, Ext, Interval, LevelSums};
use crate::pb::{Literal, PbConstraint, Var};
use crate::robdd::{BddError, NodeId, NodeStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("variable order is not a permutation of the constraint's variables")]
    OrderMismatch,
    #[error("store has {store} levels but the constraint has {terms} terms")]
    LevelMismatch { store: u32, terms: usize },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// Disjoint intervals of one level, keyed by lower bound.
#[derive(Clone, Debug, Default)]
pub struct LevelStore {
    entries: BTreeMap<Ext, (Interval, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("interval {new} overlaps stored interval {existing}")]
pub struct OverlapError {
    pub new: Interval,
    pub existing: Interval,
}

impl LevelStore {
    pub fn new() -> LevelStore {
        LevelStore::default()
    }

    /// The two initial pairs of a level whose suffix coefficients add up to
    /// `suffix_sum`: `((−∞, −1], False)` and `([suffix_sum, ∞), True)`.
    pub fn with_terminals(suffix_sum: &BigInt) -> LevelStore {
        let mut store = LevelStore::new();
        store.insert(terminal_interval(false), NodeId::FALSE);
        store.insert(Interval::new(Ext::Finite(suffix_sum.clone()), Ext::PosInf), NodeId::TRUE);
        store
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Interval, NodeId)> + '_ {
        self.entries.values().map(|(i, n)| (i, *n))
    }

    /// The pair whose interval contains `k`, if any.
    pub fn search(&self, k: &BigInt) -> Option<(&Interval, NodeId)> {
        let key = Ext::Finite(k.clone());
        let (_, (interval, node)) = self.entries.range(..=key).next_back()?;
        interval.contains(k).then_some((interval, *node))
    }

    pub fn try_insert(&mut self, interval: Interval, node: NodeId) -> Result<(), OverlapError> {
        assert!(!interval.is_empty(), "empty interval inserted");
        let lo = interval.lo().clone();
        let neighbours = self
            .entries
            .range(..=lo.clone())
            .next_back()
            .into_iter()
            .chain(self.entries.range(lo.clone()..).next());
        for (_, (existing, existing_node)) in neighbours {
            if *existing == interval && *existing_node == node {
                return Ok(());
            }
            if existing.overlaps(&interval) {
                return Err(OverlapError {
                    new: interval,
                    existing: existing.clone(),
                });
            }
        }
        self.entries.insert(lo, (interval, node));
        Ok(())
    }

    /// Panics if `interval` overlaps a stored interval.
    pub fn insert(&mut self, interval: Interval, node: NodeId) {
        if let Err(e) = self.try_insert(interval, node) {
            panic!("{e}");
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallOutcome {
    /// The bound was found in the level store.
    Hit,
    /// Both children coincided; the shared child was returned.
    Merge,
    /// A new decision node joins the two children.
    Node,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallRecord {
    pub level: u32,
    pub bound: BigInt,
    pub outcome: CallOutcome,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub calls: usize,
    pub search_hits: usize,
    pub merges: usize,
    pub nodes_created: usize,
}

#[derive(Clone, Debug)]
pub struct BuildResult {
    pub root: NodeId,
    pub root_interval: Interval,
    /// Interval of each node created by this build, relative to its own level.
    pub intervals: HashMap<NodeId, Interval>,
    pub stats: BuildStats,
    /// Calls in the order they were made; only filled when tracing.
    pub trace: Vec<CallRecord>,
}

/// A built diagram together with the store that owns it and the literal tested
/// at each level.
#[derive(Clone, Debug)]
pub struct Robdd {
    pub store: NodeStore,
    pub selectors: Vec<Literal>,
    pub sums: LevelSums,
    pub result: BuildResult,
}

impl Robdd {
    pub fn root(&self) -> NodeId {
        self.result.root
    }

    pub fn node_count(&self) -> usize {
        self.store.count_nodes(self.result.root)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub trace: bool,
    pub node_budget: Option<usize>,
}

/// Builds the ROBDD of `c` with the terms' own order as variable order.
pub fn build_in_term_order(c: &PbConstraint, options: BuildOptions) -> Result<Robdd, BddError> {
    let mut store = NodeStore::new(c.len()).with_budget(options.node_budget);
    let sums = LevelSums::new(c.coefficients().cloned().collect());
    let result = construct(&mut store, &sums, c.bound(), options.trace)?;
    Ok(Robdd {
        store,
        selectors: c.literals().collect(),
        sums,
        result,
    })
}

/// Builds the ROBDD of `c` under `order`, a permutation of its variables.
pub fn build(c: &PbConstraint, order: &[Var]) -> Result<Robdd, BuildError> {
    let ordered = c.reordered(order).ok_or(BuildError::OrderMismatch)?;
    Ok(build_in_term_order(&ordered, BuildOptions::default())?)
}

/// Builds `c` (in term order) into an existing store, so diagrams of several
/// constraints over the same levels share nodes.
pub fn build_into(store: &mut NodeStore, c: &PbConstraint) -> Result<BuildResult, BuildError> {
    if store.levels() as usize != c.len() {
        return Err(BuildError::LevelMismatch {
            store: store.levels(),
            terms: c.len(),
        });
    }
    let sums = LevelSums::new(c.coefficients().cloned().collect());
    Ok(construct(store, &sums, c.bound(), false)?)
}

enum Task {
    Call { level: u32, bound: BigInt },
    Join { level: u32, call: usize },
}

/// The interval-memoized construction over the levels described by `sums`.
/// Recursion runs on an explicit stack.
pub fn construct(
    store: &mut NodeStore,
    sums: &LevelSums,
    bound: &BigInt,
    trace: bool,
) -> Result<BuildResult, BddError> {
    let n = sums.levels() as u32;
    debug_assert_eq!(store.levels(), n);
    let mut levels: Vec<LevelStore> = (1..=n + 1)
        .map(|l| LevelStore::with_terminals(sums.suffix(l)))
        .collect();
    let mut intervals = HashMap::new();
    let mut stats = BuildStats::default();
    let mut calls: Vec<CallRecord> = Vec::new();
    let mut results: Vec<(Interval, NodeId)> = Vec::new();
    let mut tasks = vec![Task::Call {
        level: 1,
        bound: bound.clone(),
    }];

    while let Some(task) = tasks.pop() {
        match task {
            Task::Call { level, bound } => {
                stats.calls += 1;
                let found = levels[level as usize - 1]
                    .search(&bound)
                    .map(|(i, node)| (i.clone(), node));
                if trace {
                    calls.push(CallRecord {
                        level,
                        bound: bound.clone(),
                        outcome: CallOutcome::Hit,
                    });
                }
                match found {
                    Some(hit) => {
                        stats.search_hits += 1;
                        results.push(hit);
                    }
                    None => {
                        // The last level always hits, so `level < n + 1` here.
                        let high_bound = &bound - sums.coefficient(level);
                        tasks.push(Task::Join {
                            level,
                            call: stats.calls - 1,
                        });
                        tasks.push(Task::Call {
                            level: level + 1,
                            bound: high_bound,
                        });
                        tasks.push(Task::Call {
                            level: level + 1,
                            bound,
                        });
                    }
                }
            }
            Task::Join { level, call } => {
                let (high_interval, high) = results.pop().expect("high result");
                let (low_interval, low) = results.pop().expect("low result");
                let a = sums.coefficient(level);
                let (interval, node, outcome) = if high_interval == low_interval {
                    debug_assert_eq!(high, low);
                    stats.merges += 1;
                    let interval = Interval::new(high_interval.lo().plus(a), high_interval.hi().clone());
                    (interval, high, CallOutcome::Merge)
                } else {
                    let node = store.mk_node(level, low, high)?;
                    stats.nodes_created += 1;
                    let interval = low_interval.intersect(&high_interval.shift(a));
                    intervals.entry(node).or_insert_with(|| interval.clone());
                    (interval, node, CallOutcome::Node)
                };
                if trace {
                    calls[call].outcome = outcome;
                }
                levels[level as usize - 1].insert(interval.clone(), node);
                results.push((interval, node));
            }
        }
    }

    let (root_interval, root) = results.pop().expect("root result");
    debug_assert!(results.is_empty());
    debug_assert!(root_interval.contains(bound));
    Ok(BuildResult {
        root,
        root_interval,
        intervals,
        stats,
        trace: calls,
    })
}
