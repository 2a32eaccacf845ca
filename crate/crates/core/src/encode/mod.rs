//! CNF encodings of PB constraints through their decision diagrams.
//!
//! * `bdd1`: ROBDD of the constraint, two clauses per node, root unit.
//! * `bdd2`: ROBDD of the coefficient-decomposed constraint with every
//!   bit-variable replaced by its original literal. Consistent, not GAC.
//! * `bdd3`: for every literal `ℓᵢ`, the `bdd2` diagram of the constraint
//!   with `ℓᵢ` fixed true, whose root `rᵢ` is tied back by `rᵢ ∨ ¬ℓᵢ`. GAC.
//! * `ite6`: the ROBDD with the six if-then-else clauses per node.
//!
//! Terminals are never given variables: the clauses mentioning them are
//! simplified on emission, and each diagram's clauses are then closed under
//! unit propagation before they reach the output.

pub mod cnf;
pub mod decompose;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::builder::{build_in_term_order, BuildOptions, Robdd};
use crate::pb::{Literal, PbConstraint};
use crate::propagate::Propagator;
use crate::robdd::{BddError, NodeId, NodeStore};

use cnf::{AuxOrigin, ClauseSet, ClauseShapes, Lit};
pub use decompose::{decompose, BitTerm, Decomposition};

/// A node's value in the CNF: a constant for terminals, otherwise a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    Const(bool),
    Lit(Lit),
}

impl std::ops::Not for Signal {
    type Output = Signal;

    fn not(self) -> Signal {
        match self {
            Signal::Const(b) => Signal::Const(!b),
            Signal::Lit(l) => Signal::Lit(!l),
        }
    }
}

/// What is asserted about the root of an encoded diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMode {
    /// Unit clause `r`.
    UnitTrue,
    /// Clause `r ∨ ¬ℓ`.
    ImpliesLiteral(Literal),
    /// Nothing; `¬r` is derived exactly when the input assignment cannot be
    /// extended.
    ConsistencyOnly,
}

#[derive(Default)]
struct Batch {
    clauses: Vec<Vec<Lit>>,
    raw: ClauseShapes,
    contradiction: bool,
}

impl Batch {
    fn push(&mut self, signals: &[Signal]) {
        self.raw.record(signals.len());
        let mut clause: Vec<Lit> = Vec::with_capacity(signals.len());
        for s in signals {
            match *s {
                Signal::Const(true) => return,
                Signal::Const(false) => {}
                Signal::Lit(l) => {
                    if clause.contains(&!l) {
                        return;
                    }
                    if !clause.contains(&l) {
                        clause.push(l);
                    }
                }
            }
        }
        if clause.is_empty() {
            self.contradiction = true;
        }
        self.clauses.push(clause);
    }

    /// Closes the batch under unit propagation and writes it out: first one
    /// unit clause per fixed variable, then the surviving clauses with their
    /// false literals removed.
    fn finish(self, out: &mut ClauseSet) {
        out.record_raw(&self.raw);
        if self.contradiction {
            out.add_clause([]);
            return;
        }
        let p = Propagator::new(&self.clauses, out.num_vars());
        if p.root_conflict().is_some() {
            out.add_clause([]);
            return;
        }
        let fixed = p.snapshot();
        for (lit, _) in fixed.trail() {
            out.add_clause([*lit]);
        }
        for clause in &self.clauses {
            if clause.iter().any(|l| p.lit_value(*l) == Some(true)) {
                continue;
            }
            let rest: Vec<Lit> = clause.iter().copied().filter(|l| p.lit_value(*l).is_none()).collect();
            debug_assert!(rest.len() >= 2);
            out.add_clause(rest);
        }
    }
}

/// Allocates one auxiliary variable per decision node reachable from `root`,
/// in node-creation order.
fn allocate(store: &NodeStore, root: NodeId, out: &mut ClauseSet) -> (Vec<NodeId>, HashMap<NodeId, Signal>) {
    let diagram = out.new_diagram();
    let mut nodes = store.reachable(root);
    nodes.sort();
    let mut signals = HashMap::new();
    signals.insert(NodeId::TRUE, Signal::Const(true));
    signals.insert(NodeId::FALSE, Signal::Const(false));
    for &node in &nodes {
        let var = out.new_aux(AuxOrigin { diagram, node });
        signals.insert(node, Signal::Lit(Lit::pos(var)));
    }
    (nodes, signals)
}

fn finish_root(batch: &mut Batch, root: Signal, mode: RootMode, out: &ClauseSet) {
    // units for the True and False terminals
    batch.push(&[Signal::Const(true)]);
    batch.push(&[!Signal::Const(false)]);
    match mode {
        RootMode::UnitTrue => batch.push(&[root]),
        RootMode::ImpliesLiteral(l) => batch.push(&[root, Signal::Lit(!out.input_lit(l))]),
        RootMode::ConsistencyOnly => {}
    }
}

/// Two clauses per node, `¬f → ¬n` and `¬t ∧ x → ¬n`. Requires the diagram
/// to be monotone decreasing in its selector literals; this is not checked.
/// `selectors[l - 1]` is the input literal tested at level `l`.
pub fn encode_monotone(
    store: &NodeStore,
    root: NodeId,
    selectors: &[Literal],
    out: &mut ClauseSet,
    mode: RootMode,
) -> Signal {
    let (nodes, signals) = allocate(store, root, out);
    let mut batch = Batch::default();
    for id in nodes {
        let node = store.node(id).unwrap();
        let n = signals[&id];
        let f = signals[&node.low];
        let t = signals[&node.high];
        let x = Signal::Lit(out.input_lit(selectors[node.level as usize - 1]));
        batch.push(&[f, !n]);
        batch.push(&[!x, t, !n]);
    }
    let root_signal = signals[&root];
    finish_root(&mut batch, root_signal, mode, out);
    batch.finish(out);
    root_signal
}

/// The six if-then-else clauses per node, making each node variable
/// equivalent to its sub-diagram. Works for any BDD.
pub fn encode_ite6(
    store: &NodeStore,
    root: NodeId,
    selectors: &[Literal],
    out: &mut ClauseSet,
    mode: RootMode,
) -> Signal {
    let (nodes, signals) = allocate(store, root, out);
    let mut batch = Batch::default();
    for id in nodes {
        let node = store.node(id).unwrap();
        let a = signals[&id];
        let f = signals[&node.low];
        let t = signals[&node.high];
        let x = Signal::Lit(out.input_lit(selectors[node.level as usize - 1]));
        batch.push(&[x, f, !a]);
        batch.push(&[!x, t, !a]);
        batch.push(&[f, t, !a]);
        batch.push(&[x, !f, a]);
        batch.push(&[!x, !t, a]);
        batch.push(&[!f, !t, a]);
    }
    let root_signal = signals[&root];
    finish_root(&mut batch, root_signal, mode, out);
    batch.finish(out);
    root_signal
}

/// Clause `∨_{ℓ∈S} ¬ℓ` for every minimal set `S` of literals whose
/// coefficients exceed the bound. Exponential in the number of terms.
pub fn encode_direct(c: &PbConstraint, out: &mut ClauseSet) {
    assert!(c.len() <= 20, "direct encoding is for small constraints");
    let n = c.len();
    let coeffs: Vec<_> = c.coefficients().collect();
    let sum = |mask: u32| -> num_bigint::BigInt {
        (0..n).filter(|j| mask >> j & 1 == 1).map(|j| coeffs[j]).sum()
    };
    let mut shapes = ClauseShapes::default();
    for mask in 0u32..(1 << n) {
        if sum(mask) <= *c.bound() {
            continue;
        }
        let minimal = (0..n)
            .filter(|j| mask >> j & 1 == 1)
            .all(|j| sum(mask & !(1 << j)) <= *c.bound());
        if minimal {
            let clause: Vec<Lit> = (0..n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| !out.input_lit(c.terms()[j].literal()))
                .collect();
            shapes.record(clause.len());
            out.add_clause(clause);
        }
    }
    out.record_raw(&shapes);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Bdd1,
    Bdd2,
    Bdd3,
    Ite6,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Bdd1, Method::Bdd2, Method::Bdd3, Method::Ite6];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bdd1 => "bdd1",
            Method::Bdd2 => "bdd2",
            Method::Bdd3 => "bdd3",
            Method::Ite6 => "ite6",
        }
    }

    /// Whether unit propagation on the encoding achieves GAC.
    pub fn is_gac(self) -> bool {
        matches!(self, Method::Bdd1 | Method::Bdd3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Method, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected bdd1, bdd2, bdd3 or ite6)"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramStats {
    pub decision_nodes: usize,
    /// Decision nodes plus the terminals that are reached.
    pub total_nodes: usize,
    pub level_widths: Vec<usize>,
}

impl DiagramStats {
    fn of(bdd: &Robdd) -> DiagramStats {
        DiagramStats {
            decision_nodes: bdd.node_count(),
            total_nodes: bdd.store.count_nodes_with_terminals(bdd.root()),
            level_widths: bdd.store.level_widths(bdd.root()),
        }
    }
}

/// Sizes of one encoded constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintStats {
    pub input_vars: usize,
    pub aux_vars: usize,
    pub clauses: ClauseShapes,
    pub raw_clauses: ClauseShapes,
    pub diagrams: Vec<DiagramStats>,
    pub build_time: Duration,
    /// Encoded by clause enumeration instead of a diagram.
    pub direct: bool,
}

impl ConstraintStats {
    pub fn decision_nodes(&self) -> usize {
        self.diagrams.iter().map(|d| d.decision_nodes).sum()
    }

    pub fn total_nodes(&self) -> usize {
        self.diagrams.iter().map(|d| d.total_nodes).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Encoder {
    pub method: Method,
    pub node_budget: Option<usize>,
    /// Constraints with at most this many terms are encoded directly.
    pub direct_max_vars: usize,
}

impl Encoder {
    pub fn new(method: Method) -> Encoder {
        Encoder {
            method,
            node_budget: None,
            direct_max_vars: 0,
        }
    }

    fn build(&self, c: &PbConstraint) -> Result<Robdd, BddError> {
        build_in_term_order(
            c,
            BuildOptions {
                trace: false,
                node_budget: self.node_budget,
            },
        )
    }

    /// Encodes `c` into `out`, whose inputs must cover `c`'s variables.
    pub fn encode(&self, c: &PbConstraint, out: &mut ClauseSet) -> Result<ConstraintStats, BddError> {
        let start = Instant::now();
        let aux_before = out.num_aux();
        let clauses_before = out.len();
        let raw_before = out.raw_shapes();
        let mut stats = ConstraintStats {
            input_vars: c.len(),
            ..Default::default()
        };

        if c.is_contradiction() {
            out.add_clause([]);
            let mut shapes = ClauseShapes::default();
            shapes.record(0);
            out.record_raw(&shapes);
        } else if c.is_tautology() {
            // nothing to emit
        } else if c.len() <= self.direct_max_vars {
            encode_direct(c, out);
            stats.direct = true;
        } else {
            match self.method {
                Method::Bdd1 | Method::Ite6 => {
                    let bdd = self.build(c)?;
                    if self.method == Method::Bdd1 {
                        encode_monotone(&bdd.store, bdd.root(), &bdd.selectors, out, RootMode::UnitTrue);
                    } else {
                        encode_ite6(&bdd.store, bdd.root(), &bdd.selectors, out, RootMode::UnitTrue);
                    }
                    stats.diagrams.push(DiagramStats::of(&bdd));
                }
                Method::Bdd2 => {
                    let d = decompose(c);
                    let bdd = self.build(&d.decomposed)?;
                    encode_monotone(&bdd.store, bdd.root(), &d.selectors(), out, RootMode::UnitTrue);
                    stats.diagrams.push(DiagramStats::of(&bdd));
                }
                Method::Bdd3 => {
                    for lit in c.literals() {
                        let fixed = c.with_literal_true(lit).expect("literal of c");
                        let d = decompose(&fixed);
                        let bdd = self.build(&d.decomposed)?;
                        encode_monotone(
                            &bdd.store,
                            bdd.root(),
                            &d.selectors(),
                            out,
                            RootMode::ImpliesLiteral(lit),
                        );
                        stats.diagrams.push(DiagramStats::of(&bdd));
                    }
                }
            }
        }

        stats.aux_vars = out.num_aux() - aux_before;
        for clause in &out.clauses()[clauses_before..] {
            stats.clauses.record(clause.len());
        }
        let raw_after = out.raw_shapes();
        stats.raw_clauses = ClauseShapes {
            empty: raw_after.empty - raw_before.empty,
            unit: raw_after.unit - raw_before.unit,
            binary: raw_after.binary - raw_before.binary,
            ternary: raw_after.ternary - raw_before.ternary,
            longer: raw_after.longer - raw_before.longer,
        };
        stats.build_time = start.elapsed();
        Ok(stats)
    }

    /// Encodes all constraints into one CNF over `inputs` input variables.
    /// Constraints are encoded on up to `threads` workers; the output is
    /// assembled in input order, so it does not depend on `threads`.
    pub fn encode_all(
        &self,
        constraints: &[PbConstraint],
        inputs: u32,
        threads: usize,
    ) -> Result<(ClauseSet, Vec<ConstraintStats>), BddError> {
        let threads = threads.max(1).min(constraints.len().max(1));
        let chunk = constraints.len().div_ceil(threads).max(1);
        let parts: Vec<Result<Vec<(ClauseSet, ConstraintStats)>, BddError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = constraints
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|c| {
                                let mut local = ClauseSet::new(inputs);
                                let stats = self.encode(c, &mut local)?;
                                Ok((local, stats))
                            })
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("encoder thread panicked")).collect()
        });
        let mut out = ClauseSet::new(inputs);
        let mut all_stats = Vec::with_capacity(constraints.len());
        for part in parts {
            for (local, stats) in part? {
                out.absorb(local);
                all_stats.push(stats);
            }
        }
        Ok((out, all_stats))
    }
}

fn pipeline(c: &PbConstraint, method: Method) -> ClauseSet {
    let mut out = ClauseSet::new(c.max_var());
    Encoder::new(method)
        .encode(c, &mut out)
        .expect("no node budget is set");
    out
}

pub fn pipeline_bdd1(c: &PbConstraint) -> ClauseSet {
    pipeline(c, Method::Bdd1)
}

pub fn pipeline_bdd2(c: &PbConstraint) -> ClauseSet {
    pipeline(c, Method::Bdd2)
}

pub fn pipeline_bdd3(c: &PbConstraint) -> ClauseSet {
    pipeline(c, Method::Bdd3)
}

pub fn pipeline_ite6(c: &PbConstraint) -> ClauseSet {
    pipeline(c, Method::Ite6)
}
