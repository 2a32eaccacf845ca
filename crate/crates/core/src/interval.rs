//! Right-hand-side intervals of BDD nodes.
//!
//! The interval of a node at level `i` is the set of integers `M` for which
//! the node represents `aᵢxᵢ + ⋯ + aₙxₙ ≤ M`. Intervals are computed top-down
//! by the builder; this module also recomputes them bottom-up from the
//! children so the two routes can be compared.

use std::cmp::{max, min};
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::robdd::{NodeId, NodeStore};

/// An integer extended with `±∞`. Addition saturates at the infinities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl Ext {
    pub fn finite(v: impl Into<BigInt>) -> Ext {
        Ext::Finite(v.into())
    }

    pub fn plus(&self, delta: &BigInt) -> Ext {
        match self {
            Ext::Finite(v) => Ext::Finite(v + delta),
            inf => inf.clone(),
        }
    }

    pub fn as_finite(&self) -> Option<&BigInt> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

/// Closed integer interval `[lo, hi]`; `lo > hi` is normalized to the single
/// empty value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Ext,
    hi: Ext,
}

impl Interval {
    pub fn new(lo: Ext, hi: Ext) -> Interval {
        if lo > hi || lo == Ext::PosInf || hi == Ext::NegInf {
            Interval::empty()
        } else {
            Interval { lo, hi }
        }
    }

    pub fn closed(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Interval {
        Interval::new(Ext::finite(lo), Ext::finite(hi))
    }

    pub fn empty() -> Interval {
        Interval {
            lo: Ext::PosInf,
            hi: Ext::NegInf,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo == Ext::PosInf
    }

    pub fn lo(&self) -> &Ext {
        &self.lo
    }

    pub fn hi(&self) -> &Ext {
        &self.hi
    }

    pub fn contains(&self, k: &BigInt) -> bool {
        if self.is_empty() {
            return false;
        }
        let k = Ext::Finite(k.clone());
        self.lo <= k && k <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        Interval::new(
            max(&self.lo, &other.lo).clone(),
            min(&self.hi, &other.hi).clone(),
        )
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }

    /// `[lo + delta, hi + delta]`.
    pub fn shift(&self, delta: &BigInt) -> Interval {
        if self.is_empty() {
            return Interval::empty();
        }
        Interval::new(self.lo.plus(delta), self.hi.plus(delta))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let open = if self.lo == Ext::NegInf { '(' } else { '[' };
        let close = if self.hi == Ext::PosInf { ')' } else { ']' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// True: `[0, ∞)`. False: `(−∞, −1]`.
pub fn terminal_interval(value: bool) -> Interval {
    if value {
        Interval::new(Ext::finite(0), Ext::PosInf)
    } else {
        Interval::new(Ext::NegInf, Ext::finite(-1))
    }
}

/// Coefficients by level with suffix sums, `suffix(l) = a_l + ⋯ + a_n`.
#[derive(Clone, Debug)]
pub struct LevelSums {
    coefficients: Vec<BigInt>,
    suffix: Vec<BigInt>,
}

impl LevelSums {
    pub fn new(coefficients: Vec<BigInt>) -> LevelSums {
        let mut suffix = vec![BigInt::zero(); coefficients.len() + 1];
        for l in (0..coefficients.len()).rev() {
            suffix[l] = &suffix[l + 1] + &coefficients[l];
        }
        LevelSums {
            coefficients,
            suffix,
        }
    }

    pub fn levels(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficient at 1-based `level`.
    pub fn coefficient(&self, level: u32) -> &BigInt {
        &self.coefficients[level as usize - 1]
    }

    /// `a_level + ⋯ + a_n`; level `n + 1` gives zero.
    pub fn suffix(&self, level: u32) -> &BigInt {
        &self.suffix[level as usize - 1]
    }

    /// `a_from + ⋯ + a_{to−1}` (empty when `to ≤ from`).
    pub fn range(&self, from: u32, to: u32) -> BigInt {
        if to <= from {
            BigInt::zero()
        } else {
            self.suffix(from) - self.suffix(to)
        }
    }
}

/// Interval of a node at `level` from the intervals of its children, whose
/// levels may be further down when edges skip levels.
pub fn combine_child_intervals(
    sums: &LevelSums,
    level: u32,
    low_level: u32,
    low: &Interval,
    high_level: u32,
    high: &Interval,
) -> Interval {
    debug_assert!(level < low_level && level < high_level);
    let a = sums.coefficient(level);
    let beta = max(
        low.lo.plus(&sums.range(level + 1, low_level)),
        high.lo.plus(&sums.range(level, high_level)),
    );
    let gamma = min(low.hi.clone(), high.hi.plus(a));
    let result = Interval::new(beta, gamma);
    assert!(!result.is_empty(), "empty interval at level {level}");
    result
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMismatch {
    pub node: NodeId,
    pub stored: Option<Interval>,
    pub recomputed: Interval,
}

/// Recomputes the interval of every node reachable from `root` bottom-up and
/// compares it with `stored`. Returns the first mismatch in bottom-up order.
pub fn verify_intervals(
    sums: &LevelSums,
    store: &NodeStore,
    root: NodeId,
    stored: &HashMap<NodeId, Interval>,
) -> Result<(), IntervalMismatch> {
    let mut computed: HashMap<NodeId, Interval> = HashMap::new();
    let interval_of = |computed: &HashMap<NodeId, Interval>, id: NodeId| {
        if id.is_terminal() {
            terminal_interval(id == NodeId::TRUE)
        } else {
            computed[&id].clone()
        }
    };
    for id in store.reachable(root) {
        let node = store.node(id).unwrap();
        let low = interval_of(&computed, node.low);
        let high = interval_of(&computed, node.high);
        let interval = combine_child_intervals(
            sums,
            node.level,
            store.level(node.low),
            &low,
            store.level(node.high),
            &high,
        );
        if stored.get(&id) != Some(&interval) {
            return Err(IntervalMismatch {
                node: id,
                stored: stored.get(&id).cloned(),
                recomputed: interval,
            });
        }
        computed.insert(id, interval);
    }
    Ok(())
}
