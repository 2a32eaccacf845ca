//! Brute-force oracles and exhaustive property checkers for encodings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::builder::{build_into, BuildError, Robdd};
use crate::encode::cnf::{ClauseSet, Lit};
use crate::encode::Decomposition;
use crate::interval::Ext;
use crate::pb::{Literal, PbConstraint, Valuation, Var};
use crate::propagate::Propagator;
use crate::robdd::NodeStore;

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 14;
pub const DEFAULT_ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("constraint has {vars} variables, limit is {limit}")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("constraints are over different variables or polarities")]
    VariableMismatch,
    #[error("variable {var} is not an input of the CNF")]
    NotAnInput { var: Var },
    #[error("coefficient {coefficient} at level {level} is not a power of two")]
    NotPowerOfTwo { level: usize, coefficient: BigInt },
    #[error(transparent)]
    Build(#[from] BuildError),
}

pub type PartialAssignment = BTreeMap<Var, bool>;

/// Whether some total extension of `assignment` satisfies `c`, by trying all
/// `2^k` completions of the `k` unassigned variables.
pub fn extendable(
    c: &PbConstraint,
    assignment: &(impl Valuation + ?Sized),
    limit: usize,
) -> Result<bool, VerifyError> {
    if c.len() > limit {
        return Err(VerifyError::TooManyVariables { vars: c.len(), limit });
    }
    let free: Vec<Var> = c.variables().filter(|v| assignment.value(*v).is_none()).collect();
    let mut total: BTreeMap<Var, bool> = c
        .variables()
        .filter_map(|v| assignment.value(v).map(|b| (v, b)))
        .collect();
    for mask in 0u64..(1 << free.len()) {
        for (j, v) in free.iter().enumerate() {
            total.insert(*v, mask >> j & 1 == 1);
        }
        if c.evaluate(&total).expect("all variables assigned") {
            return Ok(true);
        }
    }
    Ok(false)
}

/// [`extendable`] for a monotone decreasing constraint: the completion that
/// makes every free literal false is the best one.
pub fn extendable_monotone(c: &PbConstraint, assignment: &(impl Valuation + ?Sized)) -> bool {
    let forced: BigInt = c
        .terms()
        .iter()
        .filter(|t| assignment.value(t.var()).is_some_and(|b| t.literal().value_under(b)))
        .map(|t| t.coefficient())
        .sum();
    forced <= *c.bound()
}

/// How an inextensible assignment must show up under unit propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    /// A conflict.
    Conflict,
    /// The given literal (typically `¬root`) becomes true, or a conflict.
    Literal(Lit),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The assignment cannot be extended but propagation does not notice.
    Missed,
    /// The assignment can be extended but propagation reports it cannot.
    FalseAlarm,
    /// The literal follows from the assignment but is not propagated.
    NotPropagated(Literal),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: PartialAssignment,
    pub violation: Violation,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("A = {")?;
        for (j, (v, b)) in self.assignment.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", Literal::new(*v, *b))?;
        }
        f.write_str("}: ")?;
        match &self.violation {
            Violation::Missed => f.write_str("inextensible, no conflict"),
            Violation::FalseAlarm => f.write_str("extensible, but conflict"),
            Violation::NotPropagated(l) => write!(f, "{l} is implied but not propagated"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok { assignments: usize },
    Violated(Counterexample),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Violated(cx) => Some(cx),
            Verdict::Ok { .. } => None,
        }
    }
}

struct Search<'a> {
    c: &'a PbConstraint,
    inputs: Vec<Lit>,
    p: Propagator<'a>,
    detection: Detection,
    gac: bool,
    values: Vec<Option<bool>>,
    visited: usize,
}

impl Search<'_> {
    fn counterexample(&self, violation: Violation) -> Counterexample {
        let assignment = self
            .c
            .variables()
            .zip(&self.values)
            .filter_map(|(v, b)| b.map(|b| (v, b)))
            .collect();
        Counterexample { assignment, violation }
    }

    fn detected(&self) -> bool {
        match self.detection {
            Detection::Conflict => false,
            Detection::Literal(l) => self.p.lit_value(l) == Some(true),
        }
    }

    fn leaves_below(&self, pos: usize) -> usize {
        3usize.pow((self.c.len() - pos) as u32)
    }

    /// Visits every completion of positions `pos..` to assigned or unassigned.
    /// `forced` is the coefficient sum of the literals made true so far.
    fn dfs(&mut self, pos: usize, forced: &BigInt) -> Result<(), Counterexample> {
        if pos == self.c.len() {
            self.visited += 1;
            return self.leaf(forced);
        }
        self.dfs(pos + 1, forced)?;
        let term = &self.c.terms()[pos];
        for value in [true, false] {
            let lit = if value { self.inputs[pos] } else { !self.inputs[pos] };
            let forced = if term.literal().value_under(value) {
                forced + term.coefficient()
            } else {
                forced.clone()
            };
            let ok = forced <= *self.c.bound();
            let mark = self.p.mark();
            self.values[pos] = Some(value);
            let conflict = self.p.assign(lit).is_err();
            let result = if conflict || self.detected() {
                if ok {
                    Err(self.counterexample(Violation::FalseAlarm))
                } else {
                    // stays detected in the whole subtree, which is inextensible
                    self.visited += self.leaves_below(pos + 1);
                    Ok(())
                }
            } else if !ok {
                Err(self.counterexample(Violation::Missed))
            } else {
                self.dfs(pos + 1, &forced)
            };
            self.values[pos] = None;
            self.p.backtrack(mark);
            result?;
        }
        Ok(())
    }

    fn leaf(&self, forced: &BigInt) -> Result<(), Counterexample> {
        if !self.gac {
            return Ok(());
        }
        for (j, term) in self.c.terms().iter().enumerate() {
            if self.values[j].is_some() {
                continue;
            }
            for value in [true, false] {
                let extra = term.literal().value_under(value);
                if extra && forced + term.coefficient() > *self.c.bound() {
                    let implied = if value { !self.inputs[j] } else { self.inputs[j] };
                    if self.p.lit_value(implied) != Some(true) {
                        return Err(self.counterexample(Violation::NotPropagated(Literal::new(
                            term.var(),
                            !value,
                        ))));
                    }
                }
            }
        }
        Ok(())
    }
}

fn search(
    c: &PbConstraint,
    cnf: &ClauseSet,
    detection: Detection,
    gac: bool,
    limit: usize,
) -> Result<Verdict, VerifyError> {
    if c.len() > limit {
        return Err(VerifyError::TooManyVariables { vars: c.len(), limit });
    }
    let mut inputs = Vec::with_capacity(c.len());
    for v in c.variables() {
        if !cnf.is_input(v.id()) {
            return Err(VerifyError::NotAnInput { var: v });
        }
        inputs.push(Lit::pos(v.id()));
    }
    let p = Propagator::for_clause_set(cnf);
    let mut s = Search {
        c,
        inputs,
        detection,
        gac,
        values: vec![None; c.len()],
        visited: 0,
        p,
    };
    let empty_ok = !c.is_contradiction();
    if s.p.root_conflict().is_some() || s.detected() {
        return Ok(if empty_ok {
            Verdict::Violated(s.counterexample(Violation::FalseAlarm))
        } else {
            Verdict::Ok {
                assignments: s.leaves_below(0),
            }
        });
    }
    if !empty_ok {
        return Ok(Verdict::Violated(s.counterexample(Violation::Missed)));
    }
    Ok(match s.dfs(0, &BigInt::zero()) {
        Ok(()) => Verdict::Ok { assignments: s.visited },
        Err(cx) => Verdict::Violated(cx),
    })
}

/// Checks over all `3ⁿ` partial assignments of `c`'s variables that unit
/// propagation on `cnf` detects exactly the inextensible ones.
pub fn check_consistency(c: &PbConstraint, cnf: &ClauseSet, detection: Detection) -> Result<Verdict, VerifyError> {
    check_consistency_with_limit(c, cnf, detection, DEFAULT_ENUMERATION_LIMIT)
}

pub fn check_consistency_with_limit(
    c: &PbConstraint,
    cnf: &ClauseSet,
    detection: Detection,
    limit: usize,
) -> Result<Verdict, VerifyError> {
    search(c, cnf, detection, false, limit)
}

/// Checks consistency and, for every extensible partial assignment, that
/// unit propagation on `cnf` fixes each variable whose other value is
/// impossible. `cnf` must assert the constraint.
pub fn check_gac(c: &PbConstraint, cnf: &ClauseSet) -> Result<Verdict, VerifyError> {
    check_gac_with_limit(c, cnf, DEFAULT_ENUMERATION_LIMIT)
}

pub fn check_gac_with_limit(c: &PbConstraint, cnf: &ClauseSet, limit: usize) -> Result<Verdict, VerifyError> {
    search(c, cnf, Detection::Conflict, true, limit)
}

/// Whether two constraints over the same literals define the same function.
/// Both diagrams are built in one store in `c1`'s term order and compared by
/// root.
pub fn check_equivalent(c1: &PbConstraint, c2: &PbConstraint) -> Result<bool, VerifyError> {
    let order: Vec<Var> = c1.variables().collect();
    let c2 = c2.reordered(&order).ok_or(VerifyError::VariableMismatch)?;
    if c1.literals().ne(c2.literals()) {
        return Err(VerifyError::VariableMismatch);
    }
    let mut store = NodeStore::new(c1.len());
    let r1 = build_into(&mut store, c1)?.root;
    let r2 = build_into(&mut store, &c2)?.root;
    Ok(r1 == r2)
}

/// Decides whether no subset of `coefficients` sums to exactly `k`, by
/// comparing the diagrams of `Σ aᵢxᵢ ≤ k` and `Σ aᵢxᵢ ≤ k − 1`.
pub fn subset_sum_unsat(coefficients: &[BigInt], k: &BigInt) -> Result<bool, VerifyError> {
    let c = PbConstraint::from_coefficients(coefficients, k.clone());
    let below = PbConstraint::from_coefficients(coefficients, k - 1);
    check_equivalent(&c, &below)
}

/// Width of one level of a coefficient-decomposed diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelWidth {
    pub level: usize,
    pub power: u64,
    /// 1-based position of the original term the bit belongs to.
    pub origin: usize,
    pub width: usize,
    /// Exclusive upper bound on `width`: original term count plus `origin`.
    pub limit: usize,
}

impl LevelWidth {
    pub fn holds(&self) -> bool {
        self.width < self.limit
    }
}

fn check_decomposed(d: &Decomposition, bdd: &Robdd) -> Result<(), VerifyError> {
    for (j, a) in d.decomposed.coefficients().enumerate() {
        if a.is_zero() || (a & (a - BigInt::one())) != BigInt::zero() {
            return Err(VerifyError::NotPowerOfTwo {
                level: j + 1,
                coefficient: a.clone(),
            });
        }
    }
    if bdd.store.levels() as usize != d.bits.len() {
        return Err(VerifyError::VariableMismatch);
    }
    Ok(())
}

/// Per-level widths of the diagram of `d.decomposed`.
pub fn level_widths(d: &Decomposition, bdd: &Robdd) -> Result<Vec<LevelWidth>, VerifyError> {
    check_decomposed(d, bdd)?;
    let widths = bdd.store.level_widths(bdd.root());
    let n = d.original.len();
    Ok(d
        .bits
        .iter()
        .enumerate()
        .map(|(j, b)| LevelWidth {
            level: j + 1,
            power: b.power,
            origin: b.origin,
            width: widths.get(j).copied().unwrap_or(0),
            limit: n + b.origin,
        })
        .collect())
}

/// First level whose width is not below its limit, if any.
pub fn check_level_width(d: &Decomposition, bdd: &Robdd) -> Result<Option<LevelWidth>, VerifyError> {
    Ok(level_widths(d, bdd)?.into_iter().find(|w| !w.holds()))
}

/// A pair of same-level nodes whose interval lower bounds are closer than
/// the level's coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapViolation {
    pub level: usize,
    pub lower: BigInt,
    pub upper: BigInt,
}

/// Checks that on each level the sorted interval lower bounds are at least
/// `2^power` apart. Needs the intervals recorded by the build.
pub fn check_level_gaps(d: &Decomposition, bdd: &Robdd) -> Result<Option<GapViolation>, VerifyError> {
    check_decomposed(d, bdd)?;
    let mut by_level: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
    for id in bdd.store.reachable(bdd.root()) {
        let interval = &bdd.result.intervals[&id];
        let lo = match interval.lo() {
            Ext::Finite(b) => b.clone(),
            Ext::NegInf => continue,
            Ext::PosInf => unreachable!("decision node with empty interval"),
        };
        by_level.entry(bdd.store.level(id)).or_default().push(lo);
    }
    for (level, mut los) in by_level {
        los.sort();
        let step = BigInt::one() << d.bits[level as usize - 1].power;
        for w in los.windows(2) {
            if &w[1] - &w[0] < step {
                return Ok(Some(GapViolation {
                    level: level as usize,
                    lower: w[0].clone(),
                    upper: w[1].clone(),
                }));
            }
        }
    }
    Ok(None)
}
