//! Pseudo-Boolean constraint types and normalization to the `Σ aᵢ·ℓᵢ ≤ K`
//! form with positive coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbError {
    #[error("variable ids start at 1")]
    ZeroVariable,
    #[error("coefficient {0} of {1} is not positive")]
    NonPositiveCoefficient(BigInt, Literal),
    #[error("variable x{0} occurs in more than one term")]
    DuplicateVariable(u32),
    #[error("assignment does not define x{0}")]
    MissingVariable(u32),
}

/// An input variable. Ids are positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Result<Var, PbError> {
        if id == 0 {
            Err(PbError::ZeroVariable)
        } else {
            Ok(Var(id))
        }
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Zero-based index, convenient for dense tables.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn neg(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Var,
    positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Literal {
        Literal { var, positive }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Literal {
        Literal::new(self.var, !self.positive)
    }

    /// Truth value of the literal when its variable takes `value`.
    pub fn value_under(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

/// Read access to variable values. Slices are indexed by `Var::index`.
pub trait Valuation {
    fn value(&self, var: Var) -> Option<bool>;
}

impl Valuation for [bool] {
    fn value(&self, var: Var) -> Option<bool> {
        self.get(var.index()).copied()
    }
}

impl Valuation for Vec<bool> {
    fn value(&self, var: Var) -> Option<bool> {
        self.as_slice().value(var)
    }
}

impl Valuation for [Option<bool>] {
    fn value(&self, var: Var) -> Option<bool> {
        self.get(var.index()).copied().flatten()
    }
}

impl Valuation for Vec<Option<bool>> {
    fn value(&self, var: Var) -> Option<bool> {
        self.as_slice().value(var)
    }
}

impl Valuation for BTreeMap<Var, bool> {
    fn value(&self, var: Var) -> Option<bool> {
        self.get(&var).copied()
    }
}

impl Valuation for HashMap<Var, bool> {
    fn value(&self, var: Var) -> Option<bool> {
        self.get(&var).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    coefficient: BigInt,
    literal: Literal,
}

impl Term {
    pub fn new(coefficient: impl Into<BigInt>, literal: Literal) -> Result<Term, PbError> {
        let coefficient = coefficient.into();
        if !coefficient.is_positive() {
            return Err(PbError::NonPositiveCoefficient(coefficient, literal));
        }
        Ok(Term {
            coefficient,
            literal,
        })
    }

    pub fn coefficient(&self) -> &BigInt {
        &self.coefficient
    }

    pub fn literal(&self) -> Literal {
        self.literal
    }

    pub fn var(&self) -> Var {
        self.literal.var
    }
}

/// A normalized constraint `Σ aᵢ·ℓᵢ ≤ K` with `aᵢ ≥ 1` and at most one term
/// per variable. The term order is the default variable order of its BDD.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PbConstraint {
    terms: Vec<Term>,
    bound: BigInt,
}

impl PbConstraint {
    pub fn new(terms: Vec<Term>, bound: impl Into<BigInt>) -> Result<PbConstraint, PbError> {
        let mut seen = std::collections::HashSet::new();
        for t in &terms {
            if !seen.insert(t.var()) {
                return Err(PbError::DuplicateVariable(t.var().id()));
            }
        }
        Ok(PbConstraint {
            terms,
            bound: bound.into(),
        })
    }

    /// Builds `Σ coeffs[j]·x_{j+1} ≤ bound` over positive literals.
    ///
    /// Panics on a non-positive coefficient; meant for literals in code and tests.
    pub fn from_coefficients<C: Into<BigInt> + Clone>(coeffs: &[C], bound: impl Into<BigInt>) -> PbConstraint {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| {
                Term::new(a.clone(), Var(j as u32 + 1).pos()).expect("coefficients must be positive")
            })
            .collect();
        PbConstraint::new(terms, bound).expect("distinct variables")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.terms.iter().map(|t| &t.coefficient)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.terms.iter().map(|t| t.literal)
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|t| t.var())
    }

    pub fn max_var(&self) -> u32 {
        self.variables().map(Var::id).max().unwrap_or(0)
    }

    pub fn coefficient_sum(&self) -> BigInt {
        self.coefficients().sum()
    }

    /// `K ≥ Σ aᵢ`: every assignment satisfies the constraint.
    pub fn is_tautology(&self) -> bool {
        self.bound >= self.coefficient_sum()
    }

    /// `K < 0`: no assignment satisfies the constraint.
    pub fn is_contradiction(&self) -> bool {
        self.bound.is_negative()
    }

    /// Sum of the coefficients of the literals that are true under `valuation`.
    pub fn lhs(&self, valuation: &(impl Valuation + ?Sized)) -> Result<BigInt, PbError> {
        let mut sum = BigInt::zero();
        for t in &self.terms {
            let value = valuation
                .value(t.var())
                .ok_or(PbError::MissingVariable(t.var().id()))?;
            if t.literal.value_under(value) {
                sum += &t.coefficient;
            }
        }
        Ok(sum)
    }

    pub fn evaluate(&self, valuation: &(impl Valuation + ?Sized)) -> Result<bool, PbError> {
        Ok(self.lhs(valuation)? <= self.bound)
    }

    /// Reorders the terms to follow `order`, which must be a permutation of
    /// this constraint's variables.
    pub fn reordered(&self, order: &[Var]) -> Option<PbConstraint> {
        if order.len() != self.terms.len() {
            return None;
        }
        let mut terms = Vec::with_capacity(order.len());
        for v in order {
            terms.push(self.terms.iter().find(|t| t.var() == *v)?.clone());
        }
        PbConstraint::new(terms, self.bound.clone()).ok()
    }

    /// The constraint with `literal` fixed to true: its term is removed and its
    /// coefficient is subtracted from the bound.
    pub fn with_literal_true(&self, literal: Literal) -> Option<PbConstraint> {
        let pos = self.terms.iter().position(|t| t.literal == literal)?;
        let mut terms = self.terms.clone();
        let removed = terms.remove(pos);
        Some(PbConstraint {
            terms,
            bound: &self.bound - removed.coefficient,
        })
    }

    /// Signed-coefficient form, using `a·x̄ = a − a·x` for negative literals.
    pub fn to_raw(&self) -> RawConstraint {
        let mut bound = self.bound.clone();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.literal.positive {
                    (t.coefficient.clone(), t.var())
                } else {
                    bound -= &t.coefficient;
                    (-t.coefficient.clone(), t.var())
                }
            })
            .collect();
        RawConstraint {
            terms,
            comparator: Comparator::Le,
            bound,
        }
    }
}

impl fmt::Display for PbConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, t) in self.terms.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", t.coefficient, t.literal)?;
        }
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "=",
        }
    }
}

/// A linear constraint as written in the input: signed integer coefficients
/// over variables, any comparator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawConstraint {
    pub terms: Vec<(BigInt, Var)>,
    pub comparator: Comparator,
    pub bound: BigInt,
}

impl RawConstraint {
    pub fn new(terms: Vec<(BigInt, Var)>, comparator: Comparator, bound: impl Into<BigInt>) -> RawConstraint {
        RawConstraint {
            terms,
            comparator,
            bound: bound.into(),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|(_, v)| *v)
    }

    pub fn evaluate(&self, valuation: &(impl Valuation + ?Sized)) -> Result<bool, PbError> {
        let mut sum = BigInt::zero();
        for (a, v) in &self.terms {
            if valuation.value(*v).ok_or(PbError::MissingVariable(v.id()))? {
                sum += a;
            }
        }
        Ok(self.comparator.holds(&sum, &self.bound))
    }
}

/// Rewrites any raw constraint into one `≤` constraint (two for `=`) with
/// positive coefficients. The conjunction of the results has exactly the
/// models of `raw`.
pub fn normalize(raw: &RawConstraint) -> Vec<PbConstraint> {
    // Merge repeated variables, keeping first-appearance order.
    let mut merged: Vec<(BigInt, Var)> = Vec::new();
    let mut slot: HashMap<Var, usize> = HashMap::new();
    for (a, v) in &raw.terms {
        match slot.get(v) {
            Some(&j) => merged[j].0 += a,
            None => {
                slot.insert(*v, merged.len());
                merged.push((a.clone(), *v));
            }
        }
    }
    merged.retain(|(a, _)| !a.is_zero());

    let one = BigInt::one();
    let sides: Vec<(bool, BigInt)> = match raw.comparator {
        Comparator::Le => vec![(false, raw.bound.clone())],
        Comparator::Lt => vec![(false, &raw.bound - &one)],
        Comparator::Ge => vec![(true, -raw.bound.clone())],
        Comparator::Gt => vec![(true, -raw.bound.clone() - &one)],
        Comparator::Eq => vec![(false, raw.bound.clone()), (true, -raw.bound.clone())],
    };

    sides
        .into_iter()
        .map(|(flip, mut bound)| {
            let terms = merged
                .iter()
                .map(|(a, v)| {
                    let a = if flip { -a.clone() } else { a.clone() };
                    if a.is_positive() {
                        Term {
                            coefficient: a,
                            literal: v.pos(),
                        }
                    } else {
                        // -a·x = a·x̄ - a
                        let a = -a;
                        bound += &a;
                        Term {
                            coefficient: a,
                            literal: v.neg(),
                        }
                    }
                })
                .collect();
            PbConstraint { terms, bound }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(id: u32) -> Var {
        Var::new(id).unwrap()
    }

    fn raw(terms: &[(i64, u32)], cmp: Comparator, bound: i64) -> RawConstraint {
        RawConstraint::new(
            terms.iter().map(|&(a, x)| (BigInt::from(a), v(x))).collect(),
            cmp,
            bound,
        )
    }

    fn bits(mask: u32, n: usize) -> Vec<bool> {
        (0..n).map(|j| mask >> j & 1 == 1).collect()
    }

    #[test]
    fn running_constraint_is_already_normal() {
        let c = normalize(&raw(&[(2, 1), (3, 2), (5, 3)], Comparator::Le, 6));
        assert_eq!(c, vec![PbConstraint::from_coefficients(&[2, 3, 5], 6)]);
    }

    #[test]
    fn equality_splits_into_two() {
        let c = normalize(&raw(&[(1, 1), (1, 2)], Comparator::Eq, 1));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], PbConstraint::from_coefficients(&[1, 1], 1));
        let negated = PbConstraint::new(
            vec![Term::new(1, v(1).neg()).unwrap(), Term::new(1, v(2).neg()).unwrap()],
            1,
        )
        .unwrap();
        assert_eq!(c[1], negated);
    }

    #[test]
    fn negative_coefficient_becomes_negated_literal() {
        // 3x1 - 2x2 >= 1  ~>  3~x1 + 2x2 <= 2
        let c = normalize(&raw(&[(3, 1), (-2, 2)], Comparator::Ge, 1));
        let expected = PbConstraint::new(
            vec![Term::new(3, v(1).neg()).unwrap(), Term::new(2, v(2).pos()).unwrap()],
            2,
        )
        .unwrap();
        assert_eq!(c, vec![expected]);
        let r = raw(&[(3, 1), (-2, 2)], Comparator::Ge, 1);
        for mask in 0..4 {
            let a = bits(mask, 2);
            assert_eq!(r.evaluate(&a).unwrap(), c[0].evaluate(&a).unwrap());
        }
    }

    #[test]
    fn zero_and_duplicate_terms() {
        let c = normalize(&raw(&[(0, 1), (2, 2), (-2, 2), (4, 3), (-1, 3)], Comparator::Lt, 5));
        let expected = PbConstraint::new(vec![Term::new(3, v(3).pos()).unwrap()], 4).unwrap();
        assert_eq!(c, vec![expected]);
    }

    #[test]
    fn evaluate_examples() {
        let c = PbConstraint::from_coefficients(&[2, 3, 5], 6);
        assert!(c.evaluate(&vec![true, true, false]).unwrap());
        assert!(!c.evaluate(&vec![true, false, true]).unwrap());
        assert!(c.evaluate(&vec![false, false, false]).unwrap());
        let mut partial = BTreeMap::new();
        partial.insert(v(1), true);
        assert_eq!(c.evaluate(&partial), Err(PbError::MissingVariable(2)));
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(Var::new(0).is_err());
        assert!(Term::new(0, v(1).pos()).is_err());
        assert!(Term::new(-3, v(1).pos()).is_err());
        let t = Term::new(1, v(1).pos()).unwrap();
        let u = Term::new(2, v(1).neg()).unwrap();
        assert_eq!(PbConstraint::new(vec![t, u], 1), Err(PbError::DuplicateVariable(1)));
    }

    fn arb_raw() -> impl Strategy<Value = RawConstraint> {
        let cmp = prop_oneof![
            Just(Comparator::Lt),
            Just(Comparator::Le),
            Just(Comparator::Gt),
            Just(Comparator::Ge),
            Just(Comparator::Eq),
        ];
        (
            prop::collection::vec((-20i64..=20, 1u32..=8), 0..10),
            cmp,
            -40i64..=40,
        )
            .prop_map(|(terms, cmp, k)| raw(&terms, cmp, k))
    }

    proptest! {
        #[test]
        fn normalization_preserves_models(r in arb_raw()) {
            let normal = normalize(&r);
            prop_assert_eq!(normal.len(), if r.comparator == Comparator::Eq { 2 } else { 1 });
            for c in &normal {
                prop_assert!(c.terms().iter().all(|t| t.coefficient().is_positive()));
            }
            for mask in 0..(1u32 << 8) {
                let a = bits(mask, 8);
                let expected = r.evaluate(&a).unwrap();
                let got = normal.iter().all(|c| c.evaluate(&a).unwrap());
                prop_assert_eq!(expected, got);
            }
        }

        #[test]
        fn normalization_is_idempotent(r in arb_raw()) {
            for c in normalize(&r) {
                prop_assert_eq!(normalize(&c.to_raw()), vec![c.clone()]);
            }
        }

        #[test]
        fn normalized_constraints_are_monotone(r in arb_raw(), mask in 0u32..256) {
            for c in normalize(&r) {
                let a = bits(mask, 8);
                if !c.evaluate(&a).unwrap() {
                    continue;
                }
                for t in c.terms() {
                    // make the literal false
                    let mut b = a.clone();
                    b[t.var().index()] = !t.literal().is_positive();
                    prop_assert!(c.evaluate(&b).unwrap());
                }
            }
        }
    }
}
