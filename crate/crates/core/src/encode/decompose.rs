use num_bigint::BigInt;
use num_traits::One;

use crate::pb::{Literal, PbConstraint, Term, Var};

/// One bit-variable `x_{i,r}` of a decomposed constraint: coefficient `2^power`
/// standing for the literal of the `origin`-th original term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitTerm {
    pub power: u64,
    /// 1-based position of the original term.
    pub origin: usize,
    pub literal: Literal,
}

/// A constraint rewritten with one power-of-two term per set bit of each
/// coefficient. The decomposed constraint is over fresh variables
/// `1..=bits.len()`, one per level.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub original: PbConstraint,
    pub decomposed: PbConstraint,
    pub bits: Vec<BitTerm>,
}

impl Decomposition {
    /// Original literal tested at each level of the decomposed diagram.
    pub fn selectors(&self) -> Vec<Literal> {
        self.bits.iter().map(|b| b.literal).collect()
    }

    /// `(power, origin)` per level.
    pub fn level_tags(&self) -> Vec<(u64, usize)> {
        self.bits.iter().map(|b| (b.power, b.origin)).collect()
    }
}

/// Splits every coefficient into its binary digits. Levels are sorted by
/// ascending power, ties by original position; the bound is unchanged.
pub fn decompose(c: &PbConstraint) -> Decomposition {
    let mut bits = Vec::new();
    for (r, term) in c.terms().iter().enumerate() {
        let a = term.coefficient();
        for i in 0..a.bits() {
            if a.bit(i) {
                bits.push(BitTerm {
                    power: i,
                    origin: r + 1,
                    literal: term.literal(),
                });
            }
        }
    }
    bits.sort_by_key(|b| (b.power, b.origin));
    let terms = bits
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let var = Var::new(j as u32 + 1).expect("positive id");
            Term::new(BigInt::one() << b.power, var.pos()).expect("positive power")
        })
        .collect();
    let decomposed = PbConstraint::new(terms, c.bound().clone()).expect("fresh variables are distinct");
    Decomposition {
        original: c.clone(),
        decomposed,
        bits,
    }
}
