//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pbdd::encode::cnf::ClauseSet;
use pbdd::pb::{Literal, PbConstraint, Term, Var};

pub fn v(i: u32) -> Var {
    Var::new(i).unwrap()
}

pub fn running() -> PbConstraint {
    PbConstraint::from_coefficients(&[2, 3, 5], 6)
}

/// Random constraint over `x1..xn` with random polarities and a bound
/// anywhere from slightly negative to slightly above the coefficient sum.
pub fn random_signed(seed: u64, n: u32, max_coeff: i64) -> PbConstraint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let terms: Vec<Term> = (1..=n)
        .map(|i| Term::new(rng.gen_range(1..=max_coeff), Literal::new(v(i), rng.gen_bool(0.5))).unwrap())
        .collect();
    let sum: i64 = terms.iter().map(|t| i64::try_from(t.coefficient()).unwrap()).sum();
    let k = rng.gen_range(-1..=sum + 1);
    PbConstraint::new(terms, k).unwrap()
}

pub fn all_assignments(n: u32) -> impl Iterator<Item = Vec<bool>> {
    (0u32..(1 << n)).map(move |m| (0..n).map(|j| m >> j & 1 == 1).collect())
}

pub fn dimacs(cnf: &ClauseSet) -> Vec<Vec<i32>> {
    cnf.clauses()
        .iter()
        .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
        .collect()
}

/// Plain DPLL: repeated clause scans for units, then branching.
pub fn satisfiable(clauses: &[Vec<i32>], num_vars: u32, fixed: &[(u32, bool)]) -> bool {
    let mut values = vec![0i8; num_vars as usize + 1];
    for &(var, b) in fixed {
        values[var as usize] = if b { 1 } else { -1 };
    }
    dpll(clauses, &mut values)
}

fn lit_value(values: &[i8], l: i32) -> i8 {
    let v = values[l.unsigned_abs() as usize];
    if l > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Vec<i32>], values: &mut Vec<i8>) -> bool {
    let saved = values.clone();
    loop {
        let mut changed = false;
        let mut branch = None;
        for clause in clauses {
            let mut open = Vec::new();
            let mut sat = false;
            for &l in clause {
                match lit_value(values, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => open.push(l),
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match open.as_slice() {
                [] => {
                    *values = saved;
                    return false;
                }
                [l] => {
                    values[l.unsigned_abs() as usize] = if *l > 0 { 1 } else { -1 };
                    changed = true;
                }
                [l, ..] => branch = branch.or(Some(*l)),
            }
        }
        if changed {
            continue;
        }
        let Some(l) = branch else { return true };
        for choice in [l, -l] {
            let mut next = values.clone();
            next[choice.unsigned_abs() as usize] = if choice > 0 { 1 } else { -1 };
            if dpll(clauses, &mut next) {
                *values = next;
                return true;
            }
        }
        *values = saved;
        return false;
    }
}

/// For every assignment of the `n` inputs, whether the CNF has a model
/// extending it.
pub fn projected_models(cnf: &ClauseSet, n: u32) -> Vec<bool> {
    let clauses = dimacs(cnf);
    all_assignments(n)
        .map(|a| {
            let fixed: Vec<(u32, bool)> = a.iter().enumerate().map(|(j, b)| (j as u32 + 1, *b)).collect();
            satisfiable(&clauses, cnf.num_vars(), &fixed)
        })
        .collect()
}

pub fn constraint_models(c: &PbConstraint, n: u32) -> Vec<bool> {
    all_assignments(n).map(|a| c.evaluate(&a).unwrap()).collect()
}

/// Size of the reduced diagram of `c` in term order, by expanding the full
/// decision tree and hashing `(level, low, high)` bottom-up.
pub fn naive_reduced_size(c: &PbConstraint) -> usize {
    fn walk(
        c: &PbConstraint,
        level: usize,
        partial: BigInt,
        unique: &mut HashMap<(usize, usize, usize), usize>,
    ) -> usize {
        if level == c.len() {
            return usize::from(partial <= *c.bound());
        }
        let t = &c.terms()[level];
        let low = walk(c, level + 1, partial.clone(), unique);
        let high = walk(c, level + 1, partial + t.coefficient(), unique);
        if low == high {
            return low;
        }
        let next = unique.len() + 2;
        *unique.entry((level, low, high)).or_insert(next)
    }
    // the high edge is taken when the literal is true, so the tree is over
    // literal values, not variable values
    let mut unique = HashMap::new();
    walk(c, 0, BigInt::from(0), &mut unique);
    unique.len()
}

type ClauseKey = BTreeSet<i32>;

/// Looks for a bijection of auxiliary variables (above `inputs`) that maps
/// `ours` onto `golden` as sets of clauses. Returns it as `(ours, golden)`
/// pairs.
pub fn renaming(ours: &[Vec<i32>], golden: &[Vec<i32>], inputs: u32) -> Option<Vec<(i32, i32)>> {
    let aux = |cs: &[Vec<i32>]| -> BTreeSet<i32> {
        cs.iter()
            .flatten()
            .map(|l| l.abs())
            .filter(|&v| v > inputs as i32)
            .collect()
    };
    let a: Vec<i32> = aux(ours).into_iter().collect();
    let g: Vec<i32> = aux(golden).into_iter().collect();
    if a.len() != g.len() || ours.len() != golden.len() {
        return None;
    }
    let target: BTreeSet<ClauseKey> = golden.iter().map(|c| c.iter().copied().collect()).collect();
    let mut perm: Vec<usize> = (0..g.len()).collect();
    let mut found = None;
    permute(&mut perm, 0, &mut |p| {
        let map: HashMap<i32, i32> = a.iter().zip(p).map(|(&x, &j)| (x, g[j])).collect();
        let rename = |l: i32| match map.get(&l.abs()) {
            Some(&y) => y * l.signum(),
            None => l,
        };
        let mapped: BTreeSet<ClauseKey> = ours.iter().map(|c| c.iter().map(|&l| rename(l)).collect()).collect();
        if mapped == target {
            found = Some(a.iter().zip(p).map(|(&x, &j)| (x, g[j])).collect());
            true
        } else {
            false
        }
    });
    found
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return visit(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permute(p, k + 1, visit) {
            return true;
        }
        p.swap(k, i);
    }
    false
}
