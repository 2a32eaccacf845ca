mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use common::{all_assignments, naive_reduced_size, random_signed, running, v};
use pbdd::builder::{build, build_in_term_order, BuildOptions, Robdd};
use pbdd::interval::verify_intervals;
use pbdd::pb::{Literal, PbConstraint, Term};
use pbdd::robdd::NodeId;

fn built(c: &PbConstraint) -> Robdd {
    build_in_term_order(c, BuildOptions::default()).unwrap()
}

fn same_function(c: &PbConstraint, bdd: &Robdd) -> bool {
    let n = c.max_var();
    all_assignments(n).all(|a| bdd.store.eval(bdd.root(), &bdd.selectors, &a).unwrap() == c.evaluate(&a).unwrap())
}

/// `1 + Σ (2·gap − 1)` over the edges of the diagram, counting the entry
/// into the root from a virtual level 0.
fn call_bound(bdd: &Robdd) -> usize {
    let store = &bdd.store;
    let level = |id: NodeId| store.level(id) as usize;
    let mut bound = 1 + 2 * (level(bdd.root()) - 1);
    for id in store.reachable(bdd.root()) {
        let node = store.node(id).unwrap();
        for child in [node.low, node.high] {
            bound += 2 * (level(child) - level(id)) - 1;
        }
    }
    bound
}

fn flip_polarities(c: &PbConstraint) -> PbConstraint {
    let terms = c
        .terms()
        .iter()
        .map(|t| Term::new(t.coefficient().clone(), t.literal().negate()).unwrap())
        .collect();
    PbConstraint::new(terms, c.bound().clone()).unwrap()
}

#[test]
fn random_constraints_match_truth_table_and_naive_size() {
    for seed in 0..200 {
        let c = random_signed(seed, (seed % 10) as u32 + 1, 100);
        let bdd = built(&c);
        assert!(same_function(&c, &bdd), "seed {seed}: {c}");
        assert_eq!(bdd.node_count(), naive_reduced_size(&c), "seed {seed}: {c}");
        verify_intervals(&bdd.sums, &bdd.store, bdd.root(), &bdd.result.intervals)
            .unwrap_or_else(|m| panic!("seed {seed}: {c}: {m:?}"));
    }
}

#[test]
fn call_count_within_edge_bound() {
    for seed in 0..200 {
        let c = random_signed(seed, (seed % 10) as u32 + 1, 100);
        let bdd = built(&c);
        let bound = call_bound(&bdd);
        assert!(bdd.result.stats.calls <= bound, "seed {seed}: {} calls > {bound}", bdd.result.stats.calls);
    }
}

#[test]
fn running_example_trace() {
    let options = BuildOptions {
        trace: true,
        ..BuildOptions::default()
    };
    let bdd = build_in_term_order(&running(), options).unwrap();
    assert_eq!(bdd.result.trace.len(), 9);
    assert_eq!(bdd.result.stats.calls, 9);
    assert_eq!(bdd.result.stats.search_hits, 5);
    assert_eq!(bdd.result.stats.merges, 1);
    assert!(bdd.result.stats.calls <= call_bound(&bdd));
}

#[test]
fn flipping_every_polarity_keeps_the_shape() {
    for seed in 0..100 {
        let c = random_signed(seed, (seed % 8) as u32 + 1, 50);
        let flipped = flip_polarities(&c);
        let a = built(&c);
        let b = built(&flipped);
        assert!(a.store.isomorphic(a.root(), &b.store, b.root()), "seed {seed}");
        assert!(same_function(&flipped, &b));
    }
}

#[test]
fn negative_literal_matches_fresh_variable() {
    // 3·¬x1 + 2·x2 ≤ 3 against 3·y + 2·x2 ≤ 3 with y = ¬x1
    let neg = PbConstraint::new(
        vec![Term::new(3, v(1).neg()).unwrap(), Term::new(2, v(2).pos()).unwrap()],
        3,
    )
    .unwrap();
    let fresh = PbConstraint::from_coefficients(&[3, 2], 3);
    let bn = built(&neg);
    let bf = built(&fresh);
    assert!(bn.store.isomorphic(bn.root(), &bf.store, bf.root()));
    for a in all_assignments(2) {
        let swapped = vec![!a[0], a[1]];
        assert_eq!(neg.evaluate(&a).unwrap(), fresh.evaluate(&swapped).unwrap());
    }
}

#[test]
fn equivalent_bounds_give_identical_diagrams() {
    let six = built(&running());
    let five = built(&PbConstraint::from_coefficients(&[2, 3, 5], 5));
    assert!(six.store.isomorphic(six.root(), &five.store, five.root()));
    let seven = built(&PbConstraint::from_coefficients(&[2, 3, 5], 7));
    assert!(!six.store.isomorphic(six.root(), &seven.store, seven.root()));
}

#[test]
fn explicit_order() {
    let c = running();
    let reversed = [v(3), v(2), v(1)];
    let bdd = build(&c, &reversed).unwrap();
    assert_eq!(bdd.selectors, vec![v(3).pos(), v(2).pos(), v(1).pos()]);
    assert!(same_function(&c, &bdd));
    assert!(build(&c, &[v(1), v(2)]).is_err());
}

#[test]
fn trivial_constraints_are_terminals() {
    let taut = PbConstraint::from_coefficients(&[1, 2], 3);
    assert_eq!(built(&taut).root(), NodeId::TRUE);
    let contra = PbConstraint::from_coefficients(&[1, 2], -1);
    assert_eq!(built(&contra).root(), NodeId::FALSE);
}

#[test]
fn huge_coefficients() {
    let big: BigInt = BigInt::from(1u8) << 200u32;
    let terms = vec![
        Term::new(big.clone(), Literal::new(v(1), true)).unwrap(),
        Term::new(big.clone() + 1, Literal::new(v(2), true)).unwrap(),
    ];
    let c = PbConstraint::new(terms, big * 2).unwrap();
    let bdd = built(&c);
    assert!(same_function(&c, &bdd));
    assert_eq!(bdd.node_count(), 2);
}

proptest! {
    #[test]
    fn diagram_is_reduced_and_correct(seed in any::<u64>(), n in 1u32..=9) {
        let c = random_signed(seed, n, 40);
        let bdd = built(&c);
        prop_assert!(same_function(&c, &bdd));
        prop_assert_eq!(bdd.node_count(), naive_reduced_size(&c));
        prop_assert!(bdd.result.stats.calls <= call_bound(&bdd));
    }
}
