use pbdd::builder::{build_in_term_order, BuildOptions};
use pbdd::families::{bailleux_family, cardinality, hosaka_family};
use pbdd::robdd::BddError;
use pbdd::verify::check_equivalent;

#[test]
fn bailleux_equals_cardinality() {
    for (a, b, n) in [(127, 2, 6), (1023, 2, 8), (400, 4, 4)] {
        let c = bailleux_family(a, b, n).unwrap();
        assert!(check_equivalent(&c, &cardinality(n, n as i64 / 2 - 1)).unwrap(), "({a},{b},{n})");
    }
}

#[test]
fn hosaka_sizes_grow() {
    let mut last = 0;
    for n in 1..=3 {
        let c = hosaka_family(n).unwrap();
        let bdd = build_in_term_order(&c, BuildOptions::default()).unwrap();
        assert!(bdd.node_count() >= 1 << n);
        assert!(bdd.node_count() > last);
        last = bdd.node_count();
    }
}

/// Slow: either finishes above 2^4 nodes or hits the budget.
#[test]
#[ignore]
fn hosaka_four_under_budget() {
    let c = hosaka_family(4).unwrap();
    let opts = BuildOptions {
        trace: false,
        node_budget: Some(20_000_000),
    };
    match build_in_term_order(&c, opts) {
        Ok(bdd) => assert!(bdd.node_count() >= 16),
        Err(e) => assert_eq!(e, BddError::BudgetExceeded(20_000_000)),
    }
}
