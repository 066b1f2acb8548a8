//! Optimized statistics and diagnostics against the naive oracles on 1,000
//! random logs with forced collisions and repeats.

use std::time::Instant;

use splitaudit_testkit::conformance::oracle_equivalence;

#[test]
fn thousand_random_logs_match_oracles() {
    let started = Instant::now();
    let sides = oracle_equivalence(1000, 0x5eed);
    assert!(sides > 500, "too few non-degenerate splits: {sides}");
    assert!(started.elapsed().as_secs() < 60, "took {:?}", started.elapsed());
}
