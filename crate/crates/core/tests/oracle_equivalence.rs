mod common;

use common::{mismatches, random_queries, Bed};
use isq::benchgen::{generate_syn, QueryKind, SynConfig};
use isq::fixtures;
use proptest::prelude::*;

fn check(bed: &Bed, n: usize, seed: u64) {
    for kind in [QueryKind::Range, QueryKind::Knn, QueryKind::Spdq] {
        let qs = random_queries(bed, kind, n, seed);
        let bad = mismatches(bed, &qs);
        assert!(bad.is_empty(), "{} {} mismatches:\n{}", bad.len(), kind.name(), bad[..bad.len().min(10)].join("\n"));
    }
}

#[test]
fn fix_a_matches_oracle() {
    check(&Bed::new("FIX-A", fixtures::fix_a(), 6, 30.0, 1), 100, 11);
}

#[test]
fn fix_u_matches_oracle() {
    check(&Bed::new("FIX-U", fixtures::fix_u(), 6, 30.0, 2), 100, 12);
}

#[test]
fn grid_matches_oracle() {
    check(&Bed::new("grid5", fixtures::grid(5, 10.0), 20, 80.0, 3), 100, 13);
}

#[test]
fn two_floor_fixture_matches_oracle() {
    check(&Bed::new("two-floor", fixtures::two_floor_l(), 15, 90.0, 4), 100, 14);
}

#[test]
fn syn1_matches_oracle() {
    check(&Bed::new("SYN1", generate_syn(&SynConfig::new(1)), 200, 1200.0, 5), 100, 15);
}

#[test]
fn syn2_with_stairs_matches_oracle() {
    check(&Bed::new("SYN2", generate_syn(&SynConfig::new(2).with_seed(9)), 200, 1500.0, 6), 40, 16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_grids_match_oracle(n in 1usize..6, cell in 2.0f64..15.0, objs in 0usize..12, seed in any::<u64>()) {
        let bed = Bed::new("grid", fixtures::grid(n, cell), objs, cell * n as f64 * 2.5, seed);
        for kind in [QueryKind::Range, QueryKind::Knn, QueryKind::Spdq] {
            let bad = mismatches(&bed, &random_queries(&bed, kind, 8, seed ^ 7));
            prop_assert!(bad.is_empty(), "{}", bad.join("\n"));
        }
    }
}
