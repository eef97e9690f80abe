mod common;

use std::sync::OnceLock;

use common::{points, Bed};
use isq::benchgen::{generate_syn, SynConfig};
use isq::metrics::Counters;
use isq::{fixtures, IndoorIndex, IndoorPoint, PartitionId};
use proptest::prelude::*;

struct World {
    indexes: Vec<Box<dyn IndoorIndex>>,
    pts: Vec<IndoorPoint>,
}

fn syn1() -> &'static World {
    static W: OnceLock<World> = OnceLock::new();
    W.get_or_init(|| {
        let bed = Bed::new("SYN1", generate_syn(&SynConfig::new(1)), 300, 1200.0, 21);
        let indexes = bed.indexes();
        let pts = points(&bed.space, 64, 22);
        World { indexes, pts }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn range_results_nest_in_r(i in 0usize..64, r1 in 0.0f64..1500.0, r2 in 0.0f64..1500.0) {
        let w = syn1();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for ix in &w.indexes {
            let small = ix.range(&w.pts[i], lo, &mut Counters::default()).unwrap();
            let big = ix.range(&w.pts[i], hi, &mut Counters::default()).unwrap();
            prop_assert!(small.iter().all(|o| big.binary_search(o).is_ok()), "{}: r={lo} not inside r={hi}", ix.kind());
        }
    }

    #[test]
    fn knn_is_prefix_consistent_in_k(i in 0usize..64, k1 in 1usize..60, k2 in 1usize..60) {
        let w = syn1();
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        for ix in &w.indexes {
            let a = ix.knn(&w.pts[i], lo, &mut Counters::default()).unwrap();
            let b = ix.knn(&w.pts[i], hi, &mut Counters::default()).unwrap();
            prop_assert_eq!(a.neighbors.len(), lo);
            prop_assert!(a.neighbors.windows(2).all(|p| p[0].1 <= p[1].1));
            for (x, y) in a.neighbors.iter().zip(&b.neighbors) {
                prop_assert!(common::dist_close(x.1, y.1), "{}: k={lo} vs k={hi}: {} vs {}", ix.kind(), x.1, y.1);
            }
        }
    }

    /// FIX-U: B reaches A through the one-way door, A never reaches B.
    #[test]
    fn directed_asymmetry_on_fix_u(ax in 0.5f64..9.5, ay in 0.5f64..9.5, bx in 10.5f64..19.5, by in 0.5f64..9.5) {
        let bed = Bed::new("FIX-U", fixtures::fix_u(), 0, 1.0, 0);
        let a = IndoorPoint::new(0, ax, ay);
        let b = IndoorPoint::new(0, bx, by);
        let objects = vec![
            bed.space.locate_object(isq::ObjectId(0), a).unwrap(),
            bed.space.locate_object(isq::ObjectId(1), b).unwrap(),
        ];
        let bed = Bed { objects, ..bed };
        let forward = (b.x - 10.0).hypot(b.y - 5.0) + (a.x - 10.0).hypot(a.y - 5.0);
        for ix in bed.indexes() {
            let c = &mut Counters::default();
            let ba = ix.spdq(&b, &a, c).unwrap();
            prop_assert!(common::dist_close(ba.distance, forward), "{}: {} vs {forward}", ix.kind(), ba.distance);
            prop_assert_eq!(ba.path.legs.first(), Some(&PartitionId(2)));
            let ab = ix.spdq(&a, &b, c).unwrap();
            prop_assert!(ab.distance.is_infinite(), "{}: A reached B at {}", ix.kind(), ab.distance);
            prop_assert!(ab.path.is_empty());
            // seen from A only o0 exists, seen from B both do
            prop_assert_eq!(ix.range(&a, 1e6, c).unwrap(), vec![isq::ObjectId(0)]);
            prop_assert_eq!(ix.range(&b, 1e6, c).unwrap().len(), 2);
            let knn = ix.knn(&a, 2, c).unwrap();
            prop_assert!(knn.shortfall && knn.neighbors.len() == 1);
        }
    }
}
