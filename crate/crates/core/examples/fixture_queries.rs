//! Range, kNN and shortest-path queries on the two-room fixture, answered by
//! every index and by the plain Dijkstra oracle.

use std::sync::Arc;

use isq::fixtures::{fix_a, fix_a_objects};
use isq::iptree::DEFAULT_GAMMA;
use isq::metrics::Counters;
use isq::oracle::DoorGraph;
use isq::{build_index, IndexKind, IndoorPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = Arc::new(fix_a());
    let objects = fix_a_objects(&space);
    let p = IndoorPoint::new(0, 2.0, 5.0);
    let q = IndoorPoint::new(0, 18.0, 8.0);

    let g = DoorGraph::new(&space);
    let (path, d) = g.spdq(&p, &q)?;
    println!("oracle: |p,q| = {d:.4} along {path}");
    println!("oracle: range(p, 12) = {:?}", g.range(&objects, &p, 12.0)?);

    for kind in IndexKind::ALL {
        let ix = build_index(kind, space.clone(), &objects, DEFAULT_GAMMA)?;
        let mut c = Counters::default();
        let r = ix.range(&p, 12.0, &mut c)?;
        let knn = ix.knn(&p, 2, &mut c)?;
        let mut c = Counters::default();
        let sp = ix.spdq(&p, &q, &mut c)?;
        println!(
            "{:>8}: range {:?}  2nn {:?}  spdq {:.4} via {:?}  nvd {}  {} bytes",
            kind.name(),
            r,
            knn.neighbors.iter().map(|(o, d)| format!("{o}@{d:.2}")).collect::<Vec<_>>(),
            sp.distance,
            sp.path.doors,
            c.nvd(),
            ix.structural_bytes()
        );
    }
    Ok(())
}
