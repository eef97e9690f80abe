//! IP-Tree against VIP-Tree on a two-floor building: tree shape, identical
//! answers, and how many matrix entries each reads per shortest-path query.

use std::sync::Arc;

use isq::benchgen::{dataset_stats, generate_syn, generate_workload, place_objects, QueryKind, SynConfig, WorkloadSpec};
use isq::format::Query;
use isq::iptree::{IpTree, TreeVariant, DEFAULT_GAMMA};
use isq::metrics::Counters;
use isq::IndoorIndex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = Arc::new(generate_syn(&SynConfig::new(2)));
    let objects = place_objects(&space, 300, 1);
    let st = dataset_stats(&space, DEFAULT_GAMMA);
    println!("SYN2: {} partitions, {} crucial at gamma {DEFAULT_GAMMA}", st.partitions, st.crucial);

    let ip = IpTree::build(space.clone(), &objects, DEFAULT_GAMMA, TreeVariant::Ip)?;
    let vip = IpTree::build(space.clone(), &objects, DEFAULT_GAMMA, TreeVariant::Vip)?;
    println!(
        "tree: {} leaves, {} nodes, height {}; {} bytes (IP) vs {} bytes (VIP)",
        ip.num_leaves(),
        ip.nodes().len(),
        ip.height(),
        ip.structural_bytes(),
        vip.structural_bytes()
    );
    let root = &ip.nodes()[ip.root()];
    println!("root has {} children and {} access-door keys", root.children.len(), root.keys().len());

    let mut spec = WorkloadSpec::new(QueryKind::Spdq, vec![800.0, 1500.0], 3);
    spec.per_value = 4;
    println!("\n   s2t  distance   IP reads  VIP reads  doors");
    for q in generate_workload(&space, &spec)? {
        let Query::Spdq { p, q: t, s2t, .. } = q else { unreachable!() };
        let (mut ci, mut cv) = (Counters::default(), Counters::default());
        let a = ip.spdq(&p, &t, &mut ci)?;
        let b = vip.spdq(&p, &t, &mut cv)?;
        assert!((a.distance - b.distance).abs() <= 1e-9 * a.distance);
        println!(
            "{s2t:>6} {:>9.2} {:>10} {:>10}  {}",
            a.distance,
            ci.matrix_pairs_read,
            cv.matrix_pairs_read,
            a.path.doors.len()
        );
    }
    Ok(())
}
