//! The precomputed door-to-door matrices of IDIndex on a 3x3 grid: distances,
//! distance-sorted door order, first-hop path unpacking and the binary dump.

use std::sync::Arc;

use isq::fixtures::grid;
use isq::idindex::IdIndex;
use isq::idmodel::IdModel;
use isq::metrics::Counters;
use isq::DoorId;

fn main() -> std::io::Result<()> {
    let space = Arc::new(grid(3, 10.0));
    let ix = IdIndex::build(IdModel::build(space.clone(), &[]));
    let n = ix.num_doors();
    for d in space.doors() {
        println!("{}: ({}, {})", d.id, d.location.x, d.location.y);
    }

    println!("\nM_d2d");
    print!("     ");
    for j in 0..n {
        print!("{:>6}", format!("d{j}"));
    }
    println!();
    for i in 0..n {
        print!("{:>5}", format!("d{i}"));
        for j in 0..n {
            print!("{:>6.1}", ix.d2d(DoorId(i as u32), DoorId(j as u32)));
        }
        println!();
    }

    let a = DoorId(0);
    let order: Vec<String> = ix.idx_row(a).iter().map(|&j| format!("d{j}")).collect();
    println!("\nM_idx row of {a}: {}", order.join(" "));

    let b = DoorId(n as u32 - 1);
    let mut c = Counters::default();
    let chain = ix.door_chain(a, b, &mut c).expect("grid is connected");
    println!("first-hop chain {a} -> {b}: {chain:?} ({} hops, distance {:.2})", c.path_hops, ix.d2d(a, b));

    let mut dump = Vec::new();
    ix.write_matrix_dump(&mut dump)?;
    println!("matrix dump: {} bytes (8 + 4N + 8N^2 = {})", dump.len(), 8 + 4 * n + 8 * n * n);
    Ok(())
}
