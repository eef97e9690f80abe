//! Builds a floorplan by hand, decomposes its concave hallway, and round-trips
//! the space, objects and a workload through the text formats.

use isq::benchgen::{generate_workload, place_objects, QueryKind, WorkloadSpec};
use isq::decompose::decompose_space;
use isq::format::{read_objects, read_space, read_workload, space_to_string, write_objects, write_workload};
use isq::geom::{Point2, Rect};
use isq::{IndoorPoint, PartitionId, PartitionKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut b = isq::space::SpaceBuilder::new();
    let hall = b.partition(
        0,
        PartitionKind::Hallway,
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(30.0, 0.0),
            Point2::new(30.0, 3.0),
            Point2::new(3.0, 3.0),
            Point2::new(3.0, 20.0),
            Point2::new(0.0, 20.0),
        ],
    );
    let office = b.rect(0, PartitionKind::Room, Rect::new(3.0, 3.0, 15.0, 12.0));
    let lab = b.rect(0, PartitionKind::Room, Rect::new(15.0, 3.0, 30.0, 12.0));
    b.two_way(IndoorPoint::new(0, 0.0, 1.5), hall, PartitionId::OUTDOOR);
    b.two_way(IndoorPoint::new(0, 8.0, 3.0), hall, office);
    b.two_way(IndoorPoint::new(0, 15.0, 8.0), office, lab);
    b.one_way(IndoorPoint::new(0, 25.0, 3.0), lab, hall);
    let space = b.build()?;
    println!("hand-built: {} partitions, {} doors, hallway convex: {}", space.num_partitions(), space.num_doors(), space.is_convex(hall));

    let space = decompose_space(&space)?;
    println!("decomposed: {} partitions, {} doors", space.num_partitions(), space.num_doors());

    let text = space_to_string(&space);
    println!("\n{text}");
    let back = read_space(text.as_bytes())?;
    assert_eq!(space_to_string(&back), text);

    let objects = place_objects(&back, 5, 7);
    let mut buf = Vec::new();
    write_objects(&objects, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_objects(&back, buf.as_slice())?, objects);

    let mut spec = WorkloadSpec::new(QueryKind::Range, vec![10.0, 20.0], 8);
    spec.per_value = 2;
    let w = generate_workload(&back, &spec)?;
    let mut buf = Vec::new();
    write_workload(&w, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_workload(buf.as_slice())?, w);
    Ok(())
}
