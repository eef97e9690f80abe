//! Small hand-built spaces used by tests, examples and the acceptance suite.

use crate::geom::{Point2, Rect};
use crate::space::{IndoorObject, IndoorPoint, IndoorSpace, ObjectId, PartitionId, PartitionKind, SpaceBuilder};

fn fix_a_builder() -> (SpaceBuilder, PartitionId, PartitionId) {
    let mut b = SpaceBuilder::new();
    let a = b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
    let r = b.rect(0, PartitionKind::Room, Rect::new(10.0, 0.0, 20.0, 10.0));
    (b, a, r)
}

/// Two 10 m rooms side by side: d0 at (0,5) A↔v0, d1 at (10,5) A↔B.
pub fn fix_a() -> IndoorSpace {
    let (mut b, a, r) = fix_a_builder();
    b.two_way(IndoorPoint::new(0, 0.0, 5.0), a, PartitionId::OUTDOOR);
    b.two_way(IndoorPoint::new(0, 10.0, 5.0), a, r);
    b.build().expect("FIX-A is valid")
}

/// FIX-A with d1 one-way B→A and an extra door d2 at (20,5) B↔v0.
pub fn fix_u() -> IndoorSpace {
    let (mut b, a, r) = fix_a_builder();
    b.two_way(IndoorPoint::new(0, 0.0, 5.0), a, PartitionId::OUTDOOR);
    b.one_way(IndoorPoint::new(0, 10.0, 5.0), r, a);
    b.two_way(IndoorPoint::new(0, 20.0, 5.0), r, PartitionId::OUTDOOR);
    b.build().expect("FIX-U is valid")
}

/// o1 = (5,5) in A and o2 = (15,5) in B.
pub fn fix_a_objects(space: &IndoorSpace) -> Vec<IndoorObject> {
    [(5.0, 5.0), (15.0, 5.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            space
                .locate_object(ObjectId(i as u32), IndoorPoint::new(0, x, y))
                .expect("fixture object is locatable")
        })
        .collect()
}

/// `n`×`n` grid of `cell`-sized rooms, a door at the middle of every shared
/// wall and one outdoor door on the west side of room (0,0).
pub fn grid(n: usize, cell: f64) -> IndoorSpace {
    let mut b = SpaceBuilder::new();
    let mut ids = vec![vec![PartitionId::OUTDOOR; n]; n];
    for (row, ids_row) in ids.iter_mut().enumerate() {
        for (col, id) in ids_row.iter_mut().enumerate() {
            let (x, y) = (col as f64 * cell, row as f64 * cell);
            *id = b.rect(0, PartitionKind::Room, Rect::new(x, y, x + cell, y + cell));
        }
    }
    b.two_way(IndoorPoint::new(0, 0.0, cell / 2.0), ids[0][0], PartitionId::OUTDOOR);
    for row in 0..n {
        for col in 0..n {
            let (x, y) = (col as f64 * cell, row as f64 * cell);
            if col + 1 < n {
                b.two_way(IndoorPoint::new(0, x + cell, y + cell / 2.0), ids[row][col], ids[row][col + 1]);
            }
            if row + 1 < n {
                b.two_way(IndoorPoint::new(0, x + cell / 2.0, y + cell), ids[row][col], ids[row + 1][col]);
            }
        }
    }
    b.build().expect("grid fixture is valid")
}

/// A two-floor space with an L-shaped hallway on each floor, rooms off the
/// hallway, a one-way door and a staircase. Exercises concave geodesics and
/// floor changes on a small scale.
pub fn two_floor_l() -> IndoorSpace {
    let mut b = SpaceBuilder::new();
    let mut halls = Vec::new();
    for f in 0..2u32 {
        let hall = b.partition(
            f,
            PartitionKind::Hallway,
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(40.0, 0.0),
                Point2::new(40.0, 4.0),
                Point2::new(4.0, 4.0),
                Point2::new(4.0, 30.0),
                Point2::new(0.0, 30.0),
            ],
        );
        let r1 = b.rect(f, PartitionKind::Room, Rect::new(4.0, 4.0, 14.0, 14.0));
        let r2 = b.rect(f, PartitionKind::Room, Rect::new(14.0, 4.0, 26.0, 14.0));
        let r3 = b.rect(f, PartitionKind::Room, Rect::new(4.0, 14.0, 14.0, 30.0));
        b.two_way(IndoorPoint::new(f, 9.0, 4.0), hall, r1);
        b.two_way(IndoorPoint::new(f, 14.0, 9.0), r1, r2);
        b.one_way(IndoorPoint::new(f, 20.0, 4.0), r2, hall);
        b.two_way(IndoorPoint::new(f, 4.0, 22.0), hall, r3);
        b.two_way(IndoorPoint::new(f, 9.0, 14.0), r1, r3);
        if f == 0 {
            b.two_way(IndoorPoint::new(f, 0.0, 2.0), hall, PartitionId::OUTDOOR);
        }
        halls.push(hall);
    }
    let st = b.staircase(0, crate::space::rect_ring(Rect::new(40.0, 0.0, 48.0, 4.0)), 12.0);
    b.two_way(IndoorPoint::new(0, 40.0, 2.0), halls[0], st);
    b.two_way(IndoorPoint::new(1, 40.0, 2.0), st, halls[1]);
    b.build().expect("two-floor fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = grid(5, 10.0);
        assert_eq!(g.num_partitions(), 26);
        assert_eq!(g.num_doors(), 1 + 2 * 5 * 4);
    }

    #[test]
    fn two_floor_builds() {
        let s = two_floor_l();
        assert_eq!(s.floors(), 2);
        assert!(!s.is_convex(PartitionId(1)));
        assert_eq!(s.components().len(), 1);
    }
}
