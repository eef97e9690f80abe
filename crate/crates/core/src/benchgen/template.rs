//! The per-floor SYN layout before hallway decomposition.
//!
//! A comb-shaped hallway: one east-west corridor with three branches going up
//! and three going down. Each branch is flanked by two columns of eight rooms;
//! four extra rooms fill the corridor ends. The hallway decomposes into 41
//! convex pieces (5 slices per branch, 11 corridor pieces).

use crate::geom::{Point2, Rect};
use crate::space::{rect_ring, PartitionKind};

pub const FLOOR_SIZE: f64 = 1368.0;
pub const STAIR_LENGTH: f64 = 20.0;
pub const MAX_DOORS: usize = 10;

const UP: [f64; 3] = [238.0, 602.0, 966.0];
const DOWN: [f64; 3] = [470.0, 834.0, 1198.0];
const WIDTH: f64 = 32.0;
const CORRIDOR: (f64, f64) = (668.0, 700.0);
const CORRIDOR_X: (f64, f64) = (38.0, 1330.0);
const TOP: f64 = 1300.0;
const BOTTOM: f64 = 68.0;
const ROWS: usize = 8;
const ROW: f64 = 75.0;
const DEPTH: f64 = 166.0;
const EAST_WALL: f64 = 1364.0;

/// Raw partition index standing for the outdoor partition.
pub const OUT: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct RawPart {
    pub kind: PartitionKind,
    pub ring: Vec<Point2>,
    pub rect: Option<Rect>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawDoor {
    pub at: Point2,
    pub a: usize,
    pub b: usize,
}

/// One floor. Part 0 is the hallway.
#[derive(Clone, Debug)]
pub struct RawFloor {
    pub parts: Vec<RawPart>,
    pub doors: Vec<RawDoor>,
}

/// A staircase between floor f (lower door) and f+1 (upper door).
pub struct RawStair {
    pub footprint: Rect,
    pub lower: Point2,
    pub upper: Point2,
}

struct Column {
    x0: f64,
    x1: f64,
    up: bool,
    hall_x: f64,
}

impl Column {
    fn row(&self, i: usize) -> Rect {
        let y0 = if self.up { CORRIDOR.1 + ROW * i as f64 } else { BOTTOM + ROW * i as f64 };
        Rect::new(self.x0, y0, self.x1, y0 + ROW)
    }

    fn cx(&self) -> f64 {
        (self.x0 + self.x1) / 2.0
    }

    /// Row touching the corridor.
    fn near(&self) -> usize {
        if self.up {
            0
        } else {
            ROWS - 1
        }
    }

    /// Row on the outer wall.
    fn far(&self) -> usize {
        ROWS - 1 - self.near()
    }
}

fn columns() -> Vec<Column> {
    let mut cols = Vec::new();
    for (branches, up) in [(UP, true), (DOWN, false)] {
        for b in branches {
            cols.push(Column { x0: b - DEPTH, x1: b, up, hall_x: b });
            cols.push(Column { x0: b + WIDTH, x1: (b + WIDTH + DEPTH).min(EAST_WALL), up, hall_x: b + WIDTH });
        }
    }
    cols
}

fn hallway_ring() -> Vec<Point2> {
    let (x0, x1) = CORRIDOR_X;
    let (y0, y1) = CORRIDOR;
    let mut ring = vec![Point2::new(x0, y0)];
    for d in DOWN {
        ring.extend([
            Point2::new(d, y0),
            Point2::new(d, BOTTOM),
            Point2::new(d + WIDTH, BOTTOM),
            Point2::new(d + WIDTH, y0),
        ]);
    }
    ring.extend([Point2::new(x1, y0), Point2::new(x1, y1)]);
    for u in UP.iter().rev() {
        ring.extend([
            Point2::new(u + WIDTH, y1),
            Point2::new(u + WIDTH, TOP),
            Point2::new(*u, TOP),
            Point2::new(*u, y1),
        ]);
    }
    ring.push(Point2::new(x0, y1));
    ring
}

/// Column index pairs whose rooms share a back wall.
const BACK_TO_BACK: [(usize, usize); 4] = [(1, 2), (3, 4), (7, 8), (9, 10)];

pub fn floor() -> RawFloor {
    let cols = columns();
    let mut parts = vec![RawPart { kind: PartitionKind::Hallway, ring: hallway_ring(), rect: None }];
    let room = |r: Rect, parts: &mut Vec<RawPart>| {
        parts.push(RawPart { kind: PartitionKind::Room, ring: rect_ring(r), rect: Some(r) });
        parts.len() - 1
    };
    let mut ids = vec![[0usize; ROWS]; cols.len()];
    for (c, col) in cols.iter().enumerate() {
        for (i, slot) in ids[c].iter_mut().enumerate() {
            *slot = room(col.row(i), &mut parts);
        }
    }
    let (cy0, cy1) = CORRIDOR;
    let e1 = room(Rect::new(1164.0, cy1, CORRIDOR_X.1, 800.0), &mut parts);
    let e2 = room(Rect::new(1164.0, 800.0, CORRIDOR_X.1, 900.0), &mut parts);
    let e3 = room(Rect::new(CORRIDOR_X.0, 568.0, 171.0, cy0), &mut parts);
    let e4 = room(Rect::new(171.0, 568.0, 304.0, cy0), &mut parts);

    let mut doors = Vec::new();
    let mut door = |x: f64, y: f64, a: usize, b: usize| doors.push(RawDoor { at: Point2::new(x, y), a, b });
    for (c, col) in cols.iter().enumerate() {
        for i in 0..ROWS {
            // keep the staircase slices light: these doors move one slice
            // towards the corridor
            let y = match (col.up, i, c) {
                (true, 6, _) => 1160.0,
                (false, 1, 6 | 7) => 200.0,
                _ => col.row(i).center().y,
            };
            door(col.hall_x, y, 0, ids[c][i]);
        }
    }
    // Second branch doors push eight hallway slices over the crucial
    // threshold; one slice of the middle up branch gets ten doors.
    let second: [(usize, &[usize]); 5] = [(0, &[1, 3]), (2, &[1, 2, 3]), (3, &[1, 2]), (4, &[1, 3]), (6, &[3, 5])];
    for (c, rows) in second {
        for &i in rows {
            door(cols[c].hall_x, cols[c].row(i).center().y + 25.0, 0, ids[c][i]);
        }
    }
    door(cols[0].cx(), cy1, 0, ids[0][cols[0].near()]);
    door(1247.0, cy1, 0, e1);
    door(1247.0, 800.0, e1, e2);
    door(104.5, cy0, 0, e3);
    door(237.5, cy0, 0, e4);
    let mid = (cy0 + cy1) / 2.0;
    door(CORRIDOR_X.0, mid, 0, OUT);
    door(CORRIDOR_X.1, mid, 0, OUT);
    for (c, col) in cols.iter().enumerate() {
        for i in [1, 3, 5] {
            door(col.cx(), col.row(i + 1).min_y, ids[c][i], ids[c][i + 1]);
        }
    }
    for (l, r) in BACK_TO_BACK {
        for i in [0, 2, 4, 6] {
            door(cols[l].x1, cols[l].row(i).center().y, ids[l][i], ids[r][i]);
        }
    }
    for (c, col) in cols.iter().enumerate() {
        if col.up {
            door(col.cx(), TOP, ids[c][col.far()], OUT);
        }
    }
    for c in [6, 11] {
        door(cols[c].cx(), BOTTOM, ids[c][cols[c].far()], OUT);
    }
    door(1247.0, 900.0, e2, OUT);
    door(EAST_WALL, cols[11].row(3).center().y, ids[11][3], OUT);
    RawFloor { parts, doors }
}

/// The four staircases joining consecutive floors: three at the top of the
/// up branches and one at the bottom of the first down branch.
pub fn stairs() -> Vec<RawStair> {
    let mut out: Vec<RawStair> = UP
        .iter()
        .map(|&u| RawStair {
            footprint: Rect::new(u + 6.0, TOP, u + 26.0, TOP + 10.0),
            lower: Point2::new(u + 6.0, TOP),
            upper: Point2::new(u + 26.0, TOP),
        })
        .collect();
    let d = DOWN[0];
    out.push(RawStair {
        footprint: Rect::new(d + 6.0, BOTTOM - 10.0, d + 26.0, BOTTOM),
        lower: Point2::new(d + 6.0, BOTTOM),
        upper: Point2::new(d + 26.0, BOTTOM),
    });
    out
}

/// Room pairs sharing a wall, with the shared segment.
pub fn shared_walls(f: &RawFloor) -> Vec<(usize, usize, Point2, Point2)> {
    let mut out = Vec::new();
    let rooms: Vec<(usize, Rect)> = f.parts.iter().enumerate().filter_map(|(i, p)| p.rect.map(|r| (i, r))).collect();
    for (i, &(a, ra)) in rooms.iter().enumerate() {
        for &(b, rb) in &rooms[i + 1..] {
            let seg = if ra.max_x == rb.min_x || rb.max_x == ra.min_x {
                let x = if ra.max_x == rb.min_x { ra.max_x } else { ra.min_x };
                let (lo, hi) = (ra.min_y.max(rb.min_y), ra.max_y.min(rb.max_y));
                (hi - lo > 1.0).then(|| (Point2::new(x, lo), Point2::new(x, hi)))
            } else if ra.max_y == rb.min_y || rb.max_y == ra.min_y {
                let y = if ra.max_y == rb.min_y { ra.max_y } else { ra.min_y };
                let (lo, hi) = (ra.min_x.max(rb.min_x), ra.max_x.min(rb.max_x));
                (hi - lo > 1.0).then(|| (Point2::new(lo, y), Point2::new(hi, y)))
            } else {
                None
            };
            if let Some((p, q)) = seg {
                out.push((a, b, p, q));
            }
        }
    }
    out
}
