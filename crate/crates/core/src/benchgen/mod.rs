//! Synthetic building family, object placement, query workloads and dataset
//! statistics.

pub mod template;
mod workload;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::decompose_space;
use crate::geom::Point2;
use crate::space::{rect_ring, IndoorPoint, IndoorSpace, PartitionId, PartitionKind, SpaceBuilder};
use template::{RawDoor, RawFloor, MAX_DOORS, OUT, STAIR_LENGTH};

pub use workload::{generate_workload, place_objects, QueryKind, WorkloadError, WorkloadSpec};

/// Doors removed per floor by [`Variant::Minus`].
pub const MINUS_PER_FLOOR: usize = 48;
/// Doors added per floor by [`Variant::Plus`].
pub const PLUS_PER_FLOOR: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Default,
    Minus,
    Plus,
    NoDecomp,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Default, Variant::Minus, Variant::Plus, Variant::NoDecomp];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::Minus => "minus",
            Variant::Plus => "plus",
            Variant::NoDecomp => "nodecomp",
        }
    }

    /// Suffix used in dataset names: `SYN5-`, `SYN5+`, `SYN5_0`.
    pub fn suffix(self) -> &'static str {
        match self {
            Variant::Default => "",
            Variant::Minus => "-",
            Variant::Plus => "+",
            Variant::NoDecomp => "_0",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant {s:?} (expected default, minus, plus or nodecomp)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynConfig {
    pub floors: u32,
    pub variant: Variant,
    pub seed: u64,
}

impl SynConfig {
    pub fn new(floors: u32) -> Self {
        SynConfig { floors, variant: Variant::Default, seed: 0 }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dataset_name(&self) -> String {
        format!("SYN{}{}", self.floors, self.variant.suffix())
    }
}

fn floor_rng(seed: u64, floor: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (floor as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Builds SYN with `floors` copies of the template joined by four 20 m
/// staircases per floor pair. Staircases and their doors come on top of the
/// per-floor partition and door counts.
pub fn generate_syn(config: &SynConfig) -> IndoorSpace {
    assert!(config.floors >= 1, "SYN needs at least one floor");
    let mut b = SpaceBuilder::new();
    let stairs = template::stairs();
    let mut halls = Vec::new();
    let mut stair_ids = Vec::new();
    let mut floor_doors = Vec::new();
    for f in 0..config.floors {
        let mut raw = template::floor();
        let mut rng = floor_rng(config.seed, f);
        match config.variant {
            Variant::Minus => remove_doors(&mut raw, MINUS_PER_FLOOR, &mut rng),
            Variant::Plus => add_doors(&mut raw, PLUS_PER_FLOOR, &mut rng),
            _ => {}
        }
        let ids: Vec<PartitionId> = raw.parts.iter().map(|p| b.partition(f, p.kind, p.ring.clone())).collect();
        halls.push(ids[0]);
        if f + 1 < config.floors {
            let ids: Vec<PartitionId> = stairs.iter().map(|s| b.staircase(f, rect_ring(s.footprint), STAIR_LENGTH)).collect();
            stair_ids.push(ids);
        }
        floor_doors.push((raw.doors, ids));
    }
    for (f, (doors, ids)) in floor_doors.into_iter().enumerate() {
        let id = |i: usize| if i == OUT { PartitionId::OUTDOOR } else { ids[i] };
        for d in doors {
            b.two_way(IndoorPoint::new(f as u32, d.at.x, d.at.y), id(d.a), id(d.b));
        }
    }
    for (f, ids) in stair_ids.iter().enumerate() {
        let f = f as u32;
        for (s, &st) in stairs.iter().zip(ids) {
            b.two_way(IndoorPoint::new(f, s.lower.x, s.lower.y), halls[f as usize], st);
            b.two_way(IndoorPoint::new(f + 1, s.upper.x, s.upper.y), st, halls[f as usize + 1]);
        }
    }
    let space = b.build().expect("SYN template is valid");
    if config.variant == Variant::NoDecomp {
        space
    } else {
        decompose_space(&space).expect("SYN hallway decomposes")
    }
}

fn door_counts(f: &RawFloor) -> Vec<usize> {
    let mut n = vec![0; f.parts.len()];
    for d in &f.doors {
        for v in [d.a, d.b] {
            if v != OUT {
                n[v] += 1;
            }
        }
    }
    n
}

fn connected_without(f: &RawFloor, skip: usize) -> bool {
    let n = f.parts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut groups = n;
    for (i, d) in f.doors.iter().enumerate() {
        if i == skip || d.a == OUT || d.b == OUT {
            continue;
        }
        let (ra, rb) = (find(&mut parent, d.a), find(&mut parent, d.b));
        if ra != rb {
            parent[ra] = rb;
            groups -= 1;
        }
    }
    groups == 1
}

/// Removes `count` doors chosen uniformly among those whose removal keeps the
/// floor connected.
fn remove_doors(f: &mut RawFloor, count: usize, rng: &mut ChaCha8Rng) {
    for _ in 0..count {
        let candidates: Vec<usize> = (0..f.doors.len()).filter(|&i| connected_without(f, i)).collect();
        let &i = candidates.choose(rng).expect("a removable door remains");
        f.doors.remove(i);
    }
}

/// Adds `count` room-to-room doors at random points of shared walls, never
/// pushing a room past [`MAX_DOORS`] and keeping 1 m from existing doors.
fn add_doors(f: &mut RawFloor, count: usize, rng: &mut ChaCha8Rng) {
    let walls = template::shared_walls(f);
    let mut counts = door_counts(f);
    let mut added = 0;
    let mut attempts = 0;
    while added < count {
        attempts += 1;
        assert!(attempts < 100_000, "could not place {count} extra doors");
        let &(a, b, p, q) = walls.choose(rng).expect("template has shared walls");
        if counts[a] >= MAX_DOORS || counts[b] >= MAX_DOORS {
            continue;
        }
        let t: f64 = rng.gen_range(0.2..=0.8);
        let at = p.lerp(q, t);
        let at = Point2::new((at.x * 1000.0).round() / 1000.0, (at.y * 1000.0).round() / 1000.0);
        if f.doors.iter().any(|d| d.at.dist(at) < 1.0) {
            continue;
        }
        f.doors.push(RawDoor { at, a, b });
        counts[a] += 1;
        counts[b] += 1;
        added += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetStats {
    pub floors: u32,
    /// Doors not attached to a staircase.
    pub doors: usize,
    pub stair_doors: usize,
    /// Room and hallway partitions.
    pub partitions: usize,
    pub staircases: usize,
    pub hallways: usize,
    /// Partitions with more than `gamma` doors.
    pub crucial: usize,
    pub length: f64,
    pub width: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub max: usize,
}

fn median(s: &[f64]) -> f64 {
    let n = s.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Quartiles by the inclusive-median method: for odd counts the median
/// belongs to both halves.
pub fn quartiles(values: &[usize]) -> (f64, f64, f64) {
    let mut s: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let (lower, upper) = if n % 2 == 1 { (&s[..=n / 2], &s[n / 2..]) } else { (&s[..n / 2], &s[n / 2..]) };
    (median(lower), median(&s), median(upper))
}

pub fn dataset_stats(space: &IndoorSpace, gamma: usize) -> DatasetStats {
    let mut dv = Vec::new();
    let (mut hallways, mut staircases) = (0, 0);
    let mut bbox: Option<crate::geom::Rect> = None;
    for p in space.partitions().iter().skip(1) {
        match p.kind {
            PartitionKind::Staircase => staircases += 1,
            _ => {
                if p.kind == PartitionKind::Hallway {
                    hallways += 1;
                }
                dv.push(space.p2d(p.id).len());
                let m = p.mbr().expect("indoor partition has an MBR");
                bbox = Some(bbox.map_or(m, |b| b.union(&m)));
            }
        }
    }
    let touches_stair = |d: &crate::space::Door| {
        space.door_partitions(d.id).iter().any(|&v| space.partition(v).kind == PartitionKind::Staircase)
    };
    let stair_doors = space.doors().iter().filter(|d| touches_stair(d)).count();
    let (q1, q2, q3) = quartiles(&dv);
    let bbox = bbox.unwrap_or(crate::geom::Rect::new(0.0, 0.0, 0.0, 0.0));
    DatasetStats {
        floors: space.floors(),
        doors: space.num_doors() - stair_doors,
        stair_doors,
        partitions: dv.len(),
        staircases,
        hallways,
        crucial: dv.iter().filter(|&&n| n > gamma).count(),
        length: bbox.width(),
        width: bbox.height(),
        q1,
        q2,
        q3,
        max: dv.iter().copied().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn quartiles_inclusive() {
        assert_eq!(quartiles(&[1, 2, 3, 4, 5]), (2.0, 3.0, 4.0));
        assert_eq!(quartiles(&[1, 2, 3, 4]), (1.5, 2.5, 3.5));
        assert_eq!(quartiles(&[1, 1, 1]), (1.0, 1.0, 1.0));
    }

    #[test]
    fn fix_a_stats() {
        let s = dataset_stats(&fixtures::fix_a(), 6);
        assert_eq!((s.doors, s.partitions, s.max), (2, 2, 2));
        // A has two doors and B one; the median of {1, 2} is 1.5
        assert_eq!((s.q1, s.q2, s.q3), (1.0, 1.5, 2.0));
    }

    #[test]
    fn single_floor_counts() {
        let s = generate_syn(&SynConfig::new(1));
        let st = dataset_stats(&s, 6);
        assert_eq!(st.partitions, 141);
        assert_eq!(st.doors, 216);
        assert_eq!(st.hallways, 41);
        assert_eq!(st.staircases, 0);
    }

    #[test]
    fn variants_per_floor() {
        for (v, doors, parts) in [(Variant::Minus, 168, 141), (Variant::Plus, 256, 141), (Variant::NoDecomp, 176, 101)] {
            let s = generate_syn(&SynConfig::new(2).with_variant(v).with_seed(7));
            let st = dataset_stats(&s, 6);
            assert_eq!(st.doors, 2 * doors, "{v}");
            assert_eq!(st.partitions, 2 * parts, "{v}");
            assert_eq!(st.staircases, 4);
            assert_eq!(st.stair_doors, 8);
            assert_eq!(s.components().len(), 1);
        }
    }

    #[test]
    fn staircases_cost_twenty() {
        let s = generate_syn(&SynConfig::new(2));
        let st = s.partitions().iter().find(|p| p.kind == PartitionKind::Staircase).unwrap();
        let ds = s.p2d(st.id);
        assert_eq!(s.door_leg(st.id, ds[0], ds[1]), 20.0);
        assert!(s.euclidean_lower_bound_sound());
    }
}
