//! Floorplan data model: partitions, doors, derived topology mappings and
//! intra-partition distances.

use std::fmt;

use crate::error::SpaceError;
use crate::geom::{self, Containment, Geodesic, Point2, Rect, BOUNDARY_EPS};

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(PartitionId, "v");
id_type!(DoorId, "d");
id_type!(ObjectId, "o");

impl PartitionId {
    pub const OUTDOOR: PartitionId = PartitionId(0);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndoorPoint {
    pub floor: u32,
    pub x: f64,
    pub y: f64,
}

impl IndoorPoint {
    pub const fn new(floor: u32, x: f64, y: f64) -> Self {
        IndoorPoint { floor, x, y }
    }

    pub fn xy(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Planar distance ignoring floors. A lower bound on the indoor distance
    /// whenever every staircase is at least as long as its horizontal run.
    pub fn planar_dist(&self, other: &IndoorPoint) -> f64 {
        self.xy().dist(other.xy())
    }
}

impl fmt::Display for IndoorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, floor {})", self.x, self.y, self.floor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    Room,
    Hallway,
    Staircase,
    Outdoor,
}

impl PartitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionKind::Room => "room",
            PartitionKind::Hallway => "hallway",
            PartitionKind::Staircase => "staircase",
            PartitionKind::Outdoor => "outdoor",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "room" => Some(PartitionKind::Room),
            "hallway" => Some(PartitionKind::Hallway),
            "staircase" => Some(PartitionKind::Staircase),
            "outdoor" => Some(PartitionKind::Outdoor),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub id: PartitionId,
    pub floor: u32,
    pub kind: PartitionKind,
    /// Counter-clockwise ring; empty for the outdoor partition.
    pub boundary: Vec<Point2>,
    pub traversal_length: Option<f64>,
}

impl Partition {
    pub fn outdoor() -> Self {
        Partition {
            id: PartitionId::OUTDOOR,
            floor: 0,
            kind: PartitionKind::Outdoor,
            boundary: Vec::new(),
            traversal_length: None,
        }
    }

    pub fn is_outdoor(&self) -> bool {
        self.kind == PartitionKind::Outdoor
    }

    pub fn mbr(&self) -> Option<Rect> {
        Rect::bounding(&self.boundary)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Door {
    pub id: DoorId,
    pub location: IndoorPoint,
    /// Ordered (from, to) pairs.
    pub transitions: Vec<(PartitionId, PartitionId)>,
}

impl Door {
    pub fn bidirectional(id: DoorId, location: IndoorPoint, a: PartitionId, b: PartitionId) -> Self {
        Door { id, location, transitions: vec![(a, b), (b, a)] }
    }

    pub fn one_way(id: DoorId, location: IndoorPoint, from: PartitionId, to: PartitionId) -> Self {
        Door { id, location, transitions: vec![(from, to)] }
    }

    pub fn is_bidirectional(&self) -> bool {
        self.transitions.iter().all(|&(a, b)| self.transitions.contains(&(b, a)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndoorObject {
    pub id: ObjectId,
    pub location: IndoorPoint,
    pub host: PartitionId,
}

/// Selector for [`IndoorSpace::topology_lookup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topo {
    /// Partitions enterable through a door.
    D2PEnter,
    /// Partitions leaveable through a door.
    D2PLeave,
    /// (from, to) pairs of a door.
    D2P,
    /// Doors through which a partition can be entered.
    P2DEnter,
    /// Doors through which a partition can be left.
    P2DLeave,
    /// All doors of a partition.
    P2D,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopoValue {
    Partitions(Vec<PartitionId>),
    Doors(Vec<DoorId>),
    Pairs(Vec<(PartitionId, PartitionId)>),
}

#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Outdoor,
    Convex,
    Concave { geo: Geodesic, anchors: Vec<(DoorId, Vec<(usize, f64)>)> },
    Stair { lower: IndoorPoint, upper: IndoorPoint, length: f64 },
}

#[derive(Clone, Debug, Default)]
struct DoorTopo {
    enter: Vec<PartitionId>,
    leave: Vec<PartitionId>,
    pairs: Vec<(PartitionId, PartitionId)>,
}

#[derive(Clone, Debug, Default)]
struct PartTopo {
    enter: Vec<DoorId>,
    leave: Vec<DoorId>,
    all: Vec<DoorId>,
}

/// Immutable indoor space with materialized topology.
#[derive(Clone, Debug)]
pub struct IndoorSpace {
    partitions: Vec<Partition>,
    doors: Vec<Door>,
    shapes: Vec<Shape>,
    mbrs: Vec<Option<Rect>>,
    door_topo: Vec<DoorTopo>,
    part_topo: Vec<PartTopo>,
    floors: u32,
    /// Per floor: locatable partitions in ascending id order.
    by_floor: Vec<Vec<PartitionId>>,
}

impl IndoorSpace {
    /// Validates and indexes a space. `partitions[0]` must be the outdoor
    /// partition and ids must be dense.
    pub fn new(mut partitions: Vec<Partition>, mut doors: Vec<Door>) -> Result<Self, SpaceError> {
        if partitions.iter().all(|p| p.is_outdoor()) {
            return Err(SpaceError::NoPartitions);
        }
        for (i, p) in partitions.iter().enumerate() {
            if p.id.index() != i {
                return Err(SpaceError::NonContiguousPartitionId { position: i, found: p.id.0 });
            }
            if p.is_outdoor() != (i == 0) {
                return Err(SpaceError::Outdoor(p.id));
            }
        }
        for (i, d) in doors.iter().enumerate() {
            if d.id.index() != i {
                return Err(SpaceError::NonContiguousDoorId { position: i, found: d.id.0 });
            }
        }

        for p in partitions.iter_mut().skip(1) {
            if p.boundary.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
                return Err(SpaceError::NonFinite(format!("partition {}", p.id)));
            }
            let ring = geom::normalize_ring(&p.boundary);
            if ring.len() < 3 || geom::area(&ring) <= 1e-12 {
                return Err(SpaceError::DegeneratePolygon(p.id));
            }
            if !geom::is_simple(&ring) {
                return Err(SpaceError::NotSimple(p.id));
            }
            p.boundary = ring;
            match (p.kind, p.traversal_length) {
                (PartitionKind::Staircase, Some(l)) if l > 0.0 && l.is_finite() => {}
                (PartitionKind::Staircase, _) => {
                    return Err(SpaceError::Staircase {
                        partition: p.id,
                        reason: "traversal_length must be positive".into(),
                    })
                }
                (_, Some(_)) => p.traversal_length = None,
                _ => {}
            }
        }

        let np = partitions.len();
        let mut door_topo = vec![DoorTopo::default(); doors.len()];
        let mut part_topo = vec![PartTopo::default(); np];
        for d in doors.iter_mut() {
            if !d.location.x.is_finite() || !d.location.y.is_finite() {
                return Err(SpaceError::NonFinite(format!("door {}", d.id)));
            }
            if d.transitions.is_empty() {
                return Err(SpaceError::NoTransitions(d.id));
            }
            d.transitions.sort();
            d.transitions.dedup();
            for &(a, b) in &d.transitions {
                for v in [a, b] {
                    if v.index() >= np {
                        return Err(SpaceError::DanglingPartition { door: d.id, partition: v.0 });
                    }
                }
                if a == b {
                    return Err(SpaceError::SelfTransition(d.id));
                }
            }
            let t = &mut door_topo[d.id.index()];
            t.pairs = d.transitions.clone();
            for &(a, b) in &d.transitions {
                t.leave.push(a);
                t.enter.push(b);
            }
            t.leave.sort();
            t.leave.dedup();
            t.enter.sort();
            t.enter.dedup();
            for &v in &t.leave {
                part_topo[v.index()].leave.push(d.id);
            }
            for &v in &t.enter {
                part_topo[v.index()].enter.push(d.id);
            }
        }
        for t in part_topo.iter_mut() {
            t.enter.sort();
            t.enter.dedup();
            t.leave.sort();
            t.leave.dedup();
            t.all = t.enter.iter().chain(t.leave.iter()).copied().collect();
            t.all.sort();
            t.all.dedup();
        }

        // Door placement on partition boundaries.
        for d in &doors {
            let parts = door_parts(&door_topo[d.id.index()]);
            for v in parts {
                let p = &partitions[v.index()];
                if p.is_outdoor() {
                    continue;
                }
                let floor_ok = match p.kind {
                    PartitionKind::Staircase => d.location.floor == p.floor || d.location.floor == p.floor + 1,
                    _ => d.location.floor == p.floor,
                };
                if !floor_ok || geom::classify_point(&p.boundary, d.location.xy()) != Containment::Boundary {
                    return Err(SpaceError::DoorOffBoundary { door: d.id, partition: v });
                }
            }
        }

        let mut shapes = Vec::with_capacity(np);
        for p in &partitions {
            let shape = match p.kind {
                PartitionKind::Outdoor => Shape::Outdoor,
                PartitionKind::Staircase => {
                    let ds = &part_topo[p.id.index()].all;
                    let err = |reason: &str| SpaceError::Staircase { partition: p.id, reason: reason.into() };
                    if ds.len() != 2 {
                        return Err(err("must have exactly two doors"));
                    }
                    let (a, b) = (doors[ds[0].index()].location, doors[ds[1].index()].location);
                    let (lower, upper) = if a.floor <= b.floor { (a, b) } else { (b, a) };
                    if upper.floor != lower.floor + 1 || lower.floor != p.floor {
                        return Err(err("doors must be on its floor and the floor above"));
                    }
                    Shape::Stair { lower, upper, length: p.traversal_length.unwrap_or(0.0) }
                }
                _ => {
                    if geom::reflex_vertices(&p.boundary).is_empty() {
                        Shape::Convex
                    } else {
                        let geo = Geodesic::new(&p.boundary);
                        let anchors = part_topo[p.id.index()]
                            .all
                            .iter()
                            .map(|&d| (d, geo.anchor(doors[d.index()].location.xy())))
                            .collect();
                        Shape::Concave { geo, anchors }
                    }
                }
            };
            shapes.push(shape);
        }

        let mbrs: Vec<Option<Rect>> = partitions.iter().map(|p| p.mbr()).collect();
        let floors = partitions
            .iter()
            .skip(1)
            .map(|p| p.floor + 1)
            .chain(doors.iter().map(|d| d.location.floor + 1))
            .max()
            .unwrap_or(1);
        let mut by_floor = vec![Vec::new(); floors as usize];
        for p in partitions.iter().skip(1) {
            by_floor[p.floor as usize].push(p.id);
        }

        check_overlaps(&partitions, &mbrs, &by_floor)?;

        Ok(IndoorSpace { partitions, doors, shapes, mbrs, door_topo, part_topo, floors, by_floor })
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn doors(&self) -> &[Door] {
        &self.doors
    }

    pub fn partition(&self, v: PartitionId) -> &Partition {
        &self.partitions[v.index()]
    }

    pub fn door(&self, d: DoorId) -> &Door {
        &self.doors[d.index()]
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn num_doors(&self) -> usize {
        self.doors.len()
    }

    pub fn floors(&self) -> u32 {
        self.floors
    }

    pub fn mbr(&self, v: PartitionId) -> Option<Rect> {
        self.mbrs[v.index()]
    }

    pub fn is_convex(&self, v: PartitionId) -> bool {
        matches!(self.shapes[v.index()], Shape::Convex)
    }

    pub fn partitions_on_floor(&self, floor: u32) -> &[PartitionId] {
        self.by_floor.get(floor as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn d2p_enter(&self, d: DoorId) -> &[PartitionId] {
        &self.door_topo[d.index()].enter
    }

    pub fn d2p_leave(&self, d: DoorId) -> &[PartitionId] {
        &self.door_topo[d.index()].leave
    }

    pub fn d2p(&self, d: DoorId) -> &[(PartitionId, PartitionId)] {
        &self.door_topo[d.index()].pairs
    }

    pub fn p2d_enter(&self, v: PartitionId) -> &[DoorId] {
        &self.part_topo[v.index()].enter
    }

    pub fn p2d_leave(&self, v: PartitionId) -> &[DoorId] {
        &self.part_topo[v.index()].leave
    }

    pub fn p2d(&self, v: PartitionId) -> &[DoorId] {
        &self.part_topo[v.index()].all
    }

    /// Partitions a door touches, ascending.
    pub fn door_partitions(&self, d: DoorId) -> Vec<PartitionId> {
        door_parts(&self.door_topo[d.index()])
    }

    pub fn topology_lookup(&self, sel: Topo, key: u32) -> Result<TopoValue, SpaceError> {
        let door = || {
            if (key as usize) < self.doors.len() {
                Ok(DoorId(key))
            } else {
                Err(SpaceError::UnknownDoor(key))
            }
        };
        let part = || {
            if (key as usize) < self.partitions.len() {
                Ok(PartitionId(key))
            } else {
                Err(SpaceError::UnknownPartition(key))
            }
        };
        Ok(match sel {
            Topo::D2PEnter => TopoValue::Partitions(self.d2p_enter(door()?).to_vec()),
            Topo::D2PLeave => TopoValue::Partitions(self.d2p_leave(door()?).to_vec()),
            Topo::D2P => TopoValue::Pairs(self.d2p(door()?).to_vec()),
            Topo::P2DEnter => TopoValue::Doors(self.p2d_enter(part()?).to_vec()),
            Topo::P2DLeave => TopoValue::Doors(self.p2d_leave(part()?).to_vec()),
            Topo::P2D => TopoValue::Doors(self.p2d(part()?).to_vec()),
        })
    }

    /// Whether `d` lets one move from `from` into `to`.
    pub fn permits(&self, d: DoorId, from: PartitionId, to: PartitionId) -> bool {
        self.door_topo[d.index()].pairs.binary_search(&(from, to)).is_ok()
    }

    pub fn contains(&self, v: PartitionId, p: &IndoorPoint) -> bool {
        let part = &self.partitions[v.index()];
        match part.kind {
            PartitionKind::Outdoor => false,
            PartitionKind::Staircase => {
                if let Shape::Stair { lower, upper, .. } = &self.shapes[v.index()] {
                    if (p.floor == upper.floor && p.xy().near(upper.xy(), BOUNDARY_EPS))
                        || (p.floor == lower.floor && p.xy().near(lower.xy(), BOUNDARY_EPS))
                    {
                        return true;
                    }
                }
                p.floor == part.floor && geom::classify_point(&part.boundary, p.xy()) != Containment::Outside
            }
            _ => p.floor == part.floor && geom::classify_point(&part.boundary, p.xy()) != Containment::Outside,
        }
    }

    /// Lowest-id partition containing `p` (sequential scan), or `None` when the
    /// point is outdoors or off the map.
    pub fn host_partition(&self, p: &IndoorPoint) -> Option<PartitionId> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return None;
        }
        let xy = p.xy();
        self.partitions_on_floor(p.floor).iter().copied().find(|&v| {
            self.mbrs[v.index()].is_some_and(|r| r.contains(xy, BOUNDARY_EPS))
                && geom::classify_point(&self.partitions[v.index()].boundary, xy) != Containment::Outside
        })
    }

    /// Distance between two points of partition `v`, validated.
    pub fn intra_partition_distance(&self, v: PartitionId, a: &IndoorPoint, b: &IndoorPoint) -> Result<f64, SpaceError> {
        if v.index() >= self.partitions.len() {
            return Err(SpaceError::UnknownPartition(v.0));
        }
        for x in [a, b] {
            if !self.contains(v, x) {
                return Err(SpaceError::PointOutside(*x, v));
            }
        }
        Ok(self.leg(v, a, b))
    }

    /// Unchecked intra-partition distance used on hot paths. Callers guarantee
    /// both points lie in `v`.
    pub fn leg(&self, v: PartitionId, a: &IndoorPoint, b: &IndoorPoint) -> f64 {
        match &self.shapes[v.index()] {
            Shape::Outdoor => {
                if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Shape::Convex => a.xy().dist(b.xy()),
            Shape::Concave { geo, .. } => geo.distance(a.xy(), b.xy()),
            Shape::Stair { lower, upper, length } => {
                (stair_param(lower, upper, a) - stair_param(lower, upper, b)).abs() * length
            }
        }
    }

    /// `leg(v, door a, door b)` with cached visibility; bitwise equal to the
    /// point form.
    pub fn door_leg(&self, v: PartitionId, a: DoorId, b: DoorId) -> f64 {
        match &self.shapes[v.index()] {
            Shape::Concave { geo, anchors } => {
                let (la, lb) = (self.doors[a.index()].location.xy(), self.doors[b.index()].location.xy());
                geo.distance_with(la, find_anchor(anchors, a), lb, find_anchor(anchors, b))
            }
            _ => self.leg(v, &self.doors[a.index()].location, &self.doors[b.index()].location),
        }
    }

    /// `leg(v, door, p)` with the door side cached.
    pub fn door_point_leg(&self, v: PartitionId, d: DoorId, p: &IndoorPoint) -> f64 {
        match &self.shapes[v.index()] {
            Shape::Concave { geo, anchors } => {
                geo.distance_with(self.doors[d.index()].location.xy(), find_anchor(anchors, d), p.xy(), None)
            }
            _ => self.leg(v, &self.doors[d.index()].location, p),
        }
    }

    /// `leg(v, p, door)` with the door side cached.
    pub fn point_door_leg(&self, v: PartitionId, p: &IndoorPoint, d: DoorId) -> f64 {
        match &self.shapes[v.index()] {
            Shape::Concave { geo, anchors } => {
                geo.distance_with(p.xy(), None, self.doors[d.index()].location.xy(), find_anchor(anchors, d))
            }
            _ => self.leg(v, p, &self.doors[d.index()].location),
        }
    }

    /// Longest distance reachable inside `v` from door `d`; infinite unless `v`
    /// can be entered through `d`.
    pub fn max_reach(&self, d: DoorId, v: PartitionId) -> f64 {
        if !self.d2p_enter(d).contains(&v) {
            return f64::INFINITY;
        }
        let loc = self.doors[d.index()].location;
        match &self.shapes[v.index()] {
            Shape::Outdoor => f64::INFINITY,
            Shape::Convex => self.partitions[v.index()]
                .boundary
                .iter()
                .map(|c| loc.xy().dist(*c))
                .fold(0.0, f64::max),
            Shape::Concave { geo, anchors } => {
                let a = find_anchor(anchors, d);
                geo.vertices()
                    .iter()
                    .map(|c| geo.distance_with(loc.xy(), a, *c, None))
                    .fold(0.0, f64::max)
            }
            Shape::Stair { lower, upper, length } => {
                let t = stair_param(lower, upper, &loc);
                t.max(1.0 - t) * length
            }
        }
    }

    /// Whether planar Euclidean distance lower-bounds indoor distance across
    /// floors: every staircase must be at least as long as its horizontal run.
    pub fn euclidean_lower_bound_sound(&self) -> bool {
        self.shapes.iter().all(|s| match s {
            Shape::Stair { lower, upper, length } => *length + 1e-9 >= lower.planar_dist(upper),
            _ => true,
        })
    }

    /// Locatable, non-staircase partitions (object hosts).
    pub fn object_hosts(&self) -> impl Iterator<Item = &Partition> {
        self.partitions
            .iter()
            .filter(|p| matches!(p.kind, PartitionKind::Room | PartitionKind::Hallway))
    }

    /// Number of doors with at least one one-way transition.
    pub fn unidirectional_doors(&self) -> usize {
        self.doors.iter().filter(|d| !d.is_bidirectional()).count()
    }

    /// Places an object, resolving its host by `host_partition`.
    pub fn locate_object(&self, id: ObjectId, location: IndoorPoint) -> Option<IndoorObject> {
        self.host_partition(&location).map(|host| IndoorObject { id, location, host })
    }

    /// Weakly connected components over partitions (ignoring v0 and door
    /// directions), each ascending; components are ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<PartitionId>> {
        let np = self.partitions.len();
        let mut comp = vec![usize::MAX; np];
        let mut out = Vec::new();
        for s in 1..np {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = vec![PartitionId(s as u32)];
            comp[s] = c;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &d in self.p2d(v) {
                    for w in self.door_partitions(d) {
                        if w != PartitionId::OUTDOOR && comp[w.index()] == usize::MAX {
                            comp[w.index()] = c;
                            members.push(w);
                        }
                    }
                }
            }
            members.sort();
            out.push(members);
        }
        out
    }
}

fn find_anchor(anchors: &[(DoorId, Vec<(usize, f64)>)], d: DoorId) -> Option<&[(usize, f64)]> {
    anchors
        .binary_search_by_key(&d, |e| e.0)
        .ok()
        .map(|i| anchors[i].1.as_slice())
}

fn door_parts(t: &DoorTopo) -> Vec<PartitionId> {
    let mut v: Vec<PartitionId> = t.enter.iter().chain(t.leave.iter()).copied().collect();
    v.sort();
    v.dedup();
    v
}

/// Position of `x` along a staircase, 0 at the lower door and 1 at the upper.
fn stair_param(lower: &IndoorPoint, upper: &IndoorPoint, x: &IndoorPoint) -> f64 {
    if x.floor == upper.floor && x.xy().near(upper.xy(), BOUNDARY_EPS) {
        return 1.0;
    }
    if x.floor == lower.floor && x.xy().near(lower.xy(), BOUNDARY_EPS) {
        return 0.0;
    }
    let axis = upper.xy().sub(lower.xy());
    let len2 = axis.dot(axis);
    if len2 < 1e-12 {
        return if x.floor > lower.floor { 1.0 } else { 0.0 };
    }
    (x.xy().sub(lower.xy()).dot(axis) / len2).clamp(0.0, 1.0)
}

fn check_overlaps(partitions: &[Partition], mbrs: &[Option<Rect>], by_floor: &[Vec<PartitionId>]) -> Result<(), SpaceError> {
    for ids in by_floor {
        let mut sorted: Vec<(f64, PartitionId)> = ids
            .iter()
            .map(|&v| (mbrs[v.index()].map_or(0.0, |r| r.min_x), v))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for i in 0..sorted.len() {
            let a = sorted[i].1;
            let ra = mbrs[a.index()].expect("indoor partition has an MBR");
            for &(min_x, b) in &sorted[i + 1..] {
                if min_x >= ra.max_x - 1e-9 {
                    break;
                }
                let rb = mbrs[b.index()].expect("indoor partition has an MBR");
                if !ra.overlaps_interior(&rb, 1e-9) {
                    continue;
                }
                if polygons_overlap(&partitions[a.index()].boundary, &partitions[b.index()].boundary) {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    return Err(SpaceError::Overlap(lo, hi));
                }
            }
        }
    }
    Ok(())
}

fn polygons_overlap(a: &[Point2], b: &[Point2]) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        for j in 0..nb {
            if geom::segments_cross(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                return true;
            }
        }
    }
    let inside = |poly: &[Point2], p: Point2| geom::classify_point(poly, p) == Containment::Inside;
    if a.iter().any(|&p| inside(b, p)) || b.iter().any(|&p| inside(a, p)) {
        return true;
    }
    // Edge midpoints catch coincident-vertex overlaps; centroids catch equal rings.
    let mid = |poly: &[Point2], i: usize| poly[i].lerp(poly[(i + 1) % poly.len()], 0.5);
    if (0..na).any(|i| inside(b, mid(a, i))) || (0..nb).any(|j| inside(a, mid(b, j))) {
        return true;
    }
    let (ca, cb) = (geom::centroid(a), geom::centroid(b));
    (inside(a, ca) && inside(b, ca)) || (inside(a, cb) && inside(b, cb))
}

/// A route `source → doors → target`. `legs[i]` is the partition traversed
/// before `doors[i]`; the final leg ends at the target.
#[derive(Clone, Debug, PartialEq)]
pub struct IndoorPath {
    pub source: IndoorPoint,
    pub doors: Vec<DoorId>,
    pub legs: Vec<PartitionId>,
    pub target: IndoorPoint,
    pub length: f64,
}

impl IndoorPath {
    /// Builds a path and sums its legs left to right.
    pub fn from_legs(
        space: &IndoorSpace,
        source: IndoorPoint,
        doors: Vec<DoorId>,
        legs: Vec<PartitionId>,
        target: IndoorPoint,
    ) -> Self {
        debug_assert_eq!(legs.len(), doors.len() + 1);
        let mut length = 0.0;
        let mut at = source;
        for (i, &v) in legs.iter().enumerate() {
            let next = if i < doors.len() { space.door(doors[i]).location } else { target };
            length += space.leg(v, &at, &next);
            at = next;
        }
        IndoorPath { source, doors, legs, target, length }
    }

    /// Like [`IndoorPath::from_legs`], but first drops doors that lead from a
    /// partition back into the same partition (merging the two legs).
    pub fn from_legs_simplified(
        space: &IndoorSpace,
        source: IndoorPoint,
        doors: Vec<DoorId>,
        legs: Vec<PartitionId>,
        target: IndoorPoint,
    ) -> Self {
        let mut d2 = Vec::with_capacity(doors.len());
        let mut l2 = Vec::with_capacity(legs.len());
        l2.push(legs[0]);
        for (i, &d) in doors.iter().enumerate() {
            if legs[i + 1] == *l2.last().unwrap() {
                continue;
            }
            d2.push(d);
            l2.push(legs[i + 1]);
        }
        Self::from_legs(space, source, d2, l2, target)
    }

    pub fn unreachable(source: IndoorPoint, target: IndoorPoint) -> Self {
        IndoorPath { source, doors: Vec::new(), legs: Vec::new(), target, length: f64::INFINITY }
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    /// Checks containment of every leg endpoint and door permissions.
    pub fn validate(&self, space: &IndoorSpace) -> Result<(), String> {
        if self.is_empty() {
            return if self.length.is_infinite() { Ok(()) } else { Err("empty path with finite length".into()) };
        }
        if self.legs.len() != self.doors.len() + 1 {
            return Err("legs must be one more than doors".into());
        }
        if !space.contains(self.legs[0], &self.source) {
            return Err(format!("source not in {}", self.legs[0]));
        }
        if !space.contains(*self.legs.last().unwrap(), &self.target) {
            return Err("target not in final leg".into());
        }
        for (i, &d) in self.doors.iter().enumerate() {
            if !space.permits(d, self.legs[i], self.legs[i + 1]) {
                return Err(format!("door {d} does not lead {} -> {}", self.legs[i], self.legs[i + 1]));
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndoorPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "<unreachable>");
        }
        write!(f, "<p")?;
        for d in &self.doors {
            write!(f, ", {d}")?;
        }
        write!(f, ", q> {:.3} m", self.length)
    }
}

/// Incremental builder that assigns dense ids and inserts the outdoor partition.
#[derive(Clone, Debug)]
pub struct SpaceBuilder {
    partitions: Vec<Partition>,
    doors: Vec<Door>,
}

impl Default for SpaceBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SpaceBuilder {
    pub fn new() -> Self {
        SpaceBuilder { partitions: vec![Partition::outdoor()], doors: Vec::new() }
    }

    pub fn partition(&mut self, floor: u32, kind: PartitionKind, boundary: Vec<Point2>) -> PartitionId {
        let id = PartitionId(self.partitions.len() as u32);
        self.partitions.push(Partition { id, floor, kind, boundary, traversal_length: None });
        id
    }

    pub fn rect(&mut self, floor: u32, kind: PartitionKind, r: Rect) -> PartitionId {
        self.partition(floor, kind, rect_ring(r))
    }

    pub fn staircase(&mut self, floor: u32, boundary: Vec<Point2>, length: f64) -> PartitionId {
        let id = self.partition(floor, PartitionKind::Staircase, boundary);
        self.partitions[id.index()].traversal_length = Some(length);
        id
    }

    pub fn door(&mut self, location: IndoorPoint, transitions: Vec<(PartitionId, PartitionId)>) -> DoorId {
        let id = DoorId(self.doors.len() as u32);
        self.doors.push(Door { id, location, transitions });
        id
    }

    pub fn two_way(&mut self, location: IndoorPoint, a: PartitionId, b: PartitionId) -> DoorId {
        self.door(location, vec![(a, b), (b, a)])
    }

    pub fn one_way(&mut self, location: IndoorPoint, from: PartitionId, to: PartitionId) -> DoorId {
        self.door(location, vec![(from, to)])
    }

    pub fn num_doors(&self) -> usize {
        self.doors.len()
    }

    pub fn build(self) -> Result<IndoorSpace, SpaceError> {
        IndoorSpace::new(self.partitions, self.doors)
    }

    pub fn into_parts(self) -> (Vec<Partition>, Vec<Door>) {
        (self.partitions, self.doors)
    }
}

pub fn rect_ring(r: Rect) -> Vec<Point2> {
    vec![
        Point2::new(r.min_x, r.min_y),
        Point2::new(r.max_x, r.min_y),
        Point2::new(r.max_x, r.max_y),
        Point2::new(r.min_x, r.max_y),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fix_a_topology() {
        let s = fixtures::fix_a();
        let (a, b) = (PartitionId(1), PartitionId(2));
        assert_eq!(s.num_partitions(), 3);
        assert_eq!(s.num_doors(), 2);
        assert_eq!(s.p2d(a), &[DoorId(0), DoorId(1)]);
        assert_eq!(s.d2p_enter(DoorId(1)), &[a, b]);
        assert_eq!(s.d2p_leave(DoorId(1)), &[a, b]);
        assert_eq!(
            s.topology_lookup(Topo::P2D, 1).unwrap(),
            TopoValue::Doors(vec![DoorId(0), DoorId(1)])
        );
        assert_eq!(s.topology_lookup(Topo::D2P, 9), Err(SpaceError::UnknownDoor(9)));
    }

    #[test]
    fn host_partition_tie_break() {
        let s = fixtures::fix_a();
        assert_eq!(s.host_partition(&IndoorPoint::new(0, 5.0, 5.0)), Some(PartitionId(1)));
        assert_eq!(s.host_partition(&IndoorPoint::new(0, 10.0, 5.0)), Some(PartitionId(1)));
        assert_eq!(s.host_partition(&IndoorPoint::new(0, 15.0, 5.0)), Some(PartitionId(2)));
        assert_eq!(s.host_partition(&IndoorPoint::new(0, -50.0, -50.0)), None);
        assert_eq!(s.host_partition(&IndoorPoint::new(1, 5.0, 5.0)), None);
    }

    #[test]
    fn intra_distances() {
        let s = fixtures::fix_a();
        let a = PartitionId(1);
        let d = s.intra_partition_distance(a, &IndoorPoint::new(0, 2.0, 5.0), &IndoorPoint::new(0, 10.0, 5.0));
        assert_eq!(d, Ok(8.0));
        assert!(s
            .intra_partition_distance(a, &IndoorPoint::new(0, 2.0, 5.0), &IndoorPoint::new(0, 15.0, 5.0))
            .is_err());
    }

    #[test]
    fn max_reach_fix_a() {
        let s = fixtures::fix_a();
        assert!((s.max_reach(DoorId(1), PartitionId(1)) - 125f64.sqrt()).abs() < 1e-12);
        let u = fixtures::fix_u();
        // d1 is B→A only; B cannot be entered through it
        assert_eq!(u.max_reach(DoorId(1), PartitionId(2)), f64::INFINITY);
    }

    #[test]
    fn corner_door_reach_is_diagonal() {
        let mut b = SpaceBuilder::new();
        let v = b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 1.0, 1.0));
        b.two_way(IndoorPoint::new(0, 0.0, 0.0), v, PartitionId::OUTDOOR);
        let s = b.build().unwrap();
        assert!((s.max_reach(DoorId(0), v) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_door_off_boundary() {
        let mut b = SpaceBuilder::new();
        let v = b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        b.two_way(IndoorPoint::new(0, 0.5, 5.0), v, PartitionId::OUTDOOR);
        assert!(matches!(b.build(), Err(SpaceError::DoorOffBoundary { .. })));
    }

    #[test]
    fn rejects_empty_and_overlapping() {
        assert_eq!(SpaceBuilder::new().build().unwrap_err(), SpaceError::NoPartitions);
        let mut b = SpaceBuilder::new();
        b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        b.rect(0, PartitionKind::Room, Rect::new(5.0, 5.0, 15.0, 15.0));
        assert!(matches!(b.build(), Err(SpaceError::Overlap(..))));
        let mut b = SpaceBuilder::new();
        b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        assert!(matches!(b.build(), Err(SpaceError::Overlap(..))));
    }

    #[test]
    fn dangling_partition() {
        let mut b = SpaceBuilder::new();
        let v = b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        b.two_way(IndoorPoint::new(0, 0.0, 5.0), v, PartitionId(7));
        assert!(matches!(b.build(), Err(SpaceError::DanglingPartition { partition: 7, .. })));
    }

    #[test]
    fn staircase_interpolates() {
        let mut b = SpaceBuilder::new();
        let lo = b.rect(0, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        let hi = b.rect(1, PartitionKind::Room, Rect::new(0.0, 0.0, 10.0, 10.0));
        let st = b.staircase(0, rect_ring(Rect::new(0.0, 10.0, 20.0, 12.0)), 20.0);
        b.two_way(IndoorPoint::new(0, 0.0, 10.0), lo, st);
        b.two_way(IndoorPoint::new(1, 10.0, 10.0), st, hi);
        let s = b.build().unwrap();
        let d = s.leg(st, &IndoorPoint::new(0, 0.0, 10.0), &IndoorPoint::new(1, 10.0, 10.0));
        assert_eq!(d, 20.0);
        let mid = s.leg(st, &IndoorPoint::new(0, 0.0, 10.0), &IndoorPoint::new(0, 5.0, 11.0));
        assert!((mid - 10.0).abs() < 1e-12);
        assert!(s.euclidean_lower_bound_sound());
    }

    #[test]
    fn topology_round_trip() {
        let s = fixtures::fix_u();
        for d in s.doors() {
            for v in s.partitions() {
                assert_eq!(s.d2p_leave(d.id).contains(&v.id), s.p2d_leave(v.id).contains(&d.id));
                assert_eq!(s.d2p_enter(d.id).contains(&v.id), s.p2d_enter(v.id).contains(&d.id));
            }
        }
    }
}
