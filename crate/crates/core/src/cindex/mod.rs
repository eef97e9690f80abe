//! Composite index: an R-tree over partitions (geometric layer), per-partition
//! link records (topological layer), and object buckets with an object table.

pub mod rtree;

use std::collections::BTreeSet;
use std::mem::size_of;
use std::sync::Arc;

use crate::error::QueryError;
use crate::geom::{Point2, BOUNDARY_EPS};
use crate::idmodel::finish_path;
use crate::metrics::{vec_bytes, Counters};
use crate::query::{check_radius, IndexKind, IndoorIndex, KnnCollector, KnnResult, SpdqResult};
use crate::space::{DoorId, IndoorObject, IndoorPoint, IndoorSpace, ObjectId, PartitionId, PartitionKind};
use crate::traverse::Frontier;

pub use rtree::RTree;

pub const FANOUT: usize = 20;

/// "One can move from the owning partition to `to` through `door`."
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub door: DoorId,
    pub to: PartitionId,
}

#[derive(Clone, Debug)]
pub struct CIndex {
    space: Arc<IndoorSpace>,
    objects: Vec<Option<IndoorObject>>,
    rtree: RTree,
    /// Per partition, sorted by (door, to).
    links: Vec<Vec<Link>>,
    /// Distinct doors of each partition's links.
    exits: Vec<Vec<DoorId>>,
    buckets: Vec<Vec<ObjectId>>,
    /// Staircases, which the R-tree does not hold.
    stairs: Vec<PartitionId>,
    o_table: Vec<Option<PartitionId>>,
    lb_sound: bool,
}

impl CIndex {
    pub fn build(space: Arc<IndoorSpace>, objects: &[IndoorObject]) -> Self {
        let entries = space
            .partitions()
            .iter()
            .filter(|p| matches!(p.kind, PartitionKind::Room | PartitionKind::Hallway))
            .map(|p| rtree::Entry { mbr: p.mbr().expect("indoor partition has an MBR"), floor: p.floor, id: p.id })
            .collect();
        let rtree = RTree::bulk_load(entries, FANOUT);

        let mut links = vec![Vec::new(); space.num_partitions()];
        for d in space.doors() {
            for &(from, to) in &d.transitions {
                links[from.index()].push(Link { door: d.id, to });
            }
        }
        let mut exits = Vec::with_capacity(links.len());
        for l in links.iter_mut() {
            l.sort();
            let mut e: Vec<DoorId> = l.iter().map(|x| x.door).collect();
            e.dedup();
            exits.push(e);
        }

        let stairs = space.partitions().iter().filter(|p| p.kind == PartitionKind::Staircase).map(|p| p.id).collect();
        let mut idx = CIndex {
            stairs,
            lb_sound: space.euclidean_lower_bound_sound(),
            buckets: vec![Vec::new(); space.num_partitions()],
            objects: Vec::new(),
            o_table: Vec::new(),
            space,
            rtree,
            links,
            exits,
        };
        for o in objects {
            idx.insert_object(o.clone());
        }
        idx
    }

    pub fn rtree(&self) -> &RTree {
        &self.rtree
    }

    pub fn links(&self, v: PartitionId) -> &[Link] {
        &self.links[v.index()]
    }

    pub fn bucket(&self, v: PartitionId) -> &[ObjectId] {
        &self.buckets[v.index()]
    }

    pub fn object_host(&self, o: ObjectId) -> Option<PartitionId> {
        self.o_table.get(o.index()).copied().flatten()
    }

    /// Whether MBR pruning is enabled (every staircase at least as long as its
    /// horizontal run).
    pub fn pruning_enabled(&self) -> bool {
        self.lb_sound
    }

    /// Adds an object to its host bucket, replacing any object with the same id.
    pub fn insert_object(&mut self, o: IndoorObject) {
        self.remove_object(o.id);
        let i = o.id.index();
        if self.objects.len() <= i {
            self.objects.resize(i + 1, None);
            self.o_table.resize(i + 1, None);
        }
        let b = &mut self.buckets[o.host.index()];
        let pos = b.binary_search(&o.id).unwrap_or_else(|x| x);
        b.insert(pos, o.id);
        self.o_table[i] = Some(o.host);
        self.objects[i] = Some(o);
    }

    pub fn remove_object(&mut self, id: ObjectId) -> Option<IndoorObject> {
        let host = self.object_host(id)?;
        let b = &mut self.buckets[host.index()];
        if let Ok(pos) = b.binary_search(&id) {
            b.remove(pos);
        }
        self.o_table[id.index()] = None;
        self.objects[id.index()].take()
    }

    fn loc(&self, o: ObjectId) -> &IndoorPoint {
        &self.objects[o.index()].as_ref().expect("bucketed object exists").location
    }

    /// Host partition via R-tree point query; lowest id wins on shared boundaries.
    pub fn locate(&self, p: &IndoorPoint) -> Result<PartitionId, QueryError> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(QueryError::Unlocatable(*p));
        }
        let hit = self.rtree.point_query(p.floor, p.xy(), BOUNDARY_EPS).into_iter().find(|&v| self.space.contains(v, p));
        let stair = self.stairs.iter().copied().find(|&v| self.space.contains(v, p));
        match (hit, stair) {
            (Some(a), Some(b)) => Ok(a.min(b)),
            (a, b) => a.or(b).ok_or(QueryError::Unlocatable(*p)),
        }
    }

    /// Partitions that may hold objects within planar distance `r` of `p`.
    fn candidates(&self, p: Point2, r: f64) -> Option<Vec<bool>> {
        if !self.lb_sound || !r.is_finite() {
            return None;
        }
        let mut mask = vec![false; self.space.num_partitions()];
        for v in self.rtree.within(p, r) {
            mask[v.index()] = true;
        }
        Some(mask)
    }

    fn expand(&self, f: &mut Frontier, d: DoorId, mut visit: impl FnMut(PartitionId)) {
        let back = f.last_hop(d);
        let targets: Vec<PartitionId> = match back {
            Some(u) => {
                let l = &self.links[u.index()];
                let start = l.partition_point(|x| x.door < d);
                l[start..].iter().take_while(|x| x.door == d).map(|x| x.to).collect()
            }
            None => self.space.d2p_enter(d).to_vec(),
        };
        for v in targets {
            if v == PartitionId::OUTDOOR || Some(v) == back {
                continue;
            }
            visit(v);
            for &dj in &self.exits[v.index()] {
                if dj != d {
                    f.relax(d, v, dj, self.space.door_leg(v, d, dj));
                }
            }
        }
    }

    fn seed(&self, f: &mut Frontier, vp: PartitionId, p: &IndoorPoint) {
        for &d in &self.exits[vp.index()] {
            f.seed(d, self.space.point_door_leg(vp, p, d), Some(vp));
        }
    }

    pub fn range_query(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError> {
        check_radius(r)?;
        let vp = self.locate(p)?;
        let mask = self.candidates(p.xy(), r);
        let keep = |v: PartitionId| mask.as_ref().is_none_or(|m| m[v.index()] || v == vp);
        let lb = |o: &IndoorPoint| self.lb_sound && p.planar_dist(o) > r;
        let mut found = BTreeSet::new();
        for &o in &self.buckets[vp.index()] {
            let loc = self.loc(o);
            if !lb(loc) && self.space.leg(vp, p, loc) <= r {
                found.insert(o);
            }
        }
        let mut f = Frontier::new(self.space.num_doors());
        self.seed(&mut f, vp, p);
        while let Some((d, dist)) = f.next(c) {
            if dist > r {
                break;
            }
            let mut scanned = Vec::new();
            self.expand(&mut f, d, |v| scanned.push(v));
            for v in scanned {
                if !keep(v) && self.space.partition(v).kind != PartitionKind::Staircase {
                    continue;
                }
                for &o in &self.buckets[v.index()] {
                    let loc = self.loc(o);
                    if !found.contains(&o) && !lb(loc) && dist + self.space.door_point_leg(v, d, loc) <= r {
                        found.insert(o);
                    }
                }
            }
        }
        c.note_transient(f.transient_bytes());
        Ok(found.into_iter().collect())
    }

    pub fn knn_query(&self, p: &IndoorPoint, k: usize, c: &mut Counters) -> Result<KnnResult, QueryError> {
        if k == 0 {
            return Err(QueryError::ZeroK);
        }
        let vp = self.locate(p)?;
        let mut col = KnnCollector::new(k);
        for &o in &self.buckets[vp.index()] {
            col.offer(o, self.space.leg(vp, p, self.loc(o)));
        }
        let mut f = Frontier::new(self.space.num_doors());
        self.seed(&mut f, vp, p);
        while let Some((d, dist)) = f.next(c) {
            if dist > col.bound() {
                break;
            }
            let mut scanned = Vec::new();
            self.expand(&mut f, d, |v| scanned.push(v));
            for v in scanned {
                let bound = col.bound();
                if self.lb_sound && self.space.mbr(v).is_some_and(|m| m.min_dist(p.xy()) > bound) {
                    continue;
                }
                for &o in &self.buckets[v.index()] {
                    let loc = self.loc(o);
                    if self.lb_sound && p.planar_dist(loc) > col.bound() {
                        continue;
                    }
                    col.offer(o, dist + self.space.door_point_leg(v, d, loc));
                }
            }
        }
        c.note_transient(f.transient_bytes());
        Ok(col.finish())
    }

    pub fn spdq_query(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError> {
        let vp = self.locate(p)?;
        let vq = self.locate(q)?;
        let mut best = if vp == vq { self.space.leg(vp, p, q) } else { f64::INFINITY };
        let mut best_door = None;
        let mut f = Frontier::new(self.space.num_doors());
        self.seed(&mut f, vp, p);
        while let Some((d, dist)) = f.next(c) {
            if dist >= best {
                break;
            }
            if f.last_hop(d) != Some(vq) && self.space.p2d_enter(vq).binary_search(&d).is_ok() {
                let cand = dist + self.space.door_point_leg(vq, d, q);
                if cand < best {
                    best = cand;
                    best_door = Some(d);
                }
            }
            self.expand(&mut f, d, |_| {});
        }
        c.note_transient(f.transient_bytes());
        Ok(SpdqResult::new(finish_path(&self.space, &f, p, q, vp, vq, best, best_door)))
    }
}

impl IndoorIndex for CIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::CIndex
    }

    fn space(&self) -> &IndoorSpace {
        &self.space
    }

    fn range(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError> {
        self.range_query(p, r, c)
    }

    fn knn(&self, p: &IndoorPoint, k: usize, c: &mut Counters) -> Result<KnnResult, QueryError> {
        self.knn_query(p, k, c)
    }

    fn spdq(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError> {
        self.spdq_query(p, q, c)
    }

    fn structural_bytes(&self) -> usize {
        // geometric layer: R-tree pages plus the regular partitions' polygons
        let polygons: usize = self
            .space
            .partitions()
            .iter()
            .filter(|p| matches!(p.kind, PartitionKind::Room | PartitionKind::Hallway))
            .map(|p| vec_bytes(&p.boundary))
            .sum();
        // topological layer: (door, pointer) records
        let link_bytes: usize = self
            .links
            .iter()
            .map(|l| size_of::<Vec<Link>>() + l.len() * (size_of::<DoorId>() + size_of::<usize>()))
            .sum();
        let exits: usize = self.exits.iter().map(|e| vec_bytes(e)).sum();
        // object layer structure (ids themselves are excluded)
        let buckets = self.buckets.len() * size_of::<Vec<ObjectId>>() + size_of::<Vec<Option<PartitionId>>>();
        self.rtree.structural_bytes() + polygons + link_bytes + exits + buckets
    }
}
