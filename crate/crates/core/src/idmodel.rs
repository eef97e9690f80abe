//! Distance-aware accessibility graph with per-partition door tables.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::QueryError;
use crate::metrics::{vec_bytes, Counters};
use crate::query::{check_radius, locate, IndexKind, IndoorIndex, KnnCollector, KnnResult, SpdqResult};
use crate::space::{DoorId, IndoorObject, IndoorPath, IndoorPoint, IndoorSpace, ObjectId, PartitionId};
use crate::traverse::Frontier;

/// Rows of variable length packed into one buffer.
#[derive(Clone, Debug)]
struct Csr<T> {
    off: Vec<u32>,
    items: Vec<T>,
}

impl<T: Copy> Csr<T> {
    fn from_rows<I: IntoIterator<Item = Vec<T>>>(rows: I) -> Self {
        let mut off = vec![0u32];
        let mut items = Vec::new();
        for r in rows {
            items.extend(r);
            off.push(items.len() as u32);
        }
        Csr { off, items }
    }

    fn row(&self, i: usize) -> &[T] {
        &self.items[self.off[i] as usize..self.off[i + 1] as usize]
    }

    fn start(&self, i: usize) -> usize {
        self.off[i] as usize
    }

    fn bytes(&self) -> usize {
        vec_bytes(&self.off) + vec_bytes(&self.items)
    }
}

#[derive(Clone, Debug)]
pub struct IdModel {
    space: Arc<IndoorSpace>,
    objects: Arc<Vec<IndoorObject>>,
    edges: Vec<(PartitionId, PartitionId, DoorId)>,
    /// Per partition: P2D⊃ and P2D (ascending).
    p_enter: Csr<DoorId>,
    p_doors: Csr<DoorId>,
    /// P2D⊂ as ascending positions within P2D.
    leave_pos: Csr<u32>,
    /// Aligned with `p_doors.items`.
    fdv: Vec<f64>,
    /// Row-major |P2D|² blocks starting at `fd2d_off[v]`; empty for v0.
    fd2d: Vec<f64>,
    fd2d_off: Vec<u32>,
    d_enter: Csr<PartitionId>,
    d_leave: Csr<PartitionId>,
    buckets: Csr<ObjectId>,
}

impl IdModel {
    pub fn build(space: Arc<IndoorSpace>, objects: &[IndoorObject]) -> Self {
        let mut edges = Vec::new();
        for d in space.doors() {
            for &(from, to) in space.d2p(d.id) {
                edges.push((from, to, d.id));
            }
        }
        edges.sort_by_key(|&(a, b, d)| (a, b, d));
        let parts = space.partitions();
        let p_enter = Csr::from_rows(parts.iter().map(|p| space.p2d_enter(p.id).to_vec()));
        let p_doors = Csr::from_rows(parts.iter().map(|p| space.p2d(p.id).to_vec()));
        let leave_pos = Csr::from_rows(parts.iter().map(|p| {
            let ds = space.p2d(p.id);
            space.p2d_leave(p.id).iter().map(|d| ds.binary_search(d).unwrap() as u32).collect()
        }));

        let mut fdv = Vec::with_capacity(p_doors.items.len());
        let mut fd2d = Vec::new();
        let mut fd2d_off = Vec::with_capacity(parts.len() + 1);
        for p in parts {
            let v = p.id;
            let ds = space.p2d(v);
            fdv.extend(ds.iter().map(|&d| if p.is_outdoor() { f64::INFINITY } else { space.max_reach(d, v) }));
            fd2d_off.push(fd2d.len() as u32);
            if p.is_outdoor() {
                continue;
            }
            let (enter, leave) = (space.p2d_enter(v), space.p2d_leave(v));
            for (i, &di) in ds.iter().enumerate() {
                for (j, &dj) in ds.iter().enumerate() {
                    fd2d.push(if i == j {
                        0.0
                    } else if enter.binary_search(&di).is_ok() && leave.binary_search(&dj).is_ok() {
                        space.door_leg(v, di, dj)
                    } else {
                        f64::INFINITY
                    });
                }
            }
        }
        fd2d_off.push(fd2d.len() as u32);
        let d_enter = Csr::from_rows(space.doors().iter().map(|d| space.d2p_enter(d.id).to_vec()));
        let d_leave = Csr::from_rows(space.doors().iter().map(|d| space.d2p_leave(d.id).to_vec()));

        let mut rows = vec![Vec::new(); space.num_partitions()];
        for o in objects {
            rows[o.host.index()].push(o.id);
        }
        let buckets = Csr::from_rows(rows);
        IdModel {
            space,
            objects: Arc::new(objects.to_vec()),
            edges,
            p_enter,
            p_doors,
            leave_pos,
            fdv,
            fd2d,
            fd2d_off,
            d_enter,
            d_leave,
            buckets,
        }
    }

    fn pos(&self, v: PartitionId, d: DoorId) -> Option<usize> {
        self.p_doors.row(v.index()).binary_search(&d).ok()
    }

    /// fd2d entry by positions within P2D(v).
    fn fd2d_at(&self, v: PartitionId, i: usize, j: usize) -> f64 {
        if v == PartitionId::OUTDOOR {
            return if i == j { 0.0 } else { f64::INFINITY };
        }
        let n = self.p_doors.row(v.index()).len();
        self.fd2d[self.fd2d_off[v.index()] as usize + i * n + j]
    }

    pub fn space_arc(&self) -> &Arc<IndoorSpace> {
        &self.space
    }

    pub fn objects(&self) -> &[IndoorObject] {
        &self.objects
    }

    pub fn num_vertices(&self) -> usize {
        self.space.num_partitions()
    }

    /// Labeled directed edges (from, to, door), ascending.
    pub fn edges(&self) -> &[(PartitionId, PartitionId, DoorId)] {
        &self.edges
    }

    pub fn bucket(&self, v: PartitionId) -> &[ObjectId] {
        self.buckets.row(v.index())
    }

    /// Within-partition door-to-door distance: 0 on the diagonal, the intra
    /// distance when `di` enters and `dj` leaves `v`, infinite otherwise.
    pub fn fd2d(&self, v: PartitionId, di: DoorId, dj: DoorId) -> f64 {
        match (self.pos(v, di), self.pos(v, dj)) {
            (Some(i), Some(j)) => self.fd2d_at(v, i, j),
            _ => f64::INFINITY,
        }
    }

    /// Longest reach inside `v` from door `d`.
    pub fn fdv(&self, d: DoorId, v: PartitionId) -> f64 {
        self.pos(v, d).map_or(f64::INFINITY, |i| self.fdv[self.p_doors.start(v.index()) + i])
    }

    pub fn enter_doors(&self, v: PartitionId) -> &[DoorId] {
        self.p_enter.row(v.index())
    }

    pub fn leave_doors(&self, v: PartitionId) -> impl Iterator<Item = DoorId> + '_ {
        let ds = self.p_doors.row(v.index());
        self.leave_pos.row(v.index()).iter().map(move |&j| ds[j as usize])
    }

    pub fn doors_of(&self, v: PartitionId) -> &[DoorId] {
        self.p_doors.row(v.index())
    }

    pub fn enterable(&self, d: DoorId) -> &[PartitionId] {
        self.d_enter.row(d.index())
    }

    pub fn leaveable(&self, d: DoorId) -> &[PartitionId] {
        self.d_leave.row(d.index())
    }

    /// Relaxes every door leaveable from the partitions `d` enters, except the
    /// partition `d` was reached through.
    fn expand(&self, f: &mut Frontier, d: DoorId, mut visit: impl FnMut(PartitionId)) {
        let back = f.last_hop(d);
        for &v in self.d_enter.row(d.index()) {
            if v == PartitionId::OUTDOOR || Some(v) == back {
                continue;
            }
            visit(v);
            let i = self.pos(v, d).expect("entered door is a door of the partition");
            let ds = self.p_doors.row(v.index());
            for &j in self.leave_pos.row(v.index()) {
                let dj = ds[j as usize];
                if dj != d {
                    f.relax(d, v, dj, self.fd2d_at(v, i, j as usize));
                }
            }
        }
    }

    /// Shortest door-to-door distance respecting door directions.
    pub fn d2d_shortest(&self, ds: DoorId, dt: DoorId, c: &mut Counters) -> f64 {
        if ds == dt {
            return 0.0;
        }
        let mut f = Frontier::new(self.space.num_doors());
        f.seed(ds, 0.0, None);
        while let Some((d, dist)) = f.next(c) {
            if d == dt {
                c.note_transient(f.transient_bytes());
                return dist;
            }
            self.expand(&mut f, d, |_| {});
        }
        c.note_transient(f.transient_bytes());
        f64::INFINITY
    }

    /// Single-source door distances from `ds` (all doors settled).
    pub fn door_distances(&self, ds: DoorId) -> (Vec<f64>, Vec<Option<DoorId>>) {
        let n = self.space.num_doors();
        let mut f = Frontier::new(n);
        let mut c = Counters::default();
        f.seed(ds, 0.0, None);
        while let Some((d, _)) = f.next(&mut c) {
            self.expand(&mut f, d, |_| {});
        }
        let dist = (0..n).map(|j| f.dist(DoorId(j as u32))).collect();
        let first = f.first_hops(ds);
        (dist, first)
    }

    fn seed_from_point(&self, f: &mut Frontier, vp: PartitionId, p: &IndoorPoint) {
        for d in self.leave_doors(vp) {
            f.seed(d, self.space.point_door_leg(vp, p, d), Some(vp));
        }
    }

    pub fn range_query(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError> {
        check_radius(r)?;
        let vp = locate(&self.space, p)?;
        let mut found = BTreeSet::new();
        for &o in self.buckets.row(vp.index()) {
            if self.space.leg(vp, p, &self.objects[o.index()].location) <= r {
                found.insert(o);
            }
        }
        let mut f = Frontier::new(self.space.num_doors());
        self.seed_from_point(&mut f, vp, p);
        while let Some((d, dist)) = f.next(c) {
            if dist > r {
                break;
            }
            let residual = r - dist;
            let mut scanned = Vec::new();
            self.expand(&mut f, d, |v| scanned.push(v));
            for v in scanned {
                let bucket = self.buckets.row(v.index());
                if bucket.is_empty() {
                    continue;
                }
                if self.fdv(d, v) <= residual {
                    found.extend(bucket.iter().copied());
                    continue;
                }
                for &o in bucket {
                    if !found.contains(&o)
                        && self.space.door_point_leg(v, d, &self.objects[o.index()].location) <= residual
                    {
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
        let vp = locate(&self.space, p)?;
        let mut col = KnnCollector::new(k);
        for &o in self.buckets.row(vp.index()) {
            col.offer(o, self.space.leg(vp, p, &self.objects[o.index()].location));
        }
        let mut f = Frontier::new(self.space.num_doors());
        self.seed_from_point(&mut f, vp, p);
        while let Some((d, dist)) = f.next(c) {
            if dist > col.bound() {
                break;
            }
            let mut scanned = Vec::new();
            self.expand(&mut f, d, |v| scanned.push(v));
            for v in scanned {
                for &o in self.buckets.row(v.index()) {
                    col.offer(o, dist + self.space.door_point_leg(v, d, &self.objects[o.index()].location));
                }
            }
        }
        c.note_transient(f.transient_bytes());
        Ok(col.finish())
    }

    pub fn spdq_query(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError> {
        let vp = locate(&self.space, p)?;
        let vq = locate(&self.space, q)?;
        let mut best = if vp == vq { self.space.leg(vp, p, q) } else { f64::INFINITY };
        let mut best_door = None;
        let mut f = Frontier::new(self.space.num_doors());
        self.seed_from_point(&mut f, vp, p);
        let targets = self.p_enter.row(vq.index());
        while let Some((d, dist)) = f.next(c) {
            if dist >= best {
                break;
            }
            if f.last_hop(d) != Some(vq) && targets.binary_search(&d).is_ok() {
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

/// Turns the traversal outcome into a path whose length is recomputed leg by leg.
pub(crate) fn finish_path(
    space: &IndoorSpace,
    f: &Frontier,
    p: &IndoorPoint,
    q: &IndoorPoint,
    vp: PartitionId,
    vq: PartitionId,
    best: f64,
    best_door: Option<DoorId>,
) -> IndoorPath {
    match best_door {
        Some(d) => {
            let (doors, mut legs) = f.trace(d);
            legs.push(vq);
            IndoorPath::from_legs(space, *p, doors, legs, *q)
        }
        None if best.is_finite() => IndoorPath::from_legs(space, *p, Vec::new(), vec![vp], *q),
        None => IndoorPath::unreachable(*p, *q),
    }
}

impl IndoorIndex for IdModel {
    fn kind(&self) -> IndexKind {
        IndexKind::IdModel
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
        // bucket offsets are structure, the object ids themselves are not
        vec_bytes(&self.edges)
            + self.p_enter.bytes()
            + self.p_doors.bytes()
            + self.leave_pos.bytes()
            + vec_bytes(&self.fdv)
            + vec_bytes(&self.fd2d)
            + vec_bytes(&self.fd2d_off)
            + self.d_enter.bytes()
            + self.d_leave.bytes()
            + vec_bytes(&self.buckets.off)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn model(s: IndoorSpace) -> IdModel {
        let objs = fixtures::fix_a_objects(&s);
        IdModel::build(Arc::new(s), &objs)
    }

    #[test]
    fn fix_a_graph() {
        let m = model(fixtures::fix_a());
        assert_eq!(m.num_vertices(), 3);
        assert_eq!(m.edges().len(), 4);
        assert_eq!(m.fd2d(PartitionId(1), DoorId(0), DoorId(1)), 10.0);
        assert_eq!(m.d2d_shortest(DoorId(0), DoorId(1), &mut Counters::default()), 10.0);
    }

    #[test]
    fn fix_u_tables() {
        let m = model(fixtures::fix_u());
        let (a, b) = (PartitionId(1), PartitionId(2));
        assert_eq!(m.fd2d(b, DoorId(1), DoorId(1)), 0.0);
        assert_eq!(m.fd2d(b, DoorId(2), DoorId(1)), 10.0);
        assert_eq!(m.fd2d(b, DoorId(1), DoorId(2)), f64::INFINITY);
        assert_eq!(m.fd2d(a, DoorId(1), DoorId(1)), 0.0);
        assert_eq!(m.fd2d(a, DoorId(0), DoorId(1)), f64::INFINITY);
        assert_eq!(m.d2d_shortest(DoorId(0), DoorId(2), &mut Counters::default()), f64::INFINITY);
    }

    #[test]
    fn fix_a_queries() {
        let m = model(fixtures::fix_a());
        let p = IndoorPoint::new(0, 2.0, 5.0);
        let mut c = Counters::default();
        assert_eq!(m.range_query(&p, 9.0, &mut c).unwrap(), vec![ObjectId(0)]);
        assert_eq!(m.range_query(&p, 0.0, &mut c).unwrap(), vec![]);
        assert_eq!(m.knn_query(&p, 1, &mut c).unwrap().neighbors, vec![(ObjectId(0), 3.0)]);
        let all = m.knn_query(&p, 5, &mut c).unwrap();
        assert_eq!(all.neighbors, vec![(ObjectId(0), 3.0), (ObjectId(1), 13.0)]);
        assert!(all.shortfall);
        assert_eq!(m.knn_query(&p, 0, &mut c), Err(QueryError::ZeroK));
        let r = m.spdq_query(&p, &IndoorPoint::new(0, 15.0, 5.0), &mut c).unwrap();
        assert_eq!(r.distance, 13.0);
        assert_eq!(r.path.doors, vec![DoorId(1)]);
        let same = m.spdq_query(&p, &p, &mut c).unwrap();
        assert_eq!(same.distance, 0.0);
        assert!(same.path.doors.is_empty());
    }

    #[test]
    fn fix_u_asymmetry() {
        let m = model(fixtures::fix_u());
        let a = IndoorPoint::new(0, 2.0, 5.0);
        let b = IndoorPoint::new(0, 15.0, 5.0);
        let mut c = Counters::default();
        assert_eq!(m.spdq_query(&b, &a, &mut c).unwrap().distance, 13.0);
        let back = m.spdq_query(&a, &b, &mut c).unwrap();
        assert_eq!(back.distance, f64::INFINITY);
        assert!(back.path.is_empty());
    }
}
