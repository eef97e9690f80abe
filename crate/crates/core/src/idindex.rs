//! Global door-to-door distance matrices on top of an [`IdModel`].

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::io::{self, Write};
use std::mem::size_of;

use rayon::prelude::*;

use crate::error::QueryError;
use crate::idmodel::IdModel;
use crate::metrics::{vec_bytes, Counters};
use crate::query::{check_radius, locate, IndexKind, IndoorIndex, KnnCollector, KnnResult, OrdF64, SpdqResult};
use crate::space::{DoorId, IndoorPath, IndoorPoint, IndoorSpace, ObjectId, PartitionId};

/// First-hop entry for the diagonal and for unreachable pairs.
pub const NO_HOP: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct IdIndex {
    model: IdModel,
    n: usize,
    door_order: Vec<DoorId>,
    m_d2d: Vec<f64>,
    m_idx: Vec<u32>,
    first_hop: Vec<u32>,
}

impl IdIndex {
    pub fn build(model: IdModel) -> Self {
        let n = model.space().num_doors();
        let rows: Vec<(Vec<f64>, Vec<u32>, Vec<u32>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (dist, first) = model.door_distances(DoorId(i as u32));
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by(|&a, &b| dist[a as usize].total_cmp(&dist[b as usize]).then(a.cmp(&b)));
                let hops = first.iter().map(|h| h.map_or(NO_HOP, |d| d.0)).collect();
                (dist, order, hops)
            })
            .collect();
        let mut m_d2d = Vec::with_capacity(n * n);
        let mut m_idx = Vec::with_capacity(n * n);
        let mut first_hop = Vec::with_capacity(n * n);
        for (d, o, h) in rows {
            m_d2d.extend(d);
            m_idx.extend(o);
            first_hop.extend(h);
        }
        IdIndex { model, n, door_order: (0..n as u32).map(DoorId).collect(), m_d2d, m_idx, first_hop }
    }

    pub fn model(&self) -> &IdModel {
        &self.model
    }

    pub fn num_doors(&self) -> usize {
        self.n
    }

    pub fn door_order(&self) -> &[DoorId] {
        &self.door_order
    }

    pub fn d2d(&self, a: DoorId, b: DoorId) -> f64 {
        self.m_d2d[a.index() * self.n + b.index()]
    }

    /// Row `a` of M_idx: doors by ascending distance from `a`.
    pub fn idx_row(&self, a: DoorId) -> &[u32] {
        &self.m_idx[a.index() * self.n..(a.index() + 1) * self.n]
    }

    pub fn first_hop(&self, a: DoorId, b: DoorId) -> Option<DoorId> {
        let h = self.first_hop[a.index() * self.n + b.index()];
        (h != NO_HOP).then_some(DoorId(h))
    }

    /// Door chain from `a` to `b` by first-hop lookups (inclusive of both).
    pub fn door_chain(&self, a: DoorId, b: DoorId, c: &mut Counters) -> Option<Vec<DoorId>> {
        let mut chain = vec![a];
        let mut cur = a;
        while cur != b {
            cur = self.first_hop(cur, b)?;
            c.path_hops += 1;
            chain.push(cur);
            if chain.len() > self.n + 1 {
                return None;
            }
        }
        Some(chain)
    }

    /// Cheapest partition for a single hop di → dj.
    pub fn hop_partition(&self, di: DoorId, dj: DoorId) -> Option<PartitionId> {
        let mut best: Option<(f64, PartitionId)> = None;
        for &v in self.model.enterable(di) {
            if v == PartitionId::OUTDOOR {
                continue;
            }
            let w = self.model.fd2d(v, di, dj);
            if w.is_finite() && best.is_none_or(|b| w < b.0) {
                best = Some((w, v));
            }
        }
        best.map(|b| b.1)
    }

    /// Little-endian dump: N (u64), door order (u32 × N), M_d2d row-major
    /// (f64 × N², unreachable as `f64::MAX`).
    pub fn write_matrix_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for d in &self.door_order {
            w.write_all(&d.0.to_le_bytes())?;
        }
        for &x in &self.m_d2d {
            let x = if x.is_finite() { x } else { f64::MAX };
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    fn space(&self) -> &IndoorSpace {
        self.model.space()
    }

    fn objects_loc(&self, o: ObjectId) -> &IndoorPoint {
        &self.model.objects()[o.index()].location
    }

    /// Scans the buckets of partitions enterable through `d` at distance `dd`.
    fn scan_range(&self, d: DoorId, dd: f64, r: f64, found: &mut BTreeSet<ObjectId>) {
        let residual = r - dd;
        for &v in self.model.enterable(d) {
            if v == PartitionId::OUTDOOR {
                continue;
            }
            let bucket = self.model.bucket(v);
            if bucket.is_empty() {
                continue;
            }
            if self.model.fdv(d, v) <= residual {
                found.extend(bucket.iter().copied());
                continue;
            }
            for &o in bucket {
                if !found.contains(&o) && self.space().door_point_leg(v, d, self.objects_loc(o)) <= residual {
                    found.insert(o);
                }
            }
        }
    }

    pub fn range_query(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError> {
        check_radius(r)?;
        let space = self.space();
        let vp = locate(space, p)?;
        let mut found = BTreeSet::new();
        for &o in self.model.bucket(vp) {
            if space.leg(vp, p, self.objects_loc(o)) <= r {
                found.insert(o);
            }
        }
        let mut done = vec![f64::INFINITY; self.n];
        for dp in self.model.leave_doors(vp) {
            let a = space.point_door_leg(vp, p, dp);
            if a > r {
                continue;
            }
            let base = dp.index() * self.n;
            for &j in self.idx_row(dp) {
                c.matrix_pairs_read += 1;
                let dd = a + self.m_d2d[base + j as usize];
                if dd > r {
                    break;
                }
                if dd >= done[j as usize] {
                    continue;
                }
                done[j as usize] = dd;
                self.scan_range(DoorId(j), dd, r, &mut found);
            }
        }
        c.note_transient(vec_bytes(&done));
        Ok(found.into_iter().collect())
    }

    pub fn knn_query(&self, p: &IndoorPoint, k: usize, c: &mut Counters) -> Result<KnnResult, QueryError> {
        if k == 0 {
            return Err(QueryError::ZeroK);
        }
        let space = self.space();
        let vp = locate(space, p)?;
        let mut col = KnnCollector::new(k);
        for &o in self.model.bucket(vp) {
            col.offer(o, space.leg(vp, p, self.objects_loc(o)));
        }
        // k-way merge over the sorted rows of the start doors
        let starts: Vec<(DoorId, f64)> = self
            .model
            .leave_doors(vp)
            .map(|d| (d, space.point_door_leg(vp, p, d)))
            .collect();
        let mut heap = BinaryHeap::new();
        for (s, &(d, a)) in starts.iter().enumerate() {
            let j = self.idx_row(d)[0] as usize;
            heap.push(Reverse((OrdF64(a + self.m_d2d[d.index() * self.n + j]), s, 0usize)));
        }
        let mut done = vec![false; self.n];
        let mut peak = heap.len();
        while let Some(Reverse((OrdF64(dd), s, pos))) = heap.pop() {
            c.matrix_pairs_read += 1;
            if !dd.is_finite() || dd > col.bound() {
                break;
            }
            let (d, a) = starts[s];
            let row = self.idx_row(d);
            let j = row[pos];
            if pos + 1 < self.n {
                let nj = row[pos + 1] as usize;
                heap.push(Reverse((OrdF64(a + self.m_d2d[d.index() * self.n + nj]), s, pos + 1)));
                peak = peak.max(heap.len());
            }
            if done[j as usize] {
                continue;
            }
            done[j as usize] = true;
            let door = DoorId(j);
            for &v in self.model.enterable(door) {
                if v == PartitionId::OUTDOOR {
                    continue;
                }
                for &o in self.model.bucket(v) {
                    col.offer(o, dd + space.door_point_leg(v, door, self.objects_loc(o)));
                }
            }
        }
        c.note_transient(self.n + peak * size_of::<(f64, usize, usize)>());
        Ok(col.finish())
    }

    pub fn spdq_query(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError> {
        let space = self.space();
        let vp = locate(space, p)?;
        let vq = locate(space, q)?;
        let mut best = if vp == vq { space.leg(vp, p, q) } else { f64::INFINITY };
        let mut arg = None;
        let tails: Vec<(DoorId, f64)> = self
            .model
            .enter_doors(vq)
            .iter()
            .map(|&d| (d, space.door_point_leg(vq, d, q)))
            .collect();
        for dp in self.model.leave_doors(vp) {
            let a = space.point_door_leg(vp, p, dp);
            let base = dp.index() * self.n;
            for &(dq, b) in &tails {
                c.matrix_pairs_read += 1;
                if vp == vq && dp == dq {
                    continue;
                }
                let cand = a + self.m_d2d[base + dq.index()] + b;
                if cand < best {
                    best = cand;
                    arg = Some((dp, dq));
                }
            }
        }
        let path = match arg {
            None if best.is_finite() => IndoorPath::from_legs(space, *p, vec![], vec![vp], *q),
            None => IndoorPath::unreachable(*p, *q),
            Some((dp, dq)) => {
                let doors = self.door_chain(dp, dq, c).expect("finite matrix entry has a first-hop chain");
                let mut legs = vec![vp];
                for w in doors.windows(2) {
                    legs.push(self.hop_partition(w[0], w[1]).expect("consecutive chain doors share a partition"));
                }
                legs.push(vq);
                IndoorPath::from_legs_simplified(space, *p, doors, legs, *q)
            }
        };
        Ok(SpdqResult::new(path))
    }
}

impl IndoorIndex for IdIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::IdIndex
    }

    fn space(&self) -> &IndoorSpace {
        self.model.space()
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
        self.model.structural_bytes()
            + vec_bytes(&self.door_order)
            + vec_bytes(&self.m_d2d)
            + vec_bytes(&self.m_idx)
            + vec_bytes(&self.first_hop)
    }
}
