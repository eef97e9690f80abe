//! Brute-force reference answers: a plain Dijkstra over an explicit door graph
//! with the query points added as temporary vertices. Shares nothing with the
//! indexes except space geometry.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::QueryError;
use crate::query::{KnnResult, OrdF64};
use crate::space::{DoorId, IndoorObject, IndoorPath, IndoorPoint, IndoorSpace, ObjectId, PartitionId};

#[derive(Clone, Copy, Debug)]
struct Edge {
    to: usize,
    via: PartitionId,
    w: f64,
}

/// Door graph: one vertex per door, an edge di→dj for every partition that
/// di enters and dj leaves.
pub struct DoorGraph<'a> {
    space: &'a IndoorSpace,
    adj: Vec<Vec<Edge>>,
}

impl<'a> DoorGraph<'a> {
    pub fn new(space: &'a IndoorSpace) -> Self {
        let mut adj = vec![Vec::new(); space.num_doors()];
        for part in space.partitions().iter().skip(1) {
            let v = part.id;
            for &di in space.p2d_enter(v) {
                let a = space.door(di).location;
                for &dj in space.p2d_leave(v) {
                    if di == dj {
                        continue;
                    }
                    let b = space.door(dj).location;
                    adj[di.index()].push(Edge { to: dj.index(), via: v, w: space.leg(v, &a, &b) });
                }
            }
        }
        DoorGraph { space, adj }
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Dijkstra from a set of (door, initial distance, partition) seeds.
    /// Returns distances and (predecessor door, partition used) per door.
    fn run(&self, seeds: &[(usize, f64, PartitionId)]) -> (Vec<f64>, Vec<Option<(Option<usize>, PartitionId)>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<(Option<usize>, PartitionId)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &(d, w, v) in seeds {
            if w < dist[d] {
                dist[d] = w;
                prev[d] = Some((None, v));
                heap.push(Reverse((OrdF64(w), d)));
            }
        }
        while let Some(Reverse((OrdF64(du), u))) = heap.pop() {
            if done[u] || du > dist[u] {
                continue;
            }
            done[u] = true;
            for e in &self.adj[u] {
                let nd = du + e.w;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    prev[e.to] = Some((Some(u), e.via));
                    heap.push(Reverse((OrdF64(nd), e.to)));
                }
            }
        }
        (dist, prev)
    }

    fn point_seeds(&self, p: &IndoorPoint, vp: PartitionId) -> Vec<(usize, f64, PartitionId)> {
        self.space
            .p2d_leave(vp)
            .iter()
            .map(|&d| (d.index(), self.space.leg(vp, p, &self.space.door(d).location), vp))
            .collect()
    }

    /// Distances from point `p` to every door.
    pub fn from_point(&self, p: &IndoorPoint) -> Result<Vec<f64>, QueryError> {
        let vp = self.space.host_partition(p).ok_or(QueryError::Unlocatable(*p))?;
        Ok(self.run(&self.point_seeds(p, vp)).0)
    }

    /// Door-to-door shortest distance.
    pub fn door_to_door(&self, ds: DoorId, dt: DoorId) -> f64 {
        if ds == dt {
            return 0.0;
        }
        let seeds: Vec<_> = self.adj[ds.index()]
            .iter()
            .map(|e| (e.to, e.w, e.via))
            .collect();
        self.run(&seeds).0[dt.index()]
    }

    /// Indoor distance from `p` to any point `x` given door distances from `p`.
    fn to_point(&self, p: &IndoorPoint, vp: PartitionId, door_dist: &[f64], x: &IndoorPoint, vx: PartitionId) -> f64 {
        let mut best = if vx == vp { self.space.leg(vp, p, x) } else { f64::INFINITY };
        for &d in self.space.p2d_enter(vx) {
            let c = door_dist[d.index()] + self.space.leg(vx, &self.space.door(d).location, x);
            if c < best {
                best = c;
            }
        }
        best
    }

    pub fn spdq(&self, p: &IndoorPoint, q: &IndoorPoint) -> Result<(IndoorPath, f64), QueryError> {
        let vp = self.space.host_partition(p).ok_or(QueryError::Unlocatable(*p))?;
        let vq = self.space.host_partition(q).ok_or(QueryError::Unlocatable(*q))?;
        let (dist, prev) = self.run(&self.point_seeds(p, vp));
        let mut best = if vp == vq { self.space.leg(vp, p, q) } else { f64::INFINITY };
        let mut exit = None;
        for &d in self.space.p2d_enter(vq) {
            let c = dist[d.index()] + self.space.leg(vq, &self.space.door(d).location, q);
            if c < best {
                best = c;
                exit = Some(d.index());
            }
        }
        let path = match exit {
            None if best.is_finite() => IndoorPath::from_legs(self.space, *p, vec![], vec![vp], *q),
            None => IndoorPath::unreachable(*p, *q),
            Some(mut d) => {
                let mut doors = Vec::new();
                let mut legs = vec![vq];
                loop {
                    let (pd, via) = prev[d].expect("reached door has a predecessor");
                    doors.push(DoorId(d as u32));
                    legs.push(via);
                    match pd {
                        Some(x) => d = x,
                        None => break,
                    }
                }
                doors.reverse();
                legs.reverse();
                IndoorPath::from_legs(self.space, *p, doors, legs, *q)
            }
        };
        let len = path.length;
        Ok((path, len))
    }

    /// Indoor distance from `p` to every object (infinite when unreachable).
    pub fn object_distances(&self, objects: &[IndoorObject], p: &IndoorPoint) -> Result<Vec<(ObjectId, f64)>, QueryError> {
        let vp = self.space.host_partition(p).ok_or(QueryError::Unlocatable(*p))?;
        let (dist, _) = self.run(&self.point_seeds(p, vp));
        Ok(objects
            .iter()
            .map(|o| (o.id, self.to_point(p, vp, &dist, &o.location, o.host)))
            .collect())
    }

    pub fn range(&self, objects: &[IndoorObject], p: &IndoorPoint, r: f64) -> Result<Vec<ObjectId>, QueryError> {
        let mut out: Vec<ObjectId> = self
            .object_distances(objects, p)?
            .into_iter()
            .filter(|&(_, d)| d <= r)
            .map(|(o, _)| o)
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn knn(&self, objects: &[IndoorObject], p: &IndoorPoint, k: usize) -> Result<KnnResult, QueryError> {
        if k == 0 {
            return Err(QueryError::ZeroK);
        }
        let mut all: Vec<(ObjectId, f64)> = self
            .object_distances(objects, p)?
            .into_iter()
            .filter(|(_, d)| d.is_finite())
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let shortfall = all.len() < k;
        all.truncate(k);
        Ok(KnnResult { neighbors: all, shortfall })
    }
}

pub fn oracle_spdq(space: &IndoorSpace, p: &IndoorPoint, q: &IndoorPoint) -> Result<(IndoorPath, f64), QueryError> {
    DoorGraph::new(space).spdq(p, q)
}

pub fn oracle_rq(space: &IndoorSpace, objects: &[IndoorObject], p: &IndoorPoint, r: f64) -> Result<Vec<ObjectId>, QueryError> {
    DoorGraph::new(space).range(objects, p, r)
}

pub fn oracle_knnq(space: &IndoorSpace, objects: &[IndoorObject], p: &IndoorPoint, k: usize) -> Result<KnnResult, QueryError> {
    DoorGraph::new(space).knn(objects, p, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fix_a_reference_values() {
        let s = fixtures::fix_a();
        let objs = fixtures::fix_a_objects(&s);
        let p = IndoorPoint::new(0, 2.0, 5.0);
        let (path, d) = oracle_spdq(&s, &p, &IndoorPoint::new(0, 15.0, 5.0)).unwrap();
        assert_eq!(d, 13.0);
        assert_eq!(path.doors, vec![DoorId(1)]);
        assert_eq!(oracle_spdq(&s, &p, &p).unwrap().1, 0.0);
        assert_eq!(oracle_rq(&s, &objs, &p, 9.0).unwrap(), vec![ObjectId(0)]);
        assert_eq!(
            oracle_knnq(&s, &objs, &p, 2).unwrap().neighbors,
            vec![(ObjectId(0), 3.0), (ObjectId(1), 13.0)]
        );
    }

    #[test]
    fn fix_u_directionality() {
        let s = fixtures::fix_u();
        let g = DoorGraph::new(&s);
        let a = IndoorPoint::new(0, 2.0, 5.0);
        let b = IndoorPoint::new(0, 15.0, 5.0);
        assert_eq!(g.spdq(&a, &b).unwrap().1, f64::INFINITY);
        assert_eq!(g.spdq(&b, &a).unwrap().1, 13.0);
        assert_eq!(g.door_to_door(DoorId(0), DoorId(2)), f64::INFINITY);
        assert_eq!(g.door_to_door(DoorId(2), DoorId(0)), 20.0);
    }
}
