use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::{IpTree, Route, TreeVariant, NONE};
use crate::error::QueryError;
use crate::metrics::Counters;
use crate::query::{check_radius, locate, KnnCollector, KnnResult, OrdF64, SpdqResult};
use crate::space::{DoorId, IndoorPath, IndoorPoint, ObjectId, PartitionId};

#[derive(Clone, Copy, Debug)]
enum How {
    Unreached,
    /// From seed `i` through the leaf matrix.
    Seed(u32),
    /// From seed `i` through the materialized VIP entry of this level.
    Extra(u32),
    /// From access door `a` of the level below through this level's matrix.
    Relay(u32),
}

/// Distances between the query point and the access doors of one ancestor
/// (towards them on the source side, from them on the target side).
struct Reach {
    dist: Vec<f64>,
    how: Vec<How>,
}

/// Query endpoint: its partition, leaf, and door legs (seeds) in leaf key
/// positions.
struct End {
    part: PartitionId,
    leaf: usize,
    seeds: Vec<(u32, f64)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// Point to door.
    Out,
    /// Door to point.
    In,
}

type Steps = Vec<(DoorId, PartitionId)>;

impl IpTree {
    fn end(&self, p: &IndoorPoint, dir: Dir) -> Result<End, QueryError> {
        let part = locate(&self.space, p)?;
        let leaf = self.leaf_of(part).expect("indoor partition has a leaf");
        let node = &self.nodes[leaf];
        let seeds = match dir {
            Dir::Out => self
                .space
                .p2d_leave(part)
                .iter()
                .map(|&d| (node.pos(d) as u32, self.space.point_door_leg(part, p, d)))
                .collect(),
            Dir::In => self
                .space
                .p2d_enter(part)
                .iter()
                .map(|&d| (node.pos(d) as u32, self.space.door_point_leg(part, d, p)))
                .collect(),
        };
        Ok(End { part, leaf, seeds })
    }

    /// Reach for the leaf's own access doors.
    fn reach_leaf(&self, e: &End, dir: Dir, c: &mut Counters) -> Reach {
        let node = &self.nodes[e.leaf];
        let (n, m) = (node.n(), node.m());
        let mut r = Reach { dist: vec![f64::INFINITY; m], how: vec![How::Unreached; m] };
        for x in 0..m {
            for (i, &(s, d)) in e.seeds.iter().enumerate() {
                let cand = match dir {
                    Dir::Out => d + node.glob[s as usize * m + x],
                    Dir::In => node.glob_from[x * n + s as usize] + d,
                };
                c.matrix_pairs_read += 1;
                if cand < r.dist[x] {
                    r.dist[x] = cand;
                    r.how[x] = How::Seed(i as u32);
                }
            }
        }
        r
    }

    /// Reach for ancestor `k` relayed from level `k - 1`.
    fn reach_relay(&self, leaf: usize, k: usize, prev: &Reach, dir: Dir, c: &mut Counters) -> Reach {
        let chain = &self.chains[leaf];
        let a = &self.nodes[chain[k] as usize];
        let below = &self.nodes[chain[k - 1] as usize];
        let (m, na) = (a.m(), a.n());
        let mut r = Reach { dist: vec![f64::INFINITY; m], how: vec![How::Unreached; m] };
        for x in 0..m {
            let px = a.ad[x] as usize;
            for (j, &pj) in below.ad_in_parent.iter().enumerate() {
                let cand = match dir {
                    Dir::Out => prev.dist[j] + a.glob[pj as usize * na + px],
                    Dir::In => a.glob[px * na + pj as usize] + prev.dist[j],
                };
                c.matrix_pairs_read += 1;
                if cand < r.dist[x] {
                    r.dist[x] = cand;
                    r.how[x] = How::Relay(j as u32);
                }
            }
        }
        r
    }

    /// Reach for ancestor `k` straight from the materialized entries.
    fn reach_extra(&self, e: &End, k: usize, dir: Dir, c: &mut Counters) -> Reach {
        let ext = &self.extras[e.leaf][k];
        let n = self.nodes[e.leaf].n();
        let m = self.nodes[self.chains[e.leaf][k] as usize].m();
        let mut r = Reach { dist: vec![f64::INFINITY; m], how: vec![How::Unreached; m] };
        for x in 0..m {
            for (i, &(s, d)) in e.seeds.iter().enumerate() {
                let cand = match dir {
                    Dir::Out => d + ext.to[s as usize * m + x],
                    Dir::In => ext.from[x * n + s as usize] + d,
                };
                c.matrix_pairs_read += 1;
                if cand < r.dist[x] {
                    r.dist[x] = cand;
                    r.how[x] = How::Extra(i as u32);
                }
            }
        }
        r
    }

    fn ad_count(&self, leaf: usize, k: usize) -> usize {
        self.nodes[self.chains[leaf][k] as usize].m()
    }

    /// Reaches for levels `0..=top`. `all` asks for every level; otherwise
    /// only level `top` is guaranteed. The VIP variant takes a materialized
    /// shortcut whenever it reads fewer entries.
    fn climb(&self, e: &End, top: usize, all: bool, dir: Dir, c: &mut Counters) -> Vec<Option<Reach>> {
        let s = e.seeds.len();
        let mut out: Vec<Option<Reach>> = (0..=top).map(|_| None).collect();
        if self.variant == TreeVariant::Vip && !all && top > 0 {
            let chain_cost: usize = s * self.ad_count(e.leaf, 0)
                + (1..=top).map(|k| self.ad_count(e.leaf, k - 1) * self.ad_count(e.leaf, k)).sum::<usize>();
            if s * self.ad_count(e.leaf, top) < chain_cost {
                out[top] = Some(self.reach_extra(e, top, dir, c));
                return out;
            }
        }
        out[0] = Some(self.reach_leaf(e, dir, c));
        for k in 1..=top {
            let use_extra = self.variant == TreeVariant::Vip && s < self.ad_count(e.leaf, k - 1);
            let r = if use_extra {
                self.reach_extra(e, k, dir, c)
            } else {
                self.reach_relay(e.leaf, k, out[k - 1].as_ref().unwrap(), dir, c)
            };
            out[k] = Some(r);
        }
        out
    }

    // ---- path unpacking ----

    fn unpack_local(&self, node: usize, i: usize, j: usize, out: &mut Steps) {
        if i == j {
            return;
        }
        let nd = &self.nodes[node];
        let n = nd.n();
        let mut hops = Vec::new();
        let mut cur = j;
        while cur != i {
            let (prev, label) = nd.pred[i * n + cur];
            debug_assert_ne!(prev, NONE, "unpacking an unreachable entry");
            hops.push((prev as usize, label, cur));
            cur = prev as usize;
        }
        for &(prev, label, cur) in hops.iter().rev() {
            if nd.is_leaf() {
                out.push((nd.keys[cur], PartitionId(label)));
            } else {
                let child = nd.children[label as usize] as usize;
                let cn = &self.nodes[child];
                self.unpack_local(child, cn.pos(nd.keys[prev]), cn.pos(nd.keys[cur]), out);
            }
        }
    }

    fn unpack_route(&self, node: usize, i: usize, j: usize, route: Route, out: &mut Steps) {
        match route {
            Route::Inside => self.unpack_local(node, i, j, out),
            Route::Out(x, y) => {
                let nd = &self.nodes[node];
                let p = nd.parent.expect("routes leave only non-root nodes") as usize;
                let (ax, ay) = (nd.ad[x as usize] as usize, nd.ad[y as usize] as usize);
                self.unpack_local(node, i, ax, out);
                self.unpack_glob(p, nd.ad_in_parent[x as usize] as usize, nd.ad_in_parent[y as usize] as usize, out);
                self.unpack_local(node, ay, j, out);
            }
        }
    }

    /// Global entry (i, j) of a non-leaf node.
    fn unpack_glob(&self, node: usize, i: usize, j: usize, out: &mut Steps) {
        let nd = &self.nodes[node];
        self.unpack_route(node, i, j, nd.glob_route[i * nd.n() + j], out);
    }

    fn unpack_leaf_to(&self, leaf: usize, i: usize, x: usize, out: &mut Steps) {
        let nd = &self.nodes[leaf];
        self.unpack_route(leaf, i, nd.ad[x] as usize, nd.glob_route[i * nd.m() + x], out);
    }

    fn unpack_leaf_from(&self, leaf: usize, y: usize, j: usize, out: &mut Steps) {
        let nd = &self.nodes[leaf];
        self.unpack_route(leaf, nd.ad[y] as usize, j, nd.glob_from_route[y * nd.n() + j], out);
    }

    fn unpack_extra_to(&self, leaf: usize, k: usize, s: usize, x: usize, out: &mut Steps) {
        if k == 0 {
            return self.unpack_leaf_to(leaf, s, x, out);
        }
        let a_id = self.chains[leaf][k] as usize;
        let below = &self.nodes[self.chains[leaf][k - 1] as usize];
        let a_node = &self.nodes[a_id];
        let relay = self.extras[leaf][k].to_relay[s * a_node.m() + x] as usize;
        self.unpack_extra_to(leaf, k - 1, s, relay, out);
        self.unpack_glob(a_id, below.ad_in_parent[relay] as usize, a_node.ad[x] as usize, out);
    }

    fn unpack_extra_from(&self, leaf: usize, k: usize, y: usize, t: usize, out: &mut Steps) {
        if k == 0 {
            return self.unpack_leaf_from(leaf, y, t, out);
        }
        let a_id = self.chains[leaf][k] as usize;
        let below = &self.nodes[self.chains[leaf][k - 1] as usize];
        let a_node = &self.nodes[a_id];
        let relay = self.extras[leaf][k].from_relay[y * self.nodes[leaf].n() + t] as usize;
        self.unpack_glob(a_id, a_node.ad[y] as usize, below.ad_in_parent[relay] as usize, out);
        self.unpack_extra_from(leaf, k - 1, relay, t, out);
    }

    /// Source side: steps from the query point to access door `x` of level `k`.
    fn unpack_up(&self, e: &End, reaches: &[Option<Reach>], k: usize, x: usize, out: &mut Steps) {
        match reaches[k].as_ref().unwrap().how[x] {
            How::Seed(i) => {
                let s = e.seeds[i as usize].0 as usize;
                out.push((self.nodes[e.leaf].keys[s], e.part));
                self.unpack_leaf_to(e.leaf, s, x, out);
            }
            How::Extra(i) => {
                let s = e.seeds[i as usize].0 as usize;
                out.push((self.nodes[e.leaf].keys[s], e.part));
                self.unpack_extra_to(e.leaf, k, s, x, out);
            }
            How::Relay(j) => {
                self.unpack_up(e, reaches, k - 1, j as usize, out);
                let a_id = self.chains[e.leaf][k] as usize;
                let below = &self.nodes[self.chains[e.leaf][k - 1] as usize];
                self.unpack_glob(a_id, below.ad_in_parent[j as usize] as usize, self.nodes[a_id].ad[x] as usize, out);
            }
            How::Unreached => unreachable!("unpacking an unreached access door"),
        }
    }

    /// Target side: steps from access door `y` of level `k` to the target's
    /// entry door (the final leg is added by the caller).
    fn unpack_down(&self, e: &End, reaches: &[Option<Reach>], k: usize, y: usize, out: &mut Steps) {
        match reaches[k].as_ref().unwrap().how[y] {
            How::Seed(i) => self.unpack_leaf_from(e.leaf, y, e.seeds[i as usize].0 as usize, out),
            How::Extra(i) => self.unpack_extra_from(e.leaf, k, y, e.seeds[i as usize].0 as usize, out),
            How::Relay(j) => {
                let a_id = self.chains[e.leaf][k] as usize;
                let below = &self.nodes[self.chains[e.leaf][k - 1] as usize];
                self.unpack_glob(a_id, self.nodes[a_id].ad[y] as usize, below.ad_in_parent[j as usize] as usize, out);
                self.unpack_down(e, reaches, k - 1, j as usize, out);
            }
            How::Unreached => unreachable!("unpacking an unreached access door"),
        }
    }

    // ---- distances inside the source leaf ----

    /// Distance from the source point to every door of its own leaf, with the
    /// choice made per door: `Ok(seed)` stays inside the leaf, `Err(y)` comes
    /// back in through access door `y`.
    fn own_leaf(&self, e: &End, leaf_reach: &Reach, c: &mut Counters) -> Vec<(f64, Result<u32, u32>)> {
        let node = &self.nodes[e.leaf];
        let (n, m) = (node.n(), node.m());
        (0..n)
            .map(|t| {
                let mut best = (f64::INFINITY, Ok(NONE));
                for (i, &(s, d)) in e.seeds.iter().enumerate() {
                    c.matrix_pairs_read += 1;
                    let cand = d + node.local(s as usize, t);
                    if cand < best.0 {
                        best = (cand, Ok(i as u32));
                    }
                }
                for y in 0..m {
                    c.matrix_pairs_read += 1;
                    let cand = leaf_reach.dist[y] + node.glob_from[y * n + t];
                    if cand < best.0 {
                        best = (cand, Err(y as u32));
                    }
                }
                best
            })
            .collect()
    }

    pub fn spdq_query(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError> {
        let src = self.end(p, Dir::Out)?;
        let dst = self.end(q, Dir::In)?;
        let mut best = if src.part == dst.part { self.space.leg(src.part, p, q) } else { f64::INFINITY };
        let mut steps: Option<Steps> = None;

        if src.leaf == dst.leaf {
            let reach = self.reach_leaf(&src, Dir::Out, c);
            let own = self.own_leaf(&src, &reach, c);
            let mut pick = None;
            for &(t, d) in &dst.seeds {
                let cand = own[t as usize].0 + d;
                if cand < best {
                    best = cand;
                    pick = Some(t as usize);
                }
            }
            if let Some(t) = pick {
                let mut out = Steps::new();
                match own[t].1 {
                    Ok(i) => {
                        let s = src.seeds[i as usize].0 as usize;
                        out.push((self.nodes[src.leaf].keys[s], src.part));
                        self.unpack_local(src.leaf, s, t, &mut out);
                    }
                    Err(y) => {
                        let reaches = vec![Some(reach)];
                        self.unpack_up(&src, &reaches, 0, y as usize, &mut out);
                        self.unpack_leaf_from(src.leaf, y as usize, t, &mut out);
                    }
                }
                steps = Some(out);
            }
        } else {
            let (cp, cq) = (&self.chains[src.leaf], &self.chains[dst.leaf]);
            let top = (0..cp.len()).find(|&k| cp[k] == cq[k]).expect("leaves share the root") - 1;
            let lca = cp[top + 1] as usize;
            let up = self.climb(&src, top, false, Dir::Out, c);
            let down = self.climb(&dst, top, false, Dir::In, c);
            let (ru, rd) = (up[top].as_ref().unwrap(), down[top].as_ref().unwrap());
            let (bp, bq) = (&self.nodes[cp[top] as usize], &self.nodes[cq[top] as usize]);
            let ln = &self.nodes[lca];
            let mut pick = None;
            for (x, &px) in bp.ad_in_parent.iter().enumerate() {
                for (y, &qy) in bq.ad_in_parent.iter().enumerate() {
                    c.matrix_pairs_read += 1;
                    let cand = ru.dist[x] + ln.glob[px as usize * ln.n() + qy as usize] + rd.dist[y];
                    if cand < best {
                        best = cand;
                        pick = Some((x, y));
                    }
                }
            }
            if let Some((x, y)) = pick {
                let mut out = Steps::new();
                self.unpack_up(&src, &up, top, x, &mut out);
                self.unpack_glob(lca, bp.ad_in_parent[x] as usize, bq.ad_in_parent[y] as usize, &mut out);
                self.unpack_down(&dst, &down, top, y, &mut out);
                steps = Some(out);
            }
        }

        let path = match steps {
            Some(s) => {
                c.path_hops += s.len() as u64;
                let doors = s.iter().map(|x| x.0).collect();
                let mut legs: Vec<PartitionId> = s.iter().map(|x| x.1).collect();
                legs.push(dst.part);
                IndoorPath::from_legs_simplified(&self.space, *p, doors, legs, *q)
            }
            None if best.is_finite() => IndoorPath::from_legs(&self.space, *p, Vec::new(), vec![src.part], *q),
            None => IndoorPath::unreachable(*p, *q),
        };
        Ok(SpdqResult::new(path))
    }

    /// Best-first walk over tree nodes keyed by the smallest distance to any
    /// of their access doors. `visit` receives each leaf (in bound order) with
    /// the distances from the query point to every leaf door, and returns the
    /// current pruning bound.
    fn walk(
        &self,
        p: &IndoorPoint,
        c: &mut Counters,
        mut bound: impl FnMut() -> f64,
        mut visit: impl FnMut(usize, &[f64]),
    ) -> Result<(), QueryError> {
        let src = self.end(p, Dir::Out)?;
        let chain = &self.chains[src.leaf];
        let top = chain.len() - 1;
        // (bound, node, distances to its access doors)
        let mut heap: BinaryHeap<Reverse<(OrdF64, u32, usize)>> = BinaryHeap::new();
        let mut pending: Vec<Vec<f64>> = Vec::new();
        let reaches = if top > 0 { self.climb(&src, top - 1, true, Dir::Out, c) } else { Vec::new() };
        for k in 0..top {
            let a = &self.nodes[chain[k] as usize];
            let parent = chain[k + 1] as usize;
            let pn = &self.nodes[parent];
            let r = reaches[k].as_ref().unwrap();
            for &sib in &pn.children {
                if sib == chain[k] {
                    continue;
                }
                let sn = &self.nodes[sib as usize];
                let dist: Vec<f64> = sn
                    .ad_in_parent
                    .iter()
                    .map(|&py| {
                        a.ad_in_parent
                            .iter()
                            .enumerate()
                            .map(|(j, &px)| {
                                c.matrix_pairs_read += 1;
                                r.dist[j] + pn.glob[px as usize * pn.n() + py as usize]
                            })
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                let b = dist.iter().copied().fold(f64::INFINITY, f64::min);
                heap.push(Reverse((OrdF64(b), sib, pending.len())));
                pending.push(dist);
            }
        }

        // the source leaf itself
        let empty = Reach { dist: Vec::new(), how: Vec::new() };
        let leaf_reach = reaches.first().and_then(|r| r.as_ref()).unwrap_or(&empty);
        let own: Vec<f64> = self.own_leaf(&src, leaf_reach, c).into_iter().map(|x| x.0).collect();
        visit(src.leaf, &own);

        while let Some(Reverse((OrdF64(b), id, slot))) = heap.pop() {
            if b > bound() {
                break;
            }
            let node = &self.nodes[id as usize];
            let dist = std::mem::take(&mut pending[slot]);
            if node.is_leaf() {
                let (n, m) = (node.n(), node.m());
                let at: Vec<f64> = (0..n)
                    .map(|t| {
                        (0..m)
                            .map(|y| {
                                c.matrix_pairs_read += 1;
                                dist[y] + node.glob_from[y * n + t]
                            })
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                visit(id as usize, &at);
            } else {
                for &ch in &node.children {
                    let cn = &self.nodes[ch as usize];
                    let cd: Vec<f64> = cn
                        .ad_in_parent
                        .iter()
                        .map(|&py| {
                            node.ad
                                .iter()
                                .enumerate()
                                .map(|(z, &pz)| {
                                    c.matrix_pairs_read += 1;
                                    dist[z] + node.glob[pz as usize * node.n() + py as usize]
                                })
                                .fold(f64::INFINITY, f64::min)
                        })
                        .collect();
                    let cb = cd.iter().copied().fold(f64::INFINITY, f64::min);
                    heap.push(Reverse((OrdF64(cb), ch, pending.len())));
                    pending.push(cd);
                }
            }
        }
        Ok(())
    }

    /// Exact distances from `p` to the objects of `leaf`, given the distance
    /// from `p` to each leaf door.
    fn scan_leaf(&self, p: &IndoorPoint, vp: PartitionId, leaf: usize, at: &[f64], mut emit: impl FnMut(ObjectId, f64)) {
        let node = &self.nodes[leaf];
        for &v in &node.partitions {
            let bucket = &self.buckets[v.index()];
            if bucket.is_empty() {
                continue;
            }
            for &o in bucket {
                let loc = &self.objects[o.index()].location;
                let mut d = if v == vp { self.space.leg(v, p, loc) } else { f64::INFINITY };
                for &t in self.space.p2d_enter(v) {
                    let via = at[node.pos(t)];
                    if via < d {
                        d = d.min(via + self.space.door_point_leg(v, t, loc));
                    }
                }
                emit(o, d);
            }
        }
    }

    pub fn range_query(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError> {
        check_radius(r)?;
        let vp = locate(&self.space, p)?;
        let mut found = BTreeSet::new();
        self.walk(p, c, || r, |leaf, at| {
            self.scan_leaf(p, vp, leaf, at, |o, d| {
                if d <= r {
                    found.insert(o);
                }
            })
        })?;
        Ok(found.into_iter().collect())
    }

    pub fn knn_query(&self, p: &IndoorPoint, k: usize, c: &mut Counters) -> Result<KnnResult, QueryError> {
        if k == 0 {
            return Err(QueryError::ZeroK);
        }
        let vp = locate(&self.space, p)?;
        let col = std::cell::RefCell::new(KnnCollector::new(k));
        self.walk(p, c, || col.borrow().bound(), |leaf, at| {
            self.scan_leaf(p, vp, leaf, at, |o, d| col.borrow_mut().offer(o, d))
        })?;
        Ok(col.into_inner().finish())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::DEFAULT_GAMMA;
    use super::*;
    use crate::fixtures;
    use crate::oracle::DoorGraph;
    use crate::space::IndoorObject;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, extent: f64) -> IndoorPoint {
        IndoorPoint::new(0, rng.gen_range(0.01..extent - 0.01), rng.gen_range(0.01..extent - 0.01))
    }

    #[test]
    fn fix_a_both_variants() {
        let s = fixtures::fix_a();
        let objs = fixtures::fix_a_objects(&s);
        let s = Arc::new(s);
        for v in [TreeVariant::Ip, TreeVariant::Vip] {
            let t = IpTree::build(s.clone(), &objs, DEFAULT_GAMMA, v).unwrap();
            let p = IndoorPoint::new(0, 2.0, 5.0);
            let mut c = Counters::default();
            let r = t.spdq_query(&p, &IndoorPoint::new(0, 15.0, 5.0), &mut c).unwrap();
            assert_eq!(r.distance, 13.0);
            assert_eq!(r.path.doors, vec![DoorId(1)]);
            assert_eq!(t.spdq_query(&p, &p, &mut c).unwrap().distance, 0.0);
            assert_eq!(t.range_query(&p, 9.0, &mut c).unwrap(), vec![ObjectId(0)]);
            let all = t.knn_query(&p, 5, &mut c).unwrap();
            assert_eq!(all.neighbors, vec![(ObjectId(0), 3.0), (ObjectId(1), 13.0)]);
        }
    }

    #[test]
    fn grid_matches_oracle() {
        let s = fixtures::grid(5, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let objs: Vec<IndoorObject> = (0..40)
            .map(|i| s.locate_object(ObjectId(i), random_point(&mut rng, 50.0)).unwrap())
            .collect();
        let s = Arc::new(s);
        let g = DoorGraph::new(&s);
        let ip = IpTree::build(s.clone(), &objs, DEFAULT_GAMMA, TreeVariant::Ip).unwrap();
        let vip = IpTree::build(s.clone(), &objs, DEFAULT_GAMMA, TreeVariant::Vip).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        for _ in 0..50 {
            let p = random_point(&mut rng, 50.0);
            let q = random_point(&mut rng, 50.0);
            let (_, want) = g.spdq(&p, &q).unwrap();
            for t in [&ip, &vip] {
                let got = t.spdq_query(&p, &q, &mut Counters::default()).unwrap();
                assert!(close(got.distance, want), "{p} -> {q}: {} vs {want}", got.distance);
                got.path.validate(&s).unwrap();
            }
            let r = rng.gen_range(5.0..40.0);
            let want = g.range(&objs, &p, r).unwrap();
            assert_eq!(ip.range_query(&p, r, &mut Counters::default()).unwrap(), want);
            assert_eq!(vip.range_query(&p, r, &mut Counters::default()).unwrap(), want);
            let k = rng.gen_range(1..12);
            let want = g.knn(&objs, &p, k).unwrap();
            for t in [&ip, &vip] {
                let got = t.knn_query(&p, k, &mut Counters::default()).unwrap();
                assert_eq!(got.neighbors.len(), want.neighbors.len());
                for (a, b) in got.neighbors.iter().zip(&want.neighbors) {
                    assert!(close(a.1, b.1));
                }
            }
        }
    }
}
