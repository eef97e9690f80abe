//! IP-Tree and VIP-Tree: a hierarchy over groups of adjacent partitions. Each
//! node keeps distances between its access doors (the doors on its border);
//! the VIP variant also keeps every leaf door's distance to the access doors
//! of all ancestors.

mod query;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::mem::size_of;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{QueryError, SpaceError};
use crate::metrics::{vec_bytes, Counters};
use crate::query::{IndexKind, IndoorIndex, KnnResult, OrdF64, SpdqResult};
use crate::space::{DoorId, IndoorObject, IndoorPoint, IndoorSpace, ObjectId, PartitionId};

pub const LEAF_CAPACITY: usize = 8;
pub const DEFAULT_GAMMA: usize = 6;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeVariant {
    Ip,
    Vip,
}

/// How a refined (global) entry is realized: entirely inside the node, or by
/// leaving through access door `x` and returning through access door `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    Inside,
    Out(u32, u32),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub level: u32,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    /// Partitions covered (leaves only).
    pub partitions: Vec<PartitionId>,
    /// Leaf: every door of its partitions. Non-leaf: the children's access doors.
    keys: Vec<DoorId>,
    /// Positions of the access doors in `keys`.
    ad: Vec<u32>,
    /// Positions of the access doors in the parent's `keys`.
    ad_in_parent: Vec<u32>,
    /// keys × keys distances using only the node's partitions.
    local: Vec<f64>,
    /// Predecessor key and edge label (partition for leaves, child slot otherwise).
    pred: Vec<(u32, u32)>,
    /// Non-leaf: keys × keys global distances. Leaf: keys × AD.
    glob: Vec<f64>,
    glob_route: Vec<Route>,
    /// Leaf only: AD × keys global distances.
    glob_from: Vec<f64>,
    glob_from_route: Vec<Route>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn keys(&self) -> &[DoorId] {
        &self.keys
    }

    pub fn access_doors(&self) -> Vec<DoorId> {
        self.ad.iter().map(|&i| self.keys[i as usize]).collect()
    }

    fn n(&self) -> usize {
        self.keys.len()
    }

    fn m(&self) -> usize {
        self.ad.len()
    }

    fn pos(&self, d: DoorId) -> usize {
        self.keys.binary_search(&d).expect("door is a key of the node")
    }

    fn local(&self, i: usize, j: usize) -> f64 {
        self.local[i * self.n() + j]
    }
}

/// Leaf door to ancestor access door distances (and back) for one ancestor.
#[derive(Clone, Debug, Default)]
struct Extra {
    to: Vec<f64>,
    to_relay: Vec<u32>,
    from: Vec<f64>,
    from_relay: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct IpTree {
    space: Arc<IndoorSpace>,
    objects: Vec<IndoorObject>,
    variant: TreeVariant,
    gamma: usize,
    nodes: Vec<Node>,
    num_leaves: usize,
    leaf_of: Vec<u32>,
    /// Per leaf: itself and its ancestors, bottom-up.
    chains: Vec<Vec<u32>>,
    /// VIP only: per leaf, one entry per ancestor (index 0 unused).
    extras: Vec<Vec<Extra>>,
    buckets: Vec<Vec<ObjectId>>,
}

impl IpTree {
    pub fn build(
        space: Arc<IndoorSpace>,
        objects: &[IndoorObject],
        gamma: usize,
        variant: TreeVariant,
    ) -> Result<Self, SpaceError> {
        let comps = space.components();
        if comps.is_empty() {
            return Err(SpaceError::NoPartitions);
        }
        if comps.len() > 1 {
            let names: Vec<String> = comps
                .iter()
                .map(|c| {
                    let ids: Vec<String> = c.iter().take(6).map(|v| v.to_string()).collect();
                    let more = if c.len() > 6 { ", ..." } else { "" };
                    format!("{{{}{}}}", ids.join(", "), more)
                })
                .collect();
            return Err(SpaceError::Disconnected(names.join(" ")));
        }

        let np = space.num_partitions();
        let (mut nodes, leaf_of) = form_leaves(&space, gamma);
        let num_leaves = nodes.len();
        merge_levels(&space, &mut nodes, &leaf_of);

        let mut chains = Vec::with_capacity(num_leaves);
        for l in 0..num_leaves {
            let mut c = vec![l as u32];
            while let Some(p) = nodes[*c.last().unwrap() as usize].parent {
                c.push(p);
            }
            chains.push(c);
        }
        let inside = |v: PartitionId, n: u32, level: u32| -> bool {
            let l = leaf_of[v.index()];
            l != NONE && chains[l as usize][level as usize] == n
        };

        // keys and access doors, bottom-up
        for id in 0..nodes.len() {
            let keys: Vec<DoorId> = if nodes[id].is_leaf() {
                let mut k: Vec<DoorId> =
                    nodes[id].partitions.iter().flat_map(|&v| space.p2d(v).iter().copied()).collect();
                k.sort();
                k.dedup();
                k
            } else {
                let mut k: Vec<DoorId> =
                    nodes[id].children.iter().flat_map(|&c| nodes[c as usize].access_doors()).collect();
                k.sort();
                k.dedup();
                k
            };
            let level = nodes[id].level;
            let ad = keys
                .iter()
                .enumerate()
                .filter(|(_, &d)| {
                    space
                        .door_partitions(d)
                        .iter()
                        .any(|&v| v != PartitionId::OUTDOOR && !inside(v, id as u32, level))
                })
                .map(|(i, _)| i as u32)
                .collect();
            nodes[id].keys = keys;
            nodes[id].ad = ad;
        }
        for id in 0..nodes.len() {
            if let Some(p) = nodes[id].parent {
                let pk = &nodes[p as usize];
                nodes[id].ad_in_parent = nodes[id].access_doors().iter().map(|&d| pk.pos(d) as u32).collect();
            }
        }

        // local matrices, bottom-up (ids ascend with level)
        for id in 0..nodes.len() {
            let adj = if nodes[id].is_leaf() {
                leaf_adjacency(&space, &nodes[id], id as u32, &leaf_of)
            } else {
                inner_adjacency(&nodes, id)
            };
            let rows: Vec<(Vec<f64>, Vec<(u32, u32)>)> = (0..adj.len()).into_par_iter().map(|s| sssp(&adj, s)).collect();
            let node = &mut nodes[id];
            node.local = rows.iter().flat_map(|r| r.0.iter().copied()).collect();
            node.pred = rows.into_iter().flat_map(|r| r.1).collect();
        }

        // global refinement, top-down
        for id in (0..nodes.len()).rev() {
            refine(&mut nodes, id);
        }

        let mut tree = IpTree {
            space,
            objects: objects.to_vec(),
            variant,
            gamma,
            nodes,
            num_leaves,
            leaf_of,
            chains,
            extras: Vec::new(),
            buckets: vec![Vec::new(); np],
        };
        if variant == TreeVariant::Vip {
            tree.extras = (0..num_leaves).into_par_iter().map(|l| tree.materialize(l)).collect();
        }
        for o in objects {
            tree.buckets[o.host.index()].push(o.id);
        }
        Ok(tree)
    }

    /// Leaf-door to ancestor-access-door distances by relaying through each
    /// level's access doors.
    fn materialize(&self, leaf: usize) -> Vec<Extra> {
        let chain = &self.chains[leaf];
        let lnode = &self.nodes[leaf];
        let n = lnode.n();
        let mut out = vec![Extra::default()];
        let mut prev_to = lnode.glob.clone();
        let mut prev_from = lnode.glob_from.clone();
        for k in 1..chain.len() {
            let a_node = &self.nodes[chain[k] as usize];
            let below = &self.nodes[chain[k - 1] as usize];
            let (mp, mc, na) = (below.m(), a_node.m(), a_node.n());
            let g = |i: u32, j: u32| a_node.glob[i as usize * na + j as usize];
            let mut e = Extra {
                to: vec![f64::INFINITY; n * mc],
                to_relay: vec![NONE; n * mc],
                from: vec![f64::INFINITY; mc * n],
                from_relay: vec![NONE; mc * n],
            };
            for s in 0..n {
                for x in 0..mc {
                    for a in 0..mp {
                        let c = prev_to[s * mp + a] + g(below.ad_in_parent[a], a_node.ad[x]);
                        if c < e.to[s * mc + x] {
                            e.to[s * mc + x] = c;
                            e.to_relay[s * mc + x] = a as u32;
                        }
                    }
                }
            }
            for y in 0..mc {
                for t in 0..n {
                    for a in 0..mp {
                        let c = g(a_node.ad[y], below.ad_in_parent[a]) + prev_from[a * n + t];
                        if c < e.from[y * n + t] {
                            e.from[y * n + t] = c;
                            e.from_relay[y * n + t] = a as u32;
                        }
                    }
                }
            }
            prev_to = e.to.clone();
            prev_from = e.from.clone();
            out.push(e);
        }
        out
    }

    pub fn variant(&self) -> TreeVariant {
        self.variant
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn num_leaves(&self) -> usize {
        self.num_leaves
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of levels; a single leaf has height 1.
    pub fn height(&self) -> usize {
        self.nodes[self.root()].level as usize + 1
    }

    pub fn leaf_of(&self, v: PartitionId) -> Option<usize> {
        let l = self.leaf_of[v.index()];
        (l != NONE).then_some(l as usize)
    }

    /// Refined distance from a leaf door to one of the leaf's access doors.
    pub fn leaf_to_access(&self, leaf: usize, from: DoorId, ad: DoorId) -> Option<f64> {
        let node = &self.nodes[leaf];
        let i = node.keys.binary_search(&from).ok()?;
        let x = node.access_doors().iter().position(|&d| d == ad)?;
        Some(node.glob[i * node.m() + x])
    }

    /// Distance from leaf door `from` to an access door of the `k`-th ancestor,
    /// relayed level by level through the node matrices.
    pub fn relayed_to_ancestor(&self, leaf: usize, from: DoorId, k: usize, ad: DoorId) -> Option<f64> {
        let lnode = &self.nodes[leaf];
        let s = lnode.keys.binary_search(&from).ok()?;
        let chain = &self.chains[leaf];
        let mut cur: Vec<f64> = (0..lnode.m()).map(|x| lnode.glob[s * lnode.m() + x]).collect();
        for lvl in 1..=k.min(chain.len() - 1) {
            let a_node = &self.nodes[chain[lvl] as usize];
            let below = &self.nodes[chain[lvl - 1] as usize];
            cur = (0..a_node.m())
                .map(|x| {
                    (0..below.m())
                        .map(|a| cur[a] + a_node.glob[below.ad_in_parent[a] as usize * a_node.n() + a_node.ad[x] as usize])
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
        }
        let target = &self.nodes[*chain.get(k)? as usize];
        let x = target.access_doors().iter().position(|&d| d == ad)?;
        Some(cur[x])
    }

    /// Materialized VIP entry from leaf door `from` to an access door of the
    /// `k`-th ancestor.
    pub fn materialized_to_ancestor(&self, leaf: usize, from: DoorId, k: usize, ad: DoorId) -> Option<f64> {
        if k == 0 {
            return self.leaf_to_access(leaf, from, ad);
        }
        let e = self.extras.get(leaf)?.get(k)?;
        let lnode = &self.nodes[leaf];
        let s = lnode.keys.binary_search(&from).ok()?;
        let target = &self.nodes[self.chains[leaf][k] as usize];
        let x = target.access_doors().iter().position(|&d| d == ad)?;
        Some(e.to[s * target.m() + x])
    }

    /// Ancestors of a leaf, bottom-up and including the leaf.
    pub fn chain(&self, leaf: usize) -> &[u32] {
        &self.chains[leaf]
    }

    pub fn crucial(&self, v: PartitionId) -> bool {
        self.space.p2d(v).len() > self.gamma
    }
}

fn form_leaves(space: &IndoorSpace, gamma: usize) -> (Vec<Node>, Vec<u32>) {
    let np = space.num_partitions();
    let crucial = |v: PartitionId| space.p2d(v).len() > gamma;
    let neighbors = |v: PartitionId| {
        let mut ns: Vec<PartitionId> = space
            .p2d(v)
            .iter()
            .flat_map(|&d| space.door_partitions(d))
            .filter(|&w| w != PartitionId::OUTDOOR && w != v)
            .collect();
        ns.sort();
        ns.dedup();
        ns
    };
    let mut leaf_of = vec![NONE; np];
    let mut nodes = Vec::new();
    for s in 1..np {
        if leaf_of[s] != NONE {
            continue;
        }
        let id = nodes.len() as u32;
        let seed = PartitionId(s as u32);
        let mut members = vec![seed];
        let mut has_crucial = crucial(seed);
        leaf_of[s] = id;
        let mut queue = VecDeque::from([seed]);
        'grow: while let Some(v) = queue.pop_front() {
            for w in neighbors(v) {
                if members.len() >= LEAF_CAPACITY {
                    break 'grow;
                }
                if leaf_of[w.index()] != NONE || (has_crucial && crucial(w)) {
                    continue;
                }
                has_crucial |= crucial(w);
                leaf_of[w.index()] = id;
                members.push(w);
                queue.push_back(w);
            }
        }
        members.sort();
        nodes.push(empty_node(0, Vec::new(), members));
    }
    (nodes, leaf_of)
}

fn empty_node(level: u32, children: Vec<u32>, partitions: Vec<PartitionId>) -> Node {
    Node {
        level,
        parent: None,
        children,
        partitions,
        keys: Vec::new(),
        ad: Vec::new(),
        ad_in_parent: Vec::new(),
        local: Vec::new(),
        pred: Vec::new(),
        glob: Vec::new(),
        glob_route: Vec::new(),
        glob_from: Vec::new(),
        glob_from_route: Vec::new(),
    }
}

/// Pairs adjacent nodes level by level until one root remains. A node left
/// without an unpaired neighbor joins the group of its first neighbor.
fn merge_levels(space: &IndoorSpace, nodes: &mut Vec<Node>, leaf_of: &[u32]) {
    let mut owner: Vec<u32> = leaf_of.to_vec();
    let mut current: Vec<u32> = (0..nodes.len() as u32).collect();
    let mut level = 0;
    while current.len() > 1 {
        let mut shared: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for d in space.doors() {
            let mut os: Vec<u32> = space
                .door_partitions(d.id)
                .into_iter()
                .filter(|&v| v != PartitionId::OUTDOOR)
                .map(|v| owner[v.index()])
                .collect();
            os.sort();
            os.dedup();
            for i in 0..os.len() {
                for j in i + 1..os.len() {
                    *shared.entry((os[i], os[j])).or_default() += 1;
                    *shared.entry((os[j], os[i])).or_default() += 1;
                }
            }
        }
        let base = current[0];
        let slot = |n: u32| (n - base) as usize;
        let mut group = vec![NONE; current.len()];
        let mut groups: Vec<Vec<u32>> = Vec::new();
        for &n in &current {
            if group[slot(n)] != NONE {
                continue;
            }
            let best = shared
                .range((n, 0)..(n + 1, 0))
                .filter(|(&(_, m), _)| group[slot(m)] == NONE)
                .max_by(|a, b| a.1.cmp(b.1).then(b.0 .1.cmp(&a.0 .1)))
                .map(|(&(_, m), _)| m);
            if let Some(m) = best {
                group[slot(n)] = groups.len() as u32;
                group[slot(m)] = groups.len() as u32;
                groups.push(vec![n, m]);
            }
        }
        for &n in &current {
            if group[slot(n)] != NONE {
                continue;
            }
            let first = shared.range((n, 0)..(n + 1, 0)).next().map(|(&(_, m), _)| m);
            match first {
                Some(m) => {
                    let g = group[slot(m)];
                    group[slot(n)] = g;
                    groups[g as usize].push(n);
                }
                // only reachable for a single isolated node, which the
                // connectivity check rules out
                None => {
                    group[slot(n)] = groups.len() as u32;
                    groups.push(vec![n]);
                }
            }
        }
        level += 1;
        let mut next = Vec::with_capacity(groups.len());
        for mut g in groups {
            g.sort();
            let id = nodes.len() as u32;
            for &c in &g {
                nodes[c as usize].parent = Some(id);
            }
            nodes.push(empty_node(level, g, Vec::new()));
            next.push(id);
        }
        for o in owner.iter_mut() {
            if *o != NONE {
                *o = nodes[*o as usize].parent.unwrap();
            }
        }
        current = next;
    }
}

type Adjacency = Vec<Vec<(u32, f64, u32)>>;

fn leaf_adjacency(space: &IndoorSpace, node: &Node, id: u32, leaf_of: &[u32]) -> Adjacency {
    node.keys
        .iter()
        .map(|&u| {
            let mut edges = Vec::new();
            for &v in space.d2p_enter(u) {
                if v == PartitionId::OUTDOOR || leaf_of[v.index()] != id {
                    continue;
                }
                for &w in space.p2d_leave(v) {
                    if w != u {
                        edges.push((node.pos(w) as u32, space.door_leg(v, u, w), v.0));
                    }
                }
            }
            edges
        })
        .collect()
}

fn inner_adjacency(nodes: &[Node], id: usize) -> Adjacency {
    let node = &nodes[id];
    let mut adj = vec![Vec::new(); node.n()];
    for (slot, &c) in node.children.iter().enumerate() {
        let child = &nodes[c as usize];
        for (x, &ix) in child.ad.iter().enumerate() {
            for (y, &iy) in child.ad.iter().enumerate() {
                let w = child.local(ix as usize, iy as usize);
                if x != y && w.is_finite() {
                    adj[child.ad_in_parent[x] as usize].push((child.ad_in_parent[y], w, slot as u32));
                }
            }
        }
    }
    adj
}

fn sssp(adj: &Adjacency, src: usize) -> (Vec<f64>, Vec<(u32, u32)>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![(NONE, NONE); n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((OrdF64(0.0), src as u32)));
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        let u = u as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(j, w, label) in &adj[u] {
            let c = d + w;
            if c < dist[j as usize] {
                dist[j as usize] = c;
                pred[j as usize] = (u as u32, label);
                heap.push(Reverse((OrdF64(c), j)));
            }
        }
    }
    (dist, pred)
}

/// Turns local distances into global ones using the parent's (already global)
/// access-door distances: a shortest path either stays inside the node or
/// leaves through one access door and last re-enters through another.
fn refine(nodes: &mut [Node], id: usize) {
    let node = &nodes[id];
    let (n, m) = (node.n(), node.m());
    // via[a][y]: best local(a, x) + parent(x, y) over exits x
    let mut via = vec![(f64::INFINITY, NONE); n * m];
    if let Some(p) = node.parent {
        let parent = &nodes[p as usize];
        let np = parent.n();
        for a in 0..n {
            for y in 0..m {
                let py = node.ad_in_parent[y] as usize;
                let mut best = (f64::INFINITY, NONE);
                for x in 0..m {
                    let c = node.local(a, node.ad[x] as usize) + parent.glob[node.ad_in_parent[x] as usize * np + py];
                    if c < best.0 {
                        best = (c, x as u32);
                    }
                }
                via[a * m + y] = best;
            }
        }
    }
    let entry = |a: usize, b: usize| -> (f64, Route) {
        let mut best = (node.local(a, b), Route::Inside);
        for y in 0..m {
            let (t, x) = via[a * m + y];
            let c = t + node.local(node.ad[y] as usize, b);
            if c < best.0 {
                best = (c, Route::Out(x, y as u32));
            }
        }
        best
    };
    let (mut glob, mut route, mut glob_from, mut from_route) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    if node.is_leaf() {
        for a in 0..n {
            for &x in &node.ad {
                let (d, r) = entry(a, x as usize);
                glob.push(d);
                route.push(r);
            }
        }
        for &y in &node.ad {
            for b in 0..n {
                let (d, r) = entry(y as usize, b);
                glob_from.push(d);
                from_route.push(r);
            }
        }
    } else {
        for a in 0..n {
            for b in 0..n {
                let (d, r) = entry(a, b);
                glob.push(d);
                route.push(r);
            }
        }
    }
    let node = &mut nodes[id];
    node.glob = glob;
    node.glob_route = route;
    node.glob_from = glob_from;
    node.glob_from_route = from_route;
}

impl IndoorIndex for IpTree {
    fn kind(&self) -> IndexKind {
        match self.variant {
            TreeVariant::Ip => IndexKind::IpTree,
            TreeVariant::Vip => IndexKind::VipTree,
        }
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
        let nodes: usize = self
            .nodes
            .iter()
            .map(|n| {
                size_of::<Node>()
                    + size_of::<u32>() * n.children.len()
                    + size_of::<PartitionId>() * n.partitions.len()
                    + size_of::<DoorId>() * n.keys.len()
                    + size_of::<u32>() * (n.ad.len() + n.ad_in_parent.len())
                    + size_of::<f64>() * (n.local.len() + n.glob.len() + n.glob_from.len())
                    + size_of::<(u32, u32)>() * n.pred.len()
                    + size_of::<Route>() * (n.glob_route.len() + n.glob_from_route.len())
            })
            .sum();
        let extras: usize = self
            .extras
            .iter()
            .flatten()
            .map(|e| vec_bytes(&e.to) + vec_bytes(&e.to_relay) + vec_bytes(&e.from) + vec_bytes(&e.from_relay))
            .sum();
        let chains: usize = self.chains.iter().map(|c| vec_bytes(c)).sum();
        nodes + extras + chains + vec_bytes(&self.leaf_of) + self.buckets.len() * size_of::<Vec<ObjectId>>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::DoorGraph;

    fn tree(s: IndoorSpace, v: TreeVariant) -> IpTree {
        let objs = fixtures::fix_a_objects(&s);
        IpTree::build(Arc::new(s), &objs, DEFAULT_GAMMA, v).unwrap()
    }

    #[test]
    fn fix_a_single_leaf() {
        let t = tree(fixtures::fix_a(), TreeVariant::Ip);
        assert_eq!(t.num_leaves(), 1);
        assert_eq!(t.height(), 1);
        let leaf = &t.nodes()[0];
        assert_eq!(leaf.partitions, vec![PartitionId(1), PartitionId(2)]);
        assert!(leaf.access_doors().is_empty());
        assert_eq!(leaf.keys(), &[DoorId(0), DoorId(1)]);
        assert_eq!(leaf.local(0, 1), 10.0);
    }

    #[test]
    fn grid_structure_and_oracle() {
        let s = fixtures::grid(5, 10.0);
        let t = IpTree::build(Arc::new(s.clone()), &[], DEFAULT_GAMMA, TreeVariant::Vip).unwrap();
        assert!(t.num_leaves() >= 4);
        assert!(t.height() >= 3);
        for n in t.nodes() {
            if n.is_leaf() {
                assert!(n.partitions.len() <= LEAF_CAPACITY);
                assert!(n.partitions.iter().filter(|&&v| t.crucial(v)).count() <= 1);
            } else {
                assert!(n.children.len() >= 2);
            }
        }
        let g = DoorGraph::new(&s);
        for l in 0..t.num_leaves() {
            let leaf = &t.nodes()[l];
            for &d in leaf.keys() {
                for ad in leaf.access_doors() {
                    let want = g.door_to_door(d, ad);
                    let got = t.leaf_to_access(l, d, ad).unwrap();
                    assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{d}->{ad}: {got} vs {want}");
                }
                for (k, &a) in t.chain(l).iter().enumerate() {
                    for ad in t.nodes()[a as usize].access_doors() {
                        let ip = t.relayed_to_ancestor(l, d, k, ad).unwrap();
                        let vip = t.materialized_to_ancestor(l, d, k, ad).unwrap();
                        let want = g.door_to_door(d, ad);
                        assert!((ip - vip).abs() <= 1e-9 * ip.max(1.0));
                        assert!((ip - want).abs() <= 1e-9 * want.max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn access_door_is_zero_to_itself() {
        let s = fixtures::grid(5, 10.0);
        let t = IpTree::build(Arc::new(s), &[], DEFAULT_GAMMA, TreeVariant::Vip).unwrap();
        for l in 0..t.num_leaves() {
            for (k, &a) in t.chain(l).iter().enumerate() {
                for ad in t.nodes()[a as usize].access_doors() {
                    if t.nodes()[l].keys().contains(&ad) {
                        assert_eq!(t.materialized_to_ancestor(l, ad, k, ad), Some(0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        let mut b = crate::space::SpaceBuilder::new();
        let r1 = b.rect(0, crate::space::PartitionKind::Room, crate::geom::Rect::new(0.0, 0.0, 5.0, 5.0));
        let r2 = b.rect(0, crate::space::PartitionKind::Room, crate::geom::Rect::new(10.0, 0.0, 15.0, 5.0));
        b.two_way(IndoorPoint::new(0, 0.0, 2.0), r1, PartitionId::OUTDOOR);
        b.two_way(IndoorPoint::new(0, 15.0, 2.0), r2, PartitionId::OUTDOOR);
        let s = b.build().unwrap();
        let e = IpTree::build(Arc::new(s), &[], DEFAULT_GAMMA, TreeVariant::Ip).unwrap_err();
        assert!(matches!(e, SpaceError::Disconnected(ref m) if m.contains("v1") && m.contains("v2")));
    }
}
