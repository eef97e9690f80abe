//! Static R-tree bulk-loaded with sort-tile-recursive packing, one subtree
//! per floor.

use std::mem::size_of;

use crate::geom::{Point2, Rect};
use crate::space::PartitionId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub mbr: Rect,
    pub floor: u32,
    pub id: PartitionId,
}

#[derive(Clone, Debug)]
pub enum Children {
    Leaf(Vec<Entry>),
    Inner(Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub mbr: Rect,
    pub floor_lo: u32,
    pub floor_hi: u32,
    pub children: Children,
}

#[derive(Clone, Debug)]
pub struct RTree {
    nodes: Vec<Node>,
    root: Option<u32>,
    fanout: usize,
    height: usize,
}

impl RTree {
    pub fn bulk_load(mut entries: Vec<Entry>, fanout: usize) -> Self {
        assert!(fanout >= 2, "fan-out must be at least 2");
        let mut tree = RTree { nodes: Vec::new(), root: None, fanout, height: 0 };
        if entries.is_empty() {
            return tree;
        }
        entries.sort_by_key(|e| (e.floor, e.id));
        let mut floor_roots = Vec::new();
        let mut height = 0;
        let mut start = 0;
        while start < entries.len() {
            let f = entries[start].floor;
            let end = start + entries[start..].iter().take_while(|e| e.floor == f).count();
            let (root, h) = tree.pack_floor(&entries[start..end]);
            floor_roots.push(root);
            height = height.max(h);
            start = end;
        }
        // join per-floor subtrees; height counts the tallest path
        let mut level = floor_roots;
        while level.len() > 1 {
            let mut next = Vec::new();
            for chunk in level.chunks(fanout) {
                next.push(tree.push_inner(chunk.to_vec()));
            }
            level = next;
            height += 1;
        }
        tree.root = Some(level[0]);
        tree.height = height;
        tree
    }

    /// Packs one floor; returns its root and height.
    fn pack_floor(&mut self, entries: &[Entry]) -> (u32, usize) {
        let fanout = self.fanout;
        let mut leaves = Vec::new();
        for group in str_groups(entries.to_vec(), fanout, |e| e.mbr.center()) {
            leaves.push(self.push_leaf(group));
        }
        let mut level = leaves;
        let mut height = 1;
        while level.len() > 1 {
            let items: Vec<(u32, Point2)> = level.iter().map(|&n| (n, self.nodes[n as usize].mbr.center())).collect();
            let mut next = Vec::new();
            for group in str_groups(items, fanout, |x| x.1) {
                next.push(self.push_inner(group.into_iter().map(|x| x.0).collect()));
            }
            level = next;
            height += 1;
        }
        (level[0], height)
    }

    fn push_leaf(&mut self, entries: Vec<Entry>) -> u32 {
        let mbr = entries.iter().skip(1).fold(entries[0].mbr, |m, e| m.union(&e.mbr));
        let floor_lo = entries.iter().map(|e| e.floor).min().unwrap();
        let floor_hi = entries.iter().map(|e| e.floor).max().unwrap();
        self.nodes.push(Node { mbr, floor_lo, floor_hi, children: Children::Leaf(entries) });
        (self.nodes.len() - 1) as u32
    }

    fn push_inner(&mut self, kids: Vec<u32>) -> u32 {
        let first = &self.nodes[kids[0] as usize];
        let (mut mbr, mut lo, mut hi) = (first.mbr, first.floor_lo, first.floor_hi);
        for &k in &kids[1..] {
            let n = &self.nodes[k as usize];
            mbr = mbr.union(&n.mbr);
            lo = lo.min(n.floor_lo);
            hi = hi.max(n.floor_hi);
        }
        self.nodes.push(Node { mbr, floor_lo: lo, floor_hi: hi, children: Children::Inner(kids) });
        (self.nodes.len() - 1) as u32
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> Option<&Node> {
        self.root.map(|r| &self.nodes[r as usize])
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.children, Children::Leaf(_))).count()
    }

    /// Entries whose MBR contains `p` on `floor`, ascending by id.
    pub fn point_query(&self, floor: u32, p: Point2, eps: f64) -> Vec<PartitionId> {
        let mut out = Vec::new();
        self.walk(
            |n| floor >= n.floor_lo && floor <= n.floor_hi && n.mbr.contains(p, eps),
            |e| e.floor == floor && e.mbr.contains(p, eps),
            &mut out,
        );
        out.sort();
        out
    }

    /// Entries whose MBR lies within planar distance `r` of `p`, on any floor.
    pub fn within(&self, p: Point2, r: f64) -> Vec<PartitionId> {
        let mut out = Vec::new();
        self.walk(|n| n.mbr.min_dist(p) <= r, |e| e.mbr.min_dist(p) <= r, &mut out);
        out.sort();
        out
    }

    fn walk(&self, node_ok: impl Fn(&Node) -> bool, entry_ok: impl Fn(&Entry) -> bool, out: &mut Vec<PartitionId>) {
        let Some(root) = self.root else { return };
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if !node_ok(n) {
                continue;
            }
            match &n.children {
                Children::Leaf(es) => out.extend(es.iter().filter(|e| entry_ok(e)).map(|e| e.id)),
                Children::Inner(kids) => stack.extend(kids.iter().rev()),
            }
        }
    }

    /// Node pages at full fan-out capacity: header plus `fanout` slots of
    /// (MBR, child reference).
    pub fn structural_bytes(&self) -> usize {
        let header = size_of::<Rect>() + 2 * size_of::<u32>();
        let slot = size_of::<Rect>() + size_of::<u64>();
        self.nodes.len() * (header + self.fanout * slot)
    }
}

/// Sort-tile-recursive grouping: slice by x, then tile each slice by y.
fn str_groups<T: Clone>(mut items: Vec<T>, fanout: usize, center: impl Fn(&T) -> Point2) -> Vec<Vec<T>> {
    let n = items.len();
    let pages = n.div_ceil(fanout);
    let slices = (pages as f64).sqrt().ceil() as usize;
    let per_slice = slices * fanout;
    items.sort_by(|a, b| center(a).x.total_cmp(&center(b).x));
    let mut groups = Vec::new();
    for slice in items.chunks_mut(per_slice.max(1)) {
        slice.sort_by(|a, b| center(a).y.total_cmp(&center(b).y));
        for g in slice.chunks(fanout) {
            groups.push(g.to_vec());
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_entries(n: usize) -> Vec<Entry> {
        let mut v = Vec::new();
        for i in 0..n * n {
            let (x, y) = ((i % n) as f64, (i / n) as f64);
            v.push(Entry { mbr: Rect::new(x, y, x + 1.0, y + 1.0), floor: 0, id: PartitionId(i as u32 + 1) });
        }
        v
    }

    #[test]
    fn grid_5x5_height_two() {
        let t = RTree::bulk_load(grid_entries(5), 20);
        assert_eq!(t.height(), 2);
        assert_eq!(t.num_leaves(), 2);
    }

    #[test]
    fn two_entries_single_root() {
        let t = RTree::bulk_load(grid_entries(1).into_iter().chain(grid_entries(1)).collect(), 20);
        assert_eq!(t.height(), 1);
    }

    #[test]
    fn parents_contain_children() {
        let t = RTree::bulk_load(grid_entries(12), 20);
        for n in t.nodes() {
            match &n.children {
                Children::Leaf(es) => assert!(es.iter().all(|e| n.mbr.contains_rect(&e.mbr))),
                Children::Inner(k) => assert!(k.iter().all(|&c| n.mbr.contains_rect(&t.nodes()[c as usize].mbr))),
            }
        }
        assert_eq!(t.point_query(0, Point2::new(3.5, 4.5), 0.0), vec![PartitionId(4 * 12 + 3 + 1)]);
        assert_eq!(t.within(Point2::new(-10.0, -10.0), 1.0), vec![]);
    }
}
