//! Door-graph Dijkstra state shared by IDModel and CIndex. Both expand the
//! same door sets in the same order, so their settle counts agree exactly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::mem::size_of;

use crate::metrics::Counters;
use crate::space::{DoorId, PartitionId};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    dist: f64,
    door: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, door)
        other.dist.total_cmp(&self.dist).then_with(|| other.door.cmp(&self.door))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct Frontier {
    dist: Vec<f64>,
    prev_door: Vec<u32>,
    /// Partition traversed to reach each door (the last-hop partition).
    prev_part: Vec<u32>,
    settled: Vec<bool>,
    heap: BinaryHeap<Entry>,
    peak_heap: usize,
}

impl Frontier {
    pub fn new(doors: usize) -> Self {
        Frontier {
            dist: vec![f64::INFINITY; doors],
            prev_door: vec![NONE; doors],
            prev_part: vec![NONE; doors],
            settled: vec![false; doors],
            heap: BinaryHeap::new(),
            peak_heap: 0,
        }
    }

    /// Offers a start door reached directly from the query point through `via`.
    pub fn seed(&mut self, d: DoorId, dist: f64, via: Option<PartitionId>) {
        let i = d.index();
        if dist < self.dist[i] {
            self.dist[i] = dist;
            self.prev_door[i] = NONE;
            self.prev_part[i] = via.map_or(NONE, |v| v.0);
            self.push(dist, d.0);
        }
    }

    fn push(&mut self, dist: f64, door: u32) {
        self.heap.push(Entry { dist, door });
        self.peak_heap = self.peak_heap.max(self.heap.len());
    }

    /// Pops the nearest unsettled door and marks it settled.
    pub fn next(&mut self, c: &mut Counters) -> Option<(DoorId, f64)> {
        while let Some(Entry { dist, door }) = self.heap.pop() {
            let i = door as usize;
            if self.settled[i] || dist > self.dist[i] {
                continue;
            }
            self.settled[i] = true;
            c.doors_settled += 1;
            return Some((DoorId(door), dist));
        }
        None
    }

    pub fn relax(&mut self, from: DoorId, via: PartitionId, to: DoorId, w: f64) {
        let j = to.index();
        if self.settled[j] {
            return;
        }
        let cand = self.dist[from.index()] + w;
        if cand < self.dist[j] {
            self.dist[j] = cand;
            self.prev_door[j] = from.0;
            self.prev_part[j] = via.0;
            self.push(cand, to.0);
        }
    }

    pub fn dist(&self, d: DoorId) -> f64 {
        self.dist[d.index()]
    }

    /// Partition the door was reached through, if any.
    pub fn last_hop(&self, d: DoorId) -> Option<PartitionId> {
        let v = self.prev_part[d.index()];
        (v != NONE).then_some(PartitionId(v))
    }

    /// Door sequence from a seed to `d` and the partition traversed before
    /// each door.
    pub fn trace(&self, d: DoorId) -> (Vec<DoorId>, Vec<PartitionId>) {
        let mut doors = Vec::new();
        let mut legs = Vec::new();
        let mut cur = d.0;
        while cur != NONE {
            doors.push(DoorId(cur));
            legs.push(PartitionId(self.prev_part[cur as usize]));
            cur = self.prev_door[cur as usize];
        }
        doors.reverse();
        legs.reverse();
        (doors, legs)
    }

    /// For a traversal seeded only at `src`: the first door after `src` on
    /// the tree path to each door (`None` for `src` and unreached doors).
    pub fn first_hops(&self, src: DoorId) -> Vec<Option<DoorId>> {
        const UNSET: u32 = u32::MAX - 1;
        let n = self.dist.len();
        let mut memo = vec![UNSET; n];
        let mut stack = Vec::new();
        for t in 0..n {
            if t == src.index() || !self.dist[t].is_finite() {
                memo[t] = NONE;
                continue;
            }
            let mut cur = t;
            let h = loop {
                if memo[cur] != UNSET {
                    break memo[cur];
                }
                let pd = self.prev_door[cur];
                if pd == src.0 {
                    break cur as u32;
                }
                if pd == NONE {
                    break NONE;
                }
                stack.push(cur);
                cur = pd as usize;
            };
            memo[cur] = if memo[cur] == UNSET { h } else { memo[cur] };
            for s in stack.drain(..) {
                memo[s] = h;
            }
        }
        memo.into_iter().map(|h| (h != NONE).then_some(DoorId(h))).collect()
    }

    pub fn transient_bytes(&self) -> usize {
        let n = self.dist.len();
        n * (size_of::<f64>() + 2 * size_of::<u32>() + size_of::<bool>()) + self.peak_heap * size_of::<Entry>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_distance_then_id_order() {
        let mut f = Frontier::new(4);
        let mut c = Counters::default();
        f.seed(DoorId(3), 1.0, None);
        f.seed(DoorId(1), 1.0, None);
        f.seed(DoorId(2), 0.5, None);
        let order: Vec<u32> = std::iter::from_fn(|| f.next(&mut c)).map(|(d, _)| d.0).collect();
        assert_eq!(order, vec![2, 1, 3]);
        assert_eq!(c.doors_settled, 3);
    }

    #[test]
    fn trace_follows_relaxations() {
        let mut f = Frontier::new(3);
        let mut c = Counters::default();
        f.seed(DoorId(0), 0.0, Some(PartitionId(1)));
        let (d, _) = f.next(&mut c).unwrap();
        f.relax(d, PartitionId(2), DoorId(2), 4.0);
        let (d, _) = f.next(&mut c).unwrap();
        assert_eq!(d, DoorId(2));
        assert_eq!(f.trace(d), (vec![DoorId(0), DoorId(2)], vec![PartitionId(1), PartitionId(2)]));
    }
}
