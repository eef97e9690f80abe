//! Query result types and the interface shared by all five indexes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cindex::CIndex;
use crate::error::{QueryError, SpaceError};
use crate::idindex::IdIndex;
use crate::idmodel::IdModel;
use crate::iptree::{IpTree, TreeVariant};
use crate::metrics::Counters;
use crate::space::{IndoorObject, IndoorPath, IndoorPoint, IndoorSpace, ObjectId, PartitionId};

#[derive(Clone, Debug, PartialEq)]
pub struct KnnResult {
    /// Ascending by distance, ties by object id.
    pub neighbors: Vec<(ObjectId, f64)>,
    /// Fewer than k objects were reachable.
    pub shortfall: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpdqResult {
    pub path: IndoorPath,
    pub distance: f64,
}

impl SpdqResult {
    pub fn new(path: IndoorPath) -> Self {
        let distance = path.length;
        SpdqResult { path, distance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    IdModel,
    IdIndex,
    CIndex,
    IpTree,
    VipTree,
}

impl IndexKind {
    pub const ALL: [IndexKind; 5] = [
        IndexKind::IdModel,
        IndexKind::IdIndex,
        IndexKind::CIndex,
        IndexKind::IpTree,
        IndexKind::VipTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::IdModel => "idmodel",
            IndexKind::IdIndex => "idindex",
            IndexKind::CIndex => "cindex",
            IndexKind::IpTree => "iptree",
            IndexKind::VipTree => "viptree",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown index {s:?}"))
    }
}

/// Common query interface. Every method takes a counter sink that the
/// harness reads after the call.
pub trait IndoorIndex: Send + Sync {
    fn kind(&self) -> IndexKind;

    fn space(&self) -> &IndoorSpace;

    /// Objects within indoor distance `r`, ascending by id.
    fn range(&self, p: &IndoorPoint, r: f64, c: &mut Counters) -> Result<Vec<ObjectId>, QueryError>;

    fn knn(&self, p: &IndoorPoint, k: usize, c: &mut Counters) -> Result<KnnResult, QueryError>;

    fn spdq(&self, p: &IndoorPoint, q: &IndoorPoint, c: &mut Counters) -> Result<SpdqResult, QueryError>;

    /// Structural footprint in bytes, excluding the object payloads.
    fn structural_bytes(&self) -> usize;
}

/// Builds any of the five indexes over a shared space.
pub fn build_index(
    kind: IndexKind,
    space: Arc<IndoorSpace>,
    objects: &[IndoorObject],
    gamma: usize,
) -> Result<Box<dyn IndoorIndex>, SpaceError> {
    Ok(match kind {
        IndexKind::IdModel => Box::new(IdModel::build(space, objects)),
        IndexKind::IdIndex => Box::new(IdIndex::build(IdModel::build(space, objects))),
        IndexKind::CIndex => Box::new(CIndex::build(space, objects)),
        IndexKind::IpTree => Box::new(IpTree::build(space, objects, gamma, TreeVariant::Ip)?),
        IndexKind::VipTree => Box::new(IpTree::build(space, objects, gamma, TreeVariant::Vip)?),
    })
}

pub(crate) fn locate(space: &IndoorSpace, p: &IndoorPoint) -> Result<PartitionId, QueryError> {
    space.host_partition(p).ok_or(QueryError::Unlocatable(*p))
}

pub(crate) fn check_radius(r: f64) -> Result<(), QueryError> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(QueryError::BadRadius(r))
    }
}

/// Total-order wrapper for finite and infinite distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Keeps the best distance seen per object and exposes the current k-th best.
pub(crate) struct KnnCollector {
    k: usize,
    best: HashMap<u32, f64>,
    ordered: BTreeSet<(OrdF64, u32)>,
}

impl KnnCollector {
    pub fn new(k: usize) -> Self {
        KnnCollector { k, best: HashMap::new(), ordered: BTreeSet::new() }
    }

    pub fn offer(&mut self, o: ObjectId, d: f64) {
        if !d.is_finite() || d > self.bound() {
            return;
        }
        match self.best.get(&o.0) {
            Some(&old) if old <= d => return,
            Some(&old) => {
                self.ordered.remove(&(OrdF64(old), o.0));
            }
            None => {}
        }
        self.best.insert(o.0, d);
        self.ordered.insert((OrdF64(d), o.0));
        // Entries beyond k can never re-enter; drop them to keep the set small.
        while self.ordered.len() > self.k {
            let last = *self.ordered.iter().next_back().unwrap();
            self.ordered.remove(&last);
            self.best.remove(&last.1);
        }
    }

    /// Current k-th best distance, infinite until k objects are known.
    pub fn bound(&self) -> f64 {
        if self.ordered.len() < self.k {
            f64::INFINITY
        } else {
            self.ordered.iter().next_back().map_or(f64::INFINITY, |e| e.0 .0)
        }
    }

    pub fn finish(self) -> KnnResult {
        let neighbors: Vec<(ObjectId, f64)> = self.ordered.iter().map(|&(d, o)| (ObjectId(o), d.0)).collect();
        KnnResult { shortfall: neighbors.len() < self.k, neighbors }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collector_keeps_k_best_with_id_ties() {
        let mut c = KnnCollector::new(2);
        c.offer(ObjectId(5), 3.0);
        c.offer(ObjectId(1), 3.0);
        assert_eq!(c.bound(), 3.0);
        c.offer(ObjectId(9), 1.0);
        c.offer(ObjectId(5), 0.5);
        let r = c.finish();
        assert_eq!(r.neighbors, vec![(ObjectId(5), 0.5), (ObjectId(9), 1.0)]);
        assert!(!r.shortfall);
    }

    #[test]
    fn index_kind_round_trip() {
        for k in IndexKind::ALL {
            assert_eq!(k.name().parse::<IndexKind>().unwrap(), k);
        }
        assert!("rtree".parse::<IndexKind>().is_err());
    }
}
