use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::format::Query;
use crate::geom::Rect;
use crate::oracle::DoorGraph;
use crate::space::{IndoorObject, IndoorPoint, IndoorSpace, ObjectId, PartitionId, PartitionKind};

/// Tolerance band around the s2t target, as a fraction of it.
pub const S2T_TOLERANCE: f64 = 0.05;
pub const S2T_RETRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryKind {
    Range,
    Knn,
    Spdq,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Range => "RQ",
            QueryKind::Knn => "KNN",
            QueryKind::Spdq => "SPDQ",
        }
    }

    pub fn of(q: &Query) -> QueryKind {
        match q {
            Query::Range { .. } => QueryKind::Range,
            Query::Knn { .. } => QueryKind::Knn,
            Query::Spdq { .. } => QueryKind::Spdq,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadSpec {
    pub kind: QueryKind,
    /// r values, k values or s2t targets.
    pub params: Vec<f64>,
    pub per_value: usize,
    pub seed: u64,
    /// Ids are assigned from here upwards.
    pub first_id: u32,
}

impl WorkloadSpec {
    pub fn new(kind: QueryKind, params: Vec<f64>, seed: u64) -> Self {
        WorkloadSpec { kind, params, per_value: 10, seed, first_id: 0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkloadError {
    #[error("s2t {0} not attainable within {S2T_RETRIES} attempts")]
    S2tUnattainable(f64),
    #[error("parameter must be positive, got {0}")]
    BadParam(f64),
    #[error("space has no room or hallway to sample from")]
    NoHosts,
}

/// Area-weighted sampler over room and hallway partitions.
struct Sampler<'a> {
    space: &'a IndoorSpace,
    hosts: Vec<(PartitionId, Rect)>,
    cumulative: Vec<f64>,
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl<'a> Sampler<'a> {
    fn new(space: &'a IndoorSpace) -> Self {
        let mut hosts = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for p in space.object_hosts() {
            total += crate::geom::area(&p.boundary);
            hosts.push((p.id, p.mbr().expect("host has an MBR")));
            cumulative.push(total);
        }
        Sampler { space, hosts, cumulative }
    }

    fn point_in(&self, v: PartitionId, rng: &mut ChaCha8Rng) -> IndoorPoint {
        let r = self.space.mbr(v).expect("host has an MBR");
        let floor = self.space.partition(v).floor;
        loop {
            let p = IndoorPoint::new(floor, round6(rng.gen_range(r.min_x..r.max_x)), round6(rng.gen_range(r.min_y..r.max_y)));
            if self.space.contains(v, &p) && self.locatable(&p) {
                return p;
            }
        }
    }

    fn locatable(&self, p: &IndoorPoint) -> bool {
        self.space
            .host_partition(p)
            .is_some_and(|h| matches!(self.space.partition(h).kind, PartitionKind::Room | PartitionKind::Hallway))
    }

    /// Uniform over the union of host interiors: pick a host by area, then
    /// rejection-sample inside it.
    fn point(&self, rng: &mut ChaCha8Rng) -> IndoorPoint {
        let total = *self.cumulative.last().expect("sampler has hosts");
        let u = rng.gen_range(0.0..total);
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.hosts.len() - 1);
        self.point_in(self.hosts[i].0, rng)
    }
}

/// `count` objects uniformly over room and hallway interiors, ids 0..count.
pub fn place_objects(space: &IndoorSpace, count: usize, seed: u64) -> Vec<IndoorObject> {
    if count == 0 {
        return Vec::new();
    }
    let s = Sampler::new(space);
    assert!(!s.hosts.is_empty(), "space has no object hosts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let p = s.point(&mut rng);
            space.locate_object(ObjectId(i as u32), p).expect("sampled point is locatable")
        })
        .collect()
}

/// Queries for every parameter value, `per_value` each, in parameter order.
pub fn generate_workload(space: &IndoorSpace, spec: &WorkloadSpec) -> Result<Vec<Query>, WorkloadError> {
    let s = Sampler::new(space);
    if s.hosts.is_empty() {
        return Err(WorkloadError::NoHosts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let graph = (spec.kind == QueryKind::Spdq).then(|| DoorGraph::new(space));
    let mut out = Vec::new();
    let mut id = spec.first_id;
    for &param in &spec.params {
        if !(param.is_finite() && param > 0.0) {
            return Err(WorkloadError::BadParam(param));
        }
        for _ in 0..spec.per_value {
            let q = match spec.kind {
                QueryKind::Range => Query::Range { id, p: s.point(&mut rng), r: param },
                QueryKind::Knn => Query::Knn { id, p: s.point(&mut rng), k: param as usize },
                QueryKind::Spdq => {
                    let (p, q) = spdq_pair(&s, graph.as_ref().unwrap(), param, &mut rng)?;
                    Query::Spdq { id, p, q, s2t: param }
                }
            };
            out.push(q);
            id += 1;
        }
    }
    Ok(out)
}

/// Picks p at random, a door d at roughly s2t from it, then q in a partition
/// entered through d; keeps the pair once the realized distance is within the
/// tolerance band.
fn spdq_pair(
    s: &Sampler,
    graph: &DoorGraph,
    s2t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(IndoorPoint, IndoorPoint), WorkloadError> {
    let space = s.space;
    let band = S2T_TOLERANCE * s2t;
    for _ in 0..S2T_RETRIES {
        let p = s.point(rng);
        let Ok(dist) = graph.from_point(&p) else { continue };
        let doors: Vec<usize> = (0..dist.len())
            .filter(|&d| dist[d] >= s2t - 3.0 * band && dist[d] <= s2t + band)
            .collect();
        let Some(&d) = doors.choose(rng) else { continue };
        let enter: Vec<PartitionId> = space
            .d2p_enter(crate::space::DoorId(d as u32))
            .iter()
            .copied()
            .filter(|&v| matches!(space.partition(v).kind, PartitionKind::Room | PartitionKind::Hallway))
            .collect();
        let Some(&v) = enter.choose(rng) else { continue };
        let q = s.point_in(v, rng);
        let Ok((_, realized)) = graph.spdq(&p, &q) else { continue };
        if (realized - s2t).abs() <= band {
            return Ok((p, q));
        }
    }
    Err(WorkloadError::S2tUnattainable(s2t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{generate_syn, SynConfig};
    use crate::fixtures;

    #[test]
    fn objects_are_hosted_and_deterministic() {
        let s = fixtures::two_floor_l();
        assert!(place_objects(&s, 0, 1).is_empty());
        let a = place_objects(&s, 200, 42);
        assert_eq!(a, place_objects(&s, 200, 42));
        for o in &a {
            assert_eq!(s.host_partition(&o.location), Some(o.host));
            assert_ne!(s.partition(o.host).kind, PartitionKind::Staircase);
        }
    }

    #[test]
    fn spdq_pairs_hit_the_band() {
        let s = generate_syn(&SynConfig::new(1));
        let spec = WorkloadSpec::new(QueryKind::Spdq, vec![1100.0, 1500.0], 3);
        let w = generate_workload(&s, &spec).unwrap();
        assert_eq!(w.len(), 20);
        for q in &w {
            let Query::Spdq { p, q, s2t, .. } = q else { panic!() };
            let (_, d) = crate::oracle::oracle_spdq(&s, p, q).unwrap();
            assert!((d - s2t).abs() <= 0.05 * s2t, "{d} vs {s2t}");
        }
    }

    #[test]
    fn unattainable_s2t_names_the_value() {
        let s = fixtures::fix_a();
        let spec = WorkloadSpec::new(QueryKind::Spdq, vec![5000.0], 3);
        assert_eq!(generate_workload(&s, &spec), Err(WorkloadError::S2tUnattainable(5000.0)));
    }

    #[test]
    fn range_and_knn_counts() {
        let s = fixtures::grid(5, 10.0);
        let w = generate_workload(&s, &WorkloadSpec::new(QueryKind::Knn, vec![1.0, 5.0, 10.0, 50.0, 100.0], 9)).unwrap();
        assert_eq!(w.len(), 50);
        assert_eq!(w.iter().map(|q| q.id()).collect::<Vec<_>>(), (0..50).collect::<Vec<_>>());
        assert!(matches!(w[49], Query::Knn { k: 100, .. }));
    }
}
