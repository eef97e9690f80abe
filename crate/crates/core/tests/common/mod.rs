#![allow(dead_code)]

use std::sync::Arc;

use isq::bench::{close, compare, execute, Answer};
use isq::benchgen::{generate_workload, place_objects, QueryKind, WorkloadSpec};
use isq::format::Query;
use isq::iptree::DEFAULT_GAMMA;
use isq::metrics::Counters;
use isq::oracle::DoorGraph;
use isq::{build_index, IndexKind, IndoorIndex, IndoorObject, IndoorPoint, IndoorSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Bed {
    pub name: &'static str,
    pub space: Arc<IndoorSpace>,
    pub objects: Vec<IndoorObject>,
    /// Largest range radius worth asking for.
    pub reach: f64,
}

impl Bed {
    pub fn new(name: &'static str, space: IndoorSpace, objects: usize, reach: f64, seed: u64) -> Bed {
        let objects = place_objects(&space, objects, seed);
        Bed { name, space: Arc::new(space), objects, reach }
    }

    pub fn indexes(&self) -> Vec<Box<dyn IndoorIndex>> {
        IndexKind::ALL
            .iter()
            .map(|&k| build_index(k, self.space.clone(), &self.objects, DEFAULT_GAMMA).unwrap())
            .collect()
    }
}

/// `n` uniformly placed query points.
pub fn points(space: &IndoorSpace, n: usize, seed: u64) -> Vec<IndoorPoint> {
    let mut spec = WorkloadSpec::new(QueryKind::Range, vec![1.0], seed);
    spec.per_value = n;
    generate_workload(space, &spec)
        .unwrap()
        .into_iter()
        .map(|q| match q {
            Query::Range { p, .. } => p,
            _ => unreachable!(),
        })
        .collect()
}

/// `n` random queries of one kind with random parameters.
pub fn random_queries(bed: &Bed, kind: QueryKind, n: usize, seed: u64) -> Vec<Query> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = points(&bed.space, n, seed);
    let qs = points(&bed.space, n, seed ^ 0x5eed);
    ps.into_iter()
        .zip(qs)
        .enumerate()
        .map(|(i, (p, q))| {
            let id = i as u32;
            match kind {
                QueryKind::Range => Query::Range { id, p, r: rng.gen_range(0.0..bed.reach) },
                QueryKind::Knn => Query::Knn { id, p, k: rng.gen_range(1..=bed.objects.len().max(1) + 2) },
                QueryKind::Spdq => Query::Spdq { id, p, q, s2t: 0.0 },
            }
        })
        .collect()
}

/// The oracle's answer to a query.
pub fn oracle(g: &DoorGraph, objects: &[IndoorObject], q: &Query) -> Answer {
    match q {
        Query::Range { p, r, .. } => Answer::Range(g.range(objects, p, *r).unwrap()),
        Query::Knn { p, k, .. } => Answer::Knn(g.knn(objects, p, *k).unwrap()),
        Query::Spdq { p, q, .. } => {
            let (path, d) = g.spdq(p, q).unwrap();
            Answer::Spdq(isq::SpdqResult { path, distance: d })
        }
    }
}

/// Every mismatch between each index and the oracle, as readable lines.
pub fn mismatches(bed: &Bed, queries: &[Query]) -> Vec<String> {
    let g = DoorGraph::new(&bed.space);
    let mut out = Vec::new();
    for ix in bed.indexes() {
        for q in queries {
            let want = oracle(&g, &bed.objects, q);
            let got = match execute(ix.as_ref(), q, &mut Counters::default()) {
                Ok(a) => a,
                Err(e) => {
                    out.push(format!("{} {}: {} failed: {e}", bed.name, q.to_line(), ix.kind()));
                    continue;
                }
            };
            if let Some(d) = compare(&want, &got) {
                out.push(format!("{} {}: {}: {d}", bed.name, q.to_line(), ix.kind()));
            }
            if let Answer::Spdq(r) = &got {
                if r.path.length != r.distance {
                    out.push(format!("{} {}: {}: path length {} != {}", bed.name, q.to_line(), ix.kind(), r.path.length, r.distance));
                }
                if r.distance.is_finite() {
                    if let Err(e) = r.path.validate(&bed.space) {
                        out.push(format!("{} {}: {}: invalid path: {e}", bed.name, q.to_line(), ix.kind()));
                    }
                }
            }
        }
    }
    out
}

pub fn dist_close(a: f64, b: f64) -> bool {
    close(a, b)
}
