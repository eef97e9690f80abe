//! Benchmark tasks: construction (A) and query tasks B1–B7.
//!
//! Every query runs once untimed on all five indexes; the answers must agree
//! before the timed run of each index is recorded.

mod report;

use std::fmt;
use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::benchgen::{self, generate_syn, place_objects, QueryKind, SynConfig, Variant, WorkloadError, WorkloadSpec};
use crate::error::{QueryError, SpaceError};
use crate::format::{self, Query};
use crate::iptree::DEFAULT_GAMMA;
use crate::metrics::Counters;
use crate::query::{build_index, IndexKind, IndoorIndex, KnnResult, SpdqResult};
use crate::space::{IndoorObject, IndoorSpace, ObjectId};

pub use report::{emit_report, read_raw, summarize, write_raw, Grouping, Summary, RAW_HEADER, REPORT_HEADER};

pub const DEFAULT_OBJECTS: usize = 1500;
pub const DEFAULT_R: f64 = 600.0;
pub const DEFAULT_K: f64 = 10.0;
pub const DEFAULT_S2T: f64 = 1500.0;

/// Relative tolerance for distance agreement between indexes.
pub const DIST_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    A,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
}

impl Task {
    pub const ALL: [Task; 8] = [Task::A, Task::B1, Task::B2, Task::B3, Task::B4, Task::B5, Task::B6, Task::B7];

    pub fn name(self) -> &'static str {
        match self {
            Task::A => "A",
            Task::B1 => "B1",
            Task::B2 => "B2",
            Task::B3 => "B3",
            Task::B4 => "B4",
            Task::B5 => "B5",
            Task::B6 => "B6",
            Task::B7 => "B7",
        }
    }

    /// Query kinds a task exercises; empty for construction.
    pub fn kinds(self) -> &'static [QueryKind] {
        use QueryKind::*;
        match self {
            Task::A => &[],
            Task::B1 | Task::B6 | Task::B7 => &[Range, Knn, Spdq],
            Task::B2 => &[Range, Knn],
            Task::B3 => &[Range],
            Task::B4 => &[Knn],
            Task::B5 => &[Spdq],
        }
    }

    /// Report label: tasks that mix query kinds get one label per kind.
    pub fn label(self, kind: Option<QueryKind>) -> String {
        match kind {
            Some(k) if self.kinds().len() > 1 => format!("{}_{}", self.name(), k.name()),
            _ => self.name().to_string(),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown task {s:?} (expected A or B1..B7)"))
    }
}

/// One measurement. Construction rows carry the structural size in
/// `mem_bytes` and the build time in `time_ns`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    pub task: String,
    pub dataset: String,
    pub index: IndexKind,
    pub query: Option<QueryKind>,
    pub param: f64,
    pub rep: u32,
    pub time_ns: u64,
    pub mem_bytes: u64,
    /// Only for SPDQ.
    pub nvd: Option<u64>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("query {query} on {dataset}: {index} disagrees with {reference}: {detail}")]
    Mismatch { dataset: String, query: u32, index: IndexKind, reference: IndexKind, detail: String },
    #[error("query {query} on {dataset} failed on {index}: {source}")]
    Query { dataset: String, query: u32, index: IndexKind, source: QueryError },
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub seed: u64,
    /// Floors of the base dataset used by B2–B7.
    pub floors: u32,
    /// Floor counts swept by A and B1.
    pub floor_sweep: Vec<u32>,
    pub objects: usize,
    pub object_grid: Vec<usize>,
    pub r_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub s2t_grid: Vec<f64>,
    pub per_value: usize,
    pub gamma: usize,
    /// Where generated datasets are cached; regenerated when missing.
    pub space_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            floors: 5,
            floor_sweep: vec![3, 5, 7, 9],
            objects: DEFAULT_OBJECTS,
            object_grid: vec![500, 1000, 1500, 2000, 2500],
            r_grid: vec![200.0, 400.0, 600.0, 800.0, 1000.0],
            k_grid: vec![1.0, 5.0, 10.0, 50.0, 100.0],
            s2t_grid: vec![1100.0, 1300.0, 1500.0, 1700.0, 1900.0],
            per_value: 10,
            gamma: DEFAULT_GAMMA,
            space_dir: None,
        }
    }
}

/// Derives an independent seed per use site.
pub fn sub_seed(seed: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub struct Dataset {
    pub name: String,
    pub space: Arc<IndoorSpace>,
    pub objects: Vec<IndoorObject>,
}

impl Dataset {
    /// Generates (or loads from the cache directory) a SYN dataset with
    /// `objects` objects.
    pub fn syn(cfg: &BenchConfig, floors: u32, variant: Variant, objects: usize) -> Result<Dataset, BenchError> {
        let syn = SynConfig::new(floors).with_variant(variant).with_seed(sub_seed(cfg.seed, "syn"));
        let name = syn.dataset_name();
        let obj_seed = sub_seed(cfg.seed, &format!("objects/{name}/{objects}"));
        let Some(dir) = &cfg.space_dir else {
            let space = generate_syn(&syn);
            let objects = place_objects(&space, objects, obj_seed);
            return Ok(Dataset { name, space: Arc::new(space), objects });
        };
        fs::create_dir_all(dir)?;
        let space_path = dir.join(format!("{name}.space"));
        let space = if space_path.exists() {
            format::read_space(BufReader::new(fs::File::open(&space_path)?))?
        } else {
            let s = generate_syn(&syn);
            format::write_space(&s, BufWriter::new(fs::File::create(&space_path)?))?;
            s
        };
        let obj_path = dir.join(format!("{name}_o{objects}.objects"));
        let objs = if obj_path.exists() {
            format::read_objects(&space, BufReader::new(fs::File::open(&obj_path)?))?
        } else {
            let o = place_objects(&space, objects, obj_seed);
            format::write_objects(&o, BufWriter::new(fs::File::create(&obj_path)?))?;
            o
        };
        Ok(Dataset { name, space: Arc::new(space), objects: objs })
    }

    pub fn build_all(&self, gamma: usize) -> Result<Vec<Box<dyn IndoorIndex>>, SpaceError> {
        IndexKind::ALL.iter().map(|&k| build_index(k, self.space.clone(), &self.objects, gamma)).collect()
    }
}

/// Task A: structural size and build time of every index per dataset.
/// A failed build is reported on stderr and skipped.
pub fn run_construction_task(datasets: &[Dataset], gamma: usize) -> Vec<MetricsRecord> {
    let mut rows = Vec::new();
    for ds in datasets {
        for kind in IndexKind::ALL {
            let t = Instant::now();
            let ix = match build_index(kind, ds.space.clone(), &ds.objects, gamma) {
                Ok(ix) => ix,
                Err(e) => {
                    eprintln!("A: {kind} on {}: build failed: {e}", ds.name);
                    continue;
                }
            };
            let time_ns = t.elapsed().as_nanos() as u64;
            rows.push(MetricsRecord {
                task: Task::A.label(None),
                dataset: ds.name.clone(),
                index: kind,
                query: None,
                param: ds.space.floors() as f64,
                rep: 1,
                time_ns,
                mem_bytes: ix.structural_bytes() as u64,
                nvd: None,
            });
        }
    }
    rows
}

#[derive(Clone, Debug)]
pub enum Answer {
    Range(Vec<ObjectId>),
    Knn(KnnResult),
    Spdq(SpdqResult),
}

pub fn execute(ix: &dyn IndoorIndex, q: &Query, c: &mut Counters) -> Result<Answer, QueryError> {
    Ok(match q {
        Query::Range { p, r, .. } => Answer::Range(ix.range(p, *r, c)?),
        Query::Knn { p, k, .. } => Answer::Knn(ix.knn(p, *k, c)?),
        Query::Spdq { p, q, .. } => Answer::Spdq(ix.spdq(p, q, c)?),
    })
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= DIST_RTOL * a.abs().max(b.abs())
}

/// Why two answers differ, if they do. kNN answers are compared as distance
/// multisets, so ties at the k-th distance may pick different objects.
pub fn compare(a: &Answer, b: &Answer) -> Option<String> {
    match (a, b) {
        (Answer::Range(x), Answer::Range(y)) => (x != y).then(|| format!("{x:?} vs {y:?}")),
        (Answer::Knn(x), Answer::Knn(y)) => {
            let dx: Vec<f64> = x.neighbors.iter().map(|n| n.1).collect();
            let dy: Vec<f64> = y.neighbors.iter().map(|n| n.1).collect();
            let same = dx.len() == dy.len() && dx.iter().zip(&dy).all(|(a, b)| close(*a, *b)) && x.shortfall == y.shortfall;
            (!same).then(|| format!("{dx:?} vs {dy:?}"))
        }
        (Answer::Spdq(x), Answer::Spdq(y)) => {
            if !close(x.distance, y.distance) {
                Some(format!("distance {} vs {}", x.distance, y.distance))
            } else if x.path.length != x.distance || y.path.length != y.distance {
                Some("path length differs from distance".into())
            } else {
                None
            }
        }
        _ => Some("different answer kinds".into()),
    }
}

/// Runs a workload on all indexes with the equivalence gate. `param` maps a
/// query to the value recorded in the `param` column.
pub fn run_queries(
    task: Task,
    dataset: &str,
    indexes: &[Box<dyn IndoorIndex>],
    workload: &[Query],
    param: impl Fn(&Query) -> f64,
) -> Result<Vec<MetricsRecord>, BenchError> {
    let mut rows = Vec::new();
    let mut rep_of: Vec<(u64, u32)> = Vec::new();
    for q in workload {
        let kind = QueryKind::of(q);
        let p = param(q);
        let rep = match rep_of.iter_mut().find(|e| e.0 == p.to_bits()) {
            Some(e) => {
                e.1 += 1;
                e.1
            }
            None => {
                rep_of.push((p.to_bits(), 1));
                1
            }
        };
        // warm-up doubles as the equivalence check
        let mut answers = Vec::with_capacity(indexes.len());
        for ix in indexes {
            let a = execute(ix.as_ref(), q, &mut Counters::default()).map_err(|source| BenchError::Query {
                dataset: dataset.to_string(),
                query: q.id(),
                index: ix.kind(),
                source,
            })?;
            answers.push(a);
        }
        for (ix, a) in indexes.iter().zip(&answers).skip(1) {
            if let Some(detail) = compare(&answers[0], a) {
                return Err(BenchError::Mismatch {
                    dataset: dataset.to_string(),
                    query: q.id(),
                    index: ix.kind(),
                    reference: indexes[0].kind(),
                    detail,
                });
            }
        }
        for ix in indexes {
            let mut c = Counters::default();
            let t = Instant::now();
            let res = execute(ix.as_ref(), q, &mut c);
            let time_ns = t.elapsed().as_nanos() as u64;
            std::hint::black_box(&res);
            rows.push(MetricsRecord {
                task: task.label(Some(kind)),
                dataset: dataset.to_string(),
                index: ix.kind(),
                query: Some(kind),
                param: p,
                rep,
                time_ns,
                mem_bytes: ix.structural_bytes() as u64 + c.peak_transient_bytes,
                nvd: (kind == QueryKind::Spdq).then(|| c.nvd()),
            });
        }
    }
    Ok(rows)
}

fn default_param(kind: QueryKind) -> f64 {
    match kind {
        QueryKind::Range => DEFAULT_R,
        QueryKind::Knn => DEFAULT_K,
        QueryKind::Spdq => DEFAULT_S2T,
    }
}

fn workload(cfg: &BenchConfig, ds: &Dataset, task: Task, kind: QueryKind, params: Vec<f64>) -> Result<Vec<Query>, BenchError> {
    let mut spec = WorkloadSpec::new(kind, params, sub_seed(cfg.seed, &format!("{task}/{}/{}", ds.name, kind.name())));
    spec.per_value = cfg.per_value;
    Ok(benchgen::generate_workload(&ds.space, &spec)?)
}

/// Default-parameter queries of every kind the task uses, on one dataset.
fn defaults_on(cfg: &BenchConfig, task: Task, ds: &Dataset, param: impl Fn(&Query) -> f64 + Copy) -> Result<Vec<MetricsRecord>, BenchError> {
    let indexes = ds.build_all(cfg.gamma)?;
    let mut rows = Vec::new();
    for &kind in task.kinds() {
        let w = workload(cfg, ds, task, kind, vec![default_param(kind)])?;
        rows.extend(run_queries(task, &ds.name, &indexes, &w, param)?);
    }
    Ok(rows)
}

/// Runs one task end to end.
pub fn run_task(task: Task, cfg: &BenchConfig) -> Result<Vec<MetricsRecord>, BenchError> {
    let base = |variant: Variant, objects: usize| Dataset::syn(cfg, cfg.floors, variant, objects);
    match task {
        Task::A => {
            let ds = cfg
                .floor_sweep
                .iter()
                .map(|&n| Dataset::syn(cfg, n, Variant::Default, cfg.objects))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(run_construction_task(&ds, cfg.gamma))
        }
        Task::B1 => {
            let mut rows = Vec::new();
            for &n in &cfg.floor_sweep {
                let ds = Dataset::syn(cfg, n, Variant::Default, cfg.objects)?;
                rows.extend(defaults_on(cfg, task, &ds, move |_| n as f64)?);
            }
            Ok(rows)
        }
        Task::B2 => {
            let mut rows = Vec::new();
            for &m in &cfg.object_grid {
                let ds = base(Variant::Default, m)?;
                rows.extend(defaults_on(cfg, task, &ds, move |_| m as f64)?);
            }
            Ok(rows)
        }
        Task::B3 | Task::B4 | Task::B5 => {
            let ds = base(Variant::Default, cfg.objects)?;
            let indexes = ds.build_all(cfg.gamma)?;
            let (kind, grid) = match task {
                Task::B3 => (QueryKind::Range, cfg.r_grid.clone()),
                Task::B4 => (QueryKind::Knn, cfg.k_grid.clone()),
                _ => (QueryKind::Spdq, cfg.s2t_grid.clone()),
            };
            let w = workload(cfg, &ds, task, kind, grid)?;
            run_queries(task, &ds.name, &indexes, &w, Query::param)
        }
        Task::B6 | Task::B7 => {
            let variants: &[Variant] = if task == Task::B6 {
                &[Variant::Minus, Variant::Default, Variant::Plus]
            } else {
                &[Variant::NoDecomp, Variant::Default]
            };
            let mut rows = Vec::new();
            for &v in variants {
                let ds = base(v, cfg.objects)?;
                rows.extend(defaults_on(cfg, task, &ds, Query::param)?);
            }
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names() {
        for t in Task::ALL {
            assert_eq!(t.name().parse::<Task>().unwrap(), t);
        }
        assert_eq!(Task::B1.label(Some(QueryKind::Spdq)), "B1_SPDQ");
        assert_eq!(Task::B5.label(Some(QueryKind::Spdq)), "B5");
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, "a"), sub_seed(1, "b"));
        assert_ne!(sub_seed(1, "a"), sub_seed(2, "a"));
        assert_eq!(sub_seed(3, "x"), sub_seed(3, "x"));
    }

    #[test]
    fn small_b4_run_has_one_row_per_index_and_query() {
        let cfg = BenchConfig { floors: 1, objects: 100, k_grid: vec![1.0, 5.0], per_value: 2, ..Default::default() };
        let rows = run_task(Task::B4, &cfg).unwrap();
        assert_eq!(rows.len(), 5 * 2 * 2);
        assert!(rows.iter().all(|r| r.nvd.is_none() && r.rep >= 1 && r.rep <= 2));
    }
}
