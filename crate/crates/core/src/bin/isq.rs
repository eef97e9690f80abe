use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use isq::bench::{self, BenchConfig, Grouping, Task};
use isq::benchgen::{self, QueryKind, SynConfig, Variant, WorkloadSpec};
use isq::format::{self, Query};
use isq::iptree::DEFAULT_GAMMA;
use isq::metrics::Counters;
use isq::{build_index, IndexKind, IndoorObject, IndoorSpace};

#[derive(Parser)]
#[command(name = "isq", about = "Indoor spatial query indexes and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a SYN dataset, its objects and default workloads.
    Gen(GenArgs),
    /// Build one index over a floorplan and print its size.
    Build(BuildArgs),
    /// Run a single query given in workload-line syntax.
    Query(QueryArgs),
    /// Run a benchmark task and write raw rows plus reports.
    Bench(BenchArgs),
    /// Aggregate raw rows into per-task CSV reports.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "syn-n", default_value_t = 5)]
    floors: u32,
    #[arg(long, default_value = "default")]
    variant: Variant,
    #[arg(long, default_value_t = bench::DEFAULT_OBJECTS)]
    objects: usize,
    /// Overridden by ISQ_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Skip workload generation.
    #[arg(long)]
    no_workload: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    index: IndexKind,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    objects: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: usize,
}

#[derive(Args)]
struct QueryArgs {
    /// Omit to run on all five indexes.
    #[arg(long)]
    index: Option<IndexKind>,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    objects: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: usize,
    /// e.g. "RQ 0 0 500 690 600", "KNN 0 0 500 690 10" or
    /// "SPDQ 0 0 500 690 0 1200 100 1500".
    query: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    task: Task,
    /// Dataset cache; generated files are written here and reused.
    #[arg(long)]
    space_dir: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Overridden by ISQ_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Floors of the base dataset.
    #[arg(long = "syn-n", default_value_t = 5)]
    floors: u32,
    /// Floor counts swept by A and B1, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3u32, 5, 7, 9])]
    sweep: Vec<u32>,
    #[arg(long, default_value_t = bench::DEFAULT_OBJECTS)]
    objects: usize,
    #[arg(long, default_value_t = 10)]
    per_value: usize,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// One combined report.csv instead of one file per task and metric.
    #[arg(long)]
    combined: bool,
}

fn seed(flag: u64) -> Result<u64> {
    match std::env::var("ISQ_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("ISQ_SEED={v:?} is not an unsigned integer")),
        Err(_) => Ok(flag),
    }
}

fn load_space(path: &Path) -> Result<IndoorSpace> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    format::read_space(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn load_objects(space: &IndoorSpace, path: Option<&Path>) -> Result<Vec<IndoorObject>> {
    let Some(path) = path else { return Ok(Vec::new()) };
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    format::read_objects(space, BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn gen(a: GenArgs) -> Result<()> {
    let seed = seed(a.seed)?;
    let cfg = SynConfig::new(a.floors).with_variant(a.variant).with_seed(seed);
    if a.floors == 0 {
        bail!("--syn-n must be at least 1");
    }
    fs::create_dir_all(&a.out)?;
    let name = cfg.dataset_name();
    let space = benchgen::generate_syn(&cfg);
    format::write_space(&space, BufWriter::new(File::create(a.out.join(format!("{name}.space")))?))?;
    let objects = benchgen::place_objects(&space, a.objects, bench::sub_seed(seed, "objects"));
    format::write_objects(&objects, BufWriter::new(File::create(a.out.join(format!("{name}.objects")))?))?;
    let st = benchgen::dataset_stats(&space, DEFAULT_GAMMA);
    println!(
        "{name}: {} partitions ({} hallway, {} crucial), {} doors (+{} staircase doors), #dv Q1/Q2/Q3/max {}/{}/{}/{}",
        st.partitions, st.hallways, st.crucial, st.doors, st.stair_doors, st.q1, st.q2, st.q3, st.max
    );
    if a.no_workload {
        return Ok(());
    }
    let d = BenchConfig::default();
    let mut next_id = 0;
    for (kind, grid) in [(QueryKind::Range, d.r_grid), (QueryKind::Knn, d.k_grid), (QueryKind::Spdq, d.s2t_grid)] {
        let mut spec = WorkloadSpec::new(kind, grid, bench::sub_seed(seed, kind.name()));
        spec.first_id = next_id;
        let w = benchgen::generate_workload(&space, &spec)?;
        next_id += w.len() as u32;
        let path = a.out.join(format!("{name}_{}.workload", kind.name().to_lowercase()));
        format::write_workload(&w, BufWriter::new(File::create(&path)?))?;
        println!("{}: {} queries", path.display(), w.len());
    }
    Ok(())
}

fn build(a: BuildArgs) -> Result<()> {
    let space = Arc::new(load_space(&a.space)?);
    let objects = load_objects(&space, a.objects.as_deref())?;
    let t = Instant::now();
    let ix = build_index(a.index, space.clone(), &objects, a.gamma)?;
    let elapsed = t.elapsed();
    println!(
        "{}: {} doors, {} partitions, {} bytes structural, built in {:.3} ms",
        a.index,
        space.num_doors(),
        space.num_partitions() - 1,
        ix.structural_bytes(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(())
}

fn query(a: QueryArgs) -> Result<()> {
    let space = Arc::new(load_space(&a.space)?);
    let objects = load_objects(&space, a.objects.as_deref())?;
    let qs = format::read_workload(a.query.as_bytes())?;
    let [q] = qs.as_slice() else { bail!("expected exactly one query, got {}", qs.len()) };
    let kinds: Vec<IndexKind> = a.index.map_or(IndexKind::ALL.to_vec(), |k| vec![k]);
    for kind in kinds {
        let ix = build_index(kind, space.clone(), &objects, a.gamma)?;
        let mut c = Counters::default();
        let ans = bench::execute(ix.as_ref(), q, &mut c).with_context(|| format!("{kind}"))?;
        let body = match (&ans, q) {
            (bench::Answer::Range(ids), _) => {
                format!("{} objects: {}", ids.len(), ids.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" "))
            }
            (bench::Answer::Knn(r), _) => r
                .neighbors
                .iter()
                .map(|(o, d)| format!("{o}@{}", format::fmt_num(*d)))
                .collect::<Vec<_>>()
                .join(" "),
            (bench::Answer::Spdq(r), Query::Spdq { .. }) => {
                let doors: Vec<String> = r.path.doors.iter().map(|d| d.to_string()).collect();
                format!("distance {} via [{}]", format::fmt_num(r.distance), doors.join(" "))
            }
            _ => unreachable!(),
        };
        println!("{kind}: {body} (nvd {})", c.nvd());
    }
    Ok(())
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let cfg = BenchConfig {
        seed: seed(a.seed)?,
        floors: a.floors,
        floor_sweep: a.sweep,
        objects: a.objects,
        per_value: a.per_value,
        gamma: a.gamma,
        space_dir: a.space_dir,
        ..BenchConfig::default()
    };
    let t = Instant::now();
    let rows = bench::run_task(a.task, &cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    let raw = a.out_dir.join(format!("{}_raw.csv", a.task));
    bench::write_raw(&rows, File::create(&raw)?)?;
    let paths = bench::emit_report(&rows, Grouping::PerTaskMetric, &a.out_dir)?;
    println!("{}: {} rows in {:.1} s", a.task, rows.len(), t.elapsed().as_secs_f64());
    for p in std::iter::once(&raw).chain(&paths) {
        println!("  {}", p.display());
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let f = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let rows = bench::read_raw(f)?;
    if rows.is_empty() {
        bail!("{} has no rows", a.input.display());
    }
    let grouping = if a.combined { Grouping::Combined } else { Grouping::PerTaskMetric };
    for p in bench::emit_report(&rows, grouping, &a.out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Build(a) => build(a),
        Cmd::Query(a) => query(a),
        Cmd::Bench(a) => run_bench(a),
        Cmd::Report(a) => report(a),
    }
}
