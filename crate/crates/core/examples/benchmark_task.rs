//! Runs one benchmark task in-process on a small building and writes the raw
//! rows plus per-metric summary CSVs.
//!
//!     cargo run --release --example benchmark_task -- B5 /tmp/isq-bench

use std::fs::File;
use std::path::PathBuf;

use isq::bench::{emit_report, run_task, summarize, write_raw, BenchConfig, Grouping, Task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let task: Task = args.next().as_deref().unwrap_or("B5").parse()?;
    let out = args.next().map_or_else(|| std::env::temp_dir().join("isq-bench"), PathBuf::from);

    let cfg = BenchConfig { floors: 2, floor_sweep: vec![1, 2], objects: 500, per_value: 5, ..BenchConfig::default() };
    let rows = run_task(task, &cfg)?;
    std::fs::create_dir_all(&out)?;
    write_raw(&rows, File::create(out.join(format!("{task}_raw.csv")))?)?;
    for p in emit_report(&rows, Grouping::PerTaskMetric, &out)? {
        println!("wrote {}", p.display());
    }

    for ((label, metric), sums) in summarize(&rows) {
        if metric != "time" && metric != "nvd" {
            continue;
        }
        println!("\n{label} {metric} (median)");
        for s in sums {
            println!("  {:<6} {:<8} param {:>6}  {:>12.0}", s.dataset, s.index, s.param, s.median);
        }
    }
    Ok(())
}
