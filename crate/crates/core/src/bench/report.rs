//! Raw metric rows and the aggregated per-(task, metric) CSV reports.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::benchgen::QueryKind;
use crate::format::fmt_num;
use crate::query::IndexKind;

use super::MetricsRecord;

pub const RAW_HEADER: [&str; 9] = ["task", "dataset", "index", "query", "param", "rep", "time_ns", "mem_bytes", "nvd"];
pub const REPORT_HEADER: [&str; 7] = ["dataset", "index", "param", "median", "mean", "p95", "n"];

pub fn write_raw<W: Write>(rows: &[MetricsRecord], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RAW_HEADER)?;
    for r in rows {
        out.write_record([
            r.task.clone(),
            r.dataset.clone(),
            r.index.name().to_string(),
            r.query.map_or(String::new(), |k| k.name().to_string()),
            fmt_num(r.param),
            r.rep.to_string(),
            r.time_ns.to_string(),
            r.mem_bytes.to_string(),
            r.nvd.map_or(String::new(), |n| n.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn bad(line: u64, msg: String) -> csv::Error {
    csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("record {line}: {msg}")))
}

pub fn read_raw<R: Read>(r: R) -> csv::Result<Vec<MetricsRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RAW_HEADER) {
        return Err(bad(1, format!("expected header {}", RAW_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let num = |j: usize| -> csv::Result<u64> { rec[j].parse().map_err(|_| bad(line, format!("bad {}", RAW_HEADER[j]))) };
        let query = match &rec[3] {
            "" => None,
            "RQ" => Some(QueryKind::Range),
            "KNN" => Some(QueryKind::Knn),
            "SPDQ" => Some(QueryKind::Spdq),
            other => return Err(bad(line, format!("unknown query kind {other:?}"))),
        };
        rows.push(MetricsRecord {
            task: rec[0].to_string(),
            dataset: rec[1].to_string(),
            index: rec[2].parse::<IndexKind>().map_err(|e| bad(line, e))?,
            query,
            param: rec[4].parse().map_err(|_| bad(line, "bad param".into()))?,
            rep: num(5)? as u32,
            time_ns: num(6)?,
            mem_bytes: num(7)?,
            nvd: if rec[8].is_empty() { None } else { Some(num(8)?) },
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    /// One file per (task, metric): `<task>_<metric>.csv`.
    PerTaskMetric,
    /// Everything in `report.csv` with leading task and metric columns.
    Combined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub dataset: String,
    pub index: IndexKind,
    pub param: f64,
    pub median: f64,
    pub mean: f64,
    pub p95: f64,
    pub n: usize,
}

/// Metrics reported for a row: construction gets size and time, queries get
/// time and mem, SPDQ also nvd.
fn metrics_of(r: &MetricsRecord) -> Vec<(&'static str, f64)> {
    match r.query {
        None => vec![("size", r.mem_bytes as f64), ("time", r.time_ns as f64)],
        Some(_) => {
            let mut m = vec![("time", r.time_ns as f64), ("mem", r.mem_bytes as f64)];
            if let Some(n) = r.nvd {
                m.push(("nvd", n as f64));
            }
            m
        }
    }
}

fn median(s: &[f64]) -> f64 {
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Nearest-rank percentile of sorted values.
fn percentile(s: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * s.len() as f64).ceil() as usize;
    s[rank.clamp(1, s.len()) - 1]
}

/// Aggregates rows into (task, metric) → summaries, groups and rows in order
/// of first appearance.
pub fn summarize(rows: &[MetricsRecord]) -> Vec<((String, &'static str), Vec<Summary>)> {
    type Key = (String, IndexKind, u64);
    let mut groups: Vec<((String, &'static str), Vec<(Key, Vec<f64>)>)> = Vec::new();
    for r in rows {
        for (metric, v) in metrics_of(r) {
            let gk = (r.task.clone(), metric);
            let gi = match groups.iter().position(|g| g.0 == gk) {
                Some(i) => i,
                None => {
                    groups.push((gk, Vec::new()));
                    groups.len() - 1
                }
            };
            let key = (r.dataset.clone(), r.index, r.param.to_bits());
            let cells = &mut groups[gi].1;
            match cells.iter_mut().find(|c| c.0 == key) {
                Some(c) => c.1.push(v),
                None => cells.push((key, vec![v])),
            }
        }
    }
    groups
        .into_iter()
        .map(|(gk, cells)| {
            let sums = cells
                .into_iter()
                .map(|((dataset, index, param), mut vs)| {
                    vs.sort_by(f64::total_cmp);
                    Summary {
                        dataset,
                        index,
                        param: f64::from_bits(param),
                        median: median(&vs),
                        mean: vs.iter().sum::<f64>() / vs.len() as f64,
                        p95: percentile(&vs, 95.0),
                        n: vs.len(),
                    }
                })
                .collect();
            (gk, sums)
        })
        .collect()
}

fn summary_fields(s: &Summary) -> [String; 7] {
    [
        s.dataset.clone(),
        s.index.name().to_string(),
        fmt_num(s.param),
        fmt_num(s.median),
        fmt_num(s.mean),
        fmt_num(s.p95),
        s.n.to_string(),
    ]
}

/// Writes the report files into `dir` and returns their paths.
pub fn emit_report(rows: &[MetricsRecord], grouping: Grouping, dir: &Path) -> csv::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let groups = summarize(rows);
    let mut paths = Vec::new();
    match grouping {
        Grouping::PerTaskMetric => {
            for ((task, metric), sums) in &groups {
                let path = dir.join(format!("{task}_{metric}.csv"));
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(REPORT_HEADER)?;
                for s in sums {
                    w.write_record(summary_fields(s))?;
                }
                w.flush()?;
                paths.push(path);
            }
        }
        Grouping::Combined => {
            let path = dir.join("report.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["task", "metric"].iter().chain(REPORT_HEADER.iter()))?;
            for ((task, metric), sums) in &groups {
                for s in sums {
                    w.write_record([task.clone(), metric.to_string()].into_iter().chain(summary_fields(s)))?;
                }
            }
            w.flush()?;
            paths.push(path);
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(task: &str, index: IndexKind, query: Option<QueryKind>, param: f64, time_ns: u64) -> MetricsRecord {
        MetricsRecord {
            task: task.into(),
            dataset: "SYN1".into(),
            index,
            query,
            param,
            rep: 1,
            time_ns,
            mem_bytes: 100,
            nvd: (query == Some(QueryKind::Spdq)).then_some(7),
        }
    }

    #[test]
    fn raw_round_trip() {
        let rows = vec![
            row("A", IndexKind::IdModel, None, 3.0, 10),
            row("B5", IndexKind::VipTree, Some(QueryKind::Spdq), 1500.0, 20),
        ];
        let mut buf = Vec::new();
        write_raw(&rows, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("task,dataset,index,query,param,rep,time_ns,mem_bytes,nvd\n"));
        assert_eq!(read_raw(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn stats_and_file_names() {
        let rows: Vec<_> = (1..=10).map(|t| row("B5", IndexKind::IdIndex, Some(QueryKind::Spdq), 1500.0, t)).collect();
        let g = summarize(&rows);
        assert_eq!(g.iter().map(|x| x.0 .1).collect::<Vec<_>>(), vec!["time", "mem", "nvd"]);
        let t = &g[0].1[0];
        assert_eq!((t.median, t.mean, t.p95, t.n), (5.5, 5.5, 10.0, 10));
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&rows, Grouping::PerTaskMetric, dir.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, vec!["B5_time.csv", "B5_mem.csv", "B5_nvd.csv"]);
        let text = fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(text.lines().next(), Some("dataset,index,param,median,mean,p95,n"));
        let one = emit_report(&rows, Grouping::Combined, dir.path()).unwrap();
        assert_eq!(one.len(), 1);
    }
}
