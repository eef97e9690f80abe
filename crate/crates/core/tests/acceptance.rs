//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{mismatches, points, random_queries, Bed};
use isq::bench::{self, compare, execute, BenchConfig, Dataset, Task};
use isq::benchgen::{self, dataset_stats, generate_syn, QueryKind, SynConfig, Variant, WorkloadSpec};
use isq::format::Query;
use isq::idindex::IdIndex;
use isq::idmodel::IdModel;
use isq::iptree::{IpTree, TreeVariant, DEFAULT_GAMMA};
use isq::metrics::Counters;
use isq::{build_index, fixtures, DoorId, IndexKind, IndoorIndex, IndoorPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn median(v: &mut [u64]) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

fn syn3() -> Dataset {
    Dataset::syn(&BenchConfig::default(), 3, Variant::Default, 500).unwrap()
}

fn default_workloads(ds: &Dataset) -> Vec<Query> {
    let d = BenchConfig::default();
    let mut all = Vec::new();
    for (kind, grid) in [(QueryKind::Range, d.r_grid), (QueryKind::Knn, d.k_grid), (QueryKind::Spdq, d.s2t_grid)] {
        let mut spec = WorkloadSpec::new(kind, grid, bench::sub_seed(7, kind.name()));
        spec.first_id = all.len() as u32;
        all.extend(benchgen::generate_workload(&ds.space, &spec).unwrap());
    }
    all
}

fn c1_oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let beds = [
        Bed::new("FIX-A", fixtures::fix_a(), 6, 30.0, 1),
        Bed::new("FIX-U", fixtures::fix_u(), 6, 30.0, 2),
        Bed::new("grid5x5", fixtures::grid(5, 10.0), 20, 80.0, 3),
        Bed::new("SYN1", generate_syn(&SynConfig::new(1)), 200, 1200.0, 5),
    ];
    let mut bad = Vec::new();
    let mut n = 0;
    for (i, bed) in beds.iter().enumerate() {
        for kind in [QueryKind::Range, QueryKind::Knn, QueryKind::Spdq] {
            let qs = random_queries(bed, kind, 100, 100 + i as u64);
            n += qs.len() * 5;
            bad.extend(mismatches(bed, &qs));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(bad.is_empty(), || format!("{} mismatches, first: {}", bad.len(), bad[0]))?;
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{n} index answers on 4 spaces agree with the oracle in {secs:.1} s"))
}

fn c2_equivalence_gate() -> Outcome {
    let t = Instant::now();
    let cfg = BenchConfig { floors: 3, floor_sweep: vec![1, 2, 3], objects: 500, ..BenchConfig::default() };
    let mut rows = 0;
    for task in Task::ALL.into_iter().filter(|&t| t != Task::A) {
        rows += bench::run_task(task, &cfg).map_err(|e| format!("{task}: {e}"))?.len();
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 600.0, || format!("took {secs:.0} s"))?;
    Ok(format!("B1-B7 on SYN3 with |O|=500: {rows} timed rows, zero mismatches, {secs:.1} s"))
}

fn c3_generator() -> Outcome {
    let mut counts = Vec::new();
    for (v, doors) in [(Variant::Default, 1080), (Variant::Minus, 840), (Variant::Plus, 1280)] {
        let st = dataset_stats(&generate_syn(&SynConfig::new(5).with_variant(v)), DEFAULT_GAMMA);
        ensure(st.partitions == 705 && st.doors == doors, || {
            format!("{}: {} partitions, {} doors (want 705, {doors})", v.name(), st.partitions, st.doors)
        })?;
        counts.push(format!("{}={}", v.name(), st.doors));
    }
    let t = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for d in ["a", "b"] {
        let dir = t.path().join(d);
        let out = Command::new(env!("CARGO_BIN_EXE_isq"))
            .args(["gen", "--syn-n", "5", "--seed", "11", "--out", dir.to_str().unwrap()])
            .env_remove("ISQ_SEED")
            .output()
            .unwrap();
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap())
            .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        runs.push(files);
    }
    ensure(runs[0].len() == 5 && runs[0] == runs[1], || "rerun produced different files".into())?;
    Ok(format!("SYN5 705 partitions, doors {}; 5 generated files byte-identical on rerun", counts.join(" ")))
}

fn c4_idindex_invariants() -> Outcome {
    let ds = syn3();
    ensure(ds.space.unidirectional_doors() == 0, || "SYN3 has one-way doors".into())?;
    let ix = IdIndex::build(IdModel::build(ds.space.clone(), &ds.objects));
    let n = ix.num_doors();
    for a in 0..n {
        let da = DoorId(a as u32);
        ensure(ix.d2d(da, da) == 0.0, || format!("diagonal of door {a} is {}", ix.d2d(da, da)))?;
        let row = ix.idx_row(da);
        let mut seen = vec![false; n];
        for &j in row {
            ensure(!std::mem::replace(&mut seen[j as usize], true), || format!("row {a} repeats {j}"))?;
        }
        ensure(row.windows(2).all(|w| ix.d2d(da, DoorId(w[0])) <= ix.d2d(da, DoorId(w[1]))), || format!("row {a} unsorted"))?;
        for b in a + 1..n {
            let (x, y) = (ix.d2d(da, DoorId(b as u32)), ix.d2d(DoorId(b as u32), da));
            ensure(common::dist_close(x, y), || format!("d({a},{b})={x} but d({b},{a})={y}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100_000 {
        let [a, b, c] = [0; 3].map(|_| DoorId(rng.gen_range(0..n as u32)));
        let (ac, ab, bc) = (ix.d2d(a, c), ix.d2d(a, b), ix.d2d(b, c));
        ensure(ac <= ab + bc + 1e-9 * ac.max(1.0), || format!("triangle {a} {b} {c}: {ac} > {ab} + {bc}"))?;
    }
    Ok(format!("{n} doors: zero diagonal, sorted permutation rows, symmetric, 1e5 triangles hold"))
}

fn c5_scaling() -> Outcome {
    let cfg = BenchConfig::default();
    let size = |floors: u32, kind: IndexKind| {
        let ds = Dataset::syn(&cfg, floors, Variant::Default, bench::DEFAULT_OBJECTS).unwrap();
        build_index(kind, ds.space.clone(), &ds.objects, DEFAULT_GAMMA).unwrap().structural_bytes() as f64
    };
    let ratio = size(7, IndexKind::IdIndex) / size(5, IndexKind::IdIndex);
    let want = (7.0f64 / 5.0).powi(2);
    ensure((ratio / want - 1.0).abs() <= 0.15, || format!("IDIndex SYN7/SYN5 = {ratio:.3}, want {want:.2} ± 15%"))?;
    let sizes: Vec<(IndexKind, f64)> = IndexKind::ALL.iter().map(|&k| (k, size(5, k))).collect();
    let min = sizes.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let list = sizes.iter().map(|(k, s)| format!("{k}={s}")).collect::<Vec<_>>().join(" ");
    ensure(min.0 == IndexKind::IdModel, || format!("smallest on SYN5 is {}: {list}", min.0))?;
    Ok(format!("IDIndex SYN7/SYN5 = {ratio:.3} (target {want:.2}); SYN5 bytes {list}"))
}

fn c6_ip_vip() -> Outcome {
    let ds = syn3();
    let ip = IpTree::build(ds.space.clone(), &ds.objects, DEFAULT_GAMMA, TreeVariant::Ip).map_err(|e| e.to_string())?;
    let vip = IpTree::build(ds.space.clone(), &ds.objects, DEFAULT_GAMMA, TreeVariant::Vip).map_err(|e| e.to_string())?;
    let height = ip.height();
    let qs = default_workloads(&ds);
    let (mut spdq, mut fewer) = (0, 0);
    for q in &qs {
        let (mut ci, mut cv) = (Counters::default(), Counters::default());
        let a = execute(&ip, q, &mut ci).map_err(|e| e.to_string())?;
        let b = execute(&vip, q, &mut cv).map_err(|e| e.to_string())?;
        if let Some(d) = compare(&a, &b) {
            return Err(format!("{}: {d}", q.to_line()));
        }
        if matches!(q, Query::Spdq { .. }) && height >= 3 {
            spdq += 1;
            ensure(cv.matrix_pairs_read <= ci.matrix_pairs_read, || {
                format!("{}: VIP read {} > IP {}", q.to_line(), cv.matrix_pairs_read, ci.matrix_pairs_read)
            })?;
            fewer += (cv.matrix_pairs_read < ci.matrix_pairs_read) as usize;
        }
    }
    ensure(height >= 3, || format!("tree height {height} < 3, read ordering not exercised"))?;
    Ok(format!("{} queries identical; height {height}, VIP reads <= IP on {spdq} SPDQ ({fewer} strictly fewer)", qs.len()))
}

fn c7_nvd() -> Outcome {
    let ds = syn3();
    let d = BenchConfig::default();
    let spec = WorkloadSpec::new(QueryKind::Spdq, d.s2t_grid, bench::sub_seed(7, "SPDQ"));
    let qs = benchgen::generate_workload(&ds.space, &spec).map_err(|e| e.to_string())?;
    let ixs: Vec<Box<dyn IndoorIndex>> = [IndexKind::IdModel, IndexKind::CIndex, IndexKind::IdIndex]
        .iter()
        .map(|&k| build_index(k, ds.space.clone(), &ds.objects, DEFAULT_GAMMA).unwrap())
        .collect();
    let mut nvd: [Vec<u64>; 3] = Default::default();
    for q in &qs {
        for (ix, out) in ixs.iter().zip(nvd.iter_mut()) {
            let mut c = Counters::default();
            execute(ix.as_ref(), q, &mut c).map_err(|e| e.to_string())?;
            out.push(c.nvd());
        }
        let n = nvd[0].len() - 1;
        ensure(nvd[0][n] == nvd[1][n], || format!("{}: IDModel nvd {} vs CIndex {}", q.to_line(), nvd[0][n], nvd[1][n]))?;
    }
    let (m_model, m_index) = (median(&mut nvd[0]), median(&mut nvd[2]));
    ensure(m_index < m_model, || format!("median nvd IDIndex {m_index} >= IDModel {m_model}"))?;
    Ok(format!("{} SPDQ: IDModel = CIndex per query; median nvd IDIndex {m_index} < IDModel {m_model}", qs.len()))
}

fn c8_monotonicity() -> Outcome {
    let bed = Bed::new("SYN1", generate_syn(&SynConfig::new(1)), 300, 1200.0, 21);
    let ixs = bed.indexes();
    let pts = points(&bed.space, 100, 22);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = &mut Counters::default();
    for p in &pts {
        let (r1, r2) = (rng.gen_range(0.0..1500.0f64), rng.gen_range(0.0..1500.0f64));
        let (k1, k2) = (rng.gen_range(1..60usize), rng.gen_range(1..60usize));
        for ix in &ixs {
            let small = ix.range(p, r1.min(r2), c).unwrap();
            let big = ix.range(p, r1.max(r2), c).unwrap();
            ensure(small.iter().all(|o| big.binary_search(o).is_ok()), || format!("{}: RQ not nested", ix.kind()))?;
            let a = ix.knn(p, k1.min(k2), c).unwrap();
            let b = ix.knn(p, k1.max(k2), c).unwrap();
            ensure(a.neighbors.iter().zip(&b.neighbors).all(|(x, y)| common::dist_close(x.1, y.1)), || {
                format!("{}: kNN k={} not a prefix of k={}", ix.kind(), k1.min(k2), k1.max(k2))
            })?;
        }
    }
    let fix_u = Arc::new(fixtures::fix_u());
    let fu: Vec<Box<dyn IndoorIndex>> =
        IndexKind::ALL.iter().map(|&k| build_index(k, fix_u.clone(), &[], DEFAULT_GAMMA).unwrap()).collect();
    for _ in 0..100 {
        let a = IndoorPoint::new(0, rng.gen_range(0.5..9.5), rng.gen_range(0.5..9.5));
        let b = IndoorPoint::new(0, rng.gen_range(10.5..19.5), rng.gen_range(0.5..9.5));
        for ix in &fu {
            let ba = ix.spdq(&b, &a, c).unwrap().distance;
            let ab = ix.spdq(&a, &b, c).unwrap().distance;
            ensure(ba.is_finite() && ab.is_infinite(), || format!("{}: |b,a|={ba} |a,b|={ab}", ix.kind()))?;
        }
    }
    Ok("100 RQ nesting, 100 kNN prefix and 100 FIX-U asymmetry cases on all 5 indexes".into())
}

fn c9_soak() -> Outcome {
    let t = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let (spaces, out) = (tmp.path().join("spaces"), tmp.path().join("out"));
    let mut files = 0;
    for task in ["B1", "B2", "B3", "B4", "B5", "B6", "B7"] {
        let res = Command::new(env!("CARGO_BIN_EXE_isq"))
            .args(["bench", "--task", task, "--syn-n", "3", "--sweep", "1,2,3"])
            .args(["--space-dir", spaces.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
            .env_remove("ISQ_SEED")
            .output()
            .unwrap();
        ensure(res.status.success(), || format!("{task}: exit {:?}: {}", res.status.code(), String::from_utf8_lossy(&res.stderr)))?;
        let raw = out.join(format!("{task}_raw.csv"));
        files += check_csv(&raw, "task,dataset,index,query,param,rep,time_ns,mem_bytes,nvd", 9)?;
        let kinds = Task::ALL.into_iter().find(|t| t.name() == task).unwrap().kinds();
        for &k in kinds {
            let label = if kinds.len() > 1 { format!("{task}_{}", k.name()) } else { task.to_string() };
            let mut metrics = vec!["time", "mem"];
            if k == QueryKind::Spdq {
                metrics.push("nvd");
            }
            for m in metrics {
                files += check_csv(&out.join(format!("{label}_{m}.csv")), "dataset,index,param,median,mean,p95,n", 7)?;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(Duration::from_secs_f64(secs) < Duration::from_secs(1800), || format!("took {secs:.0} s"))?;
    Ok(format!("isq bench B1-B7 on SYN3 exited 0, {files} CSVs match their schemas, {secs:.1} s"))
}

fn check_csv(path: &Path, header: &str, cols: usize) -> Result<usize, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    ensure(lines.next() == Some(header), || format!("{}: bad header", path.display()))?;
    let mut n = 0;
    for l in lines {
        ensure(l.split(',').count() == cols, || format!("{}: bad row {l:?}", path.display()))?;
        n += 1;
    }
    ensure(n > 0, || format!("{}: no rows", path.display()))?;
    Ok(1)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("cross-index gate on SYN3", c2_equivalence_gate),
        ("generator fidelity", c3_generator),
        ("IDIndex matrix invariants", c4_idindex_invariants),
        ("size scaling", c5_scaling),
        ("IP/VIP identity and reads", c6_ip_vip),
        ("NVD properties", c7_nvd),
        ("monotonicity suites", c8_monotonicity),
        ("harness soak", c9_soak),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let tag = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == tag || name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {tag} PASS  {name}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {tag} FAIL  {name}: {why} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
