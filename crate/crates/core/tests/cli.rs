use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn isq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isq")).args(args).env_remove("ISQ_SEED").output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "isq failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn gen_is_byte_identical_on_rerun() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    for d in [&a, &b] {
        let out = ok(&isq(&["gen", "--syn-n", "1", "--objects", "200", "--seed", "4", "--out", d.to_str().unwrap()]));
        assert!(out.starts_with("SYN1: 141 partitions"), "{out}");
    }
    let fa = files(&a);
    assert_eq!(
        fa.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
        ["SYN1.objects", "SYN1.space", "SYN1_knn.workload", "SYN1_rq.workload", "SYN1_spdq.workload"]
    );
    assert!(fa == files(&b), "rerun differs");
    let c = t.path().join("c");
    ok(&isq(&["gen", "--syn-n", "1", "--objects", "200", "--seed", "5", "--out", c.to_str().unwrap()]));
    assert!(fa != files(&c), "seed has no effect");
}

#[test]
fn env_seed_overrides_flag() {
    let t = tempfile::tempdir().unwrap();
    let run = |dir: &str, seed: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_isq"));
        cmd.args(["gen", "--syn-n", "1", "--variant", "minus", "--objects", "10", "--no-workload", "--seed", seed, "--out", dir]);
        match env {
            Some(v) => cmd.env("ISQ_SEED", v),
            None => cmd.env_remove("ISQ_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        fs::read(Path::new(dir).join("SYN1-.space")).unwrap()
    };
    let p = |s: &str| t.path().join(s).to_str().unwrap().to_string();
    let flag7 = run(&p("x"), "7", None);
    let env7 = run(&p("y"), "1", Some("7"));
    assert_eq!(flag7, env7);
}

#[test]
fn build_query_and_report() {
    let t = tempfile::tempdir().unwrap();
    let dir = t.path().to_str().unwrap();
    ok(&isq(&["gen", "--syn-n", "1", "--objects", "100", "--no-workload", "--out", dir]));
    let space = t.path().join("SYN1.space");
    let objects = t.path().join("SYN1.objects");
    let (space, objects) = (space.to_str().unwrap(), objects.to_str().unwrap());
    let out = ok(&isq(&["build", "--index", "viptree", "--space", space, "--gamma", "6"]));
    assert!(out.starts_with("viptree: 216 doors, 141 partitions"), "{out}");

    let out = ok(&isq(&["query", "--space", space, "--objects", objects, "SPDQ 0 0 500 690 0 1200 100 0"]));
    let dists: Vec<&str> = out.lines().map(|l| l.split(" via ").next().unwrap().split(": ").nth(1).unwrap()).collect();
    assert_eq!(dists.len(), 5);
    assert!(dists.iter().all(|d| *d == dists[0]), "{out}");

    let out = ok(&isq(&["query", "--index", "cindex", "--space", space, "--objects", objects, "KNN 0 0 500 690 3"]));
    assert_eq!(out.split_whitespace().filter(|w| w.contains('@')).count(), 3, "{out}");

    let bench_dir = t.path().join("bench");
    let out = ok(&isq(&[
        "bench", "--task", "B3", "--syn-n", "1", "--objects", "100", "--per-value", "2",
        "--space-dir", dir, "--out-dir", bench_dir.to_str().unwrap(),
    ]));
    assert!(out.starts_with("B3: 50 rows"), "{out}");
    let raw = bench_dir.join("B3_raw.csv");
    let text = fs::read_to_string(&raw).unwrap();
    assert_eq!(text.lines().next(), Some("task,dataset,index,query,param,rep,time_ns,mem_bytes,nvd"));
    assert_eq!(text.lines().count(), 51);
    assert!(bench_dir.join("B3_time.csv").exists() && bench_dir.join("B3_mem.csv").exists());

    let rep = t.path().join("rep");
    ok(&isq(&["report", "--in", raw.to_str().unwrap(), "--out", rep.to_str().unwrap(), "--combined"]));
    let combined = fs::read_to_string(rep.join("report.csv")).unwrap();
    assert_eq!(combined.lines().next(), Some("task,metric,dataset,index,param,median,mean,p95,n"));
    assert_eq!(combined.lines().count(), 1 + 2 * 5 * 5);
}

#[test]
fn failures_exit_nonzero() {
    let t = tempfile::tempdir().unwrap();
    let missing = t.path().join("nope.space");
    let out = isq(&["build", "--index", "idmodel", "--space", missing.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.space"));
    assert!(!isq(&["bench", "--task", "B9", "--out-dir", t.path().to_str().unwrap()]).status.success());
    let out = isq(&["gen", "--syn-n", "1", "--out", t.path().to_str().unwrap(), "--seed", "x"]);
    assert!(!out.status.success());
}
