//! End-to-end checks of the `hopcut` binary: exit codes, archive
//! corruption, CSV shape and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hopcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopcut")).args(args).output().expect("spawn hopcut")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_hopset(dir: &Path, n: &str, seed: &str) -> std::path::PathBuf {
    let out = dir.join(format!("h{n}-{seed}"));
    let o = hopcut(&["gen", "hopset", "--n", n, "--seed", seed, "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&hopcut(&[])), 2);
    assert_eq!(code(&hopcut(&["gen", "hopset"])), 2);
    assert_eq!(code(&hopcut(&["gen", "triangle", "--n", "64", "--out", "x"])), 2);
}

#[test]
fn help_lists_exit_codes() {
    let o = hopcut(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for c in ["0  success", "1  a verification suite failed", "5  shortcut retry budget"] {
        assert!(text.contains(c), "{c}");
    }
}

#[test]
fn refused_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let paper = hopcut(&["gen", "shortcut", "--n", "32768", "--constants", "paper", "--out", path(&out)]);
    assert_eq!(code(&paper), 2);
    assert!(String::from_utf8_lossy(&paper.stderr).contains("q"));
    // a prime n has no divisor to round the layer count down to
    assert_eq!(code(&hopcut(&["gen", "hopset", "--n", "4001", "--out", path(&out)])), 2);
    assert_eq!(code(&hopcut(&["gen", "hopset", "--n", "4096", "--p", "64", "--out", path(&out)])), 2);
    assert!(!out.exists());
}

#[test]
fn retry_exhaustion_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    // seed 1 needs three redraws at this size
    let o = hopcut(&["gen", "shortcut", "--n", "32768", "--seed", "1", "--max-attempts", "1", "--out", path(&out)]);
    assert_eq!(code(&o), 5);
    let o = hopcut(&["gen", "shortcut", "--n", "32768", "--seed", "1", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("retries=3"));
}

#[test]
fn unreadable_archives_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hopcut(&["info", path(&dir.path().join("missing"))])), 4);
    let h = gen_hopset(dir.path(), "128", "1");
    let graph = h.join("graph.hcg");
    let text = fs::read_to_string(&graph).unwrap();
    fs::write(&graph, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&hopcut(&["verify", path(&h)])), 4);
    fs::write(&graph, text.replacen("hopcut-graph", "other-graph", 1)).unwrap();
    assert_eq!(code(&hopcut(&["info", path(&h)])), 4);
}

#[test]
fn mutated_weight_fails_the_unique_suite() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen_hopset(dir.path(), "4096", "1");
    let ok = hopcut(&["verify", path(&h), "--suite", "unique"]);
    assert_eq!(code(&ok), 0);

    let sidecar: Value = serde_json::from_str(&fs::read_to_string(h.join("instance.json")).unwrap()).unwrap();
    let first = &sidecar["paths"][0];
    let (tail, head) = (first[0].as_u64().unwrap(), first[1].as_u64().unwrap());
    let graph = h.join("graph.hcg");
    let prefix = format!("{tail},{head},");
    let mut hit = 0;
    let text: String = fs::read_to_string(&graph)
        .unwrap()
        .lines()
        .map(|l| match l.strip_prefix(&prefix) {
            Some(w) => {
                hit += 1;
                let w: u128 = w.parse().unwrap();
                format!("{prefix}{}\n", w + 1)
            }
            None => format!("{l}\n"),
        })
        .collect();
    assert_eq!(hit, 1);
    fs::write(&graph, text).unwrap();

    let bad = hopcut(&["verify", path(&h), "--suite", "unique"]);
    assert_eq!(code(&bad), 1);
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["suites"]["unique"]["pass"], false);
}

#[test]
fn empty_adversary_grid_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen_hopset(dir.path(), "128", "1");
    let o = hopcut(&["attack", path(&h), "--adversary", ""]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "# hopcut attack csv v1");
    assert!(lines[1].starts_with("instance_id,kind,n,"));
}

#[test]
fn attack_rows_and_bad_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen_hopset(dir.path(), "4096", "2");
    let o = hopcut(&["attack", path(&h), "--budget", "p/4,p,10"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(2).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.len(), 14);
        assert_eq!(r[12], "true", "{r:?}");
        assert_eq!(r[13], "ok");
    }
    assert_eq!(code(&hopcut(&["attack", path(&h), "--budget", "p/0"])), 2);
    assert_eq!(code(&hopcut(&["attack", path(&h), "--budget", "lots"])), 2);
    assert_eq!(code(&hopcut(&["attack", path(&h), "--adversary", "oracle"])), 2);
}

#[test]
fn timings_add_a_column() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen_hopset(dir.path(), "128", "1");
    let o = hopcut(&["attack", path(&h), "--adversary", "folklore", "--budget", "p", "--timings"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].ends_with(",wall_ms"));
    assert_eq!(lines[2].split(',').count(), 15);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen_hopset(dir.path(), "4096", "5");
    let b = dir.path().join("again");
    assert_eq!(code(&hopcut(&["gen", "hopset", "--n", "4096", "--seed", "5", "--out", path(&b)])), 0);
    for f in ["graph.hcg", "instance.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let x = hopcut(&["attack", path(&a), "--threads", "1"]);
    let y = hopcut(&["attack", path(&b), "--threads", "4"]);
    assert_eq!(x.stdout, y.stdout);
    let c = dir.path().join("other");
    assert_eq!(code(&hopcut(&["gen", "hopset", "--n", "4096", "--seed", "6", "--out", path(&c)])), 0);
    assert_ne!(fs::read(a.join("graph.hcg")).unwrap(), fs::read(c.join("graph.hcg")).unwrap());
}

#[test]
fn reduce_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen_hopset(dir.path(), "4096", "1");
    let out = dir.path().join("r");
    let o = hopcut(&["reduce", path(&h), "--x", "1", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert!(report["check"]["reduced_nodes"].as_u64().unwrap() <= 4096);
    let map: Vec<(u32, u32)> = serde_json::from_str(&fs::read_to_string(out.join("node_map.json")).unwrap()).unwrap();
    assert_eq!(map.len() as u64, report["check"]["reduced_nodes"].as_u64().unwrap());
    let bad = hopcut(&["reduce", path(&h), "--x", "0", "--out", path(&out)]);
    assert_eq!(code(&bad), 2);
}
