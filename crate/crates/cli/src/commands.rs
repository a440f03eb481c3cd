use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};
use hopcut_core::adversary::folklore;
use hopcut_core::archive::{read_archive, write_archive, Instance, GRAPH_FILE};
use hopcut_core::graph::io::{read_graph, write_graph};
use hopcut_core::hopset::{
    build_hopset_instance, extend_small_p, overlap_report, pair_bounds_report, split_monte_carlo,
    verify_unique_shortest, HopsetParams,
};
use hopcut_core::reduce::{stitched_check, subsample_reduce, ReduceParams};
use hopcut_core::shortcut::{self, build_shortcut_instance, ShortcutParams};
use hopcut_core::{LayeredGraph, ProposalKind};
use serde_json::{json, Value};

use crate::{Family, GenArgs, Outcome, ReduceArgs, Suite, VerifyArgs};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn gen(a: &GenArgs) -> Result<Outcome> {
    let inst = match a.family {
        Family::Hopset => {
            let mut params = HopsetParams::new(a.n, a.p.unwrap_or(a.n), a.seed);
            params.constants = a.constants.into();
            params.layers = a.layers;
            params.q = a.q;
            params.edge_span = a.edge_span;
            if let Some(m) = a.max_attempts {
                params.max_resamples = m;
            }
            let mut inst = build_hopset_instance(&params)?;
            if let Some(target) = a.expand_to {
                inst = extend_small_p(&inst, target)?;
            }
            if a.undirected {
                inst = inst.undirected()?;
            }
            println!(
                "hopset n={} layers={} path_nodes={} paths={} resamples={}",
                inst.graph.node_count(),
                inst.dims.layers,
                inst.path_len(),
                inst.paths.len(),
                inst.resamples
            );
            Instance::Hopset(inst)
        }
        Family::Shortcut => {
            let mut params = ShortcutParams::new(a.n, a.seed);
            params.constants = a.constants.into();
            params.r = a.r;
            params.c_r = a.c_r;
            params.c_hat = a.c_hat;
            if let Some(m) = a.max_attempts {
                params.max_attempts = m;
            }
            let inst = build_shortcut_instance(&params)?;
            println!(
                "shortcut n={} layers={} ell_hat={} paths={} retries={}",
                inst.graph.node_count(),
                inst.dims.layers,
                inst.dims.ell_hat,
                inst.paths.len(),
                inst.attempts.len() - 1
            );
            Instance::Shortcut(inst)
        }
    };
    write_archive(&a.out, &inst).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(Outcome::Ok)
}

fn load(path: &Path) -> Result<Instance> {
    Ok(read_archive(path).with_context(|| format!("reading archive {}", path.display()))?)
}

fn emit(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn suites(selected: &[Suite]) -> Vec<Suite> {
    let mut s: Vec<Suite> = if selected.contains(&Suite::All) {
        vec![Suite::Unique, Suite::Overlap, Suite::Split, Suite::PairBounds]
    } else {
        selected.to_vec()
    };
    s.sort();
    s.dedup();
    s
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Unique => "unique",
        Suite::Overlap => "overlap",
        Suite::Split => "split",
        Suite::PairBounds => "pair_bounds",
        Suite::All => "all",
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let inst = load(&a.archive)?;
    let mut results = serde_json::Map::new();
    let mut all_pass = true;
    let mut record = |name: &str, pass: bool, detail: Value| {
        all_pass &= pass;
        if !pass {
            log::warn!("suite {name} failed");
        }
        results.insert(name.to_string(), json!({ "pass": pass, "detail": detail }));
    };
    match &inst {
        Instance::Hopset(h) => {
            for s in suites(&a.suite) {
                match s {
                    Suite::Unique => {
                        let r = verify_unique_shortest(h)?;
                        record(suite_name(s), r.pass, serde_json::to_value(&r)?);
                    }
                    Suite::Overlap => {
                        let r = overlap_report(h, a.sample, a.seed);
                        record(suite_name(s), r.pass, serde_json::to_value(&r)?);
                    }
                    Suite::Split => {
                        let r = split_monte_carlo(&h.dims, a.trials, a.seed, a.z);
                        record(suite_name(s), r.pass, serde_json::to_value(&r)?);
                    }
                    Suite::PairBounds => {
                        let r = pair_bounds_report(h);
                        record(suite_name(s), r.pass, serde_json::to_value(&r)?);
                    }
                    Suite::All => unreachable!(),
                }
            }
        }
        Instance::Shortcut(sc) => {
            let selected = suites(&a.suite);
            let split = if selected.contains(&Suite::Overlap) || selected.contains(&Suite::Split) {
                Some(shortcut::split_report(sc, a.trials, a.sample, a.seed, a.z))
            } else {
                None
            };
            for s in selected {
                match s {
                    Suite::Unique => {
                        let dag = shortcut::verify_unique_paths(sc)?;
                        let und = shortcut::verify_undirected_unique(sc)?;
                        record(suite_name(s), dag.pass && und.pass, json!({ "directed": dag, "undirected": und }));
                    }
                    Suite::Overlap => {
                        let r = split.as_ref().unwrap();
                        let detail = json!({
                            "exhaustive": r.exhaustive,
                            "pairs_checked": r.pairs_checked,
                            "violations": r.overlap_violations,
                            "buckets": r.buckets,
                        });
                        record(suite_name(s), r.overlap_violations == 0, detail);
                    }
                    Suite::Split => {
                        let r = split.as_ref().unwrap();
                        let pass = r.split_checks.iter().all(|c| c.check.pass);
                        let detail = json!({ "resamples": r.resamples, "z": r.z, "checks": r.split_checks });
                        record(suite_name(s), pass, detail);
                    }
                    Suite::PairBounds => {
                        let r = shortcut::pair_bounds_report(sc);
                        record(suite_name(s), r.pass, serde_json::to_value(&r)?);
                    }
                    Suite::All => unreachable!(),
                }
            }
        }
    }
    let report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "archive": a.archive.display().to_string(),
        "kind": inst.kind(),
        "pass": all_pass,
        "suites": Value::Object(results),
    });
    emit(a.out.as_deref(), &report)?;
    Ok(if all_pass { Outcome::Ok } else { Outcome::SuiteFailed })
}

fn read_input_graph(path: &Path) -> Result<LayeredGraph> {
    let file = if path.is_dir() { path.join(GRAPH_FILE) } else { path.to_path_buf() };
    let f = fs::File::open(&file).with_context(|| format!("opening {}", file.display()))?;
    Ok(read_graph(BufReader::new(f)).with_context(|| format!("reading {}", file.display()))?)
}

pub fn reduce(a: &ReduceArgs) -> Result<Outcome> {
    let g = read_input_graph(&a.input)?;
    let mut params = ReduceParams::new(a.x, a.seed);
    if let Some(m) = a.max_attempts {
        params.max_attempts = m;
    }
    let red = subsample_reduce(&g, &params)?;
    let h1 = folklore(&red.reduced, ProposalKind::Shortcut, a.h1_budget, a.seed)?;
    let check = stitched_check(&g, &red, &h1, a.pairs, a.seed)?;
    fs::create_dir_all(&a.out)?;
    let mut graph = Vec::new();
    write_graph(&red.reduced, &mut graph)?;
    fs::write(a.out.join("reduced.hcg"), graph)?;
    let map: Vec<(u32, u32)> = red.node_map.iter().map(|(o, r)| (o.0, r.0)).collect();
    let mut text = serde_json::to_string(&map)?;
    text.push('\n');
    fs::write(a.out.join("node_map.json"), text)?;
    let report = json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "x": a.x,
        "window": red.window,
        "attempts": red.attempts,
        "h1_edges": h1.len(),
        "check": check,
    });
    emit(Some(&a.out.join("report.json")), &report)?;
    println!(
        "reduced {} -> {} nodes (cap {}), {} edges; stitched check {} on {} pairs",
        g.node_count(),
        red.reduced.node_count(),
        check.node_cap,
        red.reduced.edge_count(),
        if check.pass { "passed" } else { "FAILED" },
        check.pairs.len()
    );
    Ok(if check.pass { Outcome::Ok } else { Outcome::SuiteFailed })
}

pub fn info(path: &Path) -> Result<Outcome> {
    let inst = load(path)?;
    let g = inst.graph();
    let value = match &inst {
        Instance::Hopset(h) => json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "hopset",
            "params": h.params,
            "dims": h.dims,
            "mode": g.mode().as_str(),
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "path_nodes": h.path_len(),
            "paths": h.paths.len(),
            "expansion": h.expansion,
            "resamples": h.resamples,
            "floor": inst.floor(),
        }),
        Instance::Shortcut(s) => json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "shortcut",
            "params": s.params,
            "dims": s.dims,
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "path_nodes": s.path_len(),
            "paths": s.paths.len(),
            "attempts": s.attempts,
            "floor": inst.floor(),
        }),
    };
    emit(None, &value)?;
    Ok(Outcome::Ok)
}
