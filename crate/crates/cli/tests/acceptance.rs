//! Acceptance run: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hopcut_core::adversary::{run_adversary, AttackTarget};
use hopcut_core::geometry::{build_strongly_convex_set, verify_strong_convexity};
use hopcut_core::graph::generate::random_layered;
use hopcut_core::graph::paths::{shortest_paths, undirectify};
use hopcut_core::hopset::{
    build_hopset_instance, check_squared_sum, extend_small_p, hop_profile, overlap_report, pair_hopdists,
    split_monte_carlo, verify_unique_shortest, HopsetInstance, HopsetParams, SquaredSumOutcome,
};
use hopcut_core::reduce::{stitched_check, subsample_reduce, ReduceParams};
use hopcut_core::shortcut::{
    build_shortcut_instance, evaluate_shortcut, small_move_report, split_report, verify_unique_paths,
    ShortcutInstance, ShortcutParams,
};
use hopcut_core::{AdversaryConfig, AdversaryKind, Edge, GraphMode, ProposalKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/common/clique.rs"]
#[allow(dead_code)]
mod clique;
#[path = "../../core/tests/common/paths.rs"]
mod paths_oracle;

type Verdict = (bool, String);

const SEEDS: [u64; 3] = [1, 2, 3];
const Z: f64 = 3.0;

fn hopset(n: u64, seed: u64) -> HopsetInstance {
    build_hopset_instance(&HopsetParams::new(n, n, seed)).expect("hopset build")
}

fn shortcut(n: u64, seed: u64) -> ShortcutInstance {
    build_shortcut_instance(&ShortcutParams::new(n, seed)).expect("shortcut build")
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn c1_unique_shortest() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [1u64 << 12, 1 << 14] {
        for seed in SEEDS {
            let t = Instant::now();
            let inst = hopset(n, seed);
            let r = verify_unique_shortest(&inst).expect("unique check");
            let dt = t.elapsed();
            ok &= r.pass && r.pairs_checked == inst.paths.len() && dt < Duration::from_secs(120);
            notes.push(format!("n={n} s={seed}: {}/{} in {}", r.pairs_checked - r.failures.len(), r.pairs_checked, secs(dt)));
        }
    }
    (ok, notes.join("; "))
}

fn c2_unique_paths() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [1u64 << 15, 1 << 18] {
        for seed in SEEDS {
            let t = Instant::now();
            let inst = shortcut(n, seed);
            let r = verify_unique_paths(&inst).expect("count check");
            let dt = t.elapsed();
            ok &= r.pass && dt < Duration::from_secs(300);
            notes.push(format!("n={n} s={seed}: {}/{} in {}", r.pairs_checked - r.failures.len(), r.pairs_checked, secs(dt)));
        }
    }
    (ok, notes.join("; "))
}

fn c3_overlap() -> Verdict {
    let h = hopset(1 << 12, 1);
    let hr = overlap_report(&h, None, 0);
    let s = shortcut(1 << 15, 1);
    let sr = split_report(&s, 0, None, 0, Z);
    let ok = hr.exhaustive
        && hr.violations == 0
        && hr.deterministic_violations == 0
        && sr.exhaustive
        && sr.overlap_violations == 0;
    let note = format!(
        "hopset {} pairs, {} + {} violations; shortcut {} pairs, {} violations",
        hr.pairs_checked, hr.violations, hr.deterministic_violations, sr.pairs_checked, sr.overlap_violations
    );
    (ok, note)
}

fn c4_split() -> Verdict {
    let trials = 10_000;
    let tiny = HopsetParams { layers: Some(4), q: Some(2), edge_span: Some(2), ..HopsetParams::new(64, 64, 7) };
    let tiny = build_hopset_instance(&tiny).expect("tiny hopset");
    let mid = hopset(1 << 12, 7);
    let mut hr = split_monte_carlo(&tiny.dims, trials, 11, Z);
    let hr_mid = split_monte_carlo(&mid.dims, trials, 11, Z);
    hr.pass &= hr_mid.pass;
    hr.trials = hr.trials.min(hr_mid.trials);
    hr.checks.extend(hr_mid.checks);
    let sc = shortcut(1 << 15, 7);
    let sr = split_report(&sc, trials, Some(0), 11, Z);
    let s_ok = sr.split_checks.iter().all(|c| c.check.pass);
    let worst = |xs: Vec<(f64, f64)>| xs.into_iter().map(|(f, t)| f - t).fold(f64::INFINITY, f64::min);
    let hw = worst(hr.checks.iter().map(|c| (c.check.frequency, c.check.threshold)).collect());
    let sw = worst(sr.split_checks.iter().map(|c| (c.check.frequency, c.check.threshold)).collect());
    let note = format!(
        "{trials} resamples; hopset q=2,{} {} checks, min margin {hw:.4}; shortcut q={} {} checks, min margin {sw:.4}",
        mid.dims.q,
        hr.checks.len(),
        sc.dims.q,
        sr.split_checks.len()
    );
    (hr.pass && hr.trials >= trials && s_ok && sr.resamples >= trials, note)
}

fn c5_potential_floor() -> Verdict {
    let kinds = [AdversaryKind::Folklore, AdversaryKind::Greedy, AdversaryKind::Random];
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [1u64 << 12, 1 << 14] {
        let inst = hopset(n, 1);
        let target = AttackTarget { graph: &inst.graph, paths: &inst.paths, kind: ProposalKind::Hopset };
        let p = inst.dims.effective_p;
        let mut worst = u32::MAX;
        for kind in kinds {
            for budget in [p / 4, p / 2, p] {
                let h = run_adversary(target, &AdversaryConfig { kind, budget, seed: 1 }).expect("adversary");
                let prof = hop_profile(&inst, &h).expect("profile");
                ok &= h.len() as u64 <= budget && prof.max as f64 >= inst.hopset_floor();
                worst = worst.min(prof.max);
            }
        }
        notes.push(format!("hopset n={n}: min max-hops {worst} vs floor {}", inst.hopset_floor()));
    }
    for n in [1u64 << 15, 1 << 18] {
        let inst = shortcut(n, 1);
        let target = AttackTarget { graph: &inst.graph, paths: &inst.paths, kind: ProposalKind::Shortcut };
        let p = inst.dims.effective_p;
        let mut worst = u32::MAX;
        for kind in kinds {
            for budget in [p / 4, p / 2, p] {
                let h = run_adversary(target, &AdversaryConfig { kind, budget, seed: 1 }).expect("adversary");
                let prof = evaluate_shortcut(&inst, &h).expect("profile");
                ok &= h.len() as u64 <= budget && prof.max as f64 >= inst.floor();
                worst = worst.min(prof.max);
            }
        }
        notes.push(format!("shortcut n={n}: min max-hops {worst} vs floor {}", inst.floor()));
    }
    (ok, notes.join("; "))
}

fn c6_single_edge() -> Verdict {
    let inst = hopset(1 << 7, 1);
    let ell = inst.path_len() as u64;
    let base: u64 = pair_hopdists(&inst, &[]).expect("hops").iter().map(|&h| h as u64).sum();
    let mut checked = 0;
    let mut worst = 0;
    for u in inst.graph.nodes() {
        let sssp = shortest_paths(&inst.graph, u).expect("sssp");
        for (v, _) in sssp.reached() {
            if v == u {
                continue;
            }
            let e = Edge::new(u, v, sssp.weight(v).unwrap());
            let phi: u64 = pair_hopdists(&inst, &[e]).expect("hops").iter().map(|&h| h as u64).sum();
            worst = worst.max(base - phi);
            checked += 1;
        }
    }
    (checked > 0 && worst <= ell, format!("{checked} valid edges, max damage {worst} vs ell {ell}"))
}

fn c7_squared_sum() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut trials, mut strict, mut equal, mut violated) = (0u64, 0u64, 0u64, 0u64);
    while trials < 100_000 {
        let k = rng.gen_range(1..=8);
        let b: i64 = rng.gen_range(-20..=20);
        let x: Vec<i64> = (0..k).map(|_| rng.gen_range(-40..=40)).collect();
        // each x̂_i within |x_i - b| of b; the last coordinate repairs the sum
        let mut xhat: Vec<i64> = x
            .iter()
            .map(|&xi| {
                let r = (xi - b).abs();
                match rng.gen_range(0..3) {
                    0 => xi,
                    1 => 2 * b - xi,
                    _ => rng.gen_range(b - r..=b + r),
                }
            })
            .collect();
        let diff: i64 = x.iter().sum::<i64>() - xhat.iter().sum::<i64>();
        xhat[k - 1] += diff;
        let hyp = x.iter().zip(&xhat).all(|(&a, &h)| (h - b).abs() <= (a - b).abs());
        if !hyp {
            continue;
        }
        trials += 1;
        let lhs: i64 = x.iter().map(|v| v * v).sum();
        let rhs: i64 = xhat.iter().map(|v| v * v).sum();
        let all_eq = x.iter().zip(&xhat).all(|(&a, &h)| (h - b).abs() == (a - b).abs());
        let outcome = check_squared_sum(b, &x, &xhat);
        if lhs < rhs || (lhs == rhs && !all_eq) || outcome == SquaredSumOutcome::Violated {
            violated += 1;
        }
        match outcome {
            SquaredSumOutcome::Strict => strict += 1,
            SquaredSumOutcome::EqualityCase => equal += 1,
            _ => {}
        }
    }
    let ok = violated == 0 && strict + equal == trials && equal > 0;
    (ok, format!("{trials} trials: {strict} strict, {equal} equality, {violated} violations"))
}

fn c8_geometry() -> Verdict {
    let mut ok = true;
    for r in 2..=20i64 {
        let w = build_strongly_convex_set(r).expect("build");
        ok &= verify_strong_convexity(&w).pass && w.len() == clique::max_clique(r);
    }
    let mut notes = vec!["r<=20 sizes match the exhaustive maximum".to_string()];
    for r in [2u64, 3, 4, 5] {
        let mut w = build_strongly_convex_set((r * r * r) as i64).expect("build");
        w.truncate_tail((r * r) as usize);
        let rep = small_move_report(r, &w, 1000, r, Z).expect("small_c");
        ok &= rep.pass;
        notes.push(format!("r={r}: mean |c| {:.3} (se {:.3}) <= {:.1}", rep.estimate.mean, rep.estimate.se, rep.bound));
    }
    (ok, notes.join("; "))
}

fn c9_undirectify() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = true;
    let mut compared = 0;
    for _ in 0..50 {
        let layers = rng.gen_range(2..=7);
        let width = rng.gen_range(1..=7);
        let g = random_layered(&mut rng, layers, width, 0.45, 9, GraphMode::Directed).expect("graph");
        ok &= g.node_count() <= 50;
        let (u, _) = undirectify(&g).expect("undirectify");
        let last = g.layer_count() - 1;
        for s in g.layer_nodes(0) {
            for t in g.layer_nodes(last) {
                let (w, dp) = paths_oracle::min_paths(&g, s, t);
                if w.is_none() {
                    continue;
                }
                ok &= dp == paths_oracle::min_paths(&u, s, t).1;
                compared += 1;
            }
        }
    }
    (ok && compared > 0, format!("50 graphs, {compared} reachable first-to-last pairs compared"))
}

fn c10_reductions() -> Verdict {
    let base = hopset(1 << 10, 1);
    let big = extend_small_p(&base, 1 << 12).expect("extend");
    let unique = verify_unique_shortest(&big).expect("unique");
    let overlap = overlap_report(&big, None, 0);
    let mut ok = unique.pass && overlap.exhaustive && overlap.violations == 0 && overlap.deterministic_violations == 0;
    let mut notes = vec![format!(
        "extended to n={} (path nodes {}): unique {}/{}, overlap violations {}",
        big.graph.node_count(),
        big.path_len(),
        unique.pairs_checked - unique.failures.len(),
        unique.pairs_checked,
        overlap.violations + overlap.deterministic_violations
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let g = random_layered(&mut rng, 300, 3, 1.0, 1, GraphMode::Directed).expect("graph");
    for x in [1u64, 2] {
        let red = subsample_reduce(&g, &ReduceParams::new(x, x)).expect("reduce");
        for h1_budget in [0, red.reduced.node_count() as u64] {
            let h1 = hopcut_core::adversary::folklore(&red.reduced, ProposalKind::Shortcut, h1_budget, 3).expect("h1");
            let rep = stitched_check(&g, &red, &h1, 100, x).expect("stitched");
            ok &= rep.pass && rep.pairs.len() == 100 && rep.reduced_nodes as u64 <= rep.node_cap;
            let worst = rep.pairs.iter().map(|p| p.dist_stitched).max().unwrap_or(0);
            notes.push(format!(
                "x={x} |H1|={}: |V1|={} <= {}, max stitched dist {worst} <= {}",
                h1.len(),
                rep.reduced_nodes,
                rep.node_cap,
                rep.bound
            ));
        }
    }
    (ok, notes.join("; "))
}

fn run_cli(args: &[&str], dir: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_hopcut"))
        .args(args)
        .current_dir(dir)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn pipeline(dir: &Path) -> bool {
    let steps: [&[&str]; 7] = [
        &["gen", "hopset", "--n", "4096", "--seed", "1", "--out", "h"],
        &["gen", "shortcut", "--n", "32768", "--seed", "1", "--out", "s"],
        &["verify", "h", "--out", "h.json"],
        &["verify", "s", "--out", "s.json"],
        &["attack", "h", "--adversary", "folklore,greedy,random,direct-pairs", "--out", "h.csv"],
        &["attack", "s", "--adversary", "folklore,greedy,random,direct-pairs", "--out", "s.csv"],
        &["reduce", "s", "--x", "1", "--out", "r"],
    ];
    steps.iter().all(|a| run_cli(a, dir))
}

fn c11_reproducible() -> Verdict {
    let a = tempfile::tempdir().expect("tempdir");
    let b = tempfile::tempdir().expect("tempdir");
    if !pipeline(a.path()) || !pipeline(b.path()) {
        return (false, "pipeline failed".into());
    }
    let files = [
        "h/graph.hcg",
        "h/instance.json",
        "s/graph.hcg",
        "s/instance.json",
        "h.json",
        "s.json",
        "h.csv",
        "s.csv",
        "r/reduced.hcg",
        "r/node_map.json",
        "r/report.json",
    ];
    let mut bytes = 0;
    let mut same = true;
    for f in files {
        let x = std::fs::read(a.path().join(f)).unwrap_or_default();
        let y = std::fs::read(b.path().join(f)).unwrap_or_else(|_| vec![0]);
        same &= x == y && !x.is_empty();
        bytes += x.len();
    }
    (same, format!("{} files, {bytes} bytes identical across two runs", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("unique shortest paths, hopset n=2^12,2^14 x3 seeds", c1_unique_shortest),
        ("unique paths, shortcut n=2^15,2^18 x3 seeds", c2_unique_paths),
        ("overlap bounds, exhaustive", c3_overlap),
        ("split probability Monte Carlo", c4_split),
        ("potential floor under adversaries", c5_potential_floor),
        ("single-edge damage <= ell at n=2^7", c6_single_edge),
        ("squared-sum proposition, 1e5 trials", c7_squared_sum),
        ("geometry oracle and mean |c|", c8_geometry),
        ("undirected +W reduction oracle", c9_undirectify),
        ("small-p extension and subsampling reduction", c10_reductions),
        ("byte-exact reproducibility", c11_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, note) = f();
        if !ok {
            failed += 1;
        }
        println!("[{}] {:>2}. {name} ({}): {note}", if ok { "PASS" } else { "FAIL" }, i + 1, secs(t.elapsed()));
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
