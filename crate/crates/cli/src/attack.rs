use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use hopcut_core::adversary::{run_adversary, AttackTarget};
use hopcut_core::archive::{read_archive, Instance};
use hopcut_core::critical::HopProfile;
use hopcut_core::hopset::hop_profile;
use hopcut_core::shortcut::evaluate_shortcut;
use hopcut_core::{AdversaryConfig, AdversaryKind};
use rayon::prelude::*;

use crate::{AttackArgs, Outcome};

pub const CSV_VERSION: u32 = 1;

pub const CSV_COLUMNS: &[&str] = &[
    "instance_id",
    "kind",
    "n",
    "budget_spec",
    "budget",
    "path_nodes",
    "adversary",
    "h_size",
    "max_hops",
    "mean_hops",
    "phi",
    "floor",
    "floor_ok",
    "status",
];

/// `p`, `p/k` (relative to half the number of critical paths) or an integer.
pub fn parse_budget(spec: &str, p: u64) -> Result<u64> {
    let spec = spec.trim();
    if spec == "p" {
        return Ok(p);
    }
    if let Some(k) = spec.strip_prefix("p/") {
        let k: u64 = k.parse().with_context(|| format!("bad budget {spec:?}"))?;
        if k == 0 {
            bail!(hopcut_core::Error::InvalidParams(format!("bad budget {spec:?}")));
        }
        return Ok(p / k);
    }
    spec.parse()
        .map_err(|_| hopcut_core::Error::InvalidParams(format!("bad budget {spec:?}, expected p, p/k or an integer")).into())
}

pub fn instance_id(inst: &Instance) -> String {
    match inst {
        Instance::Hopset(h) => format!(
            "hopset-n{}-p{}-s{}{}",
            inst.graph().node_count(),
            h.params.p,
            h.params.seed,
            if inst.graph().mode() == hopcut_core::GraphMode::Undirected { "-u" } else { "" }
        ),
        Instance::Shortcut(s) => format!("shortcut-n{}-s{}", s.params.n, s.params.seed),
    }
}

fn evaluate(inst: &Instance, config: &AdversaryConfig) -> Result<(usize, HopProfile)> {
    let target = AttackTarget { graph: inst.graph(), paths: inst.paths(), kind: inst.kind() };
    let h = run_adversary(target, config)?;
    let prof = match inst {
        Instance::Hopset(i) => hop_profile(i, &h)?,
        Instance::Shortcut(i) => evaluate_shortcut(i, &h)?,
    };
    Ok((h.len(), prof))
}

/// The CSV text for one archive; deterministic unless `timings` is set.
pub fn attack_csv(inst: &Instance, adversaries: &[AdversaryKind], budgets: &[String], seed: u64, timings: bool) -> Result<String> {
    let p = inst.effective_p();
    let grid: Vec<(AdversaryKind, String, u64)> = adversaries
        .iter()
        .flat_map(|&k| budgets.iter().map(move |b| (k, b.clone())))
        .map(|(k, b)| parse_budget(&b, p).map(|v| (k, b, v)))
        .collect::<Result<_>>()?;
    let id = instance_id(inst);
    let floor = inst.floor();
    let n = inst.graph().node_count();
    let kind = match inst.kind() {
        hopcut_core::ProposalKind::Hopset => "hopset",
        hopcut_core::ProposalKind::Shortcut => "shortcut",
    };
    let rows: Vec<String> = grid
        .par_iter()
        .map(|(adv, spec, budget)| {
            let start = Instant::now();
            let config = AdversaryConfig { kind: *adv, budget: *budget, seed };
            let mut row = format!("{id},{kind},{n},{spec},{budget},{},{adv},", inst.path_len());
            match evaluate(inst, &config) {
                Ok((size, prof)) => {
                    let ok = prof.max as f64 >= floor;
                    write!(row, "{size},{},{:.6},{},{floor},{ok},ok", prof.max, prof.mean, prof.phi).unwrap();
                }
                Err(e) => {
                    log::warn!("{adv} at budget {budget}: {e}");
                    let msg = e.to_string().replace([',', '\n', '"'], " ");
                    write!(row, ",,,,{floor},,error: {msg}").unwrap();
                }
            }
            if timings {
                write!(row, ",{}", start.elapsed().as_millis()).unwrap();
            }
            row
        })
        .collect();
    let mut out = format!("# hopcut attack csv v{CSV_VERSION}\n{}", CSV_COLUMNS.join(","));
    if timings {
        out.push_str(",wall_ms");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

pub fn attack(a: &AttackArgs) -> Result<Outcome> {
    let inst = read_archive(&a.archive).with_context(|| format!("reading archive {}", a.archive.display()))?;
    let adversaries: Vec<AdversaryKind> =
        a.adversary.iter().filter(|s| !s.is_empty()).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let budgets: Vec<String> = a.budget.iter().filter(|s| !s.is_empty()).cloned().collect();
    let csv = attack_csv(&inst, &adversaries, &budgets, a.seed, a.timings)?;
    match &a.out {
        Some(p) => fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(Outcome::Ok)
}
