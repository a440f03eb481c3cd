//! On-disk instance archives: a directory holding `graph.hcg` and an
//! `instance.json` sidecar with everything needed to replay the instance
//! without rebuilding it.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::critical::CriticalPath;
use crate::error::{Error, Result};
use crate::geometry::{adjacent_differences, ConvexVectorSet};
use crate::graph::io::{graph_to_bytes, read_graph};
use crate::graph::{LayeredGraph, NodeId};
use crate::hopset::{Direction, HopsetDims, HopsetInstance, HopsetParams};
use crate::proposal::ProposalKind;
use crate::shortcut::{AttemptRecord, ShortcutDims, ShortcutInstance, ShortcutParams};

pub const SCHEMA_VERSION: u32 = 1;
pub const GRAPH_FILE: &str = "graph.hcg";
pub const SIDECAR_FILE: &str = "instance.json";

#[derive(Clone, Debug)]
pub enum Instance {
    Hopset(HopsetInstance),
    Shortcut(ShortcutInstance),
}

impl Instance {
    pub fn kind(&self) -> ProposalKind {
        match self {
            Instance::Hopset(_) => ProposalKind::Hopset,
            Instance::Shortcut(_) => ProposalKind::Shortcut,
        }
    }

    pub fn graph(&self) -> &LayeredGraph {
        match self {
            Instance::Hopset(i) => &i.graph,
            Instance::Shortcut(i) => &i.graph,
        }
    }

    pub fn paths(&self) -> &[CriticalPath] {
        match self {
            Instance::Hopset(i) => &i.paths,
            Instance::Shortcut(i) => &i.paths,
        }
    }

    /// Nodes on every critical path: `ℓ` or `ℓ̂`.
    pub fn path_len(&self) -> usize {
        match self {
            Instance::Hopset(i) => i.path_len(),
            Instance::Shortcut(i) => i.path_len(),
        }
    }

    /// The largest budget covered by the potential floor.
    pub fn effective_p(&self) -> u64 {
        match self {
            Instance::Hopset(i) => i.dims.effective_p,
            Instance::Shortcut(i) => i.dims.effective_p,
        }
    }

    pub fn floor(&self) -> f64 {
        crate::critical::potential_floor(self.path_len())
    }
}

#[derive(Serialize, Deserialize)]
struct HopsetSidecar {
    schema_version: u32,
    kind: ProposalKind,
    params: HopsetParams,
    dims: HopsetDims,
    epsilons: Vec<u64>,
    #[serde(rename = "D")]
    directions: Vec<Direction>,
    start_set: Vec<NodeId>,
    paths: Vec<Vec<NodeId>>,
    pairs: Vec<(NodeId, NodeId)>,
    expansion: u64,
    weight_offset: String,
    seed_used: u64,
    resamples: u32,
    resample_log: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ShortcutSidecar {
    schema_version: u32,
    kind: ProposalKind,
    params: ShortcutParams,
    dims: ShortcutDims,
    #[serde(rename = "W")]
    w: ConvexVectorSet,
    lambdas: Vec<u32>,
    ell_hat: u64,
    start_set: Vec<NodeId>,
    paths: Vec<Vec<NodeId>>,
    pairs: Vec<(NodeId, NodeId)>,
    seed_used: u64,
    attempts: Vec<AttemptRecord>,
}

#[derive(Deserialize)]
struct Probe {
    schema_version: u32,
    kind: ProposalKind,
}

fn node_lists(paths: &[CriticalPath]) -> Vec<Vec<NodeId>> {
    paths.iter().map(|p| p.nodes.clone()).collect()
}

fn pairs(paths: &[CriticalPath]) -> Vec<(NodeId, NodeId)> {
    paths.iter().map(|p| (p.source(), p.target())).collect()
}

/// Critical paths from node lists; path `i` has start `i / d` and direction
/// `i % d`.
fn rebuild_paths(
    g: &LayeredGraph,
    lists: Vec<Vec<NodeId>>,
    pairs: &[(NodeId, NodeId)],
    directions: usize,
    len: usize,
) -> Result<Vec<CriticalPath>> {
    if directions == 0 || lists.len() != pairs.len() || lists.len() % directions != 0 {
        return Err(Error::Format(format!(
            "{} paths, {} pairs and {directions} directions do not fit together",
            lists.len(),
            pairs.len()
        )));
    }
    let n = g.node_count() as u32;
    lists
        .into_iter()
        .enumerate()
        .map(|(i, nodes)| {
            if nodes.len() != len {
                return Err(Error::Format(format!("path {i} has {} nodes, expected {len}", nodes.len())));
            }
            if let Some(v) = nodes.iter().find(|v| v.0 >= n) {
                return Err(Error::Format(format!("path {i} references missing node {v}")));
            }
            let layer0 = g.layer_of(nodes[0]);
            if nodes.iter().enumerate().any(|(t, &v)| g.layer_of(v) != layer0 + t) {
                return Err(Error::Format(format!("path {i} does not visit consecutive layers")));
            }
            let p = CriticalPath { start: (i / directions) as u32, direction: (i % directions) as u32, nodes };
            if (p.source(), p.target()) != pairs[i] {
                return Err(Error::Format(format!("pair {i} does not match its path")));
            }
            Ok(p)
        })
        .collect()
}

fn sidecar_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// The two archive files as bytes: `(graph, sidecar)`.
pub fn archive_bytes(inst: &Instance) -> Result<(Vec<u8>, Vec<u8>)> {
    let sidecar = match inst {
        Instance::Hopset(i) => sidecar_bytes(&HopsetSidecar {
            schema_version: SCHEMA_VERSION,
            kind: ProposalKind::Hopset,
            params: i.params.clone(),
            dims: i.dims.clone(),
            epsilons: i.epsilons.clone(),
            directions: i.directions.clone(),
            start_set: i.start_set.clone(),
            paths: node_lists(&i.paths),
            pairs: pairs(&i.paths),
            expansion: i.expansion,
            weight_offset: i.weight_offset.to_string(),
            seed_used: i.seed_used,
            resamples: i.resamples,
            resample_log: i.resample_log.clone(),
        })?,
        Instance::Shortcut(i) => sidecar_bytes(&ShortcutSidecar {
            schema_version: SCHEMA_VERSION,
            kind: ProposalKind::Shortcut,
            params: i.params.clone(),
            dims: i.dims.clone(),
            w: i.w.clone(),
            lambdas: i.lambdas.clone(),
            ell_hat: i.dims.ell_hat,
            start_set: i.start_set.clone(),
            paths: node_lists(&i.paths),
            pairs: pairs(&i.paths),
            seed_used: i.seed_used,
            attempts: i.attempts.clone(),
        })?,
    };
    Ok((graph_to_bytes(inst.graph())?, sidecar))
}

pub fn write_archive(dir: &Path, inst: &Instance) -> Result<()> {
    let (graph, sidecar) = archive_bytes(inst)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(GRAPH_FILE), graph)?;
    fs::write(dir.join(SIDECAR_FILE), sidecar)?;
    Ok(())
}

pub fn read_archive(dir: &Path) -> Result<Instance> {
    let graph = read_graph(BufReader::new(fs::File::open(dir.join(GRAPH_FILE))?))?;
    let text = fs::read(dir.join(SIDECAR_FILE))?;
    archive_from_parts(graph, &text)
}

pub fn archive_from_parts(graph: LayeredGraph, sidecar: &[u8]) -> Result<Instance> {
    let probe: Probe = serde_json::from_slice(sidecar).map_err(|e| Error::Format(format!("sidecar: {e}")))?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "schema version {} is not supported (expected {SCHEMA_VERSION})",
            probe.schema_version
        )));
    }
    let bad = |e: serde_json::Error| Error::Format(format!("sidecar: {e}"));
    match probe.kind {
        ProposalKind::Hopset => {
            let s: HopsetSidecar = serde_json::from_slice(sidecar).map_err(bad)?;
            let len = (s.dims.layers * s.expansion) as usize;
            let paths = rebuild_paths(&graph, s.paths, &s.pairs, s.directions.len(), len)?;
            if s.epsilons.len() as u64 != s.dims.layers {
                return Err(Error::Format(format!("{} epsilons for {} layers", s.epsilons.len(), s.dims.layers)));
            }
            let weight_offset =
                s.weight_offset.parse().map_err(|_| Error::Format(format!("bad weight offset {:?}", s.weight_offset)))?;
            Ok(Instance::Hopset(HopsetInstance {
                params: s.params,
                dims: s.dims,
                graph,
                epsilons: s.epsilons,
                directions: s.directions,
                start_set: s.start_set,
                paths,
                expansion: s.expansion,
                weight_offset,
                seed_used: s.seed_used,
                resamples: s.resamples,
                resample_log: s.resample_log,
            }))
        }
        ProposalKind::Shortcut => {
            let s: ShortcutSidecar = serde_json::from_slice(sidecar).map_err(bad)?;
            if s.ell_hat != s.dims.ell_hat || s.w.len() as u64 != s.dims.q {
                return Err(Error::Format("truncation length or |W| disagrees with the dimensions".into()));
            }
            if s.lambdas.len() as u64 + 1 != s.dims.layers || s.lambdas.iter().any(|&l| l < 1 || l as u64 >= s.dims.q) {
                return Err(Error::Format("λ values out of range".into()));
            }
            let paths = rebuild_paths(&graph, s.paths, &s.pairs, s.w.len(), s.ell_hat as usize)?;
            let diffs = adjacent_differences(&s.w)?;
            Ok(Instance::Shortcut(ShortcutInstance {
                params: s.params,
                dims: s.dims,
                w: s.w,
                diffs,
                lambdas: s.lambdas,
                graph,
                start_set: s.start_set,
                paths,
                seed_used: s.seed_used,
                attempts: s.attempts,
            }))
        }
    }
}
