//! Subsampling reduction from a graph `G` to a sparser reachability graph
//! `G₁` on a random node sample.
//!
//! Each node joins `V₁` with probability `1 / (2x)`. With `L = 4x⌈ln n⌉`,
//! `G₁` has an edge `a -> b` for sampled `a ≠ b` whenever `dist_G(a, b) <= 2L`.
//! An attempt is accepted when `|V₁| <= n / x` and every window of `L` hops on
//! every BFS-tree path contains a sampled node.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::paths::bfs;
use crate::graph::{Edge, GraphMode, LayeredGraph, NodeId};
use crate::proposal::{ensure_valid, EdgeSetProposal};
use crate::scaled::ScaledRational;

pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceParams {
    pub x: u64,
    pub seed: u64,
    pub max_attempts: u32,
}

impl ReduceParams {
    pub fn new(x: u64, seed: u64) -> Self {
        Self { x, seed, max_attempts: DEFAULT_MAX_ATTEMPTS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceOutcome {
    Accepted,
    Empty,
    TooLarge,
    MissedWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceAttempt {
    pub seed: u64,
    pub sampled: u64,
    pub outcome: ReduceOutcome,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub params: ReduceParams,
    pub window: u32,
    pub reduced: LayeredGraph,
    /// `(original, reduced)` id pairs, sorted by original id.
    pub node_map: Vec<(NodeId, NodeId)>,
    pub attempts: Vec<ReduceAttempt>,
}

impl Reduction {
    /// The `2L` reachability radius used for `G₁` edges.
    pub fn radius(&self) -> u32 {
        2 * self.window
    }

    pub fn original(&self, v: NodeId) -> NodeId {
        self.node_map[v.index()].0
    }

    /// Maps a proposal on `G₁` to the same edges between original ids.
    pub fn lift(&self, h: &EdgeSetProposal) -> Vec<Edge> {
        h.edges
            .iter()
            .map(|e| Edge::new(self.original(e.tail), self.original(e.head), ScaledRational::integer(1)))
            .collect()
    }
}

/// `L = 4x⌈ln n⌉`.
pub fn window_length(n: usize, x: u64) -> u32 {
    (4 * x * (n.max(2) as f64).ln().ceil() as u64) as u32
}

/// Whether every `L`-hop window on every BFS-tree path from every node
/// contains a sampled node. Returns the first offending `(source, node)`.
pub fn hitting_violation(g: &LayeredGraph, sampled: &[bool], window: u32) -> Option<(NodeId, NodeId)> {
    g.nodes().collect::<Vec<_>>().into_par_iter().find_map_first(|s| {
        let n = g.node_count();
        let mut depth = vec![u32::MAX; n];
        // depth of the deepest sampled node on the tree path, plus one; 0 if none
        let mut last = vec![0u32; n];
        depth[s.index()] = 0;
        last[s.index()] = sampled[s.index()] as u32;
        let mut queue = VecDeque::from([s]);
        let mut bad = None;
        while let Some(v) = queue.pop_front() {
            let (d, l) = (depth[v.index()], last[v.index()]);
            g.for_each_neighbor(v, |u, _| {
                let i = u.index();
                if depth[i] == u32::MAX {
                    depth[i] = d + 1;
                    last[i] = if sampled[i] { d + 2 } else { l };
                    queue.push_back(u);
                    if bad.is_none() && d + 1 >= window && (last[i] == 0 || d + 1 - (last[i] - 1) > window) {
                        bad = Some(u);
                    }
                }
            });
            if bad.is_some() {
                break;
            }
        }
        bad.map(|w| (s, w))
    })
}

pub fn subsample_reduce(g: &LayeredGraph, params: &ReduceParams) -> Result<Reduction> {
    if params.x == 0 {
        return Err(Error::InvalidParams("x must be positive".into()));
    }
    let n = g.node_count();
    let window = window_length(n, params.x);
    let cap = n as u64 / params.x;
    let mut attempts = Vec::new();
    for attempt in 0..params.max_attempts {
        let seed = params.seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampled: Vec<bool> = (0..n).map(|_| rng.gen_bool(1.0 / (2 * params.x) as f64)).collect();
        let count = sampled.iter().filter(|&&b| b).count() as u64;
        let outcome = if count == 0 {
            ReduceOutcome::Empty
        } else if count > cap {
            ReduceOutcome::TooLarge
        } else if let Some((s, w)) = hitting_violation(g, &sampled, window) {
            log::info!("seed {seed}: tree path {s} -> {w} has an unsampled {window}-hop window");
            ReduceOutcome::MissedWindow
        } else {
            ReduceOutcome::Accepted
        };
        attempts.push(ReduceAttempt { seed, sampled: count, outcome });
        if outcome == ReduceOutcome::Accepted {
            return build(g, params.clone(), window, &sampled, attempts);
        }
    }
    Err(Error::ResampleExhausted {
        attempts: params.max_attempts,
        reason: format!("no sample within {cap} nodes hit every {window}-hop window"),
    })
}

fn build(
    g: &LayeredGraph,
    params: ReduceParams,
    window: u32,
    sampled: &[bool],
    attempts: Vec<ReduceAttempt>,
) -> Result<Reduction> {
    // new ids follow original ids, so layer order is preserved
    let kept: Vec<NodeId> = g.nodes().filter(|v| sampled[v.index()]).collect();
    let mut new_id = vec![u32::MAX; g.node_count()];
    for (i, v) in kept.iter().enumerate() {
        new_id[v.index()] = i as u32;
    }
    let mut layer_sizes: Vec<u32> = Vec::new();
    let mut prev_layer = None;
    for v in &kept {
        let l = g.layer_of(*v);
        if prev_layer != Some(l) {
            layer_sizes.push(0);
            prev_layer = Some(l);
        }
        *layer_sizes.last_mut().unwrap() += 1;
    }
    let radius = 2 * window;
    let undirected = g.mode() == GraphMode::Undirected;
    let edges: Vec<Edge> = kept
        .par_iter()
        .flat_map_iter(|&a| {
            let dist = bfs(g, a, Some(radius));
            let new_id = &new_id;
            kept.iter()
                .filter(move |&&b| b != a && dist[b.index()] != u32::MAX && (!undirected || a < b))
                .map(move |&b| {
                    Edge::new(NodeId(new_id[a.index()]), NodeId(new_id[b.index()]), ScaledRational::integer(1))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mode = if undirected { GraphMode::Undirected } else { GraphMode::Dag };
    let labels = kept.iter().map(|&v| g.label(v)).collect();
    let reduced = LayeredGraph::from_parts(mode, 0, g.seed(), &layer_sizes, labels, edges)?;
    let node_map = kept.iter().enumerate().map(|(i, &v)| (v, NodeId(i as u32))).collect();
    Ok(Reduction { params, window, reduced, node_map, attempts })
}

/// Largest finite hop distance in the graph.
pub fn hop_diameter(g: &LayeredGraph) -> u32 {
    g.nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| bfs(g, s, None).into_iter().filter(|&d| d != u32::MAX).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StitchedPair {
    pub from: NodeId,
    pub to: NodeId,
    pub dist_g: u32,
    pub dist_stitched: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StitchedReport {
    pub pass: bool,
    pub reduced_nodes: usize,
    pub node_cap: u64,
    pub diameter: u32,
    pub radius: u32,
    pub bound: u64,
    pub pairs: Vec<StitchedPair>,
    pub violations: usize,
}

/// For up to `pairs` random ordered pairs with `dist_G >= 2L`, checks
/// `dist_{G ∪ H₁}(u, v) <= diam(G₁ ∪ H₁) · 2L + 2L`, where `h` is a shortcut
/// set on `G₁`.
pub fn stitched_check(
    g: &LayeredGraph,
    red: &Reduction,
    h: &EdgeSetProposal,
    pairs: usize,
    seed: u64,
) -> Result<StitchedReport> {
    ensure_valid(&red.reduced, h)?;
    let diameter = hop_diameter(&red.reduced.with_extra_edges(&h.edges)?);
    let radius = red.radius();
    let bound = diameter as u64 * radius as u64 + radius as u64;
    let stitched = g.with_extra_edges(&red.lift(h))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.node_count();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < pairs && tries < 64 * pairs.max(1) {
        tries += 1;
        let u = NodeId(rng.gen_range(0..n as u32));
        let d = bfs(g, u, None);
        let far: Vec<usize> = (0..n).filter(|&v| d[v] != u32::MAX && d[v] >= radius).collect();
        if far.is_empty() {
            continue;
        }
        let v = far[rng.gen_range(0..far.len())];
        let ds = bfs(&stitched, u, None)[v];
        out.push(StitchedPair { from: u, to: NodeId(v as u32), dist_g: d[v], dist_stitched: ds });
    }
    let violations = out.iter().filter(|p| p.dist_stitched as u64 > bound).count();
    Ok(StitchedReport {
        pass: violations == 0 && red.reduced.node_count() as u64 <= n as u64 / red.params.x,
        reduced_nodes: red.reduced.node_count(),
        node_cap: n as u64 / red.params.x,
        diameter,
        radius,
        bound,
        pairs: out,
        violations,
    })
}
