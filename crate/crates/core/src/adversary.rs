//! Concrete hopset and shortcut-set constructions used to attack the
//! instances.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::{backward_hops, forward_hops, CriticalPath};
use crate::error::{Error, Result};
use crate::graph::paths::{bfs, shortest_paths};
use crate::graph::{Edge, LayeredGraph, NodeId};
use crate::hopset::subpath_weight;
use crate::proposal::{EdgeSetProposal, ProposalKind};
use crate::scaled::ScaledRational;

/// Upper limit on `Σ |π|²` for the greedy candidate sweep.
pub const GREEDY_MAX_WORK: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    Folklore,
    Greedy,
    Random,
    DirectPairs,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 4] =
        [AdversaryKind::Folklore, AdversaryKind::Greedy, AdversaryKind::Random, AdversaryKind::DirectPairs];

    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryKind::Folklore => "folklore",
            AdversaryKind::Greedy => "greedy",
            AdversaryKind::Random => "random",
            AdversaryKind::DirectPairs => "direct-pairs",
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown adversary {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    pub budget: u64,
    pub seed: u64,
}

/// The instance as the adversaries see it: read-only graph plus the critical
/// paths whose hop distances are scored.
#[derive(Clone, Copy, Debug)]
pub struct AttackTarget<'a> {
    pub graph: &'a LayeredGraph,
    pub paths: &'a [CriticalPath],
    pub kind: ProposalKind,
}

impl AttackTarget<'_> {
    fn empty(&self) -> EdgeSetProposal {
        let sigma = match self.kind {
            ProposalKind::Hopset => self.graph.scale_sigma(),
            ProposalKind::Shortcut => 0,
        };
        EdgeSetProposal::empty(self.kind, sigma)
    }

    fn chord_weight(&self, path: &CriticalPath, i: usize, j: usize) -> Result<ScaledRational> {
        match self.kind {
            ProposalKind::Hopset => subpath_weight(self.graph, path, i, j),
            ProposalKind::Shortcut => Ok(ScaledRational::integer(1)),
        }
    }
}

pub fn run_adversary(target: AttackTarget<'_>, config: &AdversaryConfig) -> Result<EdgeSetProposal> {
    let mut h = match config.kind {
        AdversaryKind::Folklore => folklore(target.graph, target.kind, config.budget, config.seed)?,
        AdversaryKind::Greedy => greedy(target, config.budget)?,
        AdversaryKind::Random => random_edges(target.graph, target.kind, config.budget, config.seed)?,
        AdversaryKind::DirectPairs => direct_pairs(target, config.budget)?,
    };
    h.config = serde_json::to_value(config)?;
    Ok(h)
}

/// Distinct uniformly random nodes, in sampled order.
pub fn sample_nodes(n: usize, count: usize, seed: u64) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, n, count.min(n)).into_iter().map(|i| NodeId(i as u32)).collect()
}

/// Samples `⌊√budget⌋` nodes and connects ordered reachable pairs in sampled
/// order until the budget is used.
pub fn folklore(g: &LayeredGraph, kind: ProposalKind, budget: u64, seed: u64) -> Result<EdgeSetProposal> {
    let target = AttackTarget { graph: g, paths: &[], kind };
    let mut h = target.empty();
    if budget == 0 {
        return Ok(h);
    }
    let mut s = (budget as f64).sqrt() as u64;
    while s * s > budget {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= budget {
        s += 1;
    }
    let nodes = sample_nodes(g.node_count(), s as usize, seed);
    let rows: Vec<Vec<Edge>> = nodes
        .par_iter()
        .map(|&u| -> Result<Vec<Edge>> {
            Ok(match kind {
                ProposalKind::Hopset => {
                    let sssp = shortest_paths(g, u)?;
                    nodes
                        .iter()
                        .filter(|&&v| v != u)
                        .filter_map(|&v| sssp.weight(v).map(|w| Edge::new(u, v, w)))
                        .collect()
                }
                ProposalKind::Shortcut => {
                    let d = bfs(g, u, None);
                    nodes
                        .iter()
                        .filter(|&&v| v != u && d[v.index()] != u32::MAX)
                        .map(|&v| Edge::new(u, v, ScaledRational::integer(1)))
                        .collect()
                }
            })
        })
        .collect::<Result<_>>()?;
    h.edges = rows.into_iter().flatten().take(budget as usize).collect();
    Ok(h)
}

/// `budget` distinct random valid edges: a uniform node, then a uniform node
/// reachable from it.
pub fn random_edges(g: &LayeredGraph, kind: ProposalKind, budget: u64, seed: u64) -> Result<EdgeSetProposal> {
    let target = AttackTarget { graph: g, paths: &[], kind };
    let mut h = target.empty();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let n = g.node_count() as u32;
    let mut misses = 0u64;
    while (h.edges.len() as u64) < budget && misses < 64 * budget.max(1) {
        let u = NodeId(rng.gen_range(0..n));
        let sssp = match kind {
            ProposalKind::Hopset => Some(shortest_paths(g, u)?),
            ProposalKind::Shortcut => None,
        };
        let reach: Vec<NodeId> = match &sssp {
            Some(s) => {
                let mut r: Vec<NodeId> = s.reached().map(|(v, _)| v).filter(|&v| v != u).collect();
                r.sort_unstable();
                r
            }
            None => {
                let d = bfs(g, u, None);
                (0..n).map(NodeId).filter(|&v| v != u && d[v.index()] != u32::MAX).collect()
            }
        };
        if reach.is_empty() {
            misses += 1;
            continue;
        }
        let v = reach[rng.gen_range(0..reach.len())];
        if !seen.insert((u, v)) {
            misses += 1;
            continue;
        }
        let w = match &sssp {
            Some(s) => s.weight(v).expect("reached"),
            None => ScaledRational::integer(1),
        };
        h.edges.push(Edge::new(u, v, w));
    }
    Ok(h)
}

/// Source-to-target edges for the first `budget` critical paths.
pub fn direct_pairs(target: AttackTarget<'_>, budget: u64) -> Result<EdgeSetProposal> {
    let mut h = target.empty();
    for p in target.paths.iter().take(budget as usize) {
        let j = p.nodes.len() - 1;
        h.edges.push(Edge::new(p.source(), p.target(), target.chord_weight(p, 0, j)?));
    }
    Ok(h)
}

/// `Σ |π|²`, the size of the greedy candidate sweep.
pub fn greedy_work(paths: &[CriticalPath]) -> u64 {
    paths.iter().map(|p| (p.nodes.len() as u64).pow(2)).sum()
}

/// Repeatedly adds the chord with the largest drop in `Σ hopdist`, ties
/// broken by smallest `(tail, head)`. Stops early once no chord helps.
pub fn greedy(target: AttackTarget<'_>, budget: u64) -> Result<EdgeSetProposal> {
    let work = greedy_work(target.paths);
    if work > GREEDY_MAX_WORK {
        return Err(Error::InvalidParams(format!(
            "greedy sweep over {work} path-position pairs exceeds the limit {GREEDY_MAX_WORK}"
        )));
    }
    let paths = target.paths;
    let mut h = target.empty();
    if budget == 0 || paths.is_empty() {
        return Ok(h);
    }

    // candidate -> occurrences (path, i, j)
    let mut occ: HashMap<(NodeId, NodeId), Vec<(u32, u32, u32)>> = HashMap::new();
    let mut by_path: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); paths.len()];
    for (p, path) in paths.iter().enumerate() {
        for i in 0..path.nodes.len() {
            for j in i + 2..path.nodes.len() {
                let key = (path.nodes[i], path.nodes[j]);
                occ.entry(key).or_default().push((p as u32, i as u32, j as u32));
                by_path[p].push(key);
            }
        }
    }
    let mut chords: Vec<Vec<(u32, u32)>> = vec![Vec::new(); paths.len()];
    let mut fwd: Vec<Vec<u32>> = paths.iter().map(|p| forward_hops(p.nodes.len(), &[])).collect();
    let mut bwd: Vec<Vec<u32>> = paths.iter().map(|p| backward_hops(p.nodes.len(), &[])).collect();
    let drop_of = |fwd: &[Vec<u32>], bwd: &[Vec<u32>], list: &[(u32, u32, u32)]| -> u64 {
        list.iter()
            .map(|&(p, i, j)| {
                let (f, b) = (&fwd[p as usize], &bwd[p as usize]);
                let cur = b[0];
                cur.saturating_sub(f[i as usize] + 1 + b[j as usize]) as u64
            })
            .sum()
    };
    let mut drops: HashMap<(NodeId, NodeId), u64> =
        occ.par_iter().map(|(k, list)| (*k, drop_of(&fwd, &bwd, list))).collect();
    let mut ranked: BTreeSet<(std::cmp::Reverse<u64>, NodeId, NodeId)> =
        drops.iter().map(|(&(u, v), &d)| (std::cmp::Reverse(d), u, v)).collect();

    while (h.edges.len() as u64) < budget {
        let Some(&(std::cmp::Reverse(best), u, v)) = ranked.iter().next() else { break };
        if best == 0 {
            break;
        }
        let list = &occ[&(u, v)];
        let (p0, i0, j0) = list[0];
        h.edges.push(Edge::new(u, v, target.chord_weight(&paths[p0 as usize], i0 as usize, j0 as usize)?));
        ranked.remove(&(std::cmp::Reverse(best), u, v));
        drops.remove(&(u, v));
        let mut touched: Vec<u32> = list.iter().map(|&(p, _, _)| p).collect();
        touched.sort_unstable();
        touched.dedup();
        for &(p, i, j) in list {
            chords[p as usize].push((i, j));
        }
        for &p in &touched {
            let len = paths[p as usize].nodes.len();
            fwd[p as usize] = forward_hops(len, &chords[p as usize]);
            bwd[p as usize] = backward_hops(len, &chords[p as usize]);
        }
        let mut keys: Vec<(NodeId, NodeId)> =
            touched.iter().flat_map(|&p| by_path[p as usize].iter().copied()).collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            let Some(old) = drops.get(&key).copied() else { continue };
            let new = drop_of(&fwd, &bwd, &occ[&key]);
            if new != old {
                ranked.remove(&(std::cmp::Reverse(old), key.0, key.1));
                ranked.insert((std::cmp::Reverse(new), key.0, key.1));
                drops.insert(key, new);
            }
        }
    }
    Ok(h)
}
