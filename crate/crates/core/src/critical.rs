//! Critical path systems shared by the hopset and shortcut instances.
//!
//! Every critical path visits consecutive layers, one node per layer, and is
//! the unique shortest (or unique) path between its endpoints. Under that
//! assumption an added edge can shorten a path's hop count only if both of its
//! endpoints lie on the path in order, so hop distances reduce to a DP over
//! chords of the path.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, LayeredGraph, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalPath {
    /// Index of the start node in the start set.
    pub start: u32,
    /// Index of the direction vector.
    pub direction: u32,
    pub nodes: Vec<NodeId>,
}

impl CriticalPath {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("critical paths are non-empty")
    }

    pub fn hops(&self) -> u32 {
        self.nodes.len() as u32 - 1
    }
}

/// `(path index, position)` for every node on some critical path.
#[derive(Clone, Debug)]
pub struct PathIndex {
    first_layer: Vec<u32>,
    by_node: HashMap<NodeId, Vec<(u32, u32)>>,
}

impl PathIndex {
    pub fn new(g: &LayeredGraph, paths: &[CriticalPath]) -> Self {
        let mut by_node: HashMap<NodeId, Vec<(u32, u32)>> = HashMap::new();
        let mut first_layer = Vec::with_capacity(paths.len());
        for (p, path) in paths.iter().enumerate() {
            first_layer.push(g.layer_of(path.source()) as u32);
            for (i, &v) in path.nodes.iter().enumerate() {
                by_node.entry(v).or_default().push((p as u32, i as u32));
            }
        }
        Self { first_layer, by_node }
    }

    pub fn occurrences(&self, v: NodeId) -> &[(u32, u32)] {
        self.by_node.get(&v).map_or(&[], |o| o.as_slice())
    }

    /// Positions `(path, i, j)` with `i < j` such that `path[i] = u` and
    /// `path[j] = v`.
    pub fn chord_positions<'a>(
        &'a self,
        paths: &'a [CriticalPath],
        u: NodeId,
        v: NodeId,
    ) -> impl Iterator<Item = (u32, u32, u32)> + 'a {
        let hv = self.by_node.get(&v);
        self.occurrences(u).iter().filter_map(move |&(p, i)| {
            hv?;
            let path = &paths[p as usize];
            path.nodes[i as usize + 1..]
                .iter()
                .position(|&x| x == v)
                .map(|off| (p, i, i + 1 + off as u32))
        })
    }

    pub fn first_layer(&self, p: usize) -> u32 {
        self.first_layer[p]
    }
}

/// `|a ∩ b|` for two layer-aligned critical paths.
pub fn intersection(g: &LayeredGraph, a: &CriticalPath, b: &CriticalPath) -> usize {
    let (la, lb) = (g.layer_of(a.source()), g.layer_of(b.source()));
    let lo = la.max(lb);
    let hi = (la + a.nodes.len()).min(lb + b.nodes.len());
    (lo..hi)
        .filter(|&layer| a.nodes[layer - la] == b.nodes[layer - lb])
        .count()
}

/// Number of critical paths containing both `u` and `v`.
pub fn paths_through_pair(index: &PathIndex, paths: &[CriticalPath], u: NodeId, v: NodeId) -> usize {
    let mut hits: Vec<u32> = index
        .chord_positions(paths, u, v)
        .chain(index.chord_positions(paths, v, u))
        .map(|(p, _, _)| p)
        .collect();
    hits.sort_unstable();
    hits.dedup();
    hits.len()
}

/// Hop distance along a path of `len` nodes with the given chords
/// `(i, j)`, `i < j`.
pub fn chord_hopdist(len: usize, chords: &[(u32, u32)]) -> u32 {
    forward_hops(len, chords)[len - 1]
}

/// `f[j]` = hops from position 0 to position `j`.
pub fn forward_hops(len: usize, chords: &[(u32, u32)]) -> Vec<u32> {
    let mut into: Vec<Vec<u32>> = vec![Vec::new(); len];
    for &(i, j) in chords {
        into[j as usize].push(i);
    }
    let mut f = vec![0u32; len];
    for j in 1..len {
        let mut best = f[j - 1] + 1;
        for &i in &into[j] {
            best = best.min(f[i as usize] + 1);
        }
        f[j] = best;
    }
    f
}

/// `b[i]` = hops from position `i` to the last position.
pub fn backward_hops(len: usize, chords: &[(u32, u32)]) -> Vec<u32> {
    let mut from: Vec<Vec<u32>> = vec![Vec::new(); len];
    for &(i, j) in chords {
        from[i as usize].push(j);
    }
    let mut b = vec![0u32; len];
    for i in (0..len - 1).rev() {
        let mut best = b[i + 1] + 1;
        for &j in &from[i] {
            best = best.min(b[j as usize] + 1);
        }
        b[i] = best;
    }
    b
}

/// Per-path hop distances in `G ∪ H` via the chord DP.
pub fn chord_hopdists(index: &PathIndex, paths: &[CriticalPath], extra: &[Edge]) -> Vec<u32> {
    let mut chords: Vec<Vec<(u32, u32)>> = vec![Vec::new(); paths.len()];
    for e in extra {
        for (p, i, j) in index.chord_positions(paths, e.tail, e.head) {
            chords[p as usize].push((i, j));
        }
    }
    paths
        .par_iter()
        .zip(chords.par_iter())
        .map(|(path, ch)| chord_hopdist(path.nodes.len(), ch))
        .collect()
}

/// Maximum, mean and sum of per-pair hop distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopProfile {
    pub pairs: usize,
    pub max: u32,
    pub mean: f64,
    pub phi: u64,
}

impl HopProfile {
    pub fn from_hops(hops: &[u32]) -> Self {
        let phi: u64 = hops.iter().map(|&h| h as u64).sum();
        Self {
            pairs: hops.len(),
            max: hops.iter().copied().max().unwrap_or(0),
            mean: if hops.is_empty() { 0.0 } else { phi as f64 / hops.len() as f64 },
            phi,
        }
    }
}

/// The pigeonhole floor `(ℓ - 2) / 2` on the maximum hop distance.
pub fn potential_floor(path_nodes: usize) -> f64 {
    (path_nodes as f64 - 2.0) / 2.0
}

/// Number of critical paths through every ordered node pair `(u, v)` that
/// co-occurs on some path, keyed by `(u, v)` with `u` before `v`.
pub fn pair_path_counts(paths: &[CriticalPath]) -> HashMap<(NodeId, NodeId), (u32, u32)> {
    let mut counts: HashMap<(NodeId, NodeId), (u32, u32)> = HashMap::new();
    for path in paths {
        for i in 0..path.nodes.len() {
            for j in i + 1..path.nodes.len() {
                let slot = counts.entry((path.nodes[i], path.nodes[j])).or_insert((0, (j - i) as u32));
                slot.0 += 1;
            }
        }
    }
    counts
}
