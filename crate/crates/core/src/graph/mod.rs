//! Layered graphs with exact weights.
//!
//! Node ids are contiguous per layer, so in the forward modes (`Directed`,
//! `Dag`) increasing id order is a topological order.

pub mod generate;
pub mod io;
pub mod paths;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaled::ScaledRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Label coordinates beyond the layer index: `(j, 0)` for the hopset
/// construction, `(j, k)` for the 3-D shortcut grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeLabel(pub [i64; 2]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// Every edge goes from layer `i` to layer `i + 1`.
    Directed,
    /// Every edge goes from a layer to a strictly later one.
    Dag,
    /// Edges are traversable both ways.
    Undirected,
}

impl GraphMode {
    pub fn is_forward(self) -> bool {
        matches!(self, GraphMode::Directed | GraphMode::Dag)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GraphMode::Directed => "directed",
            GraphMode::Dag => "dag",
            GraphMode::Undirected => "undirected",
        }
    }
}

impl std::str::FromStr for GraphMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directed" => Ok(GraphMode::Directed),
            "dag" => Ok(GraphMode::Dag),
            "undirected" => Ok(GraphMode::Undirected),
            other => Err(Error::Format(format!("unknown graph mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: ScaledRational,
}

impl Edge {
    pub fn new(tail: NodeId, head: NodeId, weight: ScaledRational) -> Self {
        Self { tail, head, weight }
    }
}

#[derive(Clone, Debug)]
pub struct LayeredGraph {
    mode: GraphMode,
    scale_sigma: u32,
    seed: u64,
    layer_start: Vec<u32>,
    node_layer: Vec<u32>,
    labels: Vec<NodeLabel>,
    edges: Vec<Edge>,
    out_start: Vec<u32>,
    out_edges: Vec<u32>,
    in_start: Vec<u32>,
    in_edges: Vec<u32>,
}

impl PartialEq for LayeredGraph {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.scale_sigma == other.scale_sigma
            && self.seed == other.seed
            && self.layer_start == other.layer_start
            && self.labels == other.labels
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.tail == b.tail && a.head == b.head && a.weight.num == b.weight.num)
    }
}

impl LayeredGraph {
    /// Assembles a graph. `layer_sizes[i]` nodes are given layer `i`, with ids
    /// assigned in order; `labels` lists every node's label in id order. Edge
    /// weights are rescaled to `scale_sigma`.
    pub fn from_parts(
        mode: GraphMode,
        scale_sigma: u32,
        seed: u64,
        layer_sizes: &[u32],
        labels: Vec<NodeLabel>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let n: usize = layer_sizes.iter().map(|&s| s as usize).sum();
        if labels.len() != n {
            return Err(Error::InvalidParams(format!("{} labels for {n} nodes", labels.len())));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParams(format!("{n} nodes exceed the u32 id space")));
        }
        let mut layer_start = Vec::with_capacity(layer_sizes.len() + 1);
        let mut node_layer = Vec::with_capacity(n);
        let mut acc = 0u32;
        for (i, &s) in layer_sizes.iter().enumerate() {
            layer_start.push(acc);
            node_layer.extend(std::iter::repeat(i as u32).take(s as usize));
            acc += s;
        }
        layer_start.push(acc);

        let mut seen = HashMap::with_capacity(n);
        for (id, label) in labels.iter().enumerate() {
            if let Some(prev) = seen.insert((node_layer[id], *label), id) {
                return Err(Error::InvalidParams(format!(
                    "nodes {prev} and {id} share layer {} and label {:?}",
                    node_layer[id], label.0
                )));
            }
        }

        let mut scaled = Vec::with_capacity(edges.len());
        for e in edges {
            if e.tail.index() >= n || e.head.index() >= n {
                return Err(Error::InvalidParams(format!("edge {}->{} references a missing node", e.tail, e.head)));
            }
            if e.weight.is_negative() {
                return Err(Error::InvalidParams(format!("edge {}->{} has negative weight", e.tail, e.head)));
            }
            let (lt, lh) = (node_layer[e.tail.index()], node_layer[e.head.index()]);
            let ok = match mode {
                GraphMode::Directed => lh == lt + 1,
                GraphMode::Dag => lh > lt,
                GraphMode::Undirected => e.tail != e.head,
            };
            if !ok {
                return Err(Error::InvalidParams(format!(
                    "edge {}->{} (layers {lt}->{lh}) not allowed in {} mode",
                    e.tail,
                    e.head,
                    mode.as_str()
                )));
            }
            scaled.push(Edge { weight: e.weight.rescale(scale_sigma)?, ..e });
        }

        let (out_start, out_edges) = csr(n, scaled.iter().map(|e| e.tail.index()));
        let (in_start, in_edges) = csr(n, scaled.iter().map(|e| e.head.index()));
        Ok(Self {
            mode,
            scale_sigma,
            seed,
            layer_start,
            node_layer,
            labels,
            edges: scaled,
            out_start,
            out_edges,
            in_start,
            in_edges,
        })
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn scale_sigma(&self) -> u32 {
        self.scale_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layer_start.len() - 1
    }

    pub fn layer_sizes(&self) -> Vec<u32> {
        self.layer_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn layer_nodes(&self, layer: usize) -> impl Iterator<Item = NodeId> {
        (self.layer_start[layer]..self.layer_start[layer + 1]).map(NodeId)
    }

    pub fn layer_range(&self, layer: usize) -> Range<usize> {
        self.layer_start[layer] as usize..self.layer_start[layer + 1] as usize
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn layer_of(&self, v: NodeId) -> usize {
        self.node_layer[v.index()] as usize
    }

    pub fn label(&self, v: NodeId) -> NodeLabel {
        self.labels[v.index()]
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let r = self.out_start[v.index()] as usize..self.out_start[v.index() + 1] as usize;
        self.out_edges[r].iter().map(move |&e| &self.edges[e as usize])
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let r = self.in_start[v.index()] as usize..self.in_start[v.index() + 1] as usize;
        self.in_edges[r].iter().map(move |&e| &self.edges[e as usize])
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        (self.out_start[v.index() + 1] - self.out_start[v.index()]) as usize
    }

    /// Traversable `(neighbor, weight)` pairs: out-edges in forward modes,
    /// both directions in undirected mode.
    pub fn for_each_neighbor(&self, v: NodeId, mut f: impl FnMut(NodeId, ScaledRational)) {
        for e in self.out_edges(v) {
            f(e.head, e.weight);
        }
        if self.mode == GraphMode::Undirected {
            for e in self.in_edges(v) {
                f(e.tail, e.weight);
            }
        }
    }

    /// Minimum weight over parallel `tail -> head` edges.
    pub fn edge_weight(&self, tail: NodeId, head: NodeId) -> Option<ScaledRational> {
        let mut best: Option<ScaledRational> = None;
        self.for_each_neighbor(tail, |h, w| {
            if h == head && best.map_or(true, |b| w < b) {
                best = Some(w);
            }
        });
        best
    }

    pub fn find(&self, layer: usize, label: NodeLabel) -> Option<NodeId> {
        self.layer_nodes(layer).find(|&v| self.label(v) == label)
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> Result<ScaledRational> {
        self.edges
            .iter()
            .try_fold(ScaledRational::zero(self.scale_sigma), |acc, e| acc.checked_add(e.weight))
    }

    /// Copy of this graph with extra edges appended. A directed graph becomes
    /// a DAG when any extra edge skips layers.
    pub fn with_extra_edges(&self, extra: &[Edge]) -> Result<LayeredGraph> {
        let mode = match self.mode {
            GraphMode::Directed
                if extra.iter().any(|e| self.layer_of(e.head) != self.layer_of(e.tail) + 1) =>
            {
                GraphMode::Dag
            }
            m => m,
        };
        let mut edges = self.edges.clone();
        edges.extend_from_slice(extra);
        LayeredGraph::from_parts(mode, self.scale_sigma, self.seed, &self.layer_sizes(), self.labels.clone(), edges)
    }

    /// Same graph with a different mode flag (validated).
    pub fn with_mode(&self, mode: GraphMode) -> Result<LayeredGraph> {
        LayeredGraph::from_parts(mode, self.scale_sigma, self.seed, &self.layer_sizes(), self.labels.clone(), self.edges.clone())
    }

    /// Replaces edge weights; `f` maps each edge to its new weight.
    pub fn map_weights(&self, mut f: impl FnMut(&Edge) -> Result<ScaledRational>) -> Result<LayeredGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| Ok(Edge { weight: f(e)?, ..*e }))
            .collect::<Result<Vec<_>>>()?;
        LayeredGraph::from_parts(self.mode, self.scale_sigma, self.seed, &self.layer_sizes(), self.labels.clone(), edges)
    }
}

fn csr(n: usize, keys: impl Iterator<Item = usize> + Clone) -> (Vec<u32>, Vec<u32>) {
    let mut start = vec![0u32; n + 1];
    for k in keys.clone() {
        start[k + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut out = vec![0u32; start[n] as usize];
    for (e, k) in keys.enumerate() {
        out[fill[k] as usize] = e as u32;
        fill[k] += 1;
    }
    (start, out)
}
