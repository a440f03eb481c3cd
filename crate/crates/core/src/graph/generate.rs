//! Random layered graphs for tests and benchmarks.

use rand::Rng;

use super::{Edge, GraphMode, LayeredGraph, NodeId, NodeLabel};
use crate::error::Result;
use crate::scaled::ScaledRational;

/// `layers` layers of 1..=`max_width` nodes each. Every pair of nodes in
/// adjacent layers gets an edge with probability `p_edge`, with an integer
/// weight in `1..=max_weight`.
pub fn random_layered<R: Rng>(
    rng: &mut R,
    layers: usize,
    max_width: usize,
    p_edge: f64,
    max_weight: i64,
    mode: GraphMode,
) -> Result<LayeredGraph> {
    let sizes: Vec<u32> = (0..layers).map(|_| rng.gen_range(1..=max_width as u32)).collect();
    let mut starts = vec![0u32];
    for s in &sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let labels = sizes
        .iter()
        .flat_map(|&s| (1..=s as i64).map(|j| NodeLabel([j, 0])))
        .collect();
    let mut edges = Vec::new();
    for i in 0..layers.saturating_sub(1) {
        for a in starts[i]..starts[i + 1] {
            for b in starts[i + 1]..starts[i + 2] {
                if rng.gen_bool(p_edge) {
                    let w = ScaledRational::integer(rng.gen_range(1..=max_weight));
                    edges.push(Edge::new(NodeId(a), NodeId(b), w));
                }
            }
        }
    }
    LayeredGraph::from_parts(mode, 0, 0, &sizes, labels, edges)
}
