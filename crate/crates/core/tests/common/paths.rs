//! Exhaustive minimum-weight path enumeration, used as a test oracle.

use std::collections::BTreeSet;

use hopcut_core::{GraphMode, LayeredGraph, NodeId};

/// All minimum-weight simple paths from `s` to `t`, by depth-first search
/// that abandons partial paths heavier than the best complete one.
pub fn min_paths(g: &LayeredGraph, s: NodeId, t: NodeId) -> (Option<i128>, BTreeSet<Vec<u32>>) {
    let mut adj: Vec<Vec<(u32, i128)>> = vec![Vec::new(); g.node_count()];
    for e in g.edges() {
        adj[e.tail.index()].push((e.head.0, e.weight.num));
        if g.mode() == GraphMode::Undirected {
            adj[e.head.index()].push((e.tail.0, e.weight.num));
        }
    }
    let mut best: Option<i128> = None;
    let mut found = BTreeSet::new();
    let mut on_path = vec![false; g.node_count()];
    let mut path = vec![s.0];
    on_path[s.index()] = true;
    fn go(
        v: u32,
        w: i128,
        t: u32,
        adj: &[Vec<(u32, i128)>],
        on_path: &mut [bool],
        path: &mut Vec<u32>,
        best: &mut Option<i128>,
        found: &mut BTreeSet<Vec<u32>>,
    ) {
        if best.is_some_and(|b| w > b) {
            return;
        }
        if v == t {
            if best.map_or(true, |b| w < b) {
                *best = Some(w);
                found.clear();
            }
            found.insert(path.clone());
            return;
        }
        for &(u, x) in &adj[v as usize] {
            if !on_path[u as usize] {
                on_path[u as usize] = true;
                path.push(u);
                go(u, w + x, t, adj, on_path, path, best, found);
                path.pop();
                on_path[u as usize] = false;
            }
        }
    }
    go(s.0, 0, t.0, &adj, &mut on_path, &mut path, &mut best, &mut found);
    (best, found)
}
