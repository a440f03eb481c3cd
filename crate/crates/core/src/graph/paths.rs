//! Shortest paths, path multiplicities and hop distances.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use super::{GraphMode, LayeredGraph, NodeId};
use crate::error::{Error, Result};
use crate::scaled::{PathCount, ScaledRational};

/// Per-node result of a single-source shortest-path run. `weight` is a
/// numerator over the graph's scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SsspLabel {
    pub weight: i128,
    pub count: PathCount,
    pub hops: u32,
}

#[derive(Clone, Debug)]
pub struct Sssp {
    pub source: NodeId,
    pub sigma: u32,
    labels: HashMap<NodeId, SsspLabel>,
}

impl Sssp {
    pub fn get(&self, v: NodeId) -> Option<SsspLabel> {
        self.labels.get(&v).copied()
    }

    pub fn weight(&self, v: NodeId) -> Option<ScaledRational> {
        self.get(v).map(|l| ScaledRational::new(l.weight, self.sigma))
    }

    pub fn reached(&self) -> impl Iterator<Item = (NodeId, SsspLabel)> + '_ {
        self.labels.iter().map(|(&v, &l)| (v, l))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn add_weight(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b)
        .ok_or_else(|| Error::Overflow(format!("path weight {a} + {b}")))
}

/// Forward DP in id order. Requires a forward mode, where id order is a
/// topological order.
pub fn layered_sssp(g: &LayeredGraph, s: NodeId) -> Result<Sssp> {
    if !g.mode().is_forward() {
        return Err(Error::InvalidParams("layered_sssp needs a directed or dag graph".into()));
    }
    let mut pending: BTreeMap<u32, SsspLabel> = BTreeMap::new();
    pending.insert(s.0, SsspLabel { weight: 0, count: PathCount::ONE, hops: 0 });
    let mut done = HashMap::new();
    while let Some((v, lab)) = pending.pop_first() {
        for e in g.out_edges(NodeId(v)) {
            let cand = SsspLabel {
                weight: add_weight(lab.weight, e.weight.num)?,
                count: lab.count,
                hops: lab.hops + 1,
            };
            pending
                .entry(e.head.0)
                .and_modify(|cur| merge(cur, cand))
                .or_insert(cand);
        }
        done.insert(NodeId(v), lab);
    }
    Ok(Sssp { source: s, sigma: g.scale_sigma(), labels: done })
}

fn merge(cur: &mut SsspLabel, cand: SsspLabel) {
    if cand.weight < cur.weight {
        *cur = cand;
    } else if cand.weight == cur.weight {
        cur.count = cur.count + cand.count;
        cur.hops = cur.hops.min(cand.hops);
    }
}

/// Shortest paths in any mode. Forward modes use the layered DP; undirected
/// graphs use Dijkstra on `(weight, hops)` followed by a counting pass over
/// the tight edges in distance order.
pub fn shortest_paths(g: &LayeredGraph, s: NodeId) -> Result<Sssp> {
    if g.mode().is_forward() {
        return layered_sssp(g, s);
    }
    let mut best: HashMap<NodeId, (i128, u32)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(s, (0, 0));
    heap.push(Reverse((0i128, 0u32, s)));
    let mut order = Vec::new();
    let mut settled = std::collections::HashSet::new();
    while let Some(Reverse((d, h, v))) = heap.pop() {
        if !settled.insert(v) {
            continue;
        }
        order.push((d, v));
        let mut err = None;
        g.for_each_neighbor(v, |u, w| {
            if err.is_some() || settled.contains(&u) {
                return;
            }
            match add_weight(d, w.num) {
                Ok(nd) => {
                    let key = (nd, h + 1);
                    if best.get(&u).map_or(true, |&b| key < b) {
                        best.insert(u, key);
                        heap.push(Reverse((nd, h + 1, u)));
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }

    let mut labels: HashMap<NodeId, SsspLabel> = HashMap::with_capacity(order.len());
    for &(d, v) in &order {
        let (_, hops) = best[&v];
        if v == s {
            labels.insert(v, SsspLabel { weight: 0, count: PathCount::ONE, hops: 0 });
            continue;
        }
        let mut count = PathCount::ZERO;
        let mut zero_tight = false;
        g.for_each_neighbor(v, |u, w| {
            if let Some(&(du, _)) = best.get(&u) {
                if du.checked_add(w.num) == Some(d) {
                    if w.num == 0 {
                        zero_tight = true;
                    } else if let Some(l) = labels.get(&u) {
                        count = count + l.count;
                    }
                }
            }
        });
        if zero_tight {
            return Err(Error::Invariant(format!(
                "zero-weight tight edge at node {v}; shortest-path counts are unbounded"
            )));
        }
        labels.insert(v, SsspLabel { weight: d, count, hops });
    }
    Ok(Sssp { source: s, sigma: g.scale_sigma(), labels })
}

/// Least number of edges among all minimum-weight `s -> t` paths.
pub fn hopdist(g: &LayeredGraph, s: NodeId, t: NodeId) -> Result<u32> {
    shortest_paths(g, s)?
        .get(t)
        .map(|l| l.hops)
        .ok_or(Error::NoPath { from: s.0, to: t.0 })
}

/// Number of distinct directed `s -> t` paths, ignoring weights.
pub fn count_paths(g: &LayeredGraph, s: NodeId, t: NodeId) -> Result<PathCount> {
    if !g.mode().is_forward() {
        return Err(Error::InvalidParams("count_paths needs a directed or dag graph".into()));
    }
    if t < s {
        return Ok(PathCount::ZERO);
    }
    let mut pending: BTreeMap<u32, PathCount> = BTreeMap::new();
    pending.insert(s.0, PathCount::ONE);
    while let Some((v, c)) = pending.pop_first() {
        if v == t.0 {
            return Ok(c);
        }
        for e in g.out_edges(NodeId(v)) {
            if e.head <= t {
                let slot = pending.entry(e.head.0).or_insert(PathCount::ZERO);
                *slot = *slot + c;
            }
        }
    }
    Ok(PathCount::ZERO)
}

/// Number of directed paths from `s` to every node reachable from it.
pub fn count_paths_from(g: &LayeredGraph, s: NodeId) -> Result<HashMap<NodeId, PathCount>> {
    if !g.mode().is_forward() {
        return Err(Error::InvalidParams("count_paths_from needs a directed or dag graph".into()));
    }
    let mut pending: BTreeMap<u32, PathCount> = BTreeMap::new();
    pending.insert(s.0, PathCount::ONE);
    let mut done = HashMap::new();
    while let Some((v, c)) = pending.pop_first() {
        for e in g.out_edges(NodeId(v)) {
            let slot = pending.entry(e.head.0).or_insert(PathCount::ZERO);
            *slot = *slot + c;
        }
        done.insert(NodeId(v), c);
    }
    Ok(done)
}

/// Unweighted BFS distances; `u32::MAX` marks unreachable nodes. Stops
/// expanding past `max_depth`.
pub fn bfs(g: &LayeredGraph, s: NodeId, max_depth: Option<u32>) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    dist[s.index()] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v.index()];
        if max_depth.is_some_and(|m| d >= m) {
            continue;
        }
        g.for_each_neighbor(v, |u, _| {
            if dist[u.index()] == u32::MAX {
                dist[u.index()] = d + 1;
                queue.push_back(u);
            }
        });
    }
    dist
}

/// Unweighted BFS that also counts shortest paths (in hops) to every node
/// within `max_depth`.
pub fn bfs_counts(g: &LayeredGraph, s: NodeId, max_depth: Option<u32>) -> (Vec<u32>, Vec<PathCount>) {
    let mut dist = vec![u32::MAX; g.node_count()];
    let mut count = vec![PathCount::ZERO; g.node_count()];
    dist[s.index()] = 0;
    count[s.index()] = PathCount::ONE;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let (d, c) = (dist[v.index()], count[v.index()]);
        if max_depth.is_some_and(|m| d >= m) {
            continue;
        }
        g.for_each_neighbor(v, |u, _| {
            let i = u.index();
            if dist[i] == u32::MAX {
                dist[i] = d + 1;
                queue.push_back(u);
            }
            if dist[i] == d + 1 {
                count[i] = count[i] + c;
            }
        });
    }
    (dist, count)
}

/// The `+W` reduction: every weight grows by the total weight `W` and edges
/// become bidirectional. Returns the new graph and `W`.
pub fn undirectify(g: &LayeredGraph) -> Result<(LayeredGraph, ScaledRational)> {
    if g.mode() != GraphMode::Directed {
        return Err(Error::InvalidParams("undirectify needs a directed layered graph".into()));
    }
    let total = g.total_weight()?;
    let shifted = g.map_weights(|e| e.weight.checked_add(total))?;
    Ok((shifted.with_mode(GraphMode::Undirected)?, total))
}
