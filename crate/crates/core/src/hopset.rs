//! The layered exact-hopset lower-bound instance.
//!
//! Layer `i` holds nodes `(i, j)` for `j = 1..=m`, placed at height
//! `j + ε_1 + ... + ε_i`. An edge from layer `i` to `i + 1` realizes the
//! vector `(1, x + ε_{i+1})` for an integer `x ∈ [0, X]` and weighs the
//! square of its vertical displacement. Critical paths start in the lower
//! half of the first layer and greedily follow a direction `d = a + b/q`.
//!
//! `ε_i = k_i / 2^32`, so heights are exact integers over `2^32` and weights
//! exact integers over `2^64`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::{
    chord_hopdists, intersection, pair_path_counts, paths_through_pair, CriticalPath, HopProfile, PathIndex,
};
use crate::error::{Error, Result};
use crate::graph::paths::{layered_sssp, shortest_paths, undirectify};
use crate::graph::{Edge, GraphMode, LayeredGraph, NodeId, NodeLabel};
use crate::proposal::{ensure_valid, EdgeSetProposal};
use crate::scaled::ScaledRational;
use crate::stats::FrequencyCheck;

pub const EPS_BITS: u32 = 32;
pub const WEIGHT_SIGMA: u32 = 2 * EPS_BITS;
pub const DESK_C_LAYERS: f64 = 1.0;
pub const DESK_C_Q: f64 = 2.0;
pub const PAPER_C_LAYERS: f64 = 1.0 / 1024.0;
pub const PAPER_C_Q: f64 = 1.0 / 1024.0;
pub const DEFAULT_MAX_RESAMPLES: u32 = 32;
/// Largest example list kept in reports.
const MAX_EXAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constants {
    #[default]
    Desk,
    Paper,
}

impl std::str::FromStr for Constants {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Constants::Desk),
            "paper" => Ok(Constants::Paper),
            other => Err(Error::InvalidParams(format!("unknown constants {other:?}, expected desk or paper"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsetParams {
    pub n: u64,
    pub p: u64,
    pub constants: Constants,
    pub c_layers: Option<f64>,
    pub c_q: Option<f64>,
    pub layers: Option<u64>,
    pub q: Option<u64>,
    pub edge_span: Option<u64>,
    pub seed: u64,
    pub max_resamples: u32,
}

impl HopsetParams {
    pub fn new(n: u64, p: u64, seed: u64) -> Self {
        Self {
            n,
            p,
            constants: Constants::Desk,
            c_layers: None,
            c_q: None,
            layers: None,
            q: None,
            edge_span: None,
            seed,
            max_resamples: DEFAULT_MAX_RESAMPLES,
        }
    }
}

/// Resolved integer dimensions, with every rounding written down.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsetDims {
    pub n: u64,
    pub p: u64,
    pub ln_n: f64,
    pub c_layers: f64,
    pub c_q: f64,
    pub layers_formula: f64,
    pub layers: u64,
    pub width: u64,
    pub edge_span_formula: f64,
    pub edge_span: u64,
    pub q_formula: f64,
    pub q: u64,
    pub directions: u64,
    pub start_count: u64,
    pub path_count: u64,
    /// `⌊|Π| / 2⌋`: the largest budget covered by the pigeonhole floor.
    pub effective_p: u64,
    /// Whether `p ∈ [n, n²]`.
    pub regime_ok: bool,
    pub roundings: Vec<String>,
}

pub fn resolve(params: &HopsetParams) -> Result<HopsetDims> {
    let n = params.n;
    if n < 8 {
        return Err(Error::InvalidParams(format!("n = {n} is too small")));
    }
    if params.p == 0 {
        return Err(Error::InvalidParams("p must be positive".into()));
    }
    let ln_n = (n as f64).ln();
    let (dl, dq) = match params.constants {
        Constants::Desk => (DESK_C_LAYERS, DESK_C_Q),
        Constants::Paper => (PAPER_C_LAYERS, PAPER_C_Q),
    };
    let c_layers = params.c_layers.unwrap_or(dl);
    let c_q = params.c_q.unwrap_or(dq);
    let mut roundings = Vec::new();

    let layers_formula = c_layers * n as f64 / ((params.p as f64).sqrt() * ln_n.sqrt());
    let layers = match params.layers {
        Some(l) => {
            if l == 0 || n % l != 0 {
                return Err(Error::InvalidParams(format!("layer count {l} does not divide n = {n}")));
            }
            roundings.push(format!("layers overridden to {l} (formula {layers_formula:.4})"));
            l
        }
        None => {
            let cap = layers_formula.floor().max(0.0) as u64;
            let l = (1..=cap.min(n)).rev().find(|d| n % d == 0).unwrap_or(0);
            roundings.push(format!("layers {layers_formula:.4} rounded down to divisor {l} of n"));
            l
        }
    };
    if layers < 2 {
        return Err(Error::InvalidParams(format!(
            "layer count {layers} < 2 (formula gives {layers_formula:.4}, largest divisor of n = {n} not above it is {layers}); pick n with a divisor in [2, {layers_formula:.0}] or override layers"
        )));
    }
    let width = n / layers;

    let edge_span_formula = n as f64 / (4.0 * (layers * layers) as f64);
    let edge_span = match params.edge_span {
        Some(x) => {
            roundings.push(format!("edge span overridden to {x} (formula {edge_span_formula:.4})"));
            x
        }
        None => {
            let x = n / (4 * layers * layers);
            roundings.push(format!("edge span {edge_span_formula:.4} rounded down to {x}"));
            x
        }
    };
    if edge_span < 2 {
        return Err(Error::InvalidParams(format!(
            "edge span X = {edge_span} < 2 leaves the direction range [1, X-1] empty"
        )));
    }

    let q_formula = c_q * layers as f64 / ln_n;
    let q = match params.q {
        Some(q) => {
            roundings.push(format!("q overridden to {q} (formula {q_formula:.4})"));
            q
        }
        None => {
            let q = q_formula.floor().max(0.0) as u64;
            roundings.push(format!("q {q_formula:.4} rounded down to {q}"));
            q
        }
    };
    if q == 0 {
        return Err(Error::InvalidParams(format!("q = 0 (formula gives {q_formula:.4})")));
    }

    let start_count = width / 2;
    if start_count == 0 {
        return Err(Error::InvalidParams("layers are too narrow for a start set".into()));
    }
    // Every node a critical path visits before the last layer must keep its
    // full set of out-edges.
    if start_count + (layers - 1) * edge_span > width {
        return Err(Error::InvalidParams(format!(
            "paths would leave the grid: {start_count} + ({layers} - 1) * {edge_span} > {width}"
        )));
    }
    let span_num = ((edge_span as i128 + 1) << EPS_BITS)
        .checked_mul((edge_span as i128 + 1) << EPS_BITS)
        .and_then(|w| w.checked_mul(layers as i128));
    if span_num.map_or(true, |w| w > (1i128 << 120)) {
        return Err(Error::Overflow(format!(
            "path weights for layers = {layers}, X = {edge_span} exceed the 128-bit budget"
        )));
    }

    let directions = (edge_span - 1) * q + 1;
    let path_count = start_count * directions;
    let p = params.p;
    let regime_ok = p >= n && (p as u128) <= (n as u128) * (n as u128);
    Ok(HopsetDims {
        n,
        p,
        ln_n,
        c_layers,
        c_q,
        layers_formula,
        layers,
        width,
        edge_span_formula,
        edge_span,
        q_formula,
        q,
        directions,
        start_count,
        path_count,
        effective_p: path_count / 2,
        regime_ok,
        roundings,
    })
}

/// A direction `x + y/q`, stored as `[x, y]` with `y < q` except for the top
/// value `[X, 0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u64; 2]", into = "[u64; 2]")]
pub struct Direction {
    pub x: u64,
    pub y: u64,
}

impl From<[u64; 2]> for Direction {
    fn from(a: [u64; 2]) -> Self {
        Self { x: a[0], y: a[1] }
    }
}

impl From<Direction> for [u64; 2] {
    fn from(d: Direction) -> Self {
        [d.x, d.y]
    }
}

impl Direction {
    /// The value times `q`.
    pub fn scaled(self, q: u64) -> u64 {
        self.x * q + self.y
    }

    pub fn value(self, q: u64) -> f64 {
        self.x as f64 + self.y as f64 / q as f64
    }
}

/// `D` in increasing order; duplicates such as `x + q/q = (x+1) + 0/q` appear
/// once.
pub fn direction_set(dims: &HopsetDims) -> Vec<Direction> {
    let mut out = Vec::with_capacity(dims.directions as usize);
    for x in 1..dims.edge_span {
        for y in 0..dims.q {
            out.push(Direction { x, y });
        }
    }
    out.push(Direction { x: dims.edge_span, y: 0 });
    out
}

/// Two edge vectors were equally close to a direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tie {
    pub layer: usize,
    pub direction: Direction,
}

/// The unique `x ∈ [0, X]` minimizing `|x + k/2^32 - d|`, or `None` on a tie.
pub fn choose_step(edge_span: u64, q: u64, k: u64, d: Direction) -> Option<u64> {
    let target = (d.scaled(q) as i128) << EPS_BITS;
    let mut best: Option<(i128, u64)> = None;
    let mut tie = false;
    for x in 0..=edge_span {
        let diff = ((((x as i128) << EPS_BITS) + k as i128) * q as i128 - target).abs();
        match best {
            Some((b, _)) if diff > b => {}
            Some((b, _)) if diff == b => tie = true,
            _ => {
                best = Some((diff, x));
                tie = false;
            }
        }
    }
    if tie {
        None
    } else {
        best.map(|(_, x)| x)
    }
}

/// Greedy path for start height `start_j` and direction `d`, as the height
/// index `j` in every layer.
pub fn generate_critical_path(
    dims: &HopsetDims,
    epsilons: &[u64],
    start_j: u64,
    d: Direction,
) -> std::result::Result<Vec<u64>, Tie> {
    let mut js = Vec::with_capacity(dims.layers as usize);
    js.push(start_j);
    for layer in 1..dims.layers as usize {
        let x = choose_step(dims.edge_span, dims.q, epsilons[layer], d).ok_or(Tie { layer, direction: d })?;
        js.push(js[layer - 1] + x);
    }
    Ok(js)
}

pub fn draw_epsilons(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(1..=u32::MAX as u64)).collect()
}

#[derive(Clone, Debug)]
pub struct HopsetInstance {
    pub params: HopsetParams,
    pub dims: HopsetDims,
    pub graph: LayeredGraph,
    /// Numerators `k_i` of `ε_i = k_i / 2^32`, for `i = 1..=ℓ`.
    pub epsilons: Vec<u64>,
    pub directions: Vec<Direction>,
    pub start_set: Vec<NodeId>,
    pub paths: Vec<CriticalPath>,
    /// Each base node became a path of this many nodes.
    pub expansion: u64,
    /// Added to every edge weight by the undirected reduction.
    pub weight_offset: i128,
    pub seed_used: u64,
    pub resamples: u32,
    pub resample_log: Vec<String>,
}

/// Step table `x[layer][direction]` for one ε draw.
fn step_table(dims: &HopsetDims, eps: &[u64], dirs: &[Direction]) -> std::result::Result<Vec<Vec<u64>>, Tie> {
    let mut table = vec![Vec::new()];
    for layer in 1..dims.layers as usize {
        let row = dirs
            .iter()
            .map(|&d| choose_step(dims.edge_span, dims.q, eps[layer], d).ok_or(Tie { layer, direction: d }))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        table.push(row);
    }
    Ok(table)
}

/// Index pairs of directions whose paths coincide from a common start.
fn coinciding_directions(table: &[Vec<u64>], ndir: usize) -> Option<(usize, usize)> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for d in 0..ndir {
        let seq: Vec<u64> = table[1..].iter().map(|row| row[d]).collect();
        if let Some(&other) = seen.get(&seq) {
            return Some((other, d));
        }
        seen.insert(seq, d);
    }
    None
}

pub fn build_hopset_instance(params: &HopsetParams) -> Result<HopsetInstance> {
    let dims = resolve(params)?;
    let dirs = direction_set(&dims);
    let mut log = Vec::new();
    for attempt in 0..=params.max_resamples {
        let seed = params.seed.wrapping_add(attempt as u64);
        let eps = draw_epsilons(seed, dims.layers as usize);
        let table = match step_table(&dims, &eps, &dirs) {
            Ok(t) => t,
            Err(tie) => {
                let msg = format!("seed {seed}: tie at layer {} for direction {:?}", tie.layer, tie.direction);
                log::warn!("{msg}; resampling");
                log.push(msg);
                continue;
            }
        };
        if let Some((a, b)) = coinciding_directions(&table, dirs.len()) {
            let msg = format!("seed {seed}: directions {:?} and {:?} give identical paths", dirs[a], dirs[b]);
            log::info!("{msg}; resampling");
            log.push(msg);
            continue;
        }
        return assemble(params.clone(), dims, eps, dirs, &table, seed, attempt, log);
    }
    Err(Error::ResampleExhausted {
        attempts: params.max_resamples + 1,
        reason: log.last().cloned().unwrap_or_default(),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    params: HopsetParams,
    dims: HopsetDims,
    eps: Vec<u64>,
    dirs: Vec<Direction>,
    table: &[Vec<u64>],
    seed: u64,
    attempt: u32,
    log: Vec<String>,
) -> Result<HopsetInstance> {
    let (layers, width, span) = (dims.layers as usize, dims.width, dims.edge_span);
    let id = |layer: usize, j: u64| NodeId((layer as u64 * width + j - 1) as u32);
    let labels: Vec<NodeLabel> = (0..layers)
        .flat_map(|_| (1..=width as i64).map(|j| NodeLabel([j, 0])))
        .collect();
    let mut edges = Vec::with_capacity(layers * width as usize * (span as usize + 1));
    for layer in 0..layers - 1 {
        let k = eps[layer + 1] as i128;
        for j in 1..=width {
            for x in 0..=span.min(width - j) {
                let u = ((x as i128) << EPS_BITS) + k;
                let w = ScaledRational::new(u, EPS_BITS).checked_square()?;
                edges.push(Edge::new(id(layer, j), id(layer + 1, j + x), w));
            }
        }
    }
    let graph = LayeredGraph::from_parts(
        GraphMode::Directed,
        WEIGHT_SIGMA,
        seed,
        &vec![width as u32; layers],
        labels,
        edges,
    )?;

    let start_set: Vec<NodeId> = (1..=dims.start_count).map(|j| id(0, j)).collect();
    let mut paths = Vec::with_capacity(dims.path_count as usize);
    for (si, j0) in (1..=dims.start_count).enumerate() {
        for di in 0..dirs.len() {
            let mut j = j0;
            let mut nodes = Vec::with_capacity(layers);
            nodes.push(id(0, j));
            for (layer, row) in table.iter().enumerate().skip(1) {
                if j + span > width {
                    return Err(Error::Invariant(format!("node ({}, {j}) lacks its full edge set", layer - 1)));
                }
                j += row[di];
                nodes.push(id(layer, j));
            }
            paths.push(CriticalPath { start: si as u32, direction: di as u32, nodes });
        }
    }
    Ok(HopsetInstance {
        params,
        dims,
        graph,
        epsilons: eps,
        directions: dirs,
        start_set,
        paths,
        expansion: 1,
        weight_offset: 0,
        seed_used: seed,
        resamples: attempt,
        resample_log: log,
    })
}

impl HopsetInstance {
    pub fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.paths.iter().map(|p| (p.source(), p.target())).collect()
    }

    pub fn index(&self) -> PathIndex {
        PathIndex::new(&self.graph, &self.paths)
    }

    /// Layers of the construction (before expansion).
    pub fn base_layers(&self) -> u64 {
        self.dims.layers
    }

    /// Number of nodes on every critical path.
    pub fn path_len(&self) -> usize {
        self.paths.first().map_or(0, |p| p.nodes.len())
    }

    fn base_layer(&self, v: NodeId) -> usize {
        self.graph.layer_of(v) / self.expansion as usize
    }

    /// Height of `v` as a numerator over `2^32`.
    pub fn height(&self, v: NodeId) -> i128 {
        let t = self.base_layer(v);
        let shift: i128 = self.epsilons[..=t].iter().map(|&k| k as i128).sum();
        ((self.graph.label(v).0[0] as i128) << EPS_BITS) + shift
    }

    /// The weight the construction assigns to an edge, over `2^64`.
    pub fn expected_weight(&self, tail: NodeId, head: NodeId) -> Result<i128> {
        let du = self.height(head) - self.height(tail);
        let sq = ScaledRational::new(du, EPS_BITS).checked_square()?;
        sq.num
            .checked_add(self.weight_offset)
            .ok_or_else(|| Error::Overflow("expected edge weight".into()))
    }

    pub fn expected_path_weight(&self, path: &CriticalPath) -> Result<i128> {
        path.nodes.windows(2).try_fold(0i128, |acc, w| {
            acc.checked_add(self.expected_weight(w[0], w[1])?)
                .ok_or_else(|| Error::Overflow("expected path weight".into()))
        })
    }

    /// The `+W` image: undirected, every weight shifted by the total weight.
    pub fn undirected(&self) -> Result<HopsetInstance> {
        let (graph, total) = undirectify(&self.graph)?;
        Ok(HopsetInstance { graph, weight_offset: total.num, ..self.clone() })
    }

    pub fn hopset_floor(&self) -> f64 {
        crate::critical::potential_floor(self.path_len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFailure {
    pub path: usize,
    pub source: NodeId,
    pub target: NodeId,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
}

fn group_by_source(paths: &[CriticalPath]) -> Vec<(NodeId, Vec<usize>)> {
    let mut groups: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        groups.entry(p.source()).or_default().push(i);
    }
    groups.into_iter().collect()
}

/// Exact check that every critical path is the unique minimum-weight path
/// between its endpoints and that its weight is the geometric one.
pub fn verify_unique_shortest(inst: &HopsetInstance) -> Result<UniqueReport> {
    let groups = group_by_source(&inst.paths);
    let failures: Vec<Vec<PairFailure>> = groups
        .par_iter()
        .map(|(s, idxs)| -> Result<Vec<PairFailure>> {
            let sssp = shortest_paths(&inst.graph, *s)?;
            let mut out = Vec::new();
            for &i in idxs {
                let path = &inst.paths[i];
                let t = path.target();
                let fail = |reason: String| PairFailure { path: i, source: *s, target: t, reason };
                let expected = inst.expected_path_weight(path)?;
                match sssp.get(t) {
                    None => out.push(fail("target unreachable".into())),
                    Some(l) if l.weight != expected => {
                        out.push(fail(format!("min weight {} differs from path weight {expected}", l.weight)))
                    }
                    Some(l) if !l.count.is_unique() => {
                        out.push(fail(format!("{} shortest paths", l.count)))
                    }
                    Some(_) => {}
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let failures: Vec<PairFailure> = failures.into_iter().flatten().collect();
    Ok(UniqueReport { pass: failures.is_empty(), pairs_checked: inst.paths.len(), failures })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapBucket {
    /// `|d1 - d2| * q`.
    pub delta_scaled: u64,
    pub delta: f64,
    pub pairs: u64,
    pub max_intersection: u32,
    pub bound: f64,
    pub violations: u64,
    pub shared_nodes: u64,
    pub splits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapViolation {
    pub a: usize,
    pub b: usize,
    pub intersection: u32,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub pass: bool,
    pub exhaustive: bool,
    pub pairs_checked: u64,
    pub violations: u64,
    pub deterministic_violations: u64,
    pub examples: Vec<OverlapViolation>,
    pub buckets: Vec<OverlapBucket>,
}

/// Pairs `(a, b)`, `a < b`: all of them, or `sample` drawn uniformly.
pub(crate) fn pair_selection(count: usize, sample_size: Option<usize>, seed: u64) -> (bool, Vec<(usize, usize)>) {
    let total = count * count.saturating_sub(1) / 2;
    match sample_size {
        Some(k) if k < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out: Vec<(usize, usize)> = (0..k)
                .map(|_| {
                    let a = rng.gen_range(0..count);
                    let mut b = rng.gen_range(0..count - 1);
                    if b >= a {
                        b += 1;
                    }
                    (a.min(b), a.max(b))
                })
                .collect();
            out.sort_unstable();
            (false, out)
        }
        _ => (true, Vec::new()),
    }
}

/// Shared nodes of two layer-aligned paths that are not last on either path,
/// and how many of them are split points.
pub(crate) fn shared_and_splits(g: &LayeredGraph, a: &CriticalPath, b: &CriticalPath) -> (u64, u64) {
    let (la, lb) = (g.layer_of(a.source()), g.layer_of(b.source()));
    let lo = la.max(lb);
    let hi = (la + a.nodes.len()).min(lb + b.nodes.len());
    let (mut shared, mut splits) = (0, 0);
    for layer in lo..hi.saturating_sub(1) {
        if a.nodes[layer - la] == b.nodes[layer - lb] {
            shared += 1;
            if a.nodes[layer + 1 - la] != b.nodes[layer + 1 - lb] {
                splits += 1;
            }
        }
    }
    (shared, splits)
}

/// Pairwise intersections against `8 ln n / |d1 - d2|`; equal directions must
/// be disjoint and `|d1 - d2| >= 1` allows one shared node. Bounds scale by
/// the expansion factor. Also tallies splits at shared nodes.
pub fn overlap_report(inst: &HopsetInstance, sample_size: Option<usize>, seed: u64) -> OverlapReport {
    let q = inst.dims.q;
    let k = inst.expansion as f64;
    let ln_n = inst.dims.ln_n;
    let g = &inst.graph;
    let bound_for = |ds: u64| -> f64 {
        if ds == 0 {
            0.0
        } else {
            let delta = ds as f64 / q as f64;
            let b = 8.0 * ln_n / delta;
            if delta >= 1.0 {
                k * b.min(1.0)
            } else {
                k * b
            }
        }
    };
    let dscaled: Vec<u64> = inst.paths.iter().map(|p| inst.directions[p.direction as usize].scaled(q)).collect();
    let eval = |a: usize, b: usize, acc: &mut BTreeMap<u64, OverlapBucket>, ex: &mut Vec<OverlapViolation>| {
        let (pa, pb) = (&inst.paths[a], &inst.paths[b]);
        let ds = dscaled[a].abs_diff(dscaled[b]);
        let inter = intersection(g, pa, pb) as u32;
        let bound = bound_for(ds);
        let bucket = acc.entry(ds).or_insert_with(|| OverlapBucket {
            delta_scaled: ds,
            delta: ds as f64 / q as f64,
            pairs: 0,
            max_intersection: 0,
            bound,
            violations: 0,
            shared_nodes: 0,
            splits: 0,
        });
        bucket.pairs += 1;
        bucket.max_intersection = bucket.max_intersection.max(inter);
        if inter as f64 > bound {
            bucket.violations += 1;
            if ex.len() < MAX_EXAMPLES {
                ex.push(OverlapViolation { a, b, intersection: inter, bound });
            }
        }
        if inter > 0 && ds > 0 {
            let (s, sp) = shared_and_splits(g, pa, pb);
            bucket.shared_nodes += s;
            bucket.splits += sp;
        }
    };
    let (exhaustive, sampled) = pair_selection(inst.paths.len(), sample_size, seed);
    type Acc = (BTreeMap<u64, OverlapBucket>, Vec<OverlapViolation>);
    let merge = |mut x: Acc, y: Acc| -> Acc {
        for (key, b) in y.0 {
            match x.0.get_mut(&key) {
                Some(a) => {
                    a.pairs += b.pairs;
                    a.max_intersection = a.max_intersection.max(b.max_intersection);
                    a.violations += b.violations;
                    a.shared_nodes += b.shared_nodes;
                    a.splits += b.splits;
                }
                None => {
                    x.0.insert(key, b);
                }
            }
        }
        x.1.extend(y.1);
        x
    };
    let (buckets, mut examples): Acc = if exhaustive {
        (0..inst.paths.len())
            .into_par_iter()
            .map(|a| {
                let mut acc = (BTreeMap::new(), Vec::new());
                for b in a + 1..inst.paths.len() {
                    eval(a, b, &mut acc.0, &mut acc.1);
                }
                acc
            })
            .reduce(|| (BTreeMap::new(), Vec::new()), merge)
    } else {
        let mut acc = (BTreeMap::new(), Vec::new());
        for &(a, b) in &sampled {
            eval(a, b, &mut acc.0, &mut acc.1);
        }
        acc
    };
    examples.sort_by_key(|v| (v.a, v.b));
    examples.truncate(MAX_EXAMPLES);
    let buckets: Vec<OverlapBucket> = buckets.into_values().collect();
    let violations = buckets.iter().map(|b| b.violations).sum();
    let deterministic_violations = buckets
        .iter()
        .filter(|b| b.delta_scaled == 0 || b.delta >= 1.0)
        .map(|b| b.violations)
        .sum();
    OverlapReport {
        pass: violations == 0,
        exhaustive,
        pairs_checked: buckets.iter().map(|b| b.pairs).sum(),
        violations,
        deterministic_violations,
        examples,
        buckets,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCheck {
    pub d1: Direction,
    pub d2: Direction,
    pub delta: f64,
    pub check: FrequencyCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub pass: bool,
    pub trials: u64,
    pub z: f64,
    pub checks: Vec<SplitCheck>,
}

/// Monte Carlo over fresh ε draws. For every direction `d2 ≠ d1 = min D`, the
/// two paths from a common start share their first node; the split frequency
/// there is compared against `min(|d1 - d2|, 1)` with `z` standard errors of
/// slack. Draws with a tie are redrawn.
pub fn split_monte_carlo(dims: &HopsetDims, trials: u64, seed: u64, z: f64) -> SplitReport {
    let dirs = direction_set(dims);
    let d1 = dirs[0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; dirs.len()];
    let mut done = 0;
    while done < trials {
        let eps: Vec<u64> = (0..dims.layers).map(|_| rng.gen_range(1..=u32::MAX as u64)).collect();
        let steps: Option<Vec<u64>> =
            dirs.iter().map(|&d| choose_step(dims.edge_span, dims.q, eps[1], d)).collect();
        let Some(steps) = steps else { continue };
        for (i, &s) in steps.iter().enumerate().skip(1) {
            if s != steps[0] {
                hits[i] += 1;
            }
        }
        done += 1;
    }
    let checks: Vec<SplitCheck> = dirs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &d2)| {
            let delta = (d2.scaled(dims.q) - d1.scaled(dims.q)) as f64 / dims.q as f64;
            SplitCheck { d1, d2, delta, check: FrequencyCheck::at_least(hits[i], trials, delta.min(1.0), z) }
        })
        .collect();
    SplitReport { pass: checks.iter().all(|c| c.check.pass), trials, z, checks }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBoundViolation {
    pub u: NodeId,
    pub v: NodeId,
    pub paths: u32,
    pub hopdist: u32,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBoundsReport {
    pub pass: bool,
    pub pairs_checked: u64,
    pub max_paths: u32,
    pub violations: u64,
    pub examples: Vec<PairBoundViolation>,
    /// Pairs above `ℓ / hopdist`; informational unless the instantiation
    /// satisfies `16 q ln n <= ℓ`.
    pub ell_over_z_exceeded: u64,
    pub ell_bound_applies: bool,
}

/// Checks `|Π'| <= max(16 q ln n / z, 1)` for every node pair lying together
/// on some critical path. On expanded instances `z` is measured in base
/// layers, and pairs inside one expanded node are bounded by `|D|`.
pub fn pair_bounds_report(inst: &HopsetInstance) -> PairBoundsReport {
    let counts = pair_path_counts(&inst.paths);
    let k = inst.expansion as usize;
    let (q, ln_n, ell) = (inst.dims.q as f64, inst.dims.ln_n, inst.path_len() as f64);
    let mut keys: Vec<_> = counts.iter().collect();
    keys.sort_unstable_by_key(|(key, _)| **key);
    let mut report = PairBoundsReport {
        pass: true,
        pairs_checked: 0,
        max_paths: 0,
        violations: 0,
        examples: Vec::new(),
        ell_over_z_exceeded: 0,
        ell_bound_applies: 16.0 * q * ln_n <= inst.dims.layers as f64,
    };
    for (&(u, v), &(c, z)) in keys {
        report.pairs_checked += 1;
        report.max_paths = report.max_paths.max(c);
        let (bu, bv) = (inst.graph.layer_of(u) / k, inst.graph.layer_of(v) / k);
        let bound = if bu == bv && inst.graph.label(u) == inst.graph.label(v) {
            inst.dims.directions as f64
        } else {
            (16.0 * q * ln_n / (bv - bu) as f64).max(1.0)
        };
        if c as f64 > bound {
            report.violations += 1;
            if report.examples.len() < MAX_EXAMPLES {
                report.examples.push(PairBoundViolation { u, v, paths: c, hopdist: z, bound });
            }
        }
        if c as f64 > ell / z as f64 {
            report.ell_over_z_exceeded += 1;
        }
    }
    report.pass = report.violations == 0 && (!report.ell_bound_applies || report.ell_over_z_exceeded == 0);
    report
}

/// Critical paths through both `u` and `v`.
pub fn paths_through(inst: &HopsetInstance, u: NodeId, v: NodeId) -> usize {
    paths_through_pair(&inst.index(), &inst.paths, u, v)
}

/// Per-pair hop distances in `G ∪ H`, computed on the augmented graph.
pub fn pair_hopdists(inst: &HopsetInstance, extra: &[Edge]) -> Result<Vec<u32>> {
    let g = if extra.is_empty() { inst.graph.clone() } else { inst.graph.with_extra_edges(extra)? };
    let groups = group_by_source(&inst.paths);
    let per_group: Vec<Vec<(usize, u32)>> = groups
        .par_iter()
        .map(|(s, idxs)| -> Result<Vec<(usize, u32)>> {
            let sssp = shortest_paths(&g, *s)?;
            idxs.iter()
                .map(|&i| {
                    let t = inst.paths[i].target();
                    sssp.get(t).map(|l| (i, l.hops)).ok_or(Error::NoPath { from: s.0, to: t.0 })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut hops = vec![0u32; inst.paths.len()];
    for (i, h) in per_group.into_iter().flatten() {
        hops[i] = h;
    }
    Ok(hops)
}

/// `φ(H)`: the sum of hop distances over critical pairs in `G ∪ H`.
pub fn potential(inst: &HopsetInstance, h: &EdgeSetProposal) -> Result<u64> {
    ensure_valid(&inst.graph, h)?;
    Ok(pair_hopdists(inst, &h.edges)?.iter().map(|&x| x as u64).sum())
}

/// `φ(H)` through the chord DP; agrees with [`potential`] for valid `H`.
pub fn potential_by_chords(inst: &HopsetInstance, h: &EdgeSetProposal) -> u64 {
    chord_hopdists(&inst.index(), &inst.paths, &h.edges).iter().map(|&x| x as u64).sum()
}

pub fn hop_profile(inst: &HopsetInstance, h: &EdgeSetProposal) -> Result<HopProfile> {
    ensure_valid(&inst.graph, h)?;
    Ok(HopProfile::from_hops(&pair_hopdists(inst, &h.edges)?))
}

/// Replaces every node by a directed path of `n_target / |V|` zero-weight
/// edges. Incoming edges attach to the path's first node, outgoing edges leave
/// from its last node, and critical pairs become (first copy of s, last copy
/// of t).
pub fn extend_small_p(base: &HopsetInstance, n_target: u64) -> Result<HopsetInstance> {
    let nb = base.graph.node_count() as u64;
    if n_target == 0 || n_target % nb != 0 {
        return Err(Error::InvalidParams(format!("n_target = {n_target} is not a multiple of {nb}")));
    }
    if base.graph.mode() != GraphMode::Directed {
        return Err(Error::InvalidParams("extend_small_p needs the directed instance".into()));
    }
    if base.dims.p > nb {
        log::warn!("base built with p = {} above its node count {nb}", base.dims.p);
    }
    let k = n_target / nb;
    if k == 1 {
        return Ok(base.clone());
    }
    let g = &base.graph;
    let layers = g.layer_count();
    let sizes = g.layer_sizes();
    let mut new_sizes = Vec::with_capacity(layers * k as usize);
    let mut labels = Vec::with_capacity(n_target as usize);
    let mut new_start = Vec::with_capacity(layers * k as usize);
    let mut acc = 0u32;
    for (i, &s) in sizes.iter().enumerate() {
        for _ in 0..k {
            new_sizes.push(s);
            new_start.push(acc);
            acc += s;
            labels.extend(g.layer_nodes(i).map(|v| g.label(v)));
        }
    }
    let base_start: Vec<u32> = (0..layers).map(|i| g.layer_range(i).start as u32).collect();
    // copy `c` of base node `v`
    let copy = |v: NodeId, c: u64| {
        let i = g.layer_of(v);
        NodeId(new_start[i * k as usize + c as usize] + (v.0 - base_start[i]))
    };
    let zero = ScaledRational::zero(g.scale_sigma());
    let mut edges = Vec::with_capacity(g.edge_count() + n_target as usize);
    for v in g.nodes() {
        for c in 0..k - 1 {
            edges.push(Edge::new(copy(v, c), copy(v, c + 1), zero));
        }
    }
    for e in g.edges() {
        edges.push(Edge::new(copy(e.tail, k - 1), copy(e.head, 0), e.weight));
    }
    let graph = LayeredGraph::from_parts(GraphMode::Directed, g.scale_sigma(), g.seed(), &new_sizes, labels, edges)?;
    let paths = base
        .paths
        .iter()
        .map(|p| CriticalPath {
            start: p.start,
            direction: p.direction,
            nodes: p.nodes.iter().flat_map(|&v| (0..k).map(move |c| copy(v, c))).collect(),
        })
        .collect();
    Ok(HopsetInstance {
        graph,
        start_set: base.start_set.iter().map(|&s| copy(s, 0)).collect(),
        paths,
        expansion: base.expansion * k,
        ..base.clone()
    })
}

/// All single-edge damages `φ(∅) - φ({(x, y)})` over node pairs on a common
/// critical path, as `(x, y, damage, paths through (x, y), hopdist_G)`.
pub fn single_edge_damages(inst: &HopsetInstance) -> Vec<(NodeId, NodeId, u64, u32, u32)> {
    let counts = pair_path_counts(&inst.paths);
    let mut out: Vec<_> = counts
        .into_iter()
        .map(|((u, v), (c, z))| (u, v, c as u64 * (z as u64 - 1), c, z))
        .collect();
    out.sort_unstable();
    out
}

/// Exact weight of the subpath of `path` between positions `i < j`, from the
/// graph's edges.
pub fn subpath_weight(g: &LayeredGraph, path: &CriticalPath, i: usize, j: usize) -> Result<ScaledRational> {
    path.nodes[i..=j].windows(2).try_fold(ScaledRational::zero(g.scale_sigma()), |acc, w| {
        let e = g
            .edge_weight(w[0], w[1])
            .ok_or_else(|| Error::Invariant(format!("critical path edge {} -> {} missing", w[0], w[1])))?;
        acc.checked_add(e)
    })
}

/// Outcome of one trial of the squared-sum inequality: for `x̂` with
/// `|x̂_i - b| <= |x_i - b|` and equal sums, `Σx² >= Σx̂²`, with equality only
/// if `|x̂_i - b| = |x_i - b|` for every `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquaredSumOutcome {
    HypothesisFails,
    Strict,
    EqualityCase,
    Violated,
}

pub fn check_squared_sum(b: i64, x: &[i64], xhat: &[i64]) -> SquaredSumOutcome {
    let b = b as i128;
    let close = x.iter().zip(xhat).all(|(&a, &h)| (h as i128 - b).abs() <= (a as i128 - b).abs());
    let same_sum = x.iter().map(|&v| v as i128).sum::<i128>() == xhat.iter().map(|&v| v as i128).sum::<i128>();
    if x.len() != xhat.len() || !close || !same_sum {
        return SquaredSumOutcome::HypothesisFails;
    }
    let sq = |v: &[i64]| v.iter().map(|&a| (a as i128) * (a as i128)).sum::<i128>();
    let (lhs, rhs) = (sq(x), sq(xhat));
    let all_equal = x.iter().zip(xhat).all(|(&a, &h)| (h as i128 - b).abs() == (a as i128 - b).abs());
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => SquaredSumOutcome::Violated,
        std::cmp::Ordering::Equal if all_equal => SquaredSumOutcome::EqualityCase,
        std::cmp::Ordering::Equal => SquaredSumOutcome::Violated,
        std::cmp::Ordering::Greater => SquaredSumOutcome::Strict,
    }
}

/// Layered DP from every distinct critical-path source, for reuse.
pub fn source_distances(inst: &HopsetInstance) -> Result<HashMap<NodeId, crate::graph::paths::Sssp>> {
    let groups = group_by_source(&inst.paths);
    groups
        .par_iter()
        .map(|(s, _)| Ok((*s, layered_sssp(&inst.graph, *s)?)))
        .collect()
}
