//! The shortcut-set lower-bound instance on a layered 3-D grid.
//!
//! Layer `i` is a `g × g` grid. Between layers `i` and `i + 1` every node has
//! the zero move and the move `c_{λ_i} = w_{λ_i + 1} - w_{λ_i}` for a random
//! `λ_i`, where `w_1, ..., w_q` is a strongly convex set in counterclockwise
//! order. The path for direction `d_j = w_j` takes `c_λ` exactly when
//! `⟨c_λ, d_j⟩ > 0`, which by the projection order means `λ < j`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::{chord_hopdists, intersection, pair_path_counts, CriticalPath, HopProfile, PathIndex};
use crate::error::{Error, Result};
use crate::geometry::{adjacent_differences, build_strongly_convex_set, ConvexVectorSet, Vector2};
use crate::graph::paths::{bfs, bfs_counts, count_paths_from};
use crate::graph::{Edge, GraphMode, LayeredGraph, NodeId, NodeLabel};
use crate::hopset::{pair_selection, shared_and_splits, Constants};
use crate::proposal::{ensure_valid, EdgeSetProposal};
use crate::scaled::ScaledRational;
use crate::stats::{FrequencyCheck, MeanEstimate};

pub const DESK_C_R: f64 = 1.5;
pub const PAPER_C_R: f64 = 1.0 / 64.0;
pub const DESK_C_HAT: f64 = 2.5;
pub const PAPER_C_HAT: f64 = 128.0;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;
const MAX_EXAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutParams {
    pub n: u64,
    pub constants: Constants,
    pub r: Option<u64>,
    pub c_r: Option<f64>,
    pub c_hat: Option<f64>,
    pub seed: u64,
    pub max_attempts: u32,
}

impl ShortcutParams {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { n, constants: Constants::Desk, r: None, c_r: None, c_hat: None, seed, max_attempts: DEFAULT_MAX_ATTEMPTS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutDims {
    pub n: u64,
    pub ln_n: f64,
    pub c_r: f64,
    pub c_hat: f64,
    pub r_formula: f64,
    pub r: u64,
    /// Size of the convex set before trimming to `q <= r²`.
    pub w_full: u64,
    pub w_trimmed: u64,
    pub q: u64,
    pub grid_formula: f64,
    pub grid: u64,
    pub layers: u64,
    /// `layers * grid²`, the node count before truncation.
    pub n_realized: u64,
    pub ell_hat_formula: f64,
    pub ell_hat: u64,
    pub start_lo: u64,
    pub start_hi: u64,
    pub start_count: u64,
    pub path_count: u64,
    pub effective_p: u64,
    pub roundings: Vec<String>,
}

fn icbrt(v: u128) -> u64 {
    let mut x = (v as f64).cbrt() as u128;
    while x * x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x as u64
}

pub fn resolve(params: &ShortcutParams) -> Result<(ShortcutDims, ConvexVectorSet)> {
    let n = params.n;
    if n < 64 {
        return Err(Error::InvalidParams(format!("n = {n} is too small")));
    }
    let ln_n = (n as f64).ln();
    let (dr, dh) = match params.constants {
        Constants::Desk => (DESK_C_R, DESK_C_HAT),
        Constants::Paper => (PAPER_C_R, PAPER_C_HAT),
    };
    let c_r = params.c_r.unwrap_or(dr);
    let c_hat = params.c_hat.unwrap_or(dh);
    let mut roundings = Vec::new();
    let r_formula = c_r * (n as f64).powf(0.125) / ln_n.powf(0.375);
    let r = match params.r {
        Some(r) => {
            roundings.push(format!("r overridden to {r} (formula {r_formula:.4})"));
            r
        }
        None => {
            let r = r_formula.floor().max(0.0) as u64;
            roundings.push(format!("r {r_formula:.4} rounded down to {r}"));
            r
        }
    };
    if r < 2 {
        return Err(Error::InvalidParams(format!(
            "r = {r} (formula {r_formula:.4}) gives q < 2: W(r^3) has fewer than two vectors"
        )));
    }
    let mut w = build_strongly_convex_set((r * r * r) as i64)?;
    let w_full = w.len() as u64;
    let w_trimmed = w.truncate_tail((r * r) as usize) as u64;
    if w_trimmed > 0 {
        roundings.push(format!("removed {w_trimmed} vectors from the tail of W to reach q <= r^2"));
    }
    let q = w.len() as u64;
    if q < 2 {
        return Err(Error::InvalidParams(format!("q = {q} < 2")));
    }
    let grid_formula = ((n * r) as f64).cbrt();
    let grid = icbrt(n as u128 * r as u128);
    let layers = n / (grid * grid);
    let n_realized = layers * grid * grid;
    roundings.push(format!("grid side {grid_formula:.4} rounded down to {grid}"));
    roundings.push(format!("layers n / g^2 rounded down to {layers}; {n_realized} nodes realized"));
    if layers < 2 {
        return Err(Error::InvalidParams(format!("only {layers} layers fit")));
    }
    let ell_hat_formula = layers as f64 * q as f64 / (c_hat * (r * r) as f64);
    let ell_hat = (ell_hat_formula.floor() as u64).min(layers);
    roundings.push(format!("truncation length {ell_hat_formula:.4} rounded down to {ell_hat}"));
    if ell_hat < 2 {
        return Err(Error::InvalidParams(format!(
            "truncation length {ell_hat} < 2 (formula {ell_hat_formula:.4})"
        )));
    }
    let start_lo = grid.div_ceil(3);
    let start_hi = 2 * grid / 3;
    if start_lo > start_hi {
        return Err(Error::InvalidParams(format!("grid side {grid} leaves the start patch empty")));
    }
    let side = start_hi - start_lo + 1;
    let start_count = side * side;
    let path_count = start_count * q;
    Ok((
        ShortcutDims {
            n,
            ln_n,
            c_r,
            c_hat,
            r_formula,
            r,
            w_full,
            w_trimmed,
            q,
            grid_formula,
            grid,
            layers,
            n_realized,
            ell_hat_formula,
            ell_hat,
            start_lo,
            start_hi,
            start_count,
            path_count,
            effective_p: path_count / 2,
            roundings,
        },
        w,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptOutcome {
    Accepted,
    ShortPath,
    Collision,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub seed: u64,
    pub outcome: AttemptOutcome,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ShortcutInstance {
    pub params: ShortcutParams,
    pub dims: ShortcutDims,
    pub w: ConvexVectorSet,
    pub diffs: Vec<Vector2>,
    /// `λ_1, ..., λ_{ℓ-1}`, each in `[1, q - 1]`.
    pub lambdas: Vec<u32>,
    pub graph: LayeredGraph,
    pub start_set: Vec<NodeId>,
    pub paths: Vec<CriticalPath>,
    pub seed_used: u64,
    pub attempts: Vec<AttemptRecord>,
}

pub fn draw_lambdas(seed: u64, layers: u64, q: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..layers).map(|_| rng.gen_range(1..q as u32)).collect()
}

/// Whether direction `j` (1-based) takes `c_λ`; a zero inner product is an
/// invariant violation.
pub fn takes_move(w: &ConvexVectorSet, diffs: &[Vector2], lambda: u32, j: usize) -> Result<bool> {
    let ip = diffs[lambda as usize - 1].dot(w.vectors[j - 1]);
    if ip == 0 {
        return Err(Error::Invariant(format!("<c_{lambda}, d_{j}> = 0")));
    }
    Ok(ip > 0)
}

/// Grid positions of the path from `start` in direction `j`, for at most
/// `steps + 1` nodes; shorter when a chosen move leaves the grid.
pub fn walk(
    dims: &ShortcutDims,
    w: &ConvexVectorSet,
    diffs: &[Vector2],
    lambdas: &[u32],
    start: (i64, i64),
    j: usize,
    steps: usize,
) -> Result<Vec<(i64, i64)>> {
    let g = dims.grid as i64;
    let mut pos = vec![start];
    for &lambda in lambdas.iter().take(steps) {
        let (a, b) = *pos.last().unwrap();
        let next = if takes_move(w, diffs, lambda, j)? {
            let c = diffs[lambda as usize - 1];
            (a + c.x, b + c.y)
        } else {
            (a, b)
        };
        if next.0 < 1 || next.0 > g || next.1 < 1 || next.1 > g {
            break;
        }
        pos.push(next);
    }
    Ok(pos)
}

fn starts(dims: &ShortcutDims) -> Vec<(i64, i64)> {
    let (lo, hi) = (dims.start_lo as i64, dims.start_hi as i64);
    (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| (a, b))).collect()
}

pub fn build_shortcut_instance(params: &ShortcutParams) -> Result<ShortcutInstance> {
    let (dims, w) = resolve(params)?;
    let diffs = adjacent_differences(&w)?;
    let steps = dims.ell_hat as usize - 1;
    let starts = starts(&dims);
    let q = dims.q as usize;
    let mut attempts = Vec::new();
    for attempt in 0..params.max_attempts {
        let seed = params.seed.wrapping_add(attempt as u64);
        let lambdas = draw_lambdas(seed, dims.layers, dims.q);
        let walks: Vec<Vec<(i64, i64)>> = starts
            .par_iter()
            .flat_map_iter(|&s| (1..=q).map(move |j| (s, j)))
            .map(|(s, j)| walk(&dims, &w, &diffs, &lambdas, s, j, steps))
            .collect::<Result<_>>()?;
        if let Some(i) = walks.iter().position(|p| p.len() < dims.ell_hat as usize) {
            let detail = format!("path from {:?} in direction {} has {} nodes", starts[i / q], i % q + 1, walks[i].len());
            log::info!("seed {seed}: {detail}; retrying");
            attempts.push(AttemptRecord { seed, outcome: AttemptOutcome::ShortPath, detail });
            continue;
        }
        let collision = walks.chunks(q).enumerate().find_map(|(si, group)| {
            let mut ends: HashMap<(i64, i64), usize> = HashMap::new();
            group.iter().enumerate().find_map(|(j, p)| {
                ends.insert(*p.last().unwrap(), j + 1).map(|other| (si, other, j + 1))
            })
        });
        if let Some((si, a, b)) = collision {
            let detail = format!("directions {a} and {b} from {:?} share an endpoint", starts[si]);
            log::info!("seed {seed}: {detail}; retrying");
            attempts.push(AttemptRecord { seed, outcome: AttemptOutcome::Collision, detail });
            continue;
        }
        attempts.push(AttemptRecord { seed, outcome: AttemptOutcome::Accepted, detail: String::new() });
        return assemble(params.clone(), dims, w, diffs, lambdas, &starts, walks, seed, attempts);
    }
    Err(Error::RetryExhausted {
        attempts: params.max_attempts,
        reason: attempts.last().map(|a| a.detail.clone()).unwrap_or_default(),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    params: ShortcutParams,
    dims: ShortcutDims,
    w: ConvexVectorSet,
    diffs: Vec<Vector2>,
    lambdas: Vec<u32>,
    starts: &[(i64, i64)],
    walks: Vec<Vec<(i64, i64)>>,
    seed: u64,
    attempts: Vec<AttemptRecord>,
) -> Result<ShortcutInstance> {
    let g = dims.grid as i64;
    let layers = dims.ell_hat as usize;
    let id = |layer: usize, (a, b): (i64, i64)| NodeId((layer as i64 * g * g + (a - 1) * g + (b - 1)) as u32);
    let labels: Vec<NodeLabel> = (0..layers)
        .flat_map(|_| (1..=g).flat_map(move |a| (1..=g).map(move |b| NodeLabel([a, b]))))
        .collect();
    let one = ScaledRational::integer(1);
    let mut edges = Vec::with_capacity(layers * (g * g) as usize * 2);
    for (layer, &lambda) in lambdas.iter().enumerate().take(layers - 1) {
        let c = diffs[lambda as usize - 1];
        for a in 1..=g {
            for b in 1..=g {
                edges.push(Edge::new(id(layer, (a, b)), id(layer + 1, (a, b)), one));
                let (x, y) = (a + c.x, b + c.y);
                if (1..=g).contains(&x) && (1..=g).contains(&y) {
                    edges.push(Edge::new(id(layer, (a, b)), id(layer + 1, (x, y)), one));
                }
            }
        }
    }
    let graph = LayeredGraph::from_parts(
        GraphMode::Directed,
        0,
        seed,
        &vec![(g * g) as u32; layers],
        labels,
        edges,
    )?;
    let q = dims.q as usize;
    let paths = walks
        .into_iter()
        .enumerate()
        .map(|(i, pos)| CriticalPath {
            start: (i / q) as u32,
            direction: (i % q) as u32,
            nodes: pos.into_iter().take(layers).enumerate().map(|(t, p)| id(t, p)).collect(),
        })
        .collect();
    Ok(ShortcutInstance {
        params,
        dims,
        w,
        diffs,
        lambdas,
        graph,
        start_set: starts.iter().map(|&s| id(0, s)).collect(),
        paths,
        seed_used: seed,
        attempts,
    })
}

impl ShortcutInstance {
    pub fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.paths.iter().map(|p| (p.source(), p.target())).collect()
    }

    pub fn index(&self) -> PathIndex {
        PathIndex::new(&self.graph, &self.paths)
    }

    pub fn path_len(&self) -> usize {
        self.dims.ell_hat as usize
    }

    pub fn floor(&self) -> f64 {
        crate::critical::potential_floor(self.path_len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquePathReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub failures: Vec<(usize, String)>,
}

/// Exact DAG path counts: every critical pair must have exactly one path.
pub fn verify_unique_paths(inst: &ShortcutInstance) -> Result<UniquePathReport> {
    let groups = group_by_source(&inst.paths);
    let failures: Vec<Vec<(usize, String)>> = groups
        .par_iter()
        .map(|(s, idxs)| -> Result<Vec<(usize, String)>> {
            let counts = count_paths_from(&inst.graph, *s)?;
            Ok(idxs
                .iter()
                .filter_map(|&i| {
                    let c = counts.get(&inst.paths[i].target()).copied().unwrap_or_default();
                    (!c.is_unique()).then(|| (i, format!("{c} paths")))
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let failures: Vec<_> = failures.into_iter().flatten().collect();
    Ok(UniquePathReport { pass: failures.is_empty(), pairs_checked: inst.paths.len(), failures })
}

/// Treating edges as undirected unit edges, every critical pair must still be
/// at distance `ℓ̂ - 1` with a unique shortest path.
pub fn verify_undirected_unique(inst: &ShortcutInstance) -> Result<UniquePathReport> {
    let g = inst.graph.with_mode(GraphMode::Undirected)?;
    let depth = inst.path_len() as u32 - 1;
    let failures: Vec<Vec<(usize, String)>> = group_by_source(&inst.paths)
        .par_iter()
        .map(|(s, idxs)| {
            let (dist, count) = bfs_counts(&g, *s, Some(depth));
            idxs.iter()
                .filter_map(|&i| {
                    let p = &inst.paths[i];
                    let (d, c) = (dist[p.target().index()], count[p.target().index()]);
                    if d == u32::MAX {
                        Some((i, format!("farther than {depth} hops")))
                    } else if d != p.hops() || !c.is_unique() {
                        Some((i, format!("distance {d} with {c} shortest paths")))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let failures: Vec<_> = failures.into_iter().flatten().collect();
    Ok(UniquePathReport { pass: failures.is_empty(), pairs_checked: inst.paths.len(), failures })
}

fn group_by_source(paths: &[CriticalPath]) -> Vec<(NodeId, Vec<usize>)> {
    let mut groups: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        groups.entry(p.source()).or_default().push(i);
    }
    groups.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutOverlapBucket {
    /// `|j - k|` for direction indices `j`, `k`.
    pub index_gap: u64,
    pub pairs: u64,
    pub max_intersection: u32,
    pub bound: f64,
    pub violations: u64,
    pub shared_nodes: u64,
    pub splits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutSplitCheck {
    pub j: u64,
    pub k: u64,
    pub check: FrequencyCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutSplitReport {
    pub pass: bool,
    pub exhaustive: bool,
    pub pairs_checked: u64,
    pub overlap_violations: u64,
    pub buckets: Vec<ShortcutOverlapBucket>,
    pub resamples: u64,
    pub z: f64,
    pub split_checks: Vec<ShortcutSplitCheck>,
}

/// Intersections against `8 q ln n / |j - k|` (equal directions must be
/// disjoint), plus a Monte Carlo over `resamples` fresh λ draws: two paths
/// from one start with directions `1` and `k` split at the start node with
/// frequency compared against `(k - 1) / q`.
pub fn split_report(
    inst: &ShortcutInstance,
    resamples: u64,
    sample_size: Option<usize>,
    seed: u64,
    z: f64,
) -> ShortcutSplitReport {
    let q = inst.dims.q;
    let bound_for = |gap: u64| if gap == 0 { 0.0 } else { 8.0 * q as f64 * inst.dims.ln_n / gap as f64 };
    let g = &inst.graph;
    let eval = |a: usize, b: usize, acc: &mut BTreeMap<u64, ShortcutOverlapBucket>| {
        let (pa, pb) = (&inst.paths[a], &inst.paths[b]);
        let gap = (pa.direction as u64).abs_diff(pb.direction as u64);
        let inter = intersection(g, pa, pb) as u32;
        let bucket = acc.entry(gap).or_insert_with(|| ShortcutOverlapBucket {
            index_gap: gap,
            pairs: 0,
            max_intersection: 0,
            bound: bound_for(gap),
            violations: 0,
            shared_nodes: 0,
            splits: 0,
        });
        bucket.pairs += 1;
        bucket.max_intersection = bucket.max_intersection.max(inter);
        if inter as f64 > bucket.bound {
            bucket.violations += 1;
        }
        if inter > 0 && gap > 0 {
            let (s, sp) = shared_and_splits(g, pa, pb);
            bucket.shared_nodes += s;
            bucket.splits += sp;
        }
    };
    let merge = |mut x: BTreeMap<u64, ShortcutOverlapBucket>, y: BTreeMap<u64, ShortcutOverlapBucket>| {
        for (key, b) in y {
            match x.get_mut(&key) {
                Some(a) => {
                    a.pairs += b.pairs;
                    a.max_intersection = a.max_intersection.max(b.max_intersection);
                    a.violations += b.violations;
                    a.shared_nodes += b.shared_nodes;
                    a.splits += b.splits;
                }
                None => {
                    x.insert(key, b);
                }
            }
        }
        x
    };
    let (exhaustive, sampled) = pair_selection(inst.paths.len(), sample_size, seed);
    let buckets = if exhaustive {
        (0..inst.paths.len())
            .into_par_iter()
            .map(|a| {
                let mut acc = BTreeMap::new();
                for b in a + 1..inst.paths.len() {
                    eval(a, b, &mut acc);
                }
                acc
            })
            .reduce(BTreeMap::new, merge)
    } else {
        let mut acc = BTreeMap::new();
        for &(a, b) in &sampled {
            eval(a, b, &mut acc);
        }
        acc
    };
    let buckets: Vec<_> = buckets.into_values().collect();
    let overlap_violations: u64 = buckets.iter().map(|b| b.violations).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut hits = vec![0u64; q as usize + 1];
    for _ in 0..resamples {
        let lambda = rng.gen_range(1..q as u32);
        // directions 1 and k differ iff 1 <= λ < k
        for (k, h) in hits.iter_mut().enumerate().skip(2) {
            let t1 = takes_move(&inst.w, &inst.diffs, lambda, 1).unwrap_or(false);
            let tk = takes_move(&inst.w, &inst.diffs, lambda, k).unwrap_or(false);
            if t1 != tk {
                *h += 1;
            }
        }
    }
    let split_checks: Vec<ShortcutSplitCheck> = (2..=q)
        .map(|k| ShortcutSplitCheck {
            j: 1,
            k,
            check: FrequencyCheck::at_least(hits[k as usize], resamples, (k - 1) as f64 / q as f64, z),
        })
        .collect();
    ShortcutSplitReport {
        pass: overlap_violations == 0 && split_checks.iter().all(|c| c.check.pass),
        exhaustive,
        pairs_checked: buckets.iter().map(|b| b.pairs).sum(),
        overlap_violations,
        buckets,
        resamples,
        z,
        split_checks,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutPairBounds {
    pub pass: bool,
    pub pairs_checked: u64,
    pub max_paths: u32,
    pub violations: u64,
    pub examples: Vec<(NodeId, NodeId, u32, u32)>,
}

/// `|Π'| <= max(16 q ln n / z, 1)` for every node pair on a common path.
pub fn pair_bounds_report(inst: &ShortcutInstance) -> ShortcutPairBounds {
    let counts = pair_path_counts(&inst.paths);
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable_by_key(|(k, _)| *k);
    let q = inst.dims.q as f64;
    let mut out = ShortcutPairBounds { pass: true, pairs_checked: 0, max_paths: 0, violations: 0, examples: Vec::new() };
    for ((u, v), (c, z)) in keys {
        out.pairs_checked += 1;
        out.max_paths = out.max_paths.max(c);
        if c as f64 > (16.0 * q * inst.dims.ln_n / z as f64).max(1.0) {
            out.violations += 1;
            if out.examples.len() < MAX_EXAMPLES {
                out.examples.push((u, v, c, z));
            }
        }
    }
    out.pass = out.violations == 0;
    out
}

/// Mean `‖c_λ‖` over uniform `λ` draws against `2^4 r³ / q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallMoveReport {
    pub estimate: MeanEstimate,
    pub bound: f64,
    pub z: f64,
    pub pass: bool,
}

pub fn small_move_report(r: u64, w: &ConvexVectorSet, draws: u64, seed: u64, z: f64) -> Result<SmallMoveReport> {
    let diffs = adjacent_differences(w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..draws).map(|_| diffs[rng.gen_range(0..diffs.len())].norm()).collect();
    let estimate = MeanEstimate::from_samples(&xs);
    let bound = 16.0 * (r * r * r) as f64 / w.len() as f64;
    Ok(SmallMoveReport { estimate, bound, z, pass: estimate.mean <= bound + z * estimate.se })
}

/// Fraction of λ draws for which every critical path reaches `ℓ̂` nodes.
pub fn length_success_rate(params: &ShortcutParams, draws: u64) -> Result<(u64, u64)> {
    let (dims, w) = resolve(params)?;
    let diffs = adjacent_differences(&w)?;
    let starts = starts(&dims);
    let steps = dims.ell_hat as usize - 1;
    let mut ok = 0;
    for t in 0..draws {
        let lambdas = draw_lambdas(params.seed.wrapping_add(t), dims.layers, dims.q);
        let all_long = starts.par_iter().all(|&s| {
            (1..=dims.q as usize).all(|j| {
                walk(&dims, &w, &diffs, &lambdas, s, j, steps).map_or(false, |p| p.len() == steps + 1)
            })
        });
        ok += all_long as u64;
    }
    Ok((ok, draws))
}

/// Per-pair distances in `G ∪ H` by forward BFS.
pub fn pair_distances(inst: &ShortcutInstance, extra: &[Edge]) -> Result<Vec<u32>> {
    let g = if extra.is_empty() { inst.graph.clone() } else { inst.graph.with_extra_edges(extra)? };
    let groups = group_by_source(&inst.paths);
    let per: Vec<Vec<(usize, u32)>> = groups
        .par_iter()
        .map(|(s, idxs)| {
            let d = bfs(&g, *s, Some(inst.path_len() as u32));
            idxs.iter().map(|&i| (i, d[inst.paths[i].target().index()])).collect()
        })
        .collect();
    let mut out = vec![0u32; inst.paths.len()];
    for (i, d) in per.into_iter().flatten() {
        if d == u32::MAX {
            return Err(Error::NoPath { from: inst.paths[i].source().0, to: inst.paths[i].target().0 });
        }
        out[i] = d;
    }
    Ok(out)
}

/// Maximum and mean critical-pair distance in `G ∪ H`; the maximum is a lower
/// bound on the diameter.
pub fn evaluate_shortcut(inst: &ShortcutInstance, h: &EdgeSetProposal) -> Result<HopProfile> {
    ensure_valid(&inst.graph, h)?;
    Ok(HopProfile::from_hops(&pair_distances(inst, &h.edges)?))
}

pub fn evaluate_by_chords(inst: &ShortcutInstance, h: &EdgeSetProposal) -> HopProfile {
    HopProfile::from_hops(&chord_hopdists(&inst.index(), &inst.paths, &h.edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_dimensions() {
        let (d, _) = resolve(&ShortcutParams::new(1 << 15, 0)).unwrap();
        assert_eq!((d.r, d.q, d.grid, d.layers, d.n_realized), (2, 4, 40, 20, 32000));
        assert_eq!((d.start_lo, d.start_hi, d.start_count), (14, 26, 169));
        assert_eq!(d.ell_hat, 8);
        let (d, _) = resolve(&ShortcutParams::new(1 << 18, 0)).unwrap();
        assert_eq!((d.r, d.grid, d.layers, d.n_realized, d.start_count), (2, 80, 40, 256000, 729));
        assert_eq!(d.ell_hat, 16);
    }

    #[test]
    fn published_constants_refuse() {
        let p = ShortcutParams { constants: Constants::Paper, ..ShortcutParams::new(1 << 15, 0) };
        let err = resolve(&p).unwrap_err().to_string();
        assert!(err.contains("q < 2"), "{err}");
    }

    #[test]
    fn toy_moves() {
        let w = ConvexVectorSet::new(3, vec![Vector2::new(2, 1), Vector2::new(1, 2)]).unwrap();
        let c = adjacent_differences(&w).unwrap();
        assert_eq!(c, vec![Vector2::new(-1, 1)]);
        assert!(!takes_move(&w, &c, 1, 1).unwrap());
        assert!(takes_move(&w, &c, 1, 2).unwrap());
    }

    #[test]
    fn integer_cube_root() {
        assert_eq!(icbrt(65536), 40);
        assert_eq!(icbrt(64), 4);
        assert_eq!(icbrt(63), 3);
        assert_eq!(icbrt(524288), 80);
    }
}
