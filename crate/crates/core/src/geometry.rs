//! Strongly convex sets of planar integer vectors.
//!
//! A set `W` of first-quadrant integer vectors is strongly convex when every
//! `w` is the strict maximizer of `<w, .>` over `W`, i.e. `<w1, w2> < <w1, w1>`
//! for all distinct `w1, w2`. Sorted by angle, strong convexity is transitive
//! along the order (if `a ~ b` and `b ~ c` with strictly increasing angles in
//! the open first quadrant then `a ~ c`), so a maximum strongly convex set is a
//! longest chain in the angle-sorted compatibility DAG.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest radius accepted by [`build_strongly_convex_set`]. The exact chain
/// search is quadratic in the number of lattice points in the quarter disk.
pub const MAX_BUILD_RADIUS: i64 = 256;

/// Radii above this would overflow `r^2` in the 128-bit inner products.
pub const MAX_RADIUS: i64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Vector2 {
    pub x: i64,
    pub y: i64,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vector2) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    pub fn norm_sq(self) -> i128 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// z-component of the cross product; positive when `other` is
    /// counterclockwise of `self`.
    pub fn cross(self, other: Vector2) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    pub fn is_first_quadrant(self) -> bool {
        self.x > 0 && self.y > 0
    }

    /// Counterclockwise angle order for vectors in the open first quadrant.
    pub fn angle_cmp(self, other: Vector2) -> Ordering {
        0.cmp(&self.cross(other))
    }
}

impl std::ops::Add for Vector2 {
    type Output = Vector2;
    fn add(self, rhs: Vector2) -> Vector2 {
        Vector2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vector2 {
    type Output = Vector2;
    fn sub(self, rhs: Vector2) -> Vector2 {
        Vector2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl From<[i64; 2]> for Vector2 {
    fn from(v: [i64; 2]) -> Self {
        Vector2::new(v[0], v[1])
    }
}

impl From<Vector2> for [i64; 2] {
    fn from(v: Vector2) -> Self {
        [v.x, v.y]
    }
}

impl fmt::Display for Vector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// True when `a` and `b` may coexist in a strongly convex set.
pub fn compatible(a: Vector2, b: Vector2) -> bool {
    let ab = a.dot(b);
    ab < a.norm_sq() && ab < b.norm_sq()
}

/// Vectors ordered counterclockwise, all of norm at most `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexVectorSet {
    pub r: i64,
    pub vectors: Vec<Vector2>,
}

impl ConvexVectorSet {
    /// Wraps `vectors` after sorting them counterclockwise. Rejects duplicates
    /// and vectors outside the open first quadrant; strong convexity itself is
    /// left to [`verify_strong_convexity`].
    pub fn new(r: i64, mut vectors: Vec<Vector2>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| !v.is_first_quadrant()) {
            return Err(Error::InvalidParams(format!("vector {v} is not in the open first quadrant")));
        }
        vectors.sort_by(|a, b| a.angle_cmp(*b).then(a.norm_sq().cmp(&b.norm_sq())));
        if let Some(w) = vectors.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!("duplicate vector {}", w[0])));
        }
        Ok(Self { r, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Drops vectors from the counterclockwise tail until at most `max_len`
    /// remain. Returns the number removed.
    pub fn truncate_tail(&mut self, max_len: usize) -> usize {
        let removed = self.vectors.len().saturating_sub(max_len);
        self.vectors.truncate(self.vectors.len() - removed);
        removed
    }
}

/// Lattice points with both coordinates positive and norm at most `r`,
/// sorted counterclockwise (ties by norm).
pub fn quarter_disk_points(r: i64) -> Vec<Vector2> {
    let r2 = r as i128 * r as i128;
    let mut pts = Vec::new();
    for x in 1..=r {
        for y in 1..=r {
            let v = Vector2::new(x, y);
            if v.norm_sq() <= r2 {
                pts.push(v);
            }
        }
    }
    pts.sort_by(|a, b| a.angle_cmp(*b).then(a.norm_sq().cmp(&b.norm_sq())));
    pts
}

/// Maximum-size strongly convex set of first-quadrant lattice vectors with
/// norm at most `r`, computed as a longest compatible chain in angle order.
///
/// Among maximum chains the result is canonical: each position takes the
/// earliest (smallest-angle, then shortest) point that still admits a
/// maximum completion.
pub fn build_strongly_convex_set(r: i64) -> Result<ConvexVectorSet> {
    if r < 2 {
        return Err(Error::InvalidParams(format!(
            "radius {r} < 2: no first-quadrant integer vector of norm <= 1 exists"
        )));
    }
    if r > MAX_BUILD_RADIUS {
        return Err(Error::InvalidParams(format!(
            "radius {r} exceeds the exact-search limit {MAX_BUILD_RADIUS}"
        )));
    }
    let pts = quarter_disk_points(r);
    let m = pts.len();
    // best[i] = longest chain starting at i
    let mut best = vec![1u32; m];
    for i in (0..m).rev() {
        for j in i + 1..m {
            if best[j] + 1 > best[i] && pts[i].angle_cmp(pts[j]) == Ordering::Less && compatible(pts[i], pts[j]) {
                best[i] = best[j] + 1;
            }
        }
    }
    let target = best.iter().copied().max().unwrap_or(0);
    let mut chain = Vec::with_capacity(target as usize);
    let mut need = target;
    let mut last: Option<usize> = None;
    for i in 0..m {
        if need == 0 {
            break;
        }
        if best[i] != need {
            continue;
        }
        if let Some(l) = last {
            if pts[l].angle_cmp(pts[i]) != Ordering::Less || !compatible(pts[l], pts[i]) {
                continue;
            }
        }
        chain.push(pts[i]);
        last = Some(i);
        need -= 1;
    }
    debug_assert_eq!(chain.len(), target as usize);
    ConvexVectorSet::new(r, chain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityViolation {
    NotFirstQuadrant(Vector2),
    OutsideRadius(Vector2),
    NotIncreasingAngle(Vector2, Vector2),
    /// `<a, b> >= min(<a, a>, <b, b>)`
    Pair(Vector2, Vector2),
    /// One of the two ordered-triple chains failed for `(w_i, w_j, w_k)`.
    Triple(Vector2, Vector2, Vector2),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pass: bool,
    pub violations: Vec<ConvexityViolation>,
}

/// Checks every invariant of a strongly convex set: quadrant, radius, strictly
/// increasing angle, all pairwise inequalities and, for every ordered triple
/// `i < j < k`, both chains
/// `<wi,wk> < <wj,wk> < <wk,wk>` and `<wi,wk> < <wi,wj> < <wi,wi>`.
pub fn verify_strong_convexity(set: &ConvexVectorSet) -> ConvexityReport {
    let w = &set.vectors;
    let r2 = set.r as i128 * set.r as i128;
    let mut violations = Vec::new();
    for &v in w {
        if !v.is_first_quadrant() {
            violations.push(ConvexityViolation::NotFirstQuadrant(v));
        }
        if v.norm_sq() > r2 {
            violations.push(ConvexityViolation::OutsideRadius(v));
        }
    }
    for pair in w.windows(2) {
        if pair[0].angle_cmp(pair[1]) != Ordering::Less {
            violations.push(ConvexityViolation::NotIncreasingAngle(pair[0], pair[1]));
        }
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if !compatible(w[i], w[j]) {
                violations.push(ConvexityViolation::Pair(w[i], w[j]));
            }
        }
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            for k in j + 1..w.len() {
                let (a, b, c) = (w[i], w[j], w[k]);
                let toward_k = a.dot(c) < b.dot(c) && b.dot(c) < c.norm_sq();
                let toward_i = a.dot(c) < a.dot(b) && a.dot(b) < a.norm_sq();
                if !(toward_k && toward_i) {
                    violations.push(ConvexityViolation::Triple(a, b, c));
                }
            }
        }
    }
    ConvexityReport { pass: violations.is_empty(), violations }
}

/// `c_i = w_{i+1} - w_i` in index order.
pub fn adjacent_differences(set: &ConvexVectorSet) -> Result<Vec<Vector2>> {
    if set.vectors.len() < 2 {
        return Err(Error::InvalidParams(format!(
            "adjacent differences need at least two vectors, got {}",
            set.vectors.len()
        )));
    }
    Ok(set.vectors.windows(2).map(|w| w[1] - w[0]).collect())
}
