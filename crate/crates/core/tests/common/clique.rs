//! Exhaustive maximum strongly convex subset search, used as a test oracle.

/// Maximum strongly convex subset sizes for r = 2..=20, from an exhaustive
/// maximum-clique search over all first-quadrant points of norm <= r.
pub const MAX_SIZES: [usize; 19] = [1, 2, 2, 3, 4, 4, 4, 4, 4, 6, 6, 6, 6, 7, 8, 8, 8, 8, 10];

pub fn points(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in 1..=r {
        for y in 1..=r {
            if x * x + y * y <= r * r {
                out.push((x, y));
            }
        }
    }
    out
}

fn dot(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.0 + a.1 * b.1
}

pub fn compatible(a: (i64, i64), b: (i64, i64)) -> bool {
    dot(a, b) < dot(a, a) && dot(a, b) < dot(b, b)
}

/// Bron-Kerbosch with pivoting over the pairwise-compatibility graph.
pub fn max_clique(r: i64) -> usize {
    let p = points(r);
    let n = p.len();
    let words = n.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && compatible(p[i], p[j]) {
                adj[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    fn count(s: &[u64]) -> usize {
        s.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn bk(adj: &[Vec<u64>], size: usize, mut cand: Vec<u64>, mut excl: Vec<u64>, best: &mut usize) {
        if count(&cand) == 0 {
            if count(&excl) == 0 {
                *best = (*best).max(size);
            }
            return;
        }
        if size + count(&cand) <= *best {
            return;
        }
        let union: Vec<u64> = cand.iter().zip(&excl).map(|(a, b)| a | b).collect();
        let pivot = (0..adj.len())
            .filter(|&u| union[u / 64] >> (u % 64) & 1 == 1)
            .max_by_key(|&u| count(&cand.iter().zip(&adj[u]).map(|(a, b)| a & b).collect::<Vec<_>>()))
            .unwrap();
        for v in 0..adj.len() {
            let in_cand = cand[v / 64] >> (v % 64) & 1 == 1;
            let pivot_nb = adj[pivot][v / 64] >> (v % 64) & 1 == 1;
            if !in_cand || pivot_nb {
                continue;
            }
            let c2 = cand.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
            let x2 = excl.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
            bk(adj, size + 1, c2, x2, best);
            cand[v / 64] &= !(1 << (v % 64));
            excl[v / 64] |= 1 << (v % 64);
        }
    }
    let mut cand = vec![0u64; words];
    for v in 0..n {
        cand[v / 64] |= 1 << (v % 64);
    }
    let mut best = 0;
    bk(&adj, 0, cand, vec![0; words], &mut best);
    best
}
