//! Independent oracles shared by the integration tests. Nothing here calls
//! into the determinant, signature or canonical-code code under test.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use plumbing_core::PlumbingGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weighted adjacency matrix built straight from the indexed edge list.
pub fn dense_matrix(g: &PlumbingGraph) -> Vec<Vec<i64>> {
    let (weights, edges) = g.to_indexed();
    let n = weights.len();
    let mut m = vec![vec![0; n]; n];
    for (i, w) in weights.into_iter().enumerate() {
        m[i][i] = w;
    }
    for (i, j) in edges {
        m[i][j] += 1;
        m[j][i] += 1;
    }
    m
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for col in 0..n {
        if m[0][col] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let term = BigInt::from(m[0][col]) * cofactor_det(&minor);
        if col % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier.
/// Returns coefficients from `x^n` down to the constant.
pub fn char_poly(a: &[Vec<i64>]) -> Vec<BigRational> {
    let n = a.len();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let a: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&x| q(x)).collect())
        .collect();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &x[i][k] * &y[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![q(1)];
    // M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs.last().unwrap();
        }
        m = next;
        let am = mul(&a, &m);
        let trace = (0..n).fold(BigRational::zero(), |s, i| s + &am[i][i]);
        coeffs.push(-trace / q(k as i64));
    }
    coeffs
}

fn sign_changes(coeffs: &[BigRational]) -> usize {
    let signs: Vec<bool> = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `(n_plus, n_minus, n_zero)` of a symmetric matrix from its characteristic
/// polynomial. All roots are real, so Descartes' rule counts exactly.
pub fn descartes_signature(a: &[Vec<i64>]) -> [usize; 3] {
    let p = char_poly(a);
    let n = a.len();
    let zeros = p.iter().rev().take_while(|c| c.is_zero()).count();
    let plus = sign_changes(&p);
    // p(-x): flip odd-degree terms
    let flipped: Vec<BigRational> = p
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if (n - i) % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            }
        })
        .collect();
    let minus = sign_changes(&flipped);
    [plus, minus, zeros]
}

/// Random tree on `n` vertices (random parent for each vertex), with
/// weights in `lo..=hi`. Indices are then shuffled.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> PlumbingGraph {
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let g = PlumbingGraph::build(&weights, &edges).unwrap();
    g.permuted(&random_perm(rng, n))
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[allow(clippy::needless_range_loop)]
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-bound..=bound);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    m
}

/// Backtracking search for a weight- and adjacency-preserving bijection.
pub fn brute_isomorphic(a: &PlumbingGraph, b: &PlumbingGraph) -> bool {
    let (ma, mb) = (dense_matrix(a), dense_matrix(b));
    let n = ma.len();
    if n != mb.len() {
        return false;
    }
    fn extend(ma: &[Vec<i64>], mb: &[Vec<i64>], map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = map.len();
        if i == ma.len() {
            return true;
        }
        for j in 0..mb.len() {
            if used[j] || ma[i][i] != mb[j][j] {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[j][map[k]]) {
                continue;
            }
            used[j] = true;
            map.push(j);
            if extend(ma, mb, map, used) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    extend(&ma, &mb, &mut Vec::with_capacity(n), &mut vec![false; n])
}

/// Determinant and negative-definiteness of a forest by peeling leaves:
/// a leaf with pivot `d` is removed and its neighbor's entry drops by `1/d`.
/// This is an LDL^T factorization in peeling order, so the form is negative
/// definite iff every pivot is negative. `None` if a zero pivot appears.
pub fn tree_pivots(g: &PlumbingGraph) -> Option<Vec<BigRational>> {
    let (weights, edges) = g.to_indexed();
    let n = weights.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut diag: Vec<BigRational> = weights
        .iter()
        .map(|&w| BigRational::from_integer(BigInt::from(w)))
        .collect();
    let mut alive = vec![true; n];
    let mut pivots = Vec::with_capacity(n);
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        let d = diag[v].clone();
        if d.is_zero() {
            return None;
        }
        for &u in &adj[v] {
            if alive[u] {
                diag[u] -= BigRational::from_integer(BigInt::from(1)) / &d;
                degree[u] -= 1;
                if degree[u] <= 1 {
                    stack.push(u);
                }
            }
        }
        pivots.push(d);
    }
    Some(pivots)
}

/// Determinant via [`tree_pivots`], falling back to the characteristic
/// polynomial when a zero pivot blocks elimination.
pub fn tree_det(g: &PlumbingGraph) -> BigInt {
    match tree_pivots(g) {
        Some(p) => {
            let prod = p
                .into_iter()
                .fold(BigRational::from_integer(BigInt::from(1)), |a, b| a * b);
            assert!(prod.is_integer());
            prod.to_integer()
        }
        None => {
            let cp = char_poly(&dense_matrix(g));
            let c0 = cp.last().unwrap().to_integer();
            if g.len().is_multiple_of(2) {
                c0
            } else {
                -c0
            }
        }
    }
}

pub fn tree_negative_definite(g: &PlumbingGraph) -> bool {
    tree_pivots(g).is_some_and(|p| p.iter().all(|d| d.is_negative()))
}
