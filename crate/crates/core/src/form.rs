//! Intersection forms of plumbing graphs and their exact invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::PlumbingGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("entry ({0},{1}) differs from its transpose")]
    NotSymmetric(usize, usize),
}

/// Dense symmetric matrix over the integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSymmetricMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntegerSymmetricMatrix {
    pub fn zero(dim: usize) -> Self {
        IntegerSymmetricMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare {
                    row,
                    len: r.len(),
                    dim,
                });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if let Some(j) = (i + 1..dim).find(|&j| r[j] != rows[j][i]) {
                return Err(MatrixError::NotSymmetric(i, j));
            }
        }
        Ok(IntegerSymmetricMatrix {
            dim,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    /// Weights on the diagonal, 1 for every edge, vertices in insertion order.
    pub fn from_graph(g: &PlumbingGraph) -> Self {
        let mut m = Self::zero(g.len());
        for (i, w) in g.weights().enumerate() {
            m.entries[i * m.dim + i] = BigInt::from(w);
        }
        for (u, w) in g.edges() {
            let (i, j) = (g.index_of(u).unwrap(), g.index_of(w).unwrap());
            m.entries[i * m.dim + j] = BigInt::one();
            m.entries[j * m.dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(<[_]>::to_vec)
            .collect()
    }

    /// Fraction-free (Bareiss) elimination with row pivoting.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.rows();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                let row_zero = m[i][k].is_zero();
                for j in k + 1..n {
                    // zero stays zero: sparse trees skip most of the update
                    if m[i][j].is_zero() && (row_zero || m[k][j].is_zero()) {
                        continue;
                    }
                    let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    // exact by Sylvester's identity
                    m[i][j] = t / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Inertia over the rationals by symmetric elimination. A nonzero
    /// diagonal pivot contributes its sign; when only off-diagonal entries
    /// remain, a hyperbolic 2×2 block contributes one positive and one
    /// negative direction.
    pub fn signature(&self) -> SignatureTriple {
        let n = self.dim;
        let mut m: Vec<Vec<BigRational>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let mut live: Vec<usize> = (0..n).collect();
        let mut sig = SignatureTriple::default();
        while !live.is_empty() {
            if let Some(pos) = live.iter().position(|&k| !m[k][k].is_zero()) {
                let k = live.remove(pos);
                let pivot = m[k][k].clone();
                if pivot.is_positive() {
                    sig.n_plus += 1;
                } else {
                    sig.n_minus += 1;
                }
                for &i in &live {
                    if m[i][k].is_zero() {
                        continue;
                    }
                    let f = &m[i][k] / &pivot;
                    for &j in &live {
                        if m[k][j].is_zero() {
                            continue;
                        }
                        let t = &f * &m[k][j];
                        m[i][j] -= t;
                    }
                }
                continue;
            }
            let pair = live.iter().enumerate().find_map(|(a, &i)| {
                live[a + 1..]
                    .iter()
                    .find(|&&j| !m[i][j].is_zero())
                    .map(|&j| (i, j))
            });
            let Some((p, q)) = pair else {
                sig.n_zero += live.len();
                break;
            };
            sig.n_plus += 1;
            sig.n_minus += 1;
            live.retain(|&x| x != p && x != q);
            // Schur complement of [[0, b], [b, 0]]
            let b = m[p][q].clone();
            let rest = live.clone();
            for &i in &rest {
                for &j in &rest {
                    let t = (&m[i][p] * &m[q][j] + &m[i][q] * &m[p][j]) / &b;
                    m[i][j] -= t;
                }
            }
        }
        sig
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SignatureTriple {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl SignatureTriple {
    pub fn as_array(&self) -> [usize; 3] {
        [self.n_plus, self.n_minus, self.n_zero]
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

impl Serialize for SignatureTriple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_array().serialize(s)
    }
}

pub fn intersection_matrix(g: &PlumbingGraph) -> IntegerSymmetricMatrix {
    IntegerSymmetricMatrix::from_graph(g)
}

pub fn determinant(g: &PlumbingGraph) -> BigInt {
    intersection_matrix(g).determinant()
}

pub fn signature(g: &PlumbingGraph) -> SignatureTriple {
    intersection_matrix(g).signature()
}

pub fn is_unimodular(g: &PlumbingGraph) -> bool {
    determinant(g).abs().is_one()
}

pub fn is_negative_definite(g: &PlumbingGraph) -> bool {
    signature(g).n_minus == g.len()
}

/// The boundary is an integral homology sphere iff the form is unimodular.
pub fn is_homology_sphere(g: &PlumbingGraph) -> bool {
    is_unimodular(g)
}

/// Everything the `det`/`sig`/`is-hs` commands report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormSummary {
    #[serde(serialize_with = "serialize_bigint")]
    pub det: BigInt,
    pub signature: SignatureTriple,
    pub unimodular: bool,
    pub negative_definite: bool,
    pub homology_sphere: bool,
}

impl FormSummary {
    pub fn of(g: &PlumbingGraph) -> Self {
        let m = intersection_matrix(g);
        let det = m.determinant();
        let signature = m.signature();
        let unimodular = det.abs().is_one();
        FormSummary {
            negative_definite: signature.n_minus == g.len(),
            homology_sphere: unimodular,
            unimodular,
            signature,
            det,
        }
    }
}

/// JSON numbers when the value fits in an i64, decimal strings otherwise.
pub fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}
