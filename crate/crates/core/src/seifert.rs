//! Seifert fibered plumbings: negative continued fractions, Brieskorn
//! sphere plumbings, Seifert data of star-shaped graphs and the central
//! weight obstruction.
//!
//! Conventions: an arm with weights `-c_1, ..., -c_k` (listed outward from
//! the node, all `c_j >= 2`) encodes `a/b = c_1 - 1/(c_2 - ... - 1/c_k)`, and
//! the Euler number of a star with central weight `w` is `w + Σ b_i/a_i`.
//! A negative-definite Brieskorn plumbing has `e = -1/(a_1 a_2 a_3)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::form;
use crate::graph::PlumbingGraph;
use crate::par::{self, Mode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("graph is not star-shaped: {0}")]
    NotStar(String),
    #[error("arm weight {0} is not <= -2")]
    NotReduced(i64),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NcfExpansion {
    pub p: u64,
    pub q: u64,
    pub terms: Vec<u64>,
}

/// The expansion `p/q = c_1 - 1/(c_2 - ... - 1/c_k)` with every `c_j >= 2`.
pub fn neg_cont_frac(p: u64, q: u64) -> Result<NcfExpansion, SeifertError> {
    if q == 0 || p <= q {
        return Err(SeifertError::Domain(format!(
            "need p > q >= 1, got {p}/{q}"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(SeifertError::Domain(format!("{p} and {q} are not coprime")));
    }
    let mut terms = Vec::new();
    let (mut num, mut den) = (p, q);
    while den != 0 {
        let c = num.div_ceil(den);
        terms.push(c);
        (num, den) = (den, c * den - num);
    }
    Ok(NcfExpansion { p, q, terms })
}

/// Numerator and denominator of `[c_1, ..., c_k]`; `(1, 0)` for no terms.
pub fn ncf_fraction(terms: &[u64]) -> (BigInt, BigInt) {
    // fold from the right: x = c - 1/x
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for &c in terms.iter().rev() {
        let next = BigInt::from(c) * &num - &den;
        den = num;
        num = next;
    }
    (num, den)
}

pub fn ncf_value(terms: &[u64]) -> BigRational {
    let (n, d) = ncf_fraction(terms);
    BigRational::new(n, d)
}

/// Normalized Seifert invariants of a star-shaped plumbing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertData {
    pub central_weight: i64,
    /// `(a_i, b_i)` with `0 < b_i < a_i`, sorted.
    pub arms: Vec<(u64, u64)>,
    #[serde(serialize_with = "serialize_ratio")]
    pub euler: BigRational,
}

impl SeifertData {
    pub fn new(central_weight: i64, mut arms: Vec<(u64, u64)>) -> Self {
        arms.sort_unstable();
        let euler = arms.iter().fold(
            BigRational::from_integer(central_weight.into()),
            |acc, &(a, b)| acc + BigRational::new(b.into(), a.into()),
        );
        SeifertData {
            central_weight,
            arms,
            euler,
        }
    }

    /// The multiplicities `a_i` when the data describe a Brieskorn homology
    /// sphere: pairwise coprime with `|e| a_1 ... a_n = 1`.
    pub fn brieskorn_exponents(&self) -> Option<Vec<u64>> {
        let a: Vec<u64> = self.arms.iter().map(|&(a, _)| a).collect();
        if a.len() < 3 {
            return None;
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if a[i].gcd(&a[j]) != 1 {
                    return None;
                }
            }
        }
        let product: BigInt = a.iter().map(|&x| BigInt::from(x)).product();
        (self.euler.abs() * BigRational::from_integer(product))
            .is_one()
            .then_some(a)
    }
}

fn serialize_ratio<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Reads Seifert data off a graph with exactly one node whose arms are all
/// weighted `<= -2`.
pub fn seifert_data_from_star(g: &PlumbingGraph) -> Result<SeifertData, SeifertError> {
    let class = g
        .classify()
        .map_err(|e| SeifertError::NotStar(e.to_string()))?;
    let [node] = class.node_ids[..] else {
        return Err(SeifertError::NotStar(format!(
            "{} nodes",
            class.node_ids.len()
        )));
    };
    let mut arms = Vec::new();
    for start in g.neighbors(node) {
        let mut terms = Vec::new();
        for v in g.arm(node, start) {
            let w = g.weight(v).unwrap();
            if w > -2 {
                return Err(SeifertError::NotReduced(w));
            }
            terms.push(w.unsigned_abs());
        }
        let (a, b) = ncf_fraction(&terms);
        let to_u64 = |x: BigInt| {
            u64::try_from(x).map_err(|_| SeifertError::Domain("arm fraction overflows u64".into()))
        };
        arms.push((to_u64(a)?, to_u64(b)?));
    }
    Ok(SeifertData::new(g.weight(node).unwrap(), arms))
}

/// The star-shaped negative-definite unimodular plumbing bounded by
/// Σ(a1, a2, a3). An exponent equal to 1 contributes an empty arm.
pub fn brieskorn_plumbing(a1: u64, a2: u64, a3: u64) -> Result<PlumbingGraph, SeifertError> {
    let a = [a1, a2, a3];
    if a.contains(&0) {
        return Err(SeifertError::Domain("exponents must be positive".into()));
    }
    if a.iter().filter(|&&x| x == 1).count() > 1 {
        return Err(SeifertError::Domain("at most one exponent may be 1".into()));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if a[i].gcd(&a[j]) != 1 {
                return Err(SeifertError::Domain(format!(
                    "{} and {} are not coprime",
                    a[i], a[j]
                )));
            }
        }
    }
    let product: i128 = a.iter().map(|&x| x as i128).product();
    for sign in [1i128, -1] {
        let b: Vec<u64> = a
            .iter()
            .map(|&ai| {
                if ai == 1 {
                    return 0;
                }
                let m = ai as i128;
                let inv = mod_inverse((product / m).rem_euclid(m), m);
                (-sign * inv).rem_euclid(m) as u64
            })
            .collect();
        let arm_sum = a
            .iter()
            .zip(&b)
            .fold(BigRational::zero(), |acc, (&ai, &bi)| {
                acc + BigRational::new(bi.into(), ai.into())
            });
        for target in [-1, 1] {
            let central = BigRational::new(target.into(), product.into()) - &arm_sum;
            if !central.is_integer() {
                continue;
            }
            let central = i64::try_from(central.to_integer())
                .map_err(|_| SeifertError::Internal("central weight overflow".into()))?;
            let arms = a
                .iter()
                .zip(&b)
                .map(|(&ai, &bi)| {
                    if ai == 1 {
                        Ok(Vec::new())
                    } else {
                        neg_cont_frac(ai, bi)
                            .map(|x| x.terms.iter().map(|&c| -(c as i64)).collect::<Vec<_>>())
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let g = PlumbingGraph::star(central, &arms);
            let summary = form::FormSummary::of(&g);
            if summary.unimodular && summary.negative_definite {
                return Ok(g);
            }
        }
    }
    Err(SeifertError::Internal(format!(
        "no unimodular negative-definite star for Σ({a1},{a2},{a3})"
    )))
}

fn mod_inverse(x: i128, m: i128) -> i128 {
    let e = x.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Sorted pairwise-coprime triples `a1 <= a2 <= a3` with at most one entry
/// equal to 1 and `a1 a2 a3 <= max_product`.
pub fn brieskorn_triples(max_product: u64) -> Vec<[u64; 3]> {
    let mut out = Vec::new();
    for a1 in 1..=max_product {
        for a2 in a1.max(2)..=max_product / a1 {
            if a1.gcd(&a2) != 1 {
                continue;
            }
            for a3 in a2..=max_product / (a1 * a2) {
                if a1.gcd(&a3) == 1 && a2.gcd(&a3) == 1 {
                    out.push([a1, a2, a3]);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub triple: [u64; 3],
    pub vertices: usize,
    #[serde(serialize_with = "form::serialize_bigint")]
    pub det: BigInt,
    pub negative_definite: bool,
    pub central_weight: i64,
}

/// Builds and checks the plumbing of every triple from
/// [`brieskorn_triples`], in triple order.
pub fn brieskorn_sweep(max_product: u64, mode: Mode) -> Result<Vec<SweepRow>, SeifertError> {
    par::map(mode, brieskorn_triples(max_product), |t| {
        let g = brieskorn_plumbing(t[0], t[1], t[2])?;
        let summary = form::FormSummary::of(&g);
        let central = g.vertex_ids().next().and_then(|c| g.weight(c)).unwrap_or(0);
        Ok(SweepRow {
            triple: t,
            vertices: g.len(),
            det: summary.det,
            negative_definite: summary.negative_definite,
            central_weight: central,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    Obstructed,
    NotObstructed,
    NotApplicable,
}

/// A Seifert fibered homology sphere whose negative-definite star plumbing
/// has node weight other than -1 cannot bound a homology ball. Applies to
/// minimal star plumbings (arms `<= -2`) with at least three arms that are
/// unimodular and negative definite.
pub fn central_weight_obstruction(g: &PlumbingGraph) -> Obstruction {
    let Ok(data) = seifert_data_from_star(g) else {
        return Obstruction::NotApplicable;
    };
    if data.arms.len() < 3 {
        return Obstruction::NotApplicable;
    }
    let summary = form::FormSummary::of(g);
    if !(summary.unimodular && summary.negative_definite) {
        return Obstruction::NotApplicable;
    }
    if data.central_weight == -1 {
        Obstruction::NotObstructed
    } else {
        Obstruction::Obstructed
    }
}
