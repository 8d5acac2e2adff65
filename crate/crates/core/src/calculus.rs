//! Boundary-preserving moves on plumbing trees.
//!
//! The move set is the tree-preserving part of the plumbing calculus:
//! blowing down a (-1)-vertex of valence at most two, its inverse blow-ups,
//! and absorbing a 0-weighted vertex of valence two into its neighbors.
//! Every move changes the determinant of the intersection form by a sign
//! only.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::canonical_code;
use crate::form;
use crate::graph::{PlumbingGraph, VertexId};
use crate::seifert;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move at {vertex}: {reason}")]
    IllegalMove { vertex: VertexId, reason: String },
    #[error("invalid blow-up site: {0}")]
    InvalidSite(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    BlowDownDeg0,
    BlowDownDeg1,
    BlowDownDeg2,
    BlowUpEdge,
    BlowUpLeaf,
    BlowUpFree,
    ZeroChainAbsorb,
}

/// One applied move.
///
/// `site` lists the vertices the move acted on: the blown-down vertex, the
/// edge or vertex blown up at, or `[v, u, w]` for absorbing `v` between `u`
/// and `w`. `created` is the fresh vertex the move allocated, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub site: Vec<VertexId>,
    pub weight_deltas: BTreeMap<VertexId, i64>,
    pub created: Option<VertexId>,
    /// For absorptions: the weight of `u` and its other neighbors, enough to
    /// split the merged vertex back apart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absorbed: Option<AbsorbedSide>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbedSide {
    pub weight: i64,
    pub neighbors: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowUpSite {
    Edge(VertexId, VertexId),
    Leaf(VertexId),
    Free,
}

pub fn blow_down(g: &PlumbingGraph, v: VertexId) -> Result<(PlumbingGraph, MoveRecord), MoveError> {
    let weight = g.weight(v).ok_or(MoveError::UnknownVertex(v))?;
    if weight != -1 {
        return Err(MoveError::IllegalMove {
            vertex: v,
            reason: format!("weight is {weight}, not -1"),
        });
    }
    let nbrs: Vec<VertexId> = g.neighbors(v).collect();
    let kind = match nbrs.len() {
        0 => MoveKind::BlowDownDeg0,
        1 => MoveKind::BlowDownDeg1,
        2 => MoveKind::BlowDownDeg2,
        k => {
            return Err(MoveError::IllegalMove {
                vertex: v,
                reason: format!("valence {k} exceeds 2"),
            })
        }
    };
    let mut out = g.clone();
    out.remove_vertex(v);
    let mut weight_deltas = BTreeMap::new();
    for &n in &nbrs {
        out.add_weight(n, 1);
        weight_deltas.insert(n, 1);
    }
    if let [a, b] = nbrs[..] {
        out.link(a, b);
    }
    Ok((
        out,
        MoveRecord {
            kind,
            site: vec![v],
            weight_deltas,
            created: None,
            absorbed: None,
        },
    ))
}

pub fn blow_up(
    g: &PlumbingGraph,
    site: BlowUpSite,
) -> Result<(PlumbingGraph, MoveRecord), MoveError> {
    let mut out = g.clone();
    let mut weight_deltas = BTreeMap::new();
    let (kind, site_ids, new) = match site {
        BlowUpSite::Edge(u, w) => {
            if !g.has_edge(u, w) {
                return Err(MoveError::InvalidSite(format!("no edge {u}-{w}")));
            }
            out.unlink(u, w);
            let x = out.push_vertex(-1);
            out.link(u, x);
            out.link(x, w);
            for n in [u, w] {
                out.add_weight(n, -1);
                weight_deltas.insert(n, -1);
            }
            (MoveKind::BlowUpEdge, vec![u, w], x)
        }
        BlowUpSite::Leaf(u) => {
            if !g.contains(u) {
                return Err(MoveError::InvalidSite(format!("no vertex {u}")));
            }
            let x = out.push_vertex(-1);
            out.link(u, x);
            out.add_weight(u, -1);
            weight_deltas.insert(u, -1);
            (MoveKind::BlowUpLeaf, vec![u], x)
        }
        BlowUpSite::Free => (MoveKind::BlowUpFree, vec![], out.push_vertex(-1)),
    };
    Ok((
        out,
        MoveRecord {
            kind,
            site: site_ids,
            weight_deltas,
            created: Some(new),
            absorbed: None,
        },
    ))
}

pub fn zero_chain_absorb(
    g: &PlumbingGraph,
    v: VertexId,
) -> Result<(PlumbingGraph, MoveRecord), MoveError> {
    let weight = g.weight(v).ok_or(MoveError::UnknownVertex(v))?;
    let nbrs: Vec<VertexId> = g.neighbors(v).collect();
    if weight != 0 || nbrs.len() != 2 {
        return Err(MoveError::IllegalMove {
            vertex: v,
            reason: format!(
                "needs weight 0 and valence 2, has {weight} and {}",
                nbrs.len()
            ),
        });
    }
    let (u, w) = (nbrs[0], nbrs[1]);
    let wu = g.weight(u).unwrap();
    let ww = g.weight(w).unwrap();
    let from_u: Vec<VertexId> = g.neighbors(u).filter(|&x| x != v).collect();
    let from_w: Vec<VertexId> = g.neighbors(w).filter(|&x| x != v).collect();
    let mut out = g.clone();
    for x in [v, u, w] {
        out.remove_vertex(x);
    }
    let merged = out.push_vertex(wu + ww);
    for &x in from_u.iter().chain(&from_w) {
        out.link(merged, x);
    }
    Ok((
        out,
        MoveRecord {
            kind: MoveKind::ZeroChainAbsorb,
            site: vec![v, u, w],
            weight_deltas: BTreeMap::new(),
            created: Some(merged),
            absorbed: Some(AbsorbedSide {
                weight: wu,
                neighbors: from_u,
            }),
        },
    ))
}

impl MoveRecord {
    /// Re-applies this move to `g`, which must be the graph it was recorded
    /// on (or one with the same ids).
    pub fn replay(&self, g: &PlumbingGraph) -> Result<PlumbingGraph, MoveError> {
        let (out, rec) = match self.kind {
            MoveKind::BlowDownDeg0 | MoveKind::BlowDownDeg1 | MoveKind::BlowDownDeg2 => {
                blow_down(g, self.site[0])?
            }
            MoveKind::BlowUpEdge => blow_up(g, BlowUpSite::Edge(self.site[0], self.site[1]))?,
            MoveKind::BlowUpLeaf => blow_up(g, BlowUpSite::Leaf(self.site[0]))?,
            MoveKind::BlowUpFree => blow_up(g, BlowUpSite::Free)?,
            MoveKind::ZeroChainAbsorb => zero_chain_absorb(g, self.site[0])?,
        };
        if rec.kind != self.kind || rec.created != self.created {
            return Err(MoveError::InvalidSite(format!(
                "replay of {:?} at {:?} diverged",
                self.kind, self.site
            )));
        }
        Ok(out)
    }

    /// Undoes this move on the graph it produced. The result is isomorphic
    /// to the graph before the move; restored vertices get fresh ids.
    pub fn undo(&self, after: &PlumbingGraph) -> Result<PlumbingGraph, MoveError> {
        let created = || {
            self.created
                .ok_or_else(|| MoveError::InvalidSite("no created vertex".into()))
        };
        match self.kind {
            MoveKind::BlowUpEdge | MoveKind::BlowUpLeaf | MoveKind::BlowUpFree => {
                Ok(blow_down(after, created()?)?.0)
            }
            MoveKind::BlowDownDeg0 => Ok(blow_up(after, BlowUpSite::Free)?.0),
            MoveKind::BlowDownDeg1 => {
                let n = *self.weight_deltas.keys().next().unwrap();
                Ok(blow_up(after, BlowUpSite::Leaf(n))?.0)
            }
            MoveKind::BlowDownDeg2 => {
                let mut it = self.weight_deltas.keys();
                let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
                Ok(blow_up(after, BlowUpSite::Edge(a, b))?.0)
            }
            MoveKind::ZeroChainAbsorb => {
                let merged = created()?;
                let side = self
                    .absorbed
                    .as_ref()
                    .ok_or_else(|| MoveError::InvalidSite("missing absorbed side".into()))?;
                let total = after
                    .weight(merged)
                    .ok_or(MoveError::UnknownVertex(merged))?;
                let mut out = after.clone();
                let others: Vec<VertexId> = after.neighbors(merged).collect();
                out.remove_vertex(merged);
                let u = out.push_vertex(side.weight);
                let v = out.push_vertex(0);
                let w = out.push_vertex(total - side.weight);
                out.link(u, v);
                out.link(v, w);
                for x in others {
                    out.link(if side.neighbors.contains(&x) { u } else { w }, x);
                }
                Ok(out)
            }
        }
    }
}

/// A move applicable at `v` in the reduction order, if any.
fn reducing_move(g: &PlumbingGraph, v: VertexId) -> Option<(PlumbingGraph, MoveRecord)> {
    match (g.weight(v)?, g.valence(v)) {
        (-1, 0..=2) => blow_down(g, v).ok(),
        (0, 2) => zero_chain_absorb(g, v).ok(),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub final_graph: PlumbingGraph,
    pub moves: Vec<MoveRecord>,
    pub reached_fixed_point: bool,
}

impl ReductionReport {
    /// Replays the move log from `start`.
    pub fn replay(&self, start: &PlumbingGraph) -> Result<PlumbingGraph, MoveError> {
        self.moves
            .iter()
            .try_fold(start.clone(), |g, m| m.replay(&g))
    }
}

/// Applies blow-downs and 0-chain absorptions until none applies, always
/// acting at the earliest vertex in canonical order. Each move removes at
/// least one vertex, so this terminates.
pub fn reduce_to_normal_form(g: &PlumbingGraph) -> ReductionReport {
    let mut current = g.clone();
    let mut moves = Vec::new();
    loop {
        let order = canonical_code(&current).vertex_order;
        match order.into_iter().find_map(|v| reducing_move(&current, v)) {
            Some((next, rec)) => {
                current = next;
                moves.push(rec);
            }
            None => break,
        }
    }
    ReductionReport {
        final_graph: current,
        moves,
        reached_fixed_point: true,
    }
}

/// Every move applicable to `g`, in vertex insertion order.
pub fn applicable_moves(g: &PlumbingGraph) -> Vec<(PlumbingGraph, MoveRecord)> {
    g.vertex_ids().filter_map(|v| reducing_move(g, v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Same,
    Different,
    Unknown,
}

/// Compares boundaries by normal forms. `Same` and `Different` are always
/// correct; `Unknown` means the restricted move set cannot decide.
pub fn same_boundary(g1: &PlumbingGraph, g2: &PlumbingGraph) -> Verdict {
    let r1 = reduce_to_normal_form(g1).final_graph;
    let r2 = reduce_to_normal_form(g2).final_graph;
    compare_reduced(&r1, &r2)
}

/// Same as [`same_boundary`] for graphs already in normal form.
pub fn compare_reduced(r1: &PlumbingGraph, r2: &PlumbingGraph) -> Verdict {
    if canonical_code(r1).code == canonical_code(r2).code {
        return Verdict::Same;
    }
    // |H_1| of the boundary
    if form::determinant(r1).abs() != form::determinant(r2).abs() {
        return Verdict::Different;
    }
    // normalized Seifert data (>= 3 fibers) determine the oriented manifold
    match (seifert_key(r1), seifert_key(r2)) {
        (Some(a), Some(b)) if a != b => Verdict::Different,
        _ => Verdict::Unknown,
    }
}

fn seifert_key(g: &PlumbingGraph) -> Option<(i64, Vec<(u64, u64)>)> {
    let data = seifert::seifert_data_from_star(g).ok()?;
    (data.arms.len() >= 3).then(|| (data.central_weight, data.arms.clone()))
}
