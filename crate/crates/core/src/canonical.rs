//! Canonical codes for weighted forests.
//!
//! Each tree is rooted at its centroid (trying both centroids when there are
//! two and keeping the smaller code) and encoded bottom-up: a vertex becomes
//! `(`, its weight as 8 big-endian bytes, the sorted codes of its children,
//! then `)`. Component codes are sorted and concatenated. Two forests get the
//! same code exactly when a weight-preserving isomorphism exists.

use std::collections::HashMap;

use crate::graph::{PlumbingGraph, VertexId};

const OPEN: u8 = b'(';
const CLOSE: u8 = b')';

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalCode {
    pub code: Vec<u8>,
    /// Input vertices in the order they appear in `code`.
    pub vertex_order: Vec<VertexId>,
}

impl CanonicalCode {
    pub fn hex(&self) -> String {
        hex::encode(&self.code)
    }
}

pub fn canonical_code(g: &PlumbingGraph) -> CanonicalCode {
    let mut parts: Vec<(Vec<u8>, Vec<VertexId>)> = g
        .components()
        .into_iter()
        .map(|comp| tree_code(g, &comp))
        .collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut code = Vec::new();
    let mut vertex_order = Vec::with_capacity(g.len());
    for (c, order) in parts {
        code.extend_from_slice(&c);
        vertex_order.extend(order);
    }
    CanonicalCode { code, vertex_order }
}

/// True when the two forests are isomorphic as weighted graphs.
pub fn isomorphic(a: &PlumbingGraph, b: &PlumbingGraph) -> bool {
    a.len() == b.len() && canonical_code(a).code == canonical_code(b).code
}

fn tree_code(g: &PlumbingGraph, comp: &[VertexId]) -> (Vec<u8>, Vec<VertexId>) {
    centroids(g, comp)
        .into_iter()
        .map(|root| rooted_code(g, root))
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("component is nonempty")
}

fn bfs_order(g: &PlumbingGraph, root: VertexId) -> (Vec<VertexId>, HashMap<VertexId, VertexId>) {
    let mut order = vec![root];
    let mut parent = HashMap::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for n in g.neighbors(v) {
            if parent.get(&v) != Some(&n) {
                parent.insert(n, v);
                order.push(n);
            }
        }
        i += 1;
    }
    (order, parent)
}

fn centroids(g: &PlumbingGraph, comp: &[VertexId]) -> Vec<VertexId> {
    let n = comp.len();
    let (order, parent) = bfs_order(g, comp[0]);
    let mut size: HashMap<VertexId, usize> = HashMap::with_capacity(n);
    for &v in order.iter().rev() {
        let s = 1 + g
            .neighbors(v)
            .filter(|c| parent.get(c) == Some(&v))
            .map(|c| size[&c])
            .sum::<usize>();
        size.insert(v, s);
    }
    let heaviest = |v: VertexId| {
        let down = g
            .neighbors(v)
            .filter(|c| parent.get(c) == Some(&v))
            .map(|c| size[&c])
            .max()
            .unwrap_or(0);
        down.max(n - size[&v])
    };
    let best = order.iter().map(|&v| heaviest(v)).min().unwrap();
    let mut out: Vec<_> = order.into_iter().filter(|&v| heaviest(v) == best).collect();
    out.sort();
    out
}

fn rooted_code(g: &PlumbingGraph, root: VertexId) -> (Vec<u8>, Vec<VertexId>) {
    let (order, parent) = bfs_order(g, root);
    let mut codes: HashMap<VertexId, Vec<u8>> = HashMap::with_capacity(order.len());
    let mut kids: HashMap<VertexId, Vec<VertexId>> = HashMap::with_capacity(order.len());
    for &v in order.iter().rev() {
        let mut children: Vec<VertexId> = g
            .neighbors(v)
            .filter(|c| parent.get(c) == Some(&v))
            .collect();
        children.sort_by(|a, b| codes[a].cmp(&codes[b]));
        let mut code = Vec::with_capacity(10);
        code.push(OPEN);
        code.extend_from_slice(&weight_bytes(g.weight(v).unwrap()));
        for c in &children {
            code.extend_from_slice(&codes[c]);
        }
        code.push(CLOSE);
        codes.insert(v, code);
        kids.insert(v, children);
    }
    let mut preorder = Vec::with_capacity(order.len());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        preorder.push(v);
        stack.extend(kids[&v].iter().rev());
    }
    (codes.remove(&root).unwrap(), preorder)
}

// Order-preserving: flipping the sign bit maps i64 order onto byte order.
fn weight_bytes(w: i64) -> [u8; 8] {
    ((w as u64) ^ (1 << 63)).to_be_bytes()
}
