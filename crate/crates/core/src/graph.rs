//! Weighted plumbing trees.
//!
//! A [`PlumbingGraph`] is a forest whose vertices carry integer Euler
//! numbers. Vertex ids are never reused: moves allocate fresh ids, so a log
//! of moves can be replayed against the original graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0}-{1} closes a cycle")]
    Cycle(usize, usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex index {index} out of range for {len} vertices")]
    Index { index: usize, len: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("graph is empty")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Vertex {
    weight: i64,
    neighbors: BTreeSet<VertexId>,
    label: Option<String>,
}

/// A weighted forest. Iteration order is insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingGraph {
    vertices: IndexMap<VertexId, Vertex>,
    next_id: u32,
}

impl Default for PlumbingGraph {
    fn default() -> Self {
        Self::empty()
    }
}

/// Structural summary of a connected plumbing graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub node_ids: Vec<VertexId>,
    pub branch_count: usize,
    pub is_linear: bool,
    pub is_star: bool,
}

impl PlumbingGraph {
    /// The empty graph, whose boundary is S³.
    pub fn empty() -> Self {
        PlumbingGraph {
            vertices: IndexMap::new(),
            next_id: 0,
        }
    }

    /// Builds a forest from vertex weights and index pairs. Vertex `i` gets
    /// id `VertexId(i)`.
    pub fn build(weights: &[i64], edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = weights.len();
        let mut g = PlumbingGraph::empty();
        for &w in weights {
            g.push_vertex(w);
        }
        let mut dsu = DisjointSets::new(n);
        let mut seen = BTreeSet::new();
        for &(i, j) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(GraphError::Index { index, len: n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
            if !dsu.union(i, j) {
                return Err(GraphError::Cycle(i, j));
            }
            g.link(VertexId(i as u32), VertexId(j as u32));
        }
        Ok(g)
    }

    /// A chain with the given weights in order.
    pub fn chain(weights: &[i64]) -> Self {
        let edges: Vec<_> = (1..weights.len()).map(|i| (i - 1, i)).collect();
        Self::build(weights, &edges).expect("a path is a tree")
    }

    /// A star: central vertex plus one chain per arm, each arm listed from
    /// the vertex adjacent to the center outwards. Empty arms are skipped.
    pub fn star(center: i64, arms: &[Vec<i64>]) -> Self {
        let mut g = PlumbingGraph::empty();
        let c = g.push_vertex(center);
        for arm in arms {
            let mut prev = c;
            for &w in arm {
                let v = g.push_vertex(w);
                g.link(prev, v);
                prev = v;
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices
            .values()
            .map(|v| v.neighbors.len())
            .sum::<usize>()
            / 2
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn weight(&self, v: VertexId) -> Option<i64> {
        self.vertices.get(&v).map(|x| x.weight)
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        self.vertices.values().map(|x| x.weight)
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.vertices.get(&v).and_then(|x| x.label.as_deref())
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .get(&v)
            .into_iter()
            .flat_map(|x| x.neighbors.iter().copied())
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.vertices.get(&v).map_or(0, |x| x.neighbors.len())
    }

    pub fn has_edge(&self, u: VertexId, w: VertexId) -> bool {
        self.vertices
            .get(&u)
            .is_some_and(|x| x.neighbors.contains(&w))
    }

    /// Position of `v` in insertion order.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.get_index_of(&v)
    }

    /// Edges as `(u, w)` with `u` before `w` in insertion order, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, (&u, vx)) in self.vertices.iter().enumerate() {
            for &w in &vx.neighbors {
                if self.index_of(w).expect("neighbor exists") > i {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Weights and edges re-indexed by insertion position.
    pub fn to_indexed(&self) -> (Vec<i64>, Vec<(usize, usize)>) {
        let weights = self.weights().collect();
        let mut edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, w)| (self.index_of(u).unwrap(), self.index_of(w).unwrap()))
            .collect();
        edges.sort_unstable();
        (weights, edges)
    }

    /// Connected components, each in insertion order of its first vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertex_ids() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if seen.insert(y) {
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph on `ids`, keeping ids, weights and labels.
    pub fn induced(&self, ids: &[VertexId]) -> PlumbingGraph {
        let keep: BTreeSet<_> = ids.iter().copied().collect();
        let mut g = PlumbingGraph {
            vertices: IndexMap::new(),
            next_id: self.next_id,
        };
        for (&id, vx) in &self.vertices {
            if keep.contains(&id) {
                let mut vx = vx.clone();
                vx.neighbors.retain(|n| keep.contains(n));
                g.vertices.insert(id, vx);
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` get fresh ids.
    pub fn disjoint_union(&self, other: &PlumbingGraph) -> PlumbingGraph {
        let mut g = self.clone();
        let mut map = BTreeMap::new();
        for (&id, vx) in &other.vertices {
            let new = g.push_vertex(vx.weight);
            if let Some(l) = &vx.label {
                g.set_label(new, l.clone());
            }
            map.insert(id, new);
        }
        for (u, w) in other.edges() {
            g.link(map[&u], map[&w]);
        }
        g
    }

    /// A copy with vertex `i` moved to position `perm[i]`; ids are reassigned
    /// to match the new positions.
    pub fn permuted(&self, perm: &[usize]) -> PlumbingGraph {
        assert_eq!(perm.len(), self.len(), "permutation length");
        let (weights, edges) = self.to_indexed();
        let mut w2 = vec![0; weights.len()];
        for (i, &w) in weights.iter().enumerate() {
            w2[perm[i]] = w;
        }
        let e2: Vec<_> = edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        PlumbingGraph::build(&w2, &e2).expect("permutation preserves forest structure")
    }

    /// Structural classification. Requires a connected nonempty graph.
    pub fn classify(&self) -> Result<Classification, GraphError> {
        if self.is_empty() {
            return Err(GraphError::Empty);
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let node_ids: Vec<_> = self
            .vertex_ids()
            .filter(|&v| self.valence(v) >= 3)
            .collect();
        let mut branch_count = 0;
        for &node in &node_ids {
            for start in self.neighbors(node) {
                let end = self.walk_chain(node, start);
                match end {
                    ChainEnd::Leaf => branch_count += 1,
                    ChainEnd::Node(other) if node < other => branch_count += 1,
                    ChainEnd::Node(_) => {}
                }
            }
        }
        let is_star = node_ids.len() == 1 || self.len() <= 2;
        Ok(Classification {
            is_linear: node_ids.is_empty(),
            node_ids,
            branch_count,
            is_star,
        })
    }

    /// The chain hanging off `node` through `start`, listed outward from
    /// `start`, stopping before the next node (if any).
    pub fn arm(&self, node: VertexId, start: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let (mut prev, mut cur) = (node, start);
        loop {
            if self.valence(cur) >= 3 {
                break;
            }
            out.push(cur);
            match self.neighbors(cur).find(|&n| n != prev) {
                Some(next) => {
                    prev = cur;
                    cur = next;
                }
                None => break,
            }
        }
        out
    }

    fn walk_chain(&self, node: VertexId, start: VertexId) -> ChainEnd {
        let (mut prev, mut cur) = (node, start);
        loop {
            if self.valence(cur) >= 3 {
                return ChainEnd::Node(cur);
            }
            match self.neighbors(cur).find(|&n| n != prev) {
                Some(next) => {
                    prev = cur;
                    cur = next;
                }
                None => return ChainEnd::Leaf,
            }
        }
    }

    // Mutators below are crate-private: graphs are values once handed out.

    pub(crate) fn push_vertex(&mut self, weight: i64) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.vertices.insert(
            id,
            Vertex {
                weight,
                neighbors: BTreeSet::new(),
                label: None,
            },
        );
        id
    }

    pub(crate) fn link(&mut self, u: VertexId, w: VertexId) {
        debug_assert!(u != w);
        self.vertices
            .get_mut(&u)
            .expect("vertex")
            .neighbors
            .insert(w);
        self.vertices
            .get_mut(&w)
            .expect("vertex")
            .neighbors
            .insert(u);
    }

    pub(crate) fn unlink(&mut self, u: VertexId, w: VertexId) {
        if let Some(x) = self.vertices.get_mut(&u) {
            x.neighbors.remove(&w);
        }
        if let Some(x) = self.vertices.get_mut(&w) {
            x.neighbors.remove(&u);
        }
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        if let Some(vx) = self.vertices.shift_remove(&v) {
            for n in vx.neighbors {
                if let Some(x) = self.vertices.get_mut(&n) {
                    x.neighbors.remove(&v);
                }
            }
        }
    }

    pub(crate) fn add_weight(&mut self, v: VertexId, delta: i64) {
        self.vertices.get_mut(&v).expect("vertex").weight += delta;
    }

    pub(crate) fn set_label(&mut self, v: VertexId, label: String) {
        self.vertices.get_mut(&v).expect("vertex").label = Some(label);
    }
}

enum ChainEnd {
    Leaf,
    Node(VertexId),
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
