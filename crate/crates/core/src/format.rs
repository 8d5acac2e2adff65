//! Graph file formats.
//!
//! Text:
//!
//! ```text
//! # Σ(2,3,7)
//! vertices: -1 -2 -3 -7
//! edges: 0-1 0-2 0-3
//! ```
//!
//! JSON: `{"weights": [-1, -2, -3, -7], "edges": [[0, 1], [0, 2], [0, 3]]}`.
//! [`parse_graph`] accepts either.

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, PlumbingGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub weights: Vec<i64>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn from_graph(g: &PlumbingGraph) -> Self {
        let (weights, edges) = g.to_indexed();
        GraphJson {
            weights,
            edges: edges.into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<PlumbingGraph, GraphError> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        PlumbingGraph::build(&self.weights, &edges)
    }
}

/// Parses either format, sniffing JSON by a leading `{`.
pub fn parse_graph(input: &str) -> Result<PlumbingGraph, GraphError> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

pub fn parse_json(input: &str) -> Result<PlumbingGraph, GraphError> {
    let raw: GraphJson =
        serde_json::from_str(input).map_err(|e| GraphError::Parse(e.to_string()))?;
    raw.to_graph()
}

pub fn parse_text(input: &str) -> Result<PlumbingGraph, GraphError> {
    let mut weights: Option<Vec<i64>> = None;
    let mut edges: Option<Vec<(usize, usize)>> = None;
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(':').ok_or_else(|| {
            GraphError::Parse(format!("line {}: expected `key: ...`", lineno + 1))
        })?;
        match key.trim() {
            "vertices" => {
                let ws = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| {
                            GraphError::Parse(format!("line {}: bad weight `{t}`", lineno + 1))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if weights.replace(ws).is_some() {
                    return Err(GraphError::Parse("repeated `vertices:` line".into()));
                }
            }
            "edges" => {
                let es = rest
                    .split_whitespace()
                    .map(|t| parse_edge(t, lineno + 1))
                    .collect::<Result<Vec<_>, _>>()?;
                if edges.replace(es).is_some() {
                    return Err(GraphError::Parse("repeated `edges:` line".into()));
                }
            }
            other => {
                return Err(GraphError::Parse(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    let weights = weights.ok_or_else(|| GraphError::Parse("missing `vertices:` line".into()))?;
    PlumbingGraph::build(&weights, &edges.unwrap_or_default())
}

fn parse_edge(token: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let bad = || GraphError::Parse(format!("line {lineno}: bad edge `{token}`"));
    let (a, b) = token.split_once('-').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

pub fn to_json(g: &PlumbingGraph) -> String {
    serde_json::to_string(&GraphJson::from_graph(g)).expect("plain data serializes")
}

pub fn to_text(g: &PlumbingGraph) -> String {
    let (weights, edges) = g.to_indexed();
    let ws: Vec<String> = weights.iter().map(i64::to_string).collect();
    let es: Vec<String> = edges.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    let mut out = String::new();
    out.push_str("vertices:");
    if !ws.is_empty() {
        out.push(' ');
        out.push_str(&ws.join(" "));
    }
    out.push_str("\nedges:");
    if !es.is_empty() {
        out.push(' ');
        out.push_str(&es.join(" "));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use proptest::prelude::*;

    #[test]
    fn text_with_comments() {
        let src = "# sigma(2,3,7)\n  vertices:  -1 -2 -3   -7 # weights\nedges: 0-1 0-2\t0-3\n";
        let g = parse_graph(src).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn json_input() {
        let g = parse_graph(r#" {"weights": [-2, -2], "edges": [[0, 1]]}"#).unwrap();
        assert_eq!(g.to_indexed(), (vec![-2, -2], vec![(0, 1)]));
    }

    #[test]
    fn empty_graph_both_formats() {
        assert!(parse_graph("vertices:\nedges:\n").unwrap().is_empty());
        assert!(parse_graph(r#"{"weights":[],"edges":[]}"#)
            .unwrap()
            .is_empty());
        assert_eq!(
            to_json(&PlumbingGraph::empty()),
            r#"{"weights":[],"edges":[]}"#
        );
    }

    #[test]
    fn missing_edges_line_is_edgeless() {
        let g = parse_graph("vertices: 0").unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_graph("edges: 0-1"),
            Err(GraphError::Parse(_))
        ));
        assert!(matches!(
            parse_graph("vertices: a"),
            Err(GraphError::Parse(_))
        ));
        assert!(matches!(
            parse_graph("vertices: 1 2\nedges: 0_1"),
            Err(GraphError::Parse(_))
        ));
        assert!(matches!(
            parse_graph("colour: red"),
            Err(GraphError::Parse(_))
        ));
        assert!(matches!(
            parse_graph("{\"weights\": 3}"),
            Err(GraphError::Parse(_))
        ));
        assert_eq!(
            parse_graph("vertices: 1 2 3\nedges: 0-1 1-2 2-0"),
            Err(GraphError::Cycle(2, 0))
        );
    }

    fn arb_tree() -> impl Strategy<Value = PlumbingGraph> {
        (0usize..12).prop_flat_map(|n| {
            let weights = proptest::collection::vec(-9i64..9, n);
            let parents: Vec<_> = (1..n.max(1)).map(|i| 0..i).collect();
            (weights, parents).prop_map(|(w, p)| {
                let edges: Vec<_> = p
                    .into_iter()
                    .enumerate()
                    .map(|(i, par)| (par, i + 1))
                    .filter(|&(_, c)| c < w.len())
                    .collect();
                PlumbingGraph::build(&w, &edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trips(g in arb_tree()) {
            let t = parse_graph(&to_text(&g)).unwrap();
            let j = parse_graph(&to_json(&g)).unwrap();
            prop_assert!(isomorphic(&g, &t));
            prop_assert!(isomorphic(&g, &j));
            prop_assert_eq!(t.to_indexed(), g.to_indexed());
        }
    }
}
