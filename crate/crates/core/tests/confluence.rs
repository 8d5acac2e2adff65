//! Site-order independence of reduction.
//!
//! It fails for this move set: blowing down either end of (-1, 0, -1) gives
//! a different terminal graph. The all-orders check below is kept and
//! ignored; the counterexamples are pinned, and what does hold (|det| and
//! the terminal set containing the deterministic result) is checked.

mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::Signed;
use plumbing_core::calculus::applicable_moves;
use plumbing_core::form;
use plumbing_core::{canonical_code, reduce_to_normal_form, PlumbingGraph};

/// Canonical codes of every fixed point reachable from `g`.
fn terminal_forms(g: &PlumbingGraph) -> BTreeSet<Vec<u8>> {
    let mut terminals = BTreeSet::new();
    let mut seen = HashMap::new();
    let mut queue = VecDeque::from([g.clone()]);
    while let Some(cur) = queue.pop_front() {
        let code = canonical_code(&cur).code;
        if seen.insert(code.clone(), ()).is_some() {
            continue;
        }
        let next = applicable_moves(&cur);
        if next.is_empty() {
            terminals.insert(code);
        }
        queue.extend(next.into_iter().map(|(h, _)| h));
    }
    terminals
}

fn all_trees(max_n: usize, weights: &[i64], mut f: impl FnMut(&PlumbingGraph)) {
    fn rec(
        n: usize,
        edges: &mut Vec<(usize, usize)>,
        weights: &[i64],
        f: &mut dyn FnMut(&PlumbingGraph),
    ) {
        let i = edges.len() + 1;
        if i == n {
            let mut w = vec![0usize; n];
            loop {
                let ws: Vec<i64> = w.iter().map(|&k| weights[k]).collect();
                f(&PlumbingGraph::build(&ws, edges).unwrap());
                let mut k = 0;
                while k < n && w[k] == weights.len() - 1 {
                    w[k] = 0;
                    k += 1;
                }
                if k == n {
                    return;
                }
                w[k] += 1;
            }
        }
        // nondecreasing parent sequences: every tree has such a (BFS) labeling
        for p in edges.last().map_or(0, |e| e.0)..i {
            edges.push((p, i));
            rec(n, edges, weights, f);
            edges.pop();
        }
    }
    for n in 1..=max_n {
        rec(n, &mut Vec::new(), weights, &mut f);
    }
}

#[test]
fn counterexamples_to_order_independence() {
    let code = |w: &[i64]| canonical_code(&PlumbingGraph::chain(w)).code;
    let a = terminal_forms(&PlumbingGraph::chain(&[-1, 0, -1]));
    assert_eq!(a, BTreeSet::from([code(&[2]), code(&[-2])]));
    let b = terminal_forms(&PlumbingGraph::chain(&[-1, -1, -1]));
    assert_eq!(b, BTreeSet::from([code(&[1]), code(&[0, 0])]));
}

#[test]
fn what_does_hold_small_trees() {
    all_trees(5, &[-3, -2, -1, 0, 1], |g| {
        let det = form::determinant(g).abs();
        let terminals = terminal_forms(g);
        let ours = reduce_to_normal_form(g).final_graph;
        assert!(terminals.contains(&canonical_code(&ours).code));
        assert_eq!(form::determinant(&ours).abs(), det);
    });
}

#[test]
#[ignore = "order independence is false for this move set; see counterexamples test"]
fn reduction_is_order_independent_up_to_9_vertices() {
    let mut failures = 0usize;
    all_trees(9, &[-3, -2, -1, 0, 1], |g| {
        if terminal_forms(g).len() != 1 {
            failures += 1;
        }
    });
    assert_eq!(failures, 0);
}
