//! N-shortest-path enumeration for acyclic transducers.
//!
//! Paths come out in nondecreasing weight order with ties broken
//! lexicographically on (output string, input string). Rather than
//! collecting whole tie groups (which explodes on unweighted grammars where
//! every path ties at 0), the search queue is ordered by the full key
//! `(weight bound, output prefix, input prefix)`. A completed path's label
//! key gets a virtual terminator that sorts below every codepoint, which
//! makes the priority monotone along expansions: prefixes pop before their
//! extensions, and extensions sort after the finished path. Best-first
//! search with a monotone priority pops completed paths in exactly the
//! required order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Fst, FstError, Path, StateId, EPSILON};

/// Virtual end-of-string marker; sorts before every real label.
const TERM: u32 = 0;

struct QueueItem {
    /// Weight so far plus the exact minimum completion weight.
    bound: f64,
    /// Output labels so far; completed items carry a trailing [`TERM`].
    out_key: Vec<u32>,
    in_key: Vec<u32>,
    weight: f64,
    state: Option<StateId>, // None once completed
    seq: u64,
}

impl QueueItem {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| self.out_key.cmp(&other.out_key))
            .then_with(|| self.in_key.cmp(&other.in_key))
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialEq for QueueItem {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueItem {}
impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse for min-first.
        self.key_cmp(other).reverse()
    }
}

/// The `n` minimum-weight accepting paths of `f`.
///
/// `f` must be acyclic (candidate lattices are by construction); cyclic
/// input is rejected with [`FstError::CyclicInput`].
pub fn nshortest(f: &Fst, n: usize) -> Result<Vec<Path>, FstError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let trimmed = f.connect();
    let Some(start) = trimmed.start() else {
        return Ok(Vec::new());
    };
    let order = trimmed.topological_order().ok_or(FstError::CyclicInput)?;

    // Exact min completion weight per state, by reverse topological sweep.
    let mut h = vec![f64::INFINITY; trimmed.num_states()];
    for &s in order.iter().rev() {
        let mut best = trimmed.final_weight(s).unwrap_or(f64::INFINITY);
        for arc in trimmed.arcs(s) {
            best = best.min(arc.weight + h[arc.nextstate]);
        }
        h[s] = best;
    }
    if h[start].is_infinite() {
        return Ok(Vec::new());
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(QueueItem {
        bound: h[start],
        out_key: Vec::new(),
        in_key: Vec::new(),
        weight: 0.0,
        state: Some(start),
        seq,
    });

    let mut results = Vec::with_capacity(n);
    while let Some(item) = heap.pop() {
        let Some(state) = item.state else {
            results.push(Path {
                input: decode_key(&item.in_key),
                output: decode_key(&item.out_key),
                weight: item.weight,
            });
            if results.len() == n {
                break;
            }
            continue;
        };

        if let Some(fw) = trimmed.final_weight(state) {
            let mut out_key = item.out_key.clone();
            out_key.push(TERM);
            let mut in_key = item.in_key.clone();
            in_key.push(TERM);
            seq += 1;
            heap.push(QueueItem {
                bound: item.weight + fw,
                out_key,
                in_key,
                weight: item.weight + fw,
                state: None,
                seq,
            });
        }
        for arc in trimmed.arcs(state) {
            if h[arc.nextstate].is_infinite() {
                continue;
            }
            let mut out_key = item.out_key.clone();
            if arc.olabel != EPSILON {
                out_key.push(arc.olabel);
            }
            let mut in_key = item.in_key.clone();
            if arc.ilabel != EPSILON {
                in_key.push(arc.ilabel);
            }
            let weight = item.weight + arc.weight;
            seq += 1;
            heap.push(QueueItem {
                bound: weight + h[arc.nextstate],
                out_key,
                in_key,
                weight,
                state: Some(arc.nextstate),
                seq,
            });
        }
    }
    Ok(results)
}

fn decode_key(key: &[u32]) -> String {
    key.iter()
        .take_while(|&&l| l != TERM)
        .map(|&l| char::from_u32(l).expect("valid codepoint"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{concat, cross, literal, union, weighted, Arc, Fst};
    use super::*;

    #[test]
    fn single_path_fst_returns_it_once() {
        let f = cross("ab", "xy");
        let paths = nshortest(&f, 5).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "ab");
        assert_eq!(paths[0].output, "xy");
    }

    #[test]
    fn diamond_prefers_lower_weight() {
        let f = union(&weighted(&cross("a", "x"), 2.0), &weighted(&cross("a", "y"), 1.0));
        let paths = nshortest(&f, 1).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].output, "y");
        assert!((paths[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_on_output_then_input() {
        let f = union(
            &union(&cross("b", "z"), &cross("a", "z")),
            &union(&cross("q", "y"), &cross("c", "z")),
        );
        let paths = nshortest(&f, 4).unwrap();
        let got: Vec<(String, String)> =
            paths.into_iter().map(|p| (p.output, p.input)).collect();
        assert_eq!(
            got,
            vec![
                ("y".into(), "q".into()),
                ("z".into(), "a".into()),
                ("z".into(), "b".into()),
                ("z".into(), "c".into()),
            ]
        );
    }

    #[test]
    fn completed_prefix_sorts_before_extensions() {
        let f = union(&literal("ab"), &literal("abc"));
        let paths = nshortest(&f, 2).unwrap();
        assert_eq!(paths[0].output, "ab");
        assert_eq!(paths[1].output, "abc");
    }

    #[test]
    fn cyclic_input_is_rejected() {
        let mut f = Fst::new();
        let s = f.add_state();
        f.set_start(s);
        f.set_final(s, 0.0);
        f.add_arc(s, Arc::new('a' as u32, 'a' as u32, 1.0, s));
        assert!(matches!(nshortest(&f, 3), Err(FstError::CyclicInput)));
    }

    #[test]
    fn weights_are_nondecreasing() {
        let f = union(
            &weighted(&literal("a"), 3.0),
            &union(&weighted(&literal("b"), 1.0), &weighted(&literal("c"), 2.0)),
        );
        let paths = nshortest(&f, 3).unwrap();
        let ws: Vec<f64> = paths.iter().map(|p| p.weight).collect();
        assert_eq!(ws, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn n_larger_than_path_count_returns_all() {
        let f = concat(&union(&literal("a"), &literal("b")), &literal("c"));
        let paths = nshortest(&f, 99).unwrap();
        assert_eq!(paths.len(), 2);
    }
}
