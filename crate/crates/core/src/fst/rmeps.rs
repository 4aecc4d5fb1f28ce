//! Epsilon removal. The contract is extensional: the result relates the same
//! (input, output) pairs at the same minimum weights, but contains no
//! epsilon:epsilon arcs. Arcs with a label on exactly one side are kept.

use super::{Arc, Fst, EPSILON};

/// Remove epsilon:epsilon arcs and trim. Path semantics are preserved; the
/// state graph is not (parallel epsilon routes collapse onto their cheapest
/// representative).
pub fn rmepsilon_optimize(f: &Fst) -> Fst {
    let Some(start) = f.start() else { return Fst::new() };
    let n = f.num_states();

    let mut out = Fst::new();
    for _ in 0..n {
        out.add_state();
    }
    out.set_start(start);

    for s in 0..n {
        let closure = eps_closure(f, s);
        let mut final_w: Option<f64> = None;
        for &(t, d) in &closure {
            if let Some(fw) = f.final_weight(t) {
                let w = d + fw;
                final_w = Some(final_w.map_or(w, |cur: f64| cur.min(w)));
            }
            for arc in f.arcs(t) {
                if arc.ilabel == EPSILON && arc.olabel == EPSILON {
                    continue;
                }
                out.add_arc(s, Arc::new(arc.ilabel, arc.olabel, d + arc.weight, arc.nextstate));
            }
        }
        if let Some(w) = final_w {
            out.set_final(s, w);
        }
    }

    dedup_arcs(&mut out);
    out.connect()
}

/// States reachable from `s` via epsilon:epsilon arcs with their minimum
/// epsilon-path weight, in discovery order. Relaxation runs only over the
/// epsilon-reachable subgraph, which is small in practice. Epsilon cycles
/// converge because relaxation is monotone for nonnegative cycles, and
/// grammar construction never produces negative ones.
fn eps_closure(f: &Fst, s: usize) -> Vec<(usize, f64)> {
    let is_eps = |arc: &Arc| arc.ilabel == EPSILON && arc.olabel == EPSILON;

    let mut nodes: Vec<usize> = vec![s];
    let mut idx: std::collections::HashMap<usize, usize> = [(s, 0)].into_iter().collect();
    let mut stack = vec![s];
    while let Some(t) = stack.pop() {
        for arc in f.arcs(t) {
            if is_eps(arc) && !idx.contains_key(&arc.nextstate) {
                idx.insert(arc.nextstate, nodes.len());
                nodes.push(arc.nextstate);
                stack.push(arc.nextstate);
            }
        }
    }

    let m = nodes.len();
    let mut dist = vec![f64::INFINITY; m];
    dist[0] = 0.0;
    for _ in 0..=m {
        let mut changed = false;
        for (i, &t) in nodes.iter().enumerate() {
            if dist[i].is_infinite() {
                continue;
            }
            for arc in f.arcs(t) {
                if is_eps(arc) {
                    let j = idx[&arc.nextstate];
                    let nd = dist[i] + arc.weight;
                    if nd < dist[j] - 1e-15 {
                        dist[j] = nd;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    nodes.into_iter().zip(dist).collect()
}

/// Merge duplicate (ilabel, olabel, nextstate) arcs, keeping the minimum
/// weight. Keeps the expanded closure from ballooning the arc count.
fn dedup_arcs(f: &mut Fst) {
    for s in 0..f.num_states() {
        let arcs = f.arcs_mut(s);
        arcs.sort_by(|x, y| {
            (x.ilabel, x.olabel, x.nextstate)
                .cmp(&(y.ilabel, y.olabel, y.nextstate))
                .then(x.weight.total_cmp(&y.weight))
        });
        arcs.dedup_by(|next, prev| {
            (prev.ilabel, prev.olabel, prev.nextstate) == (next.ilabel, next.olabel, next.nextstate)
        });
    }
}

#[cfg(test)]
mod tests {
    use super::super::{compose, literal, nshortest, optional, union, weighted, EPSILON};
    use super::*;

    #[test]
    fn optional_literal_still_accepts_both() {
        let f = rmepsilon_optimize(&optional(&literal("a")));
        let paths = nshortest(&f, 10).unwrap();
        let mut outs: Vec<String> = paths.iter().map(|p| p.output.clone()).collect();
        outs.sort();
        assert_eq!(outs, vec!["", "a"]);
        assert!(paths.iter().all(|p| p.weight == 0.0));
    }

    #[test]
    fn no_epsilon_epsilon_arcs_remain() {
        let f = union(&optional(&literal("ab")), &weighted(&literal("b"), 1.0));
        let r = rmepsilon_optimize(&f);
        for s in r.states() {
            for arc in r.arcs(s) {
                assert!(!(arc.ilabel == EPSILON && arc.olabel == EPSILON));
            }
        }
    }

    #[test]
    fn parallel_epsilon_routes_keep_min_weight() {
        let f = union(&weighted(&literal("a"), 2.0), &weighted(&literal("a"), 0.5));
        let r = rmepsilon_optimize(&f);
        let paths = nshortest(&r, 1).unwrap();
        assert!((paths[0].weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn composition_unchanged_by_optimization() {
        let v = union(&optional(&literal("x")), &literal("xy"));
        let probe = literal("xy");
        let before = nshortest(&compose(&probe, &v), 10).unwrap();
        let after = nshortest(&compose(&probe, &rmepsilon_optimize(&v)), 10).unwrap();
        assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(after.iter()) {
            assert_eq!(a.input, b.input);
            assert_eq!(a.output, b.output);
            assert!((a.weight - b.weight).abs() < 1e-9);
        }
    }
}
