//! Composition of weighted transducers with an epsilon-matching filter.
//!
//! The filter prevents the classic epsilon redundancy problem: when `a` has
//! output-epsilons and `b` has input-epsilons at the same point, the
//! interleavings of "advance a", "advance b", and "advance both" would
//! otherwise multiply paths. Filter states: 0 = free, 1 = committed to
//! consuming b-side epsilons, 2 = committed to a-side epsilons. A joint
//! epsilon match is only allowed from state 0.

use std::collections::HashMap;

use super::{Arc, Fst, StateId, EPSILON};

type FilterState = u8;
const FILTER_FREE: FilterState = 0;
const FILTER_B_EPS: FilterState = 1;
const FILTER_A_EPS: FilterState = 2;

/// Compose `a` with `b`: the result relates `u` to `v` with weight
/// `min over w of (weight of u:w in a + weight of w:v in b)`, where `w`
/// ranges over strings on a's output / b's input tape. The result is
/// trimmed; an empty `Fst` means no paths align.
pub fn compose(a: &Fst, b: &Fst) -> Fst {
    let (Some(astart), Some(bstart)) = (a.start(), b.start()) else {
        return Fst::new();
    };

    let mut out = Fst::new();
    let mut ids: HashMap<(StateId, StateId, FilterState), StateId> = HashMap::new();
    let mut queue: Vec<(StateId, StateId, FilterState)> = Vec::new();

    let start_key = (astart, bstart, FILTER_FREE);
    let start_id = out.add_state();
    out.set_start(start_id);
    ids.insert(start_key, start_id);
    queue.push(start_key);

    let mut head = 0;
    while head < queue.len() {
        let key @ (sa, sb, fs) = queue[head];
        head += 1;
        let src = ids[&key];

        if let (Some(wa), Some(wb)) = (a.final_weight(sa), b.final_weight(sb)) {
            out.set_final(src, wa + wb);
        }

        let intern = |ids: &mut HashMap<(StateId, StateId, FilterState), StateId>,
                          queue: &mut Vec<(StateId, StateId, FilterState)>,
                          out: &mut Fst,
                          key: (StateId, StateId, FilterState)| {
            *ids.entry(key).or_insert_with(|| {
                queue.push(key);
                out.add_state()
            })
        };

        // Group b's arcs by input label for the non-epsilon join.
        let mut by_ilabel: HashMap<u32, Vec<&Arc>> = HashMap::new();
        for arc in b.arcs(sb) {
            by_ilabel.entry(arc.ilabel).or_default().push(arc);
        }

        for aa in a.arcs(sa) {
            if aa.olabel == EPSILON {
                // a advances alone; allowed unless committed to the b side.
                if fs != FILTER_B_EPS {
                    let dst = intern(&mut ids, &mut queue, &mut out, (aa.nextstate, sb, FILTER_A_EPS));
                    out.add_arc(src, Arc::new(aa.ilabel, EPSILON, aa.weight, dst));
                }
                // Joint epsilon match, only from the free state.
                if fs == FILTER_FREE {
                    for ba in by_ilabel.get(&EPSILON).map(Vec::as_slice).unwrap_or(&[]) {
                        let dst =
                            intern(&mut ids, &mut queue, &mut out, (aa.nextstate, ba.nextstate, FILTER_FREE));
                        out.add_arc(src, Arc::new(aa.ilabel, ba.olabel, aa.weight + ba.weight, dst));
                    }
                }
            } else {
                for ba in by_ilabel.get(&aa.olabel).map(Vec::as_slice).unwrap_or(&[]) {
                    let dst =
                        intern(&mut ids, &mut queue, &mut out, (aa.nextstate, ba.nextstate, FILTER_FREE));
                    out.add_arc(src, Arc::new(aa.ilabel, ba.olabel, aa.weight + ba.weight, dst));
                }
            }
        }
        // b advances alone on an input epsilon; allowed unless committed to a.
        if fs != FILTER_A_EPS {
            for ba in b.arcs(sb).iter().filter(|ba| ba.ilabel == EPSILON) {
                let dst = intern(&mut ids, &mut queue, &mut out, (sa, ba.nextstate, FILTER_B_EPS));
                out.add_arc(src, Arc::new(EPSILON, ba.olabel, ba.weight, dst));
            }
        }
    }

    out.connect()
}

/// Whether `compose(a, b)` has at least one accepting path, without
/// materializing the whole product. Used for cheap coverage tests.
pub fn compose_nonempty(a: &Fst, b: &Fst) -> bool {
    let (Some(astart), Some(bstart)) = (a.start(), b.start()) else {
        return false;
    };
    let mut seen: HashMap<(StateId, StateId, FilterState), ()> = HashMap::new();
    let mut stack = vec![(astart, bstart, FILTER_FREE)];
    seen.insert(stack[0], ());
    while let Some((sa, sb, fs)) = stack.pop() {
        if a.final_weight(sa).is_some() && b.final_weight(sb).is_some() {
            return true;
        }
        let push = |seen: &mut HashMap<(StateId, StateId, FilterState), ()>,
                        stack: &mut Vec<(StateId, StateId, FilterState)>,
                        key: (StateId, StateId, FilterState)| {
            if seen.insert(key, ()).is_none() {
                stack.push(key);
            }
        };
        for aa in a.arcs(sa) {
            if aa.olabel == EPSILON {
                if fs != FILTER_B_EPS {
                    push(&mut seen, &mut stack, (aa.nextstate, sb, FILTER_A_EPS));
                }
                if fs == FILTER_FREE {
                    for ba in b.arcs(sb).iter().filter(|ba| ba.ilabel == EPSILON) {
                        push(&mut seen, &mut stack, (aa.nextstate, ba.nextstate, FILTER_FREE));
                    }
                }
            } else {
                for ba in b.arcs(sb).iter().filter(|ba| ba.ilabel == aa.olabel) {
                    push(&mut seen, &mut stack, (aa.nextstate, ba.nextstate, FILTER_FREE));
                }
            }
        }
        if fs != FILTER_A_EPS {
            for ba in b.arcs(sb).iter().filter(|ba| ba.ilabel == EPSILON) {
                push(&mut seen, &mut stack, (sa, ba.nextstate, FILTER_B_EPS));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::super::{cross, literal, nshortest, union, weighted};
    use super::*;

    #[test]
    fn weights_add_through_composition() {
        let a = weighted(&cross("a", "b"), 1.0);
        let b = weighted(&cross("b", "c"), 2.0);
        let c = compose(&a, &b);
        let paths = nshortest(&c, 8).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "a");
        assert_eq!(paths[0].output, "c");
        assert!((paths[0].weight - 3.0).abs() < 1e-9);
    }

    #[test]
    fn identity_on_output_side_is_neutral() {
        let a = union(&cross("x", "u"), &cross("y", "vw"));
        let id = union(&literal("u"), &literal("vw"));
        let c = compose(&a, &id);
        let mut got: Vec<(String, String)> = nshortest(&c, 16)
            .unwrap()
            .into_iter()
            .map(|p| (p.input, p.output))
            .collect();
        got.sort();
        assert_eq!(
            got,
            vec![("x".into(), "u".into()), ("y".into(), "vw".into())]
        );
    }

    #[test]
    fn no_alignment_gives_empty_fst(){
        let c = compose(&cross("a", "b"), &cross("z", "c"));
        assert_eq!(c.num_states(), 0);
        assert!(!compose_nonempty(&cross("a", "b"), &cross("z", "c")));
    }

    #[test]
    fn epsilon_insertion_composes() {
        // "" -> " " on the left feeds a space-consuming right side.
        let a = cross("", " ");
        let b = cross(" ", "x");
        let c = compose(&a, &b);
        let paths = nshortest(&c, 4).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "");
        assert_eq!(paths[0].output, "x");
    }

    #[test]
    fn nonempty_check_agrees_with_compose() {
        let a = union(&cross("ab", "xy"), &cross("cd", "z"));
        let b = literal("xy");
        assert!(compose_nonempty(&a, &b));
        assert!(compose(&a, &b).has_paths());
        let b2 = literal("zz");
        assert!(!compose_nonempty(&a, &b2));
        assert!(!compose(&a, &b2).has_paths());
    }
}
