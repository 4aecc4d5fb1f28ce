//! Rational-operation constructors: literals, cross products, union,
//! concatenation, optional, star, and weight attachment. Thompson-style
//! epsilon wiring; callers that care about epsilon-free output run
//! [`rmepsilon_optimize`](super::rmepsilon_optimize) afterwards.

use super::{label_of, Arc, Fst, StateId, EPSILON};

/// Identity acceptor mapping `s` to itself with weight 0.
pub fn literal(s: &str) -> Fst {
    let mut f = Fst::new();
    let mut cur = f.add_state();
    f.set_start(cur);
    for c in s.chars() {
        let next = f.add_state();
        let l = label_of(c);
        f.add_arc(cur, Arc::new(l, l, 0.0, next));
        cur = next;
    }
    f.set_final(cur, 0.0);
    f
}

/// Transducer mapping exactly `input` to `output` with weight 0.
pub fn cross(input: &str, output: &str) -> Fst {
    cross_fst(&literal(input), &literal(output))
}

/// Cross product of two transducers' languages: accepts any input string of
/// `a` (input side) and emits any output string of `b` (output side),
/// combining weights. Realized as "read a, emit nothing" followed by
/// "read nothing, emit b".
pub fn cross_fst(a: &Fst, b: &Fst) -> Fst {
    let mut left = a.clone();
    for s in 0..left.num_states() {
        for arc in &mut left.arcs[s] {
            arc.olabel = EPSILON;
        }
    }
    let mut right = b.clone();
    for s in 0..right.num_states() {
        for arc in &mut right.arcs[s] {
            arc.ilabel = EPSILON;
        }
    }
    concat(&left, &right)
}

/// Copy `src` into `dst`, returning the state-id offset.
fn splice(dst: &mut Fst, src: &Fst) -> usize {
    let offset = dst.num_states();
    for _ in 0..src.num_states() {
        dst.add_state();
    }
    for s in 0..src.num_states() {
        for arc in src.arcs(s) {
            dst.add_arc(offset + s, Arc::new(arc.ilabel, arc.olabel, arc.weight, offset + arc.nextstate));
        }
    }
    offset
}

pub fn union(a: &Fst, b: &Fst) -> Fst {
    union_all(&[a, b])
}

pub fn union_all(parts: &[&Fst]) -> Fst {
    let mut out = Fst::new();
    let start = out.add_state();
    out.set_start(start);
    for part in parts {
        let Some(pstart) = part.start() else { continue };
        let offset = splice(&mut out, part);
        out.add_arc(start, Arc::new(EPSILON, EPSILON, 0.0, offset + pstart));
        for s in 0..part.num_states() {
            if let Some(w) = part.final_weight(s) {
                out.set_final(offset + s, w);
            }
        }
    }
    out
}

pub fn concat(a: &Fst, b: &Fst) -> Fst {
    let (Some(astart), Some(bstart)) = (a.start(), b.start()) else {
        return Fst::new();
    };
    let mut out = Fst::new();
    let aoff = splice(&mut out, a);
    let boff = splice(&mut out, b);
    out.set_start(aoff + astart);
    for s in 0..a.num_states() {
        if let Some(w) = a.final_weight(s) {
            out.add_arc(aoff + s, Arc::new(EPSILON, EPSILON, w, boff + bstart));
        }
    }
    for s in 0..b.num_states() {
        if let Some(w) = b.final_weight(s) {
            out.set_final(boff + s, w);
        }
    }
    out
}

/// `f` or the empty string: `union(f, empty-string identity)`.
pub fn optional(f: &Fst) -> Fst {
    union(f, &Fst::empty_string())
}

/// Kleene closure: zero or more repetitions of `f`.
pub fn star(f: &Fst) -> Fst {
    let mut out = Fst::new();
    let start = out.add_state();
    out.set_start(start);
    out.set_final(start, 0.0);
    let Some(fstart) = f.start() else { return out };
    let offset = splice(&mut out, f);
    out.add_arc(start, Arc::new(EPSILON, EPSILON, 0.0, offset + fstart));
    for s in 0..f.num_states() {
        if let Some(w) = f.final_weight(s) {
            out.add_arc(offset + s, Arc::new(EPSILON, EPSILON, w, start));
        }
    }
    out
}

/// Multiply (tropical: add) `w` onto every path of `f`.
pub fn weighted(f: &Fst, w: f64) -> Fst {
    let mut out = f.clone();
    for s in 0..out.num_states() {
        if let Some(fw) = out.finals[s] {
            out.finals[s] = Some(fw + w);
        }
    }
    out
}

// Mutable arc access for sibling transforms (epsilon removal).
impl Fst {
    pub(super) fn arcs_mut(&mut self, s: StateId) -> &mut Vec<Arc> {
        &mut self.arcs[s]
    }
}

#[cfg(test)]
mod tests {
    use super::super::nshortest;
    use super::*;

    fn outputs(f: &Fst) -> Vec<String> {
        let mut v: Vec<String> = nshortest(&f.connect(), 100)
            .unwrap()
            .into_iter()
            .map(|p| p.output)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn cross_empty_input_inserts() {
        let f = cross("", " ");
        let paths = nshortest(&f, 4).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "");
        assert_eq!(paths[0].output, " ");
    }

    #[test]
    fn union_of_literals() {
        let f = union(&literal("a"), &literal("b"));
        assert_eq!(outputs(&f), vec!["a", "b"]);
    }

    #[test]
    fn concat_of_literals() {
        let f = concat(&concat(&literal("ab"), &literal("c")), &literal("d"));
        assert_eq!(outputs(&f), vec!["abcd"]);
    }

    #[test]
    fn optional_accepts_empty() {
        let f = optional(&literal("a"));
        assert_eq!(outputs(&f), vec!["", "a"]);
    }

    #[test]
    fn star_accepts_repetitions() {
        use super::super::compose;
        let f = star(&literal("ab"));
        for accepted in ["", "ab", "abab", "ababab"] {
            assert!(compose(&literal(accepted), &f).has_paths(), "{accepted:?}");
        }
        for rejected in ["a", "aba", "ba"] {
            assert!(!compose(&literal(rejected), &f).has_paths(), "{rejected:?}");
        }
    }

    #[test]
    fn weighted_adds_to_path_weight() {
        let f = weighted(&literal("a"), 2.5);
        let paths = nshortest(&f, 1).unwrap();
        assert_eq!(paths[0].weight, 2.5);
    }
}
