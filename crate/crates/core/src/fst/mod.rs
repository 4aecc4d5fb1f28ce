//! Weighted finite-state transducers over the tropical semiring.
//!
//! Labels are Unicode codepoints with `0` reserved for epsilon. Weights are
//! `f64` combined by `min` across alternative paths and by `+` along a path
//! (lower is better; `one` is `0.0`, `zero` is `+inf`). Transducers are
//! immutable once built: every algorithm here is a pure function producing a
//! new `Fst`, so compiled grammars can be shared freely across workers.

use std::fmt;

use thiserror::Error;

mod build;
mod compose;
mod rmeps;
mod shortest;
mod text;

pub use build::{concat, cross, cross_fst, literal, optional, star, union, union_all, weighted};
pub use compose::{compose, compose_nonempty};
pub use rmeps::rmepsilon_optimize;
pub use shortest::nshortest;
pub use text::{deserialize, serialize};

/// State identifier within a single transducer.
pub type StateId = usize;

/// Arc label: a Unicode codepoint, or [`EPSILON`].
pub type Label = u32;

/// The reserved empty label. Never a valid codepoint label.
pub const EPSILON: Label = 0;

#[derive(Debug, Error)]
pub enum FstError {
    #[error("operation requires an acyclic transducer but a cycle was found")]
    CyclicInput,
    #[error("negative-weight epsilon cycle encountered during epsilon removal")]
    NegativeEpsilonCycle,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A single weighted transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: f64,
    pub nextstate: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: f64, nextstate: StateId) -> Self {
        Arc { ilabel, olabel, weight, nextstate }
    }
}

/// A complete accepting path: label sequences with epsilons removed, plus the
/// tropical product (sum) of arc weights and the final weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub input: String,
    pub output: String,
    pub weight: f64,
}

/// A weighted finite-state transducer.
///
/// States are dense indices; each holds its outgoing arcs and an optional
/// final weight. An `Fst` with no states denotes the empty relation.
#[derive(Debug, Clone, Default)]
pub struct Fst {
    start: Option<StateId>,
    arcs: Vec<Vec<Arc>>,
    finals: Vec<Option<f64>>,
}

impl Fst {
    pub fn new() -> Self {
        Fst::default()
    }

    /// An Fst accepting exactly the empty string with weight 0 on both tapes.
    pub fn empty_string() -> Self {
        let mut f = Fst::new();
        let s = f.add_state();
        f.set_start(s);
        f.set_final(s, 0.0);
        f
    }

    /// Identity acceptor for `s` with weight 0.
    pub fn acceptor(s: &str) -> Self {
        literal(s)
    }

    pub fn add_state(&mut self) -> StateId {
        self.arcs.push(Vec::new());
        self.finals.push(None);
        self.arcs.len() - 1
    }

    pub fn set_start(&mut self, s: StateId) {
        debug_assert!(s < self.num_states());
        self.start = Some(s);
    }

    pub fn set_final(&mut self, s: StateId, weight: f64) {
        debug_assert!(s < self.num_states());
        self.finals[s] = Some(weight);
    }

    pub fn add_arc(&mut self, src: StateId, arc: Arc) {
        debug_assert!(src < self.num_states() && arc.nextstate < self.num_states());
        self.arcs[src].push(arc);
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.arcs[s]
    }

    pub fn final_weight(&self, s: StateId) -> Option<f64> {
        self.finals[s]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.num_states()
    }

    /// Whether the transducer has at least one accepting path.
    pub fn has_paths(&self) -> bool {
        let Some(start) = self.start else { return false };
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(s) = stack.pop() {
            if self.finals[s].is_some() {
                return true;
            }
            for arc in &self.arcs[s] {
                if !seen[arc.nextstate] {
                    seen[arc.nextstate] = true;
                    stack.push(arc.nextstate);
                }
            }
        }
        false
    }

    /// Swap input and output labels on every arc.
    pub fn invert(&self) -> Fst {
        let mut out = self.clone();
        for arcs in &mut out.arcs {
            for arc in arcs {
                std::mem::swap(&mut arc.ilabel, &mut arc.olabel);
            }
        }
        out
    }

    /// Copy the chosen side's labels onto both tapes, yielding an acceptor.
    pub fn project(&self, side: ProjectSide) -> Fst {
        let mut out = self.clone();
        for arcs in &mut out.arcs {
            for arc in arcs {
                match side {
                    ProjectSide::Input => arc.olabel = arc.ilabel,
                    ProjectSide::Output => arc.ilabel = arc.olabel,
                }
            }
        }
        out
    }

    /// Drop states that are not both reachable from the start and able to
    /// reach a final state. State ids are renumbered in ascending old-id
    /// order, so the result is deterministic.
    pub fn connect(&self) -> Fst {
        let n = self.num_states();
        let Some(start) = self.start else { return Fst::new() };

        let mut fwd = vec![false; n];
        let mut stack = vec![start];
        fwd[start] = true;
        while let Some(s) = stack.pop() {
            for arc in &self.arcs[s] {
                if !fwd[arc.nextstate] {
                    fwd[arc.nextstate] = true;
                    stack.push(arc.nextstate);
                }
            }
        }

        // Backward reachability over reversed arcs.
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for s in 0..n {
            for arc in &self.arcs[s] {
                rev[arc.nextstate].push(s);
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<StateId> =
            (0..n).filter(|&s| self.finals[s].is_some()).collect();
        for &s in &stack {
            bwd[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !bwd[p] {
                    bwd[p] = true;
                    stack.push(p);
                }
            }
        }

        let mut map = vec![usize::MAX; n];
        let mut out = Fst::new();
        for s in 0..n {
            if fwd[s] && bwd[s] {
                map[s] = out.add_state();
            }
        }
        if map[start] == usize::MAX {
            return Fst::new();
        }
        out.set_start(map[start]);
        for s in 0..n {
            if map[s] == usize::MAX {
                continue;
            }
            if let Some(w) = self.finals[s] {
                out.set_final(map[s], w);
            }
            for arc in &self.arcs[s] {
                if map[arc.nextstate] != usize::MAX {
                    out.add_arc(map[s], Arc::new(arc.ilabel, arc.olabel, arc.weight, map[arc.nextstate]));
                }
            }
        }
        out
    }

    /// Topological order of all states, or `None` if the transducer is cyclic.
    pub fn topological_order(&self) -> Option<Vec<StateId>> {
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for s in 0..n {
            for arc in &self.arcs[s] {
                indegree[arc.nextstate] += 1;
            }
        }
        let mut queue: Vec<StateId> = (0..n).filter(|&s| indegree[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            order.push(s);
            for arc in &self.arcs[s] {
                indegree[arc.nextstate] -= 1;
                if indegree[arc.nextstate] == 0 {
                    queue.push(arc.nextstate);
                }
            }
        }
        if order.len() == n {
            Some(order)
        } else {
            None
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Which tape [`Fst::project`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectSide {
    Input,
    Output,
}

impl fmt::Display for Fst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fst({} states, {} arcs)", self.num_states(), self.num_arcs())
    }
}

pub(crate) fn label_of(c: char) -> Label {
    let l = c as Label;
    debug_assert_ne!(l, EPSILON, "NUL is not a usable label");
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_swaps_tapes() {
        let f = cross("a", "b");
        let inv = f.invert();
        let paths = nshortest(&inv, 4).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "b");
        assert_eq!(paths[0].output, "a");
        assert_eq!(paths[0].weight, 0.0);
    }

    #[test]
    fn project_output_keeps_output_labels() {
        let f = cross("a", "b");
        let p = f.project(ProjectSide::Output);
        let paths = nshortest(&p, 4).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "b");
        assert_eq!(paths[0].output, "b");
    }

    #[test]
    fn connect_drops_dead_states() {
        let mut f = Fst::new();
        let s0 = f.add_state();
        let s1 = f.add_state();
        let dead = f.add_state();
        f.set_start(s0);
        f.add_arc(s0, Arc::new('a' as Label, 'a' as Label, 0.0, s1));
        f.add_arc(s0, Arc::new('b' as Label, 'b' as Label, 0.0, dead));
        f.set_final(s1, 0.0);
        let c = f.connect();
        assert_eq!(c.num_states(), 2);
        assert!(c.has_paths());
    }

    #[test]
    fn empty_fst_has_no_paths() {
        assert!(!Fst::new().has_paths());
    }
}
