//! Per-token verbalization candidates.
//!
//! For a written token x the candidate set holds the spoken readings the
//! grammar offers for x plus x itself (the pass-through option). Attaching
//! a reference verbalization marks the good subset: the candidates at
//! minimum token-level edit distance from the reference.

use crate::fst::{compose, literal, nshortest, Fst};
use crate::ngram::NgramLm;

/// Candidate verbalizations for one written token.
///
/// Candidates are distinct token sequences in a deterministic order:
/// grammar outputs by (weight, output string, input string), then the
/// pass-through if the grammar did not already produce it.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub written: String,
    pub candidates: Vec<Vec<String>>,
    pub good_mask: Vec<bool>,
    pub pass_through_index: usize,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn is_pass_through(&self, idx: usize) -> bool {
        idx == self.pass_through_index
    }

    /// Indices marked good.
    pub fn good_indices(&self) -> Vec<usize> {
        self.good_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| if g { Some(i) } else { None })
            .collect()
    }
}

/// Generate candidates for `token`: the up-to-`limit` best grammar outputs
/// of `token` composed with `verbalizer`, split on spaces, plus the
/// pass-through. Tokens outside the grammar's domain yield pass-through
/// only.
pub fn verbalize(verbalizer: &Fst, token: &str, limit: usize) -> CandidateSet {
    assert!(limit >= 1);
    let lattice = compose(&literal(token), verbalizer);
    let mut candidates: Vec<Vec<String>> = Vec::new();
    if lattice.has_paths() {
        let paths = nshortest(&lattice, limit).expect("token lattices are acyclic");
        for p in paths {
            let words: Vec<String> = p.output.split_whitespace().map(str::to_string).collect();
            if words.is_empty() {
                continue;
            }
            if !candidates.contains(&words) {
                candidates.push(words);
            }
        }
    }
    let pass_through = vec![token.to_string()];
    let pass_through_index = match candidates.iter().position(|c| *c == pass_through) {
        Some(i) => i,
        None => {
            candidates.push(pass_through);
            candidates.len() - 1
        }
    };
    let n = candidates.len();
    CandidateSet { written: token.to_string(), candidates, good_mask: vec![false; n], pass_through_index }
}

/// Mark the good subset: candidates minimizing token-level edit distance to
/// `reference`.
pub fn good_set(cands: &CandidateSet, reference: &[String]) -> CandidateSet {
    let mut out = cands.clone();
    let dists: Vec<usize> = out
        .candidates
        .iter()
        .map(|c| token_edit_distance(c, reference))
        .collect();
    let min = dists.iter().copied().min().unwrap_or(0);
    out.good_mask = dists.iter().map(|&d| d == min).collect();
    out
}

/// Keep the `k` candidates the language model likes best (pass-through
/// always retained). Equivalent to composing the candidate lattice with the
/// LM and taking the k best; realized as n-best rescoring.
pub fn prune_candidates(cands: &CandidateSet, lm: &NgramLm, k: usize) -> CandidateSet {
    assert!(k >= 1);
    if cands.len() <= k {
        return cands.clone();
    }
    let mut scored: Vec<(usize, f64)> = cands
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, lm.score_sequence(c)))
        .collect();
    // Stable by original index on ties.
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut keep: Vec<usize> = scored.iter().take(k).map(|&(i, _)| i).collect();
    if !keep.contains(&cands.pass_through_index) {
        keep.push(cands.pass_through_index);
    }
    keep.sort();

    let mut out = CandidateSet {
        written: cands.written.clone(),
        candidates: Vec::with_capacity(keep.len()),
        good_mask: Vec::with_capacity(keep.len()),
        pass_through_index: 0,
    };
    for &i in &keep {
        if i == cands.pass_through_index {
            out.pass_through_index = out.candidates.len();
        }
        out.candidates.push(cands.candidates[i].clone());
        out.good_mask.push(cands.good_mask[i]);
    }
    out
}

/// Levenshtein distance over whole tokens with unit insert/delete/substitute
/// costs.
pub fn token_edit_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> usize {
    let n = a.len();
    let m = b.len();
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let sub = if a[i - 1].as_ref() == b[j - 1].as_ref() { 0 } else { 1 };
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + sub);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}
