//! Training examples from spoken-only text.
//!
//! With no written side available, candidate sets are reconstructed through
//! the grammar itself: a spoken span composed with the inverted verbalizer
//! yields the written forms that could have produced it, and composing
//! those with the verbalizer again yields every reading of those written
//! forms. The observed span is the sole good candidate. Spans are found by
//! greedy longest match, left to right, without overlap.

use crate::candidates::CandidateSet;
use crate::dislm::DisLmExample;
use crate::fst::{compose, compose_nonempty, literal, nshortest, Fst};

#[derive(Debug, Clone)]
pub struct HallucinateConfig {
    /// Longest span, in spoken tokens, considered for example extraction.
    pub max_span: usize,
    /// Cap on reconstructed candidates per span.
    pub max_candidates: usize,
    /// Drop spans whose reconstruction offers no alternative reading.
    pub drop_singletons: bool,
}

impl Default for HallucinateConfig {
    fn default() -> Self {
        HallucinateConfig { max_span: 5, max_candidates: 10_000, drop_singletons: true }
    }
}

/// One extracted span with its reconstructed candidate set.
#[derive(Debug, Clone)]
pub struct HallucinatedExample {
    pub sentence_id: usize,
    pub start: usize,
    pub span: Vec<String>,
    pub candidates: Vec<Vec<String>>,
    /// Index of the observed span within `candidates`.
    pub good_index: usize,
    pub history: Vec<String>,
}

/// Verbalizer plus its precomputed inverse, reused across sentences.
pub struct Hallucinator<'a> {
    verbalizer: &'a Fst,
    inverse: Fst,
    config: HallucinateConfig,
}

impl<'a> Hallucinator<'a> {
    pub fn new(verbalizer: &'a Fst, config: HallucinateConfig) -> Hallucinator<'a> {
        Hallucinator { verbalizer, inverse: verbalizer.invert(), config }
    }

    /// Scan one sentence: at each position take the longest span whose
    /// inverse composition is nonempty, emit an example, and continue past
    /// it; positions with no match are skipped.
    pub fn spans(&self, sentence_id: usize, sentence: &[String]) -> Vec<HallucinatedExample> {
        let mut out = Vec::new();
        let mut pos = 0usize;
        while pos < sentence.len() {
            let mut matched = None;
            let longest = self.config.max_span.min(sentence.len() - pos);
            for len in (1..=longest).rev() {
                let span = &sentence[pos..pos + len];
                let span_fst = literal(&span.join(" "));
                if compose_nonempty(&span_fst, &self.inverse) {
                    matched = Some((len, span_fst));
                    break;
                }
            }
            let Some((len, span_fst)) = matched else {
                pos += 1;
                continue;
            };

            let span: Vec<String> = sentence[pos..pos + len].to_vec();
            let cascade = compose(&compose(&span_fst, &self.inverse), self.verbalizer);
            let paths = nshortest(&cascade, self.config.max_candidates)
                .expect("span cascades are acyclic");
            let mut candidates: Vec<Vec<String>> = Vec::new();
            for p in paths {
                let words: Vec<String> =
                    p.output.split_whitespace().map(str::to_string).collect();
                if !words.is_empty() && !candidates.contains(&words) {
                    candidates.push(words);
                }
            }
            // The observed span is in the cascade by construction; keep it
            // within the cap.
            let good_index = match candidates.iter().position(|c| *c == span) {
                Some(i) => i,
                None => {
                    if candidates.len() >= self.config.max_candidates {
                        candidates.pop();
                    }
                    candidates.push(span.clone());
                    candidates.len() - 1
                }
            };

            out.push(HallucinatedExample {
                sentence_id,
                start: pos,
                span,
                candidates,
                good_index,
                history: sentence[..pos].to_vec(),
            });
            pos += len;
        }
        out
    }
}

/// One-shot span extraction over a single sentence.
pub fn hallucinate_spans(
    sentence: &[String],
    verbalizer: &Fst,
    config: &HallucinateConfig,
) -> Vec<HallucinatedExample> {
    Hallucinator::new(verbalizer, config.clone()).spans(0, sentence)
}

/// Convert spans to discriminative-LM training examples. No written token
/// exists, so the pass-through flag is false for every candidate; spans
/// with a single candidate carry no signal and are dropped when the config
/// says so.
pub fn to_training_examples(
    halls: &[HallucinatedExample],
    config: &HallucinateConfig,
) -> Vec<DisLmExample> {
    halls
        .iter()
        .filter(|h| !(config.drop_singletons && h.candidates.len() <= 1))
        .map(|h| {
            let n = h.candidates.len();
            let mut good_mask = vec![false; n];
            good_mask[h.good_index] = true;
            DisLmExample {
                history: h.history.clone(),
                cands: CandidateSet {
                    written: String::new(),
                    candidates: h.candidates.clone(),
                    good_mask,
                    // No written token: nothing can be pass-through.
                    pass_through_index: usize::MAX,
                },
                pass_through: vec![false; n],
            }
        })
        .collect()
}

/// Inspection dump: `sentence-id<TAB>start<TAB>span<TAB>candidate<TAB>is-good`.
pub fn examples_to_text(halls: &[HallucinatedExample]) -> String {
    let mut out = String::new();
    for h in halls {
        for (i, cand) in h.candidates.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                h.sentence_id,
                h.start,
                h.span.join(" "),
                cand.join(" "),
                if i == h.good_index { 1 } else { 0 }
            ));
        }
    }
    out
}
