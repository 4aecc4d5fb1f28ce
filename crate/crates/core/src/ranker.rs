//! Maximum-entropy local ranking.
//!
//! A local feature function sees the whole written sentence and the current
//! candidate verbalization, never other tokens' verbalizations, so
//! inference is independent per token. Four template families:
//!
//! * output n-grams (n = 1..3) within the candidate, with boundary padding;
//! * boundary trigrams: the two written words left of the token with the
//!   candidate's first word, and the candidate's last word with the two
//!   written words to the right;
//! * skip-grams pairing one written word within a four-word window on
//!   either side with one candidate word;
//! * a pass-through bias that fires when the candidate equals the written
//!   token.

use std::collections::HashMap;

use crate::candidates::CandidateSet;
use crate::maxent::{
    train_maxent, FeatureVector, MaxentConfig, MaxentError, TrainExample,
};

/// Padding token for out-of-range context positions.
pub const PAD: &str = "<pad>";

/// Written-context window radius for skip-gram features.
const SKIP_WINDOW: usize = 4;

/// Highest output n-gram length.
const NGRAM_MAX: usize = 3;

#[derive(Debug, Clone)]
pub struct RankerModel {
    pub weights: HashMap<String, f64>,
    pub l2: f64,
    pub iterations: usize,
    pub final_objective: f64,
}

/// One training instance: a sentence, a token position, and that token's
/// candidate set with the good subset marked.
#[derive(Debug, Clone)]
pub struct RankerExample {
    pub sentence: Vec<String>,
    pub position: usize,
    pub cands: CandidateSet,
}

/// Extract the local features for candidate `y` at `sentence[i]`.
pub fn extract_local_features(sentence: &[String], i: usize, y: &[String]) -> FeatureVector {
    assert!(i < sentence.len());
    let mut fv = FeatureVector::new();

    // Output n-grams over [PAD] y [PAD]; windows that are all padding are
    // meaningless and skipped.
    let mut padded: Vec<&str> = Vec::with_capacity(y.len() + 2);
    padded.push(PAD);
    padded.extend(y.iter().map(String::as_str));
    padded.push(PAD);
    for n in 1..=NGRAM_MAX {
        if padded.len() < n {
            continue;
        }
        for win in padded.windows(n) {
            if win.iter().all(|&w| w == PAD) {
                continue;
            }
            fv.add(format!("O{n} {}", win.join(" ")));
        }
    }

    let written = |pos: isize| -> &str {
        if pos < 0 || pos as usize >= sentence.len() {
            PAD
        } else {
            &sentence[pos as usize]
        }
    };
    let i = i as isize;

    // Boundary trigrams.
    let first = y.first().map(String::as_str).unwrap_or(PAD);
    let last = y.last().map(String::as_str).unwrap_or(PAD);
    fv.add(format!("LB {} {} {}", written(i - 2), written(i - 1), first));
    fv.add(format!("RB {} {} {}", last, written(i + 1), written(i + 2)));

    // Written/spoken skip-grams within the window, excluding the token
    // itself and out-of-range slots.
    for d in 1..=SKIP_WINDOW as isize {
        for pos in [i - d, i + d] {
            if pos < 0 || pos as usize >= sentence.len() {
                continue;
            }
            for w in y {
                fv.add(format!("SG {} {}", written(pos), w));
            }
        }
    }

    // Pass-through bias.
    if y.len() == 1 && y[0] == sentence[i as usize] {
        fv.add("B".to_string());
    }
    fv
}

/// Train the ranker on examples whose candidate sets have more than one
/// entry and a marked good subset.
pub fn train_ranker(
    examples: &[RankerExample],
    l2: f64,
    max_iter: usize,
) -> Result<RankerModel, MaxentError> {
    let train: Vec<TrainExample> = examples
        .iter()
        .map(|ex| TrainExample {
            candidates: ex
                .cands
                .candidates
                .iter()
                .map(|y| extract_local_features(&ex.sentence, ex.position, y))
                .collect(),
            good: ex.cands.good_mask.clone(),
        })
        .collect();
    let config = MaxentConfig { l2, max_iter, ..Default::default() };
    let model = train_maxent(&train, &config)?;
    Ok(RankerModel {
        weights: model.weights,
        l2,
        iterations: model.iterations,
        final_objective: model.final_objective,
    })
}

/// Pick the candidate with the highest feature score; ties go to the
/// earlier candidate.
pub fn rank(model: &RankerModel, sentence: &[String], i: usize, cands: &CandidateSet) -> usize {
    assert!(!cands.is_empty());
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (j, y) in cands.candidates.iter().enumerate() {
        let score = extract_local_features(sentence, i, y).dot(&model.weights);
        if score > best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

impl RankerModel {
    /// TSV serialization: a template-configuration header, then
    /// `feature<TAB>weight` lines sorted by feature name.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# local-ranker ngram={NGRAM_MAX} window={SKIP_WINDOW} l2={} iterations={} objective={:.9e}\n",
            self.l2, self.iterations, self.final_objective
        );
        let mut entries: Vec<(&String, &f64)> = self.weights.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (name, weight) in entries {
            out.push_str(&format!("{name}\t{weight:.17e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RankerModel, String> {
        let mut model = RankerModel {
            weights: HashMap::new(),
            l2: 0.0,
            iterations: 0,
            final_objective: 0.0,
        };
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for field in header.split_whitespace() {
                    if let Some(v) = field.strip_prefix("l2=") {
                        model.l2 = v.parse().map_err(|_| format!("line {}: bad l2", i + 1))?;
                    } else if let Some(v) = field.strip_prefix("iterations=") {
                        model.iterations =
                            v.parse().map_err(|_| format!("line {}: bad iterations", i + 1))?;
                    } else if let Some(v) = field.strip_prefix("objective=") {
                        model.final_objective =
                            v.parse().map_err(|_| format!("line {}: bad objective", i + 1))?;
                    }
                }
                continue;
            }
            let (name, weight) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected feature<TAB>weight", i + 1))?;
            let weight: f64 =
                weight.parse().map_err(|_| format!("line {}: bad weight", i + 1))?;
            model.weights.insert(name.to_string(), weight);
        }
        Ok(model)
    }
}
