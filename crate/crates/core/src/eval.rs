//! Word and sentence error rates.
//!
//! WER counts token-level edit distance between each token's system output
//! and its reference verbalization, divided by the number of reference
//! spoken tokens produced by actual normalization (tokens whose reference
//! differs from the written form). SER is the fraction of sentences with
//! any error at all.

use thiserror::Error;

use crate::candidates::token_edit_distance;
use crate::corpus::AlignedSentence;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("system output has {got} sentences, reference has {want}")]
    SentenceCountMismatch { got: usize, want: usize },
    #[error("sentence {index}: system has {got} tokens, reference has {want}")]
    TokenCountMismatch { index: usize, got: usize, want: usize },
    #[error("no token in the reference was normalized; word error rate is undefined")]
    NoNormalizedTokens,
}

/// Error-rate summary for one system under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub wer: f64,
    pub ser: f64,
    pub edits: usize,
    pub normalized_reference_tokens: usize,
    pub sentences: usize,
    pub errored_sentences: usize,
    pub label: String,
}

/// Per-token system outputs aligned with the reference corpus.
pub type SystemOutput = Vec<Vec<Vec<String>>>;

fn check_alignment(system: &SystemOutput, reference: &[AlignedSentence]) -> Result<(), EvalError> {
    if system.len() != reference.len() {
        return Err(EvalError::SentenceCountMismatch { got: system.len(), want: reference.len() });
    }
    for (index, (sys, sent)) in system.iter().zip(reference).enumerate() {
        if sys.len() != sent.pairs.len() {
            return Err(EvalError::TokenCountMismatch {
                index,
                got: sys.len(),
                want: sent.pairs.len(),
            });
        }
    }
    Ok(())
}

/// Word error rate over normalized reference tokens; also fills the
/// sentence error rate so one call produces the full report.
pub fn wer(
    system: &SystemOutput,
    reference: &[AlignedSentence],
    label: &str,
) -> Result<EvalReport, EvalError> {
    check_alignment(system, reference)?;
    let mut edits = 0usize;
    let mut denom = 0usize;
    let mut errored = 0usize;
    for (sys, sent) in system.iter().zip(reference) {
        let mut any_error = false;
        for (i, (out, (_, z))) in sys.iter().zip(&sent.pairs).enumerate() {
            let d = token_edit_distance(out, z);
            if d > 0 {
                any_error = true;
            }
            edits += d;
            if sent.is_normalized(i) {
                denom += z.len();
            }
        }
        if any_error {
            errored += 1;
        }
    }
    if denom == 0 {
        return Err(EvalError::NoNormalizedTokens);
    }
    Ok(EvalReport {
        wer: edits as f64 / denom as f64,
        ser: errored as f64 / reference.len() as f64,
        edits,
        normalized_reference_tokens: denom,
        sentences: reference.len(),
        errored_sentences: errored,
        label: label.to_string(),
    })
}

/// Sentence error rate alone; a sentence is errored if any token's output
/// differs from its reference.
pub fn ser(
    system: &SystemOutput,
    reference: &[AlignedSentence],
    label: &str,
) -> Result<EvalReport, EvalError> {
    check_alignment(system, reference)?;
    let mut errored = 0usize;
    for (sys, sent) in system.iter().zip(reference) {
        if sys.iter().zip(&sent.pairs).any(|(out, (_, z))| out != z) {
            errored += 1;
        }
    }
    Ok(EvalReport {
        wer: 0.0,
        ser: errored as f64 / reference.len() as f64,
        edits: 0,
        normalized_reference_tokens: 0,
        sentences: reference.len(),
        errored_sentences: errored,
        label: label.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_from_text;

    fn reference() -> Vec<AlignedSentence> {
        corpus_from_text(
            "wake\twake\n9:00\tnine\nam\ta m\n\ncall\tcall\n120\tone twenty\n",
        )
        .unwrap()
    }

    fn perfect(reference: &[AlignedSentence]) -> SystemOutput {
        reference
            .iter()
            .map(|s| s.pairs.iter().map(|(_, z)| z.clone()).collect())
            .collect()
    }

    #[test]
    fn exact_output_scores_zero() {
        let refc = reference();
        let report = wer(&perfect(&refc), &refc, "exact").unwrap();
        assert_eq!(report.wer, 0.0);
        assert_eq!(report.ser, 0.0);
        assert_eq!(report.normalized_reference_tokens, 5);
    }

    #[test]
    fn one_substitution_among_four_normalized_tokens() {
        let refc = corpus_from_text(
            "9:00\tnine\nam\ta m\n\n120\tone twenty\n",
        )
        .unwrap();
        let mut sys = perfect(&refc);
        sys[1][0] = vec!["one".to_string(), "thirty".to_string()];
        let report = wer(&sys, &refc, "one-sub").unwrap();
        assert_eq!(report.normalized_reference_tokens, 5);
        assert_eq!(report.edits, 1);
        assert!((report.wer - 0.2).abs() < 1e-12);
        assert!((report.ser - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quarter_wer_hand_case() {
        // Four normalized reference tokens, one substituted.
        let refc = corpus_from_text("12\tone two\n34\tthree four\n").unwrap();
        let mut sys = perfect(&refc);
        sys[0][1] = vec!["three".to_string(), "x".to_string()];
        let report = wer(&sys, &refc, "quarter").unwrap();
        assert_eq!(report.normalized_reference_tokens, 4);
        assert_eq!(report.edits, 1);
        assert!((report.wer - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pass_through_only_reference_is_an_error() {
        let refc = corpus_from_text("hello\thello\nthere\tthere\n").unwrap();
        let sys = perfect(&refc);
        assert!(matches!(wer(&sys, &refc, "x"), Err(EvalError::NoNormalizedTokens)));
    }

    #[test]
    fn pass_through_tokens_do_not_enter_the_denominator() {
        let refc = reference();
        let report = wer(&perfect(&refc), &refc, "x").unwrap();
        // "wake" and "call" are unchanged; only nine / a m / one twenty count.
        assert_eq!(report.normalized_reference_tokens, 5);
    }

    #[test]
    fn ser_counts_sentences_with_any_error() {
        let refc = corpus_from_text("1\tone\n\n2\ttwo\n\n3\tthree\n\n4\tfour\n").unwrap();
        let mut sys = perfect(&refc);
        sys[2][0] = vec!["zzz".to_string()];
        let report = ser(&sys, &refc, "x").unwrap();
        assert!((report.ser - 0.25).abs() < 1e-12);
        let full = wer(&sys, &refc, "x").unwrap();
        assert_eq!(full.ser, report.ser);
    }

    #[test]
    fn errors_on_pass_through_tokens_still_count_in_numerator_and_ser() {
        let refc = corpus_from_text("me\tme\n9:00\tnine\n").unwrap();
        let mut sys = perfect(&refc);
        sys[0][0] = vec!["m".to_string(), "e".to_string()];
        let report = wer(&sys, &refc, "x").unwrap();
        assert_eq!(report.edits, 2);
        assert_eq!(report.normalized_reference_tokens, 1);
        assert_eq!(report.ser, 1.0);
    }

    #[test]
    fn misaligned_output_is_rejected() {
        let refc = reference();
        let mut sys = perfect(&refc);
        sys[0].pop();
        assert!(matches!(
            wer(&sys, &refc, "x"),
            Err(EvalError::TokenCountMismatch { index: 0, .. })
        ));
    }
}
