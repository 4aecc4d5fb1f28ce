//! Text normalization engine for speech applications.
//!
//! Converts written tokens ("9:00", "123", "$5") into spoken-word sequences
//! ("nine", "one twenty three", "five dollars"). A verbalizer grammar,
//! compiled to a weighted finite-state transducer, enumerates the plausible
//! readings of each token; a statistical model then picks the reading that
//! fits the context. Three rankers are provided: an n-gram language model
//! baseline, a maximum-entropy local ranker over written/spoken context
//! features, and a discriminative language model over spoken n-gram
//! suffixes that can also be trained from spoken-only text by
//! reconstructing written forms through the inverted grammar.
//!
//! The crate is organized around the pipeline:
//!
//! * [`fst`] — transducer algebra (composition, inversion, projection,
//!   shortest paths) over the tropical semiring.
//! * [`grammar`] — a small grammar language plus lexicon binding and a
//!   parameterized number verbalizer, compiled to a verbalizer `Fst`.
//! * [`candidates`] — per-token candidate sets, good-candidate marking, and
//!   LM-biased pruning.
//! * [`ngram`] — Katz / Witten-Bell backoff language models and the
//!   baseline lattice decoder.
//! * [`maxent`] — the shared ranking objective and batch trainer.
//! * [`ranker`] — local context features and per-token inference.
//! * [`dislm`] — discriminative LM features, training, automaton encoding,
//!   and sentence decoding.
//! * [`hallucinate`] — training-example generation from spoken-only text.
//! * [`corpus`] — aligned corpora, synthetic data generation.
//! * [`eval`] — word and sentence error rates.
//! * [`experiment`] — the condition grid tying everything together.

pub mod candidates;
pub mod corpus;
pub mod dislm;
pub mod eval;
pub mod experiment;
pub mod fst;
pub mod grammar;
pub mod hallucinate;
pub mod maxent;
pub mod ngram;
pub mod ranker;
