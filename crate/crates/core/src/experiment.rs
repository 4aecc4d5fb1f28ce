//! The condition grid: two grammars crossed with two data regimes and the
//! full system lineup, evaluated on a common synthetic test set.
//!
//! Rows are the systems (baseline trigram, local ranking, discriminative LM
//! on real data with fixed bias, with tuned bias, with tuned bias plus
//! boundary markers, and discriminative LM on hallucinated data); columns
//! are the grammars (language-specific and covering). Every cell reports
//! word and sentence error rates.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::candidates::{good_set, prune_candidates, verbalize, CandidateSet};
use crate::corpus::{generate_number_corpus, generate_synthetic, AlignedSentence, SynthConfig};
use crate::dislm::{
    train_dislm, BiasMode, DisLmConfig, DisLmDecoder, DisLmExample, DisLmModel, MARKER,
};
use crate::eval::{wer, EvalReport, SystemOutput};
use crate::fst::Fst;
use crate::grammar::{
    bind_lexicon, builtin_names, compile_with_builtins, number_builtins, parse_grammar_with_builtins,
    GrammarError, Lexicon, NumberSpec,
};
use crate::hallucinate::{to_training_examples, HallucinateConfig, Hallucinator};
use crate::maxent::MaxentError;
use crate::ngram::{baseline_decode, train_ngram, NgramError, NgramLm, Smoothing};
use crate::ranker::{rank, train_ranker, RankerExample, RankerModel};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Train(#[from] MaxentError),
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GrammarKind {
    LanguageSpecific,
    Covering,
}

impl GrammarKind {
    pub const ALL: [GrammarKind; 2] = [GrammarKind::LanguageSpecific, GrammarKind::Covering];

    pub fn label(&self) -> &'static str {
        match self {
            GrammarKind::LanguageSpecific => "Language-specific",
            GrammarKind::Covering => "Covering",
        }
    }
}

/// The systems of the report, in row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SystemKind {
    Baseline,
    LocalRanker,
    DisLmReal,
    DisLmTuned,
    DisLmTunedBoundary,
    DisLmHallucinated,
}

impl SystemKind {
    pub const ALL: [SystemKind; 6] = [
        SystemKind::Baseline,
        SystemKind::LocalRanker,
        SystemKind::DisLmReal,
        SystemKind::DisLmTuned,
        SystemKind::DisLmTunedBoundary,
        SystemKind::DisLmHallucinated,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SystemKind::Baseline => "Baseline",
            SystemKind::LocalRanker => "Local ranking",
            SystemKind::DisLmReal => "Dis. LM, real data",
            SystemKind::DisLmTuned => "Dis. LM, real data, +tuned bias",
            SystemKind::DisLmTunedBoundary => "Dis. LM, real data, +tuned bias, +boundary",
            SystemKind::DisLmHallucinated => "Dis. LM, hallucinated data",
        }
    }
}

/// Grammar, lexicon, and number-table sources. The repo fixtures are the
/// default inputs.
#[derive(Debug, Clone)]
pub struct GrammarSources {
    pub language_specific: String,
    pub covering: String,
    pub lexicon: String,
    pub numbers: String,
}

impl GrammarSources {
    pub fn fixtures() -> GrammarSources {
        GrammarSources {
            language_specific: include_str!("../fixtures/language_specific.gram").to_string(),
            covering: include_str!("../fixtures/covering.gram").to_string(),
            lexicon: include_str!("../fixtures/english.lex").to_string(),
            numbers: include_str!("../fixtures/numbers.tsv").to_string(),
        }
    }

    pub fn number_spec(&self) -> Result<NumberSpec, GrammarError> {
        NumberSpec::parse(&self.numbers)
    }

    /// Compile one of the two verbalizers.
    pub fn compile(&self, kind: GrammarKind, max_digits: usize) -> Result<Fst, GrammarError> {
        let spec = self.number_spec()?;
        let builtins = number_builtins_with_units(&spec, max_digits);
        let source = match kind {
            GrammarKind::LanguageSpecific => &self.language_specific,
            GrammarKind::Covering => &self.covering,
        };
        let names = builtins.keys().cloned().collect();
        let ast = parse_grammar_with_builtins(source, &names)?;
        let ast = bind_lexicon(&ast, &Lexicon::parse(&self.lexicon)?)?;
        let root = ast.last_name().unwrap_or("token").to_string();
        compile_with_builtins(&ast, &root, &builtins)
    }
}

/// The standard number builtins plus `num_unit` (single nonzero digits,
/// used for minute and decimal readings).
pub fn number_builtins_with_units(
    spec: &NumberSpec,
    max_digits: usize,
) -> HashMap<String, Fst> {
    use crate::fst::{cross, union_all};
    let mut map = number_builtins(spec, max_digits);
    let parts: Vec<Fst> = (1..=9u32)
        .map(|u| cross(&u.to_string(), spec_unit(spec, u)))
        .collect();
    map.insert("num_unit".to_string(), union_all(&parts.iter().collect::<Vec<_>>()));
    map
}

fn spec_unit(spec: &NumberSpec, u: u32) -> &str {
    spec.unit_word(u)
}

/// The names `parse_grammar_with_builtins` should accept for fixture
/// grammars.
pub fn fixture_builtin_names() -> std::collections::HashSet<String> {
    let mut names = builtin_names();
    names.insert("num_unit".to_string());
    names
}

#[derive(Debug, Clone)]
pub struct Hyperparams {
    /// Per-token candidate cap; the pruning LM engages above it.
    pub candidate_cap: usize,
    pub ranker_l2: f64,
    pub dislm_l2: f64,
    pub max_iter: usize,
    pub bias_constant: f64,
    pub lm_order: usize,
    pub number_max_digits: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            candidate_cap: 100,
            ranker_l2: 1e-3,
            dislm_l2: 1e-3,
            max_iter: 120,
            bias_constant: crate::dislm::DEFAULT_BIAS,
            lm_order: 3,
            number_max_digits: 5,
        }
    }
}

/// Candidate generation with a per-token memo; token types repeat heavily.
pub struct CandidateGen<'a> {
    verbalizer: &'a Fst,
    cap: usize,
    pruning_lm: Option<&'a NgramLm>,
    cache: HashMap<String, CandidateSet>,
}

impl<'a> CandidateGen<'a> {
    pub fn new(verbalizer: &'a Fst, cap: usize, pruning_lm: Option<&'a NgramLm>) -> Self {
        CandidateGen { verbalizer, cap, pruning_lm, cache: HashMap::new() }
    }

    pub fn get(&mut self, token: &str) -> CandidateSet {
        if let Some(cs) = self.cache.get(token) {
            return cs.clone();
        }
        let mut cs = verbalize(self.verbalizer, token, self.cap + 1);
        if cs.len() > self.cap {
            if let Some(lm) = self.pruning_lm {
                cs = prune_candidates(&cs, lm, self.cap);
            }
        }
        self.cache.insert(token.to_string(), cs.clone());
        cs
    }

    pub fn sentence(&mut self, written: &[&str]) -> Vec<CandidateSet> {
        written.iter().map(|t| self.get(t)).collect()
    }
}

/// Ranker training data: one example per token with more than one
/// candidate.
pub fn ranker_examples(
    corpus: &[AlignedSentence],
    gen: &mut CandidateGen,
) -> Vec<RankerExample> {
    let mut out = Vec::new();
    for sent in corpus {
        let written: Vec<String> = sent.written().iter().map(|s| s.to_string()).collect();
        for (i, (token, z)) in sent.pairs.iter().enumerate() {
            let cs = gen.get(token);
            if cs.len() < 2 {
                continue;
            }
            out.push(RankerExample {
                sentence: written.clone(),
                position: i,
                cands: good_set(&cs, z),
            });
        }
    }
    out
}

/// Discriminative-LM training data with teacher-forced histories; boundary
/// mode interleaves the marker between per-token verbalizations.
pub fn dislm_examples(
    corpus: &[AlignedSentence],
    gen: &mut CandidateGen,
    boundary: bool,
) -> Vec<DisLmExample> {
    let mut out = Vec::new();
    for sent in corpus {
        let mut history: Vec<String> = Vec::new();
        for (i, (token, z)) in sent.pairs.iter().enumerate() {
            let cs = gen.get(token);
            if cs.len() >= 2 {
                let cs = good_set(&cs, z);
                let pass_through: Vec<bool> =
                    (0..cs.len()).map(|j| cs.is_pass_through(j)).collect();
                out.push(DisLmExample { history: history.clone(), cands: cs, pass_through });
            }
            if boundary && i > 0 {
                history.push(MARKER.to_string());
            }
            history.extend(z.iter().cloned());
        }
    }
    out
}

/// Hallucinated training data from the spoken side only.
pub fn hallucinated_examples(
    corpus: &[AlignedSentence],
    verbalizer: &Fst,
    config: &HallucinateConfig,
) -> Vec<DisLmExample> {
    let hallucinator = Hallucinator::new(verbalizer, config.clone());
    let mut spans = Vec::new();
    for (id, sent) in corpus.iter().enumerate() {
        let spoken: Vec<String> = sent.spoken().iter().map(|s| s.to_string()).collect();
        spans.extend(hallucinator.spans(id, &spoken));
    }
    to_training_examples(&spans, config)
}

/// Everything trained for one grammar condition.
pub struct TrainedSystems {
    pub baseline_lm: NgramLm,
    pub ranker: RankerModel,
    pub dislm_real: DisLmModel,
    pub dislm_tuned: DisLmModel,
    pub dislm_tuned_boundary: DisLmModel,
    pub dislm_hallucinated: DisLmModel,
}

pub fn train_all_systems(
    train: &[AlignedSentence],
    verbalizer: &Fst,
    gen: &mut CandidateGen,
    hp: &Hyperparams,
) -> Result<TrainedSystems, ExperimentError> {
    let spoken: Vec<Vec<String>> = train
        .iter()
        .map(|s| s.spoken().iter().map(|t| t.to_string()).collect())
        .collect();
    let baseline_lm = train_ngram(&spoken, hp.lm_order, Smoothing::Katz)?;

    let ranker = train_ranker(&ranker_examples(train, gen), hp.ranker_l2, hp.max_iter)?;

    let dislm_config = |bias: BiasMode, boundary: bool| DisLmConfig {
        order: hp.lm_order,
        bias,
        boundary,
        l2: hp.dislm_l2,
        max_iter: hp.max_iter,
    };

    let real_examples = dislm_examples(train, gen, false);
    let dislm_real =
        train_dislm(&real_examples, &dislm_config(BiasMode::Fixed(hp.bias_constant), false))?;
    let dislm_tuned = train_dislm(&real_examples, &dislm_config(BiasMode::Tuned, false))?;
    let boundary_examples = dislm_examples(train, gen, true);
    let dislm_tuned_boundary =
        train_dislm(&boundary_examples, &dislm_config(BiasMode::Tuned, true))?;

    let hall_examples =
        hallucinated_examples(train, verbalizer, &HallucinateConfig::default());
    let dislm_hallucinated = train_dislm(
        &hall_examples,
        &dislm_config(BiasMode::Fixed(hp.bias_constant), false),
    )?;

    Ok(TrainedSystems {
        baseline_lm,
        ranker,
        dislm_real,
        dislm_tuned,
        dislm_tuned_boundary,
        dislm_hallucinated,
    })
}

/// Run one system over a corpus, producing aligned per-token outputs.
pub fn decode_corpus(
    system: SystemKind,
    systems: &TrainedSystems,
    corpus: &[AlignedSentence],
    gen: &mut CandidateGen,
) -> SystemOutput {
    let decoder = match system {
        SystemKind::DisLmReal => Some(DisLmDecoder::new(&systems.dislm_real)),
        SystemKind::DisLmTuned => Some(DisLmDecoder::new(&systems.dislm_tuned)),
        SystemKind::DisLmTunedBoundary => {
            Some(DisLmDecoder::new(&systems.dislm_tuned_boundary))
        }
        SystemKind::DisLmHallucinated => {
            Some(DisLmDecoder::new(&systems.dislm_hallucinated))
        }
        _ => None,
    };

    corpus
        .iter()
        .map(|sent| {
            let written: Vec<String> =
                sent.written().iter().map(|s| s.to_string()).collect();
            let sets: Vec<CandidateSet> =
                written.iter().map(|t| gen.get(t)).collect();
            let choices: Vec<usize> = match system {
                SystemKind::Baseline => baseline_decode(&sets, &systems.baseline_lm),
                SystemKind::LocalRanker => sets
                    .iter()
                    .enumerate()
                    .map(|(i, cs)| rank(&systems.ranker, &written, i, cs))
                    .collect(),
                _ => decoder.as_ref().unwrap().decode(&sets),
            };
            sets.iter()
                .zip(choices)
                .map(|(cs, j)| cs.candidates[j].clone())
                .collect()
        })
        .collect()
}

/// One grid cell.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub grammar: GrammarKind,
    pub system: SystemKind,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
}

impl GridResult {
    pub fn get(&self, grammar: GrammarKind, system: SystemKind) -> Option<&EvalReport> {
        self.cells
            .iter()
            .find(|c| c.grammar == grammar && c.system == system)
            .map(|c| &c.report)
    }

    /// Human-readable table with the grammars side by side.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<46} {:>10} {:>10} {:>10} {:>10}",
            "System", "LS WER", "LS SER", "Cov WER", "Cov SER"
        );
        for system in SystemKind::ALL {
            let mut row = format!("{:<46}", system.label());
            for grammar in GrammarKind::ALL {
                match self.get(grammar, system) {
                    Some(r) => {
                        let _ = write!(row, " {:>9.2}% {:>9.2}%", r.wer * 100.0, r.ser * 100.0);
                    }
                    None => row.push_str(&format!(" {:>10} {:>10}", "-", "-")),
                }
            }
            let _ = writeln!(out, "{row}");
        }
        out
    }

    /// Machine-readable TSV: grammar, system, wer, ser, edits, denominator.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("grammar\tsystem\twer\tser\tedits\tnormalized_tokens\n");
        for cell in &self.cells {
            let r = &cell.report;
            let _ = writeln!(
                out,
                "{}\t{}\t{:.17e}\t{:.17e}\t{}\t{}",
                cell.grammar.label(),
                cell.system.label(),
                r.wer,
                r.ser,
                r.edits,
                r.normalized_reference_tokens
            );
        }
        out
    }
}

/// Run every cell of the grid on freshly generated synthetic corpora.
pub fn run_grid(
    sources: &GrammarSources,
    synth: &SynthConfig,
    hp: &Hyperparams,
    seed: u64,
) -> Result<GridResult, ExperimentError> {
    let (train, _dev, test) = generate_synthetic(synth, seed)?;
    run_grid_on(sources, &train, &test, hp, seed)
}

/// Run every cell against fixed corpora.
pub fn run_grid_on(
    sources: &GrammarSources,
    train: &[AlignedSentence],
    test: &[AlignedSentence],
    hp: &Hyperparams,
    seed: u64,
) -> Result<GridResult, ExperimentError> {
    let numbers = sources.number_spec()?;
    let pruning_corpus = generate_number_corpus(&numbers, 10_000, seed ^ 0x5eed);
    let pruning_lm = train_ngram(&pruning_corpus, hp.lm_order, Smoothing::WittenBell)?;

    let mut cells = Vec::new();
    for grammar in GrammarKind::ALL {
        let verbalizer = sources.compile(grammar, hp.number_max_digits)?;
        let mut gen = CandidateGen::new(&verbalizer, hp.candidate_cap, Some(&pruning_lm));
        let systems = train_all_systems(train, &verbalizer, &mut gen, hp)?;
        for system in SystemKind::ALL {
            let output = decode_corpus(system, &systems, test, &mut gen);
            let label = format!("{} / {}", grammar.label(), system.label());
            let report = wer(&output, test, &label)?;
            cells.push(GridCell { grammar, system, report });
        }
    }
    Ok(GridResult { cells })
}
