//! Discriminative language model over spoken n-gram suffixes.
//!
//! Features for a candidate are the n-gram suffixes ending at each of its
//! positions, drawing left context from the candidate itself, then the
//! spoken history, then padding; plus a pass-through bias. The bias weight
//! is either fixed to a constant negative value (required when training
//! data carries no written-token information) or tuned as a free
//! parameter. In boundary mode a `<p>` marker separates per-token
//! verbalizations so the model can tell token-internal n-grams from
//! cross-token ones.
//!
//! A trained model encodes as a word-labeled automaton whose states are
//! n-gram contexts with epsilon backoff arcs to shorter contexts. Backoff
//! arcs are failure arcs: taken only when the current context has no arc
//! for the next word. Under that traversal the weight of any token
//! sequence is exactly the negated sum of matched n-gram weights, which
//! keeps shortest-path decoding equal to exhaustive feature scoring.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::candidates::CandidateSet;
use crate::fst::{Arc, Fst, StateId, EPSILON};
use crate::maxent::{
    train_maxent, FeatureVector, MaxentConfig, MaxentError, TrainExample,
};
use crate::ranker::PAD;

/// Spoken-phrase-boundary marker. Never an ordinary corpus token.
pub const MARKER: &str = "<p>";

/// Maxent feature name of the pass-through bias.
const BIAS_FEATURE: &str = "B";

/// Prefix distinguishing n-gram features from the bias in the shared
/// maxent feature space.
const NGRAM_PREFIX: &str = "N ";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasMode {
    Fixed(f64),
    Tuned,
}

impl BiasMode {
    pub fn initial_value(&self) -> f64 {
        match self {
            BiasMode::Fixed(v) => *v,
            // Tuning starts from the fixed-mode default.
            BiasMode::Tuned => DEFAULT_BIAS,
        }
    }
}

/// Default pass-through bias in model-score units.
pub const DEFAULT_BIAS: f64 = -10.0;

#[derive(Debug, Clone)]
pub struct DisLmConfig {
    pub order: usize,
    pub bias: BiasMode,
    pub boundary: bool,
    pub l2: f64,
    pub max_iter: usize,
}

impl Default for DisLmConfig {
    fn default() -> Self {
        DisLmConfig {
            order: 3,
            bias: BiasMode::Fixed(DEFAULT_BIAS),
            boundary: false,
            l2: 1e-3,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DisLmModel {
    /// Suffix n-gram weights, keyed by the n-gram word sequence.
    pub ngram_weights: HashMap<Vec<String>, f64>,
    pub bias: f64,
    pub bias_mode: BiasMode,
    pub boundary: bool,
    pub order: usize,
    pub iterations: usize,
    pub final_objective: f64,
}

/// One training instance: teacher-forced spoken history, the candidate set
/// with its good subset, and per-candidate pass-through flags (all false
/// for examples generated without written tokens).
#[derive(Debug, Clone)]
pub struct DisLmExample {
    pub history: Vec<String>,
    pub cands: CandidateSet,
    pub pass_through: Vec<bool>,
}

/// N-gram suffix features for candidate `y` after `history`.
///
/// For each position of `y` and each n up to `order`, the n-gram ending at
/// that position. Context comes from `y` itself, then (in boundary mode, a
/// `<p>` marker and) the history, then `<pad>` filler.
pub fn extract_dislm_features(
    history: &[String],
    y: &[String],
    pass_through: bool,
    order: usize,
    boundary: bool,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let mut context: Vec<&str> = history.iter().map(String::as_str).collect();
    if boundary && !history.is_empty() {
        context.push(MARKER);
    }
    for (p, word) in y.iter().enumerate() {
        for n in 1..=order {
            let mut gram: Vec<&str> = Vec::with_capacity(n);
            // n-1 context words to the left of position p.
            for back in (1..n).rev() {
                let from_y = p as isize - back as isize;
                if from_y >= 0 {
                    gram.push(&y[from_y as usize]);
                } else {
                    let from_ctx = context.len() as isize + from_y;
                    if from_ctx >= 0 {
                        gram.push(context[from_ctx as usize]);
                    } else {
                        gram.push(PAD);
                    }
                }
            }
            gram.push(word);
            fv.add(format!("{NGRAM_PREFIX}{}", gram.join(" ")));
        }
    }
    if pass_through {
        fv.add(BIAS_FEATURE.to_string());
    }
    fv
}

/// Train with the shared ranking objective over suffix n-gram features.
pub fn train_dislm(
    examples: &[DisLmExample],
    config: &DisLmConfig,
) -> Result<DisLmModel, MaxentError> {
    let train: Vec<TrainExample> = examples
        .iter()
        .map(|ex| TrainExample {
            candidates: ex
                .cands
                .candidates
                .iter()
                .zip(&ex.pass_through)
                .map(|(y, &pt)| {
                    extract_dislm_features(&ex.history, y, pt, config.order, config.boundary)
                })
                .collect(),
            good: ex.cands.good_mask.clone(),
        })
        .collect();

    let maxent_config = MaxentConfig {
        l2: config.l2,
        max_iter: config.max_iter,
        frozen: match config.bias {
            BiasMode::Fixed(v) => vec![(BIAS_FEATURE.to_string(), v)],
            BiasMode::Tuned => Vec::new(),
        },
        initial: match config.bias {
            BiasMode::Tuned => vec![(BIAS_FEATURE.to_string(), config.bias.initial_value())],
            BiasMode::Fixed(_) => Vec::new(),
        },
        // The bias is never regularized; shrinking it toward zero would
        // fight its purpose.
        unregularized: vec![BIAS_FEATURE.to_string()],
        ..Default::default()
    };
    let trained = train_maxent(&train, &maxent_config)?;

    let mut ngram_weights = HashMap::new();
    let mut bias = config.bias.initial_value();
    for (name, w) in trained.weights {
        if name == BIAS_FEATURE {
            bias = w;
        } else if let Some(gram) = name.strip_prefix(NGRAM_PREFIX) {
            ngram_weights.insert(gram.split(' ').map(str::to_string).collect(), w);
        }
    }
    Ok(DisLmModel {
        ngram_weights,
        bias,
        bias_mode: config.bias,
        boundary: config.boundary,
        order: config.order,
        iterations: trained.iterations,
        final_objective: trained.final_objective,
    })
}

// ---------------------------------------------------------------------------
// Automaton encoding.
// ---------------------------------------------------------------------------

/// Word-to-label table for word-labeled transducers. Label 0 stays epsilon.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl SymbolTable {
    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32 + 1;
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get((id - 1) as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// The encoded model: a deterministic word-labeled automaton with epsilon
/// backoff arcs, its symbol table, and the bias carried alongside (bias is
/// applied at lattice construction, not inside the automaton).
#[derive(Debug, Clone)]
pub struct EncodedDisLm {
    pub fst: Fst,
    pub symbols: SymbolTable,
    start: StateId,
    pad_id: Option<u32>,
    order: usize,
}

/// Encode the trained model. The weight of a token sequence under failure
/// traversal equals the negated sum of its matched suffix n-gram weights.
pub fn encode_as_fst(model: &DisLmModel) -> EncodedDisLm {
    let mut symbols = SymbolTable::default();
    let mut grams: Vec<&Vec<String>> = model.ngram_weights.keys().collect();
    grams.sort();
    for gram in &grams {
        for w in gram.iter() {
            symbols.intern(w);
        }
    }

    // Model n-grams as id sequences.
    let weights: BTreeMap<Vec<u32>, f64> = model
        .ngram_weights
        .iter()
        .map(|(gram, &w)| {
            (gram.iter().map(|t| symbols.id(t).unwrap()).collect(), w)
        })
        .collect();

    // Context states: suffix closure of the proper prefixes of all model
    // n-grams, plus the empty context.
    let mut contexts: BTreeSet<Vec<u32>> = BTreeSet::new();
    contexts.insert(Vec::new());
    for gram in weights.keys() {
        for plen in 1..gram.len() {
            let prefix = &gram[..plen];
            for k in 0..prefix.len() {
                contexts.insert(prefix[k..].to_vec());
            }
        }
    }

    let mut fst = Fst::new();
    let mut state_of: BTreeMap<Vec<u32>, StateId> = BTreeMap::new();
    for ctx in &contexts {
        let s = fst.add_state();
        fst.set_final(s, 0.0);
        state_of.insert(ctx.clone(), s);
    }
    let start = state_of[&Vec::new()];
    fst.set_start(start);

    let longest_suffix_in = |contexts: &BTreeSet<Vec<u32>>, seq: &[u32]| -> Vec<u32> {
        for k in 0..=seq.len() {
            if contexts.contains(&seq[k..]) {
                return seq[k..].to_vec();
            }
        }
        unreachable!("empty context is always present")
    };

    // Words with an arc at each context: those extending the context to a
    // model n-gram (weight to collect) or to a longer context (depth to
    // keep tracking).
    let mut arc_words: BTreeMap<&[u32], BTreeSet<u32>> = BTreeMap::new();
    for gram in weights.keys() {
        arc_words
            .entry(&gram[..gram.len() - 1])
            .or_default()
            .insert(gram[gram.len() - 1]);
    }
    for ctx in &contexts {
        if !ctx.is_empty() {
            arc_words
                .entry(&ctx[..ctx.len() - 1])
                .or_default()
                .insert(ctx[ctx.len() - 1]);
        }
    }

    for ctx in &contexts {
        let src = state_of[ctx];
        if let Some(words) = arc_words.get(ctx.as_slice()) {
            for &w in words {
                let mut extended = ctx.clone();
                extended.push(w);
                let mut weight = 0.0;
                for k in 0..extended.len() {
                    if let Some(&v) = weights.get(&extended[k..]) {
                        weight -= v;
                    }
                }
                let target = longest_suffix_in(&contexts, &extended);
                fst.add_arc(src, Arc::new(w, w, weight, state_of[&target]));
            }
        }
        if !ctx.is_empty() {
            let target = longest_suffix_in(&contexts, &ctx[1..]);
            fst.add_arc(src, Arc::new(EPSILON, EPSILON, 0.0, state_of[&target]));
        }
    }

    let pad_id = symbols.id(PAD);
    EncodedDisLm { fst, symbols, start, pad_id, order: model.order }
}

impl EncodedDisLm {
    /// One failure-traversal step: follow the word's arc at the deepest
    /// context that has one, backing off through epsilon arcs. Unknown
    /// words score zero and reset to the empty context.
    fn step(&self, state: StateId, word_id: Option<u32>) -> (f64, StateId) {
        let Some(id) = word_id else { return (0.0, self.start) };
        let mut s = state;
        loop {
            let mut backoff = None;
            for arc in self.fst.arcs(s) {
                if arc.ilabel == id {
                    return (arc.weight, arc.nextstate);
                }
                if arc.ilabel == EPSILON {
                    backoff = Some(arc.nextstate);
                }
            }
            match backoff {
                Some(next) => s = next,
                None => return (0.0, self.start),
            }
        }
    }

    /// State after consuming order-1 padding tokens, matching the padded
    /// feature extraction at sequence start.
    fn padded_start(&self) -> StateId {
        let mut s = self.start;
        for _ in 1..self.order {
            let (_, next) = self.step(s, self.pad_id);
            s = next;
        }
        s
    }

    /// Tropical path weight of `seq`: the negated total matched n-gram
    /// weight.
    pub fn path_weight(&self, seq: &[impl AsRef<str>]) -> f64 {
        let mut s = self.padded_start();
        let mut total = 0.0;
        for w in seq {
            let (delta, next) = self.step(s, self.symbols.id(w.as_ref()));
            total += delta;
            s = next;
        }
        total
    }
}

// ---------------------------------------------------------------------------
// Sentence decoding.
// ---------------------------------------------------------------------------

/// Reusable decoder: the encoded automaton plus the bias and boundary
/// configuration.
pub struct DisLmDecoder {
    enc: EncodedDisLm,
    bias: f64,
    boundary: bool,
}

impl DisLmDecoder {
    pub fn new(model: &DisLmModel) -> DisLmDecoder {
        DisLmDecoder { enc: encode_as_fst(model), bias: model.bias, boundary: model.boundary }
    }

    /// Joint argmax over per-token candidates of the summed n-gram score
    /// plus bias for pass-through choices; exact dynamic programming over
    /// automaton states. Ties pick the candidate-order-lexicographically
    /// first assignment.
    pub fn decode(&self, cand_sets: &[CandidateSet]) -> Vec<usize> {
        assert!(cand_sets.iter().all(|c| !c.is_empty()));

        #[derive(Clone)]
        struct Cell {
            score: f64,
            choices: Vec<usize>,
        }

        let mut cells: BTreeMap<StateId, Cell> = BTreeMap::new();
        cells.insert(self.enc.padded_start(), Cell { score: 0.0, choices: Vec::new() });

        for (t, cs) in cand_sets.iter().enumerate() {
            let mut next: BTreeMap<StateId, Cell> = BTreeMap::new();
            for (&state, cell) in &cells {
                for (j, cand) in cs.candidates.iter().enumerate() {
                    let mut s = state;
                    let mut score = cell.score;
                    if self.boundary && t > 0 {
                        let (delta, ns) = self.enc.step(s, self.enc.symbols.id(MARKER));
                        score -= delta;
                        s = ns;
                    }
                    for w in cand {
                        let (delta, ns) = self.enc.step(s, self.enc.symbols.id(w));
                        score -= delta;
                        s = ns;
                    }
                    if cs.is_pass_through(j) {
                        score += self.bias;
                    }
                    let mut choices = cell.choices.clone();
                    choices.push(j);
                    match next.get_mut(&s) {
                        Some(cur)
                            if score < cur.score
                                || (score == cur.score && choices >= cur.choices) => {}
                        Some(cur) => *cur = Cell { score, choices },
                        None => {
                            next.insert(s, Cell { score, choices });
                        }
                    }
                }
            }
            cells = next;
        }

        cells
            .into_values()
            .max_by(|a, b| {
                a.score
                    .partial_cmp(&b.score)
                    .unwrap()
                    .then_with(|| b.choices.cmp(&a.choices))
            })
            .expect("nonempty lattice")
            .choices
    }
}

/// One-shot decode; builds the automaton internally.
pub fn decode_sentence(model: &DisLmModel, cand_sets: &[CandidateSet]) -> Vec<usize> {
    DisLmDecoder::new(model).decode(cand_sets)
}

// ---------------------------------------------------------------------------
// Model and automaton text formats.
// ---------------------------------------------------------------------------

impl DisLmModel {
    pub fn to_text(&self) -> String {
        let bias_mode = match self.bias_mode {
            BiasMode::Fixed(_) => "fixed",
            BiasMode::Tuned => "tuned",
        };
        let mut out = format!(
            "# dislm order={} bias={}:{:.17e} boundary={} iterations={} objective={:.9e}\n",
            self.order, bias_mode, self.bias, self.boundary, self.iterations, self.final_objective
        );
        let mut entries: Vec<(&Vec<String>, &f64)> = self.ngram_weights.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (gram, w) in entries {
            out.push_str(&format!("{}\t{w:.17e}\n", gram.join(" ")));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<DisLmModel, String> {
        let mut model = DisLmModel {
            ngram_weights: HashMap::new(),
            bias: DEFAULT_BIAS,
            bias_mode: BiasMode::Fixed(DEFAULT_BIAS),
            boundary: false,
            order: 3,
            iterations: 0,
            final_objective: 0.0,
        };
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for field in header.split_whitespace() {
                    if let Some(v) = field.strip_prefix("order=") {
                        model.order = v.parse().map_err(|_| format!("line {}: bad order", i + 1))?;
                    } else if let Some(v) = field.strip_prefix("bias=") {
                        let (mode, value) = v
                            .split_once(':')
                            .ok_or_else(|| format!("line {}: bad bias", i + 1))?;
                        model.bias =
                            value.parse().map_err(|_| format!("line {}: bad bias value", i + 1))?;
                        model.bias_mode = match mode {
                            "fixed" => BiasMode::Fixed(model.bias),
                            "tuned" => BiasMode::Tuned,
                            _ => return Err(format!("line {}: unknown bias mode", i + 1)),
                        };
                    } else if let Some(v) = field.strip_prefix("boundary=") {
                        model.boundary =
                            v.parse().map_err(|_| format!("line {}: bad boundary", i + 1))?;
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
            let (gram, w) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected ngram<TAB>weight", i + 1))?;
            let weight: f64 = w.parse().map_err(|_| format!("line {}: bad weight", i + 1))?;
            model
                .ngram_weights
                .insert(gram.split(' ').map(str::to_string).collect(), weight);
        }
        Ok(model)
    }
}

impl EncodedDisLm {
    /// Automaton artifact: symbol lines, then the standard transducer text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.symbols.words.iter().enumerate() {
            out.push_str(&format!("S {} {}\n", i + 1, w));
        }
        out.push_str(&crate::fst::serialize(&self.fst));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn cand_set(written: &str, options: &[&str], good: &[bool]) -> CandidateSet {
        let candidates: Vec<Vec<String>> = options.iter().map(|o| toks(o)).collect();
        let pass = candidates
            .iter()
            .position(|c| c.len() == 1 && c[0] == written)
            .unwrap_or(0);
        CandidateSet {
            written: written.to_string(),
            candidates,
            good_mask: good.to_vec(),
            pass_through_index: pass,
        }
    }

    fn fv_names(fv: &FeatureVector) -> Vec<String> {
        fv.iter().map(|(n, _)| n.to_string()).collect()
    }

    #[test]
    fn suffixes_draw_from_history() {
        let fv = extract_dislm_features(&toks("wake me at"), &toks("nine"), false, 3, false);
        let names = fv_names(&fv);
        assert_eq!(names, vec!["N at nine", "N me at nine", "N nine"]);
    }

    #[test]
    fn empty_history_pads() {
        let fv = extract_dislm_features(&[], &toks("a"), false, 3, false);
        let names = fv_names(&fv);
        assert_eq!(names, vec!["N <pad> <pad> a", "N <pad> a", "N a"]);
    }

    #[test]
    fn boundary_marker_separates_history_from_candidate() {
        let fv = extract_dislm_features(
            &toks("one nine one one eleven"),
            &toks("nine"),
            false,
            3,
            true,
        );
        let names = fv_names(&fv);
        assert!(names.contains(&"N eleven <p> nine".to_string()), "{names:?}");
        assert!(!names.contains(&"N eleven nine".to_string()));
    }

    #[test]
    fn multiword_candidate_suffixes_span_into_history() {
        let fv = extract_dislm_features(&toks("at"), &toks("a m"), false, 3, false);
        let names = fv_names(&fv);
        let want = ["N <pad> at a", "N a", "N a m", "N at a", "N at a m", "N m"];
        assert_eq!(names, want.map(String::from).to_vec());
    }

    #[test]
    fn bias_fires_only_for_pass_through() {
        let with = extract_dislm_features(&[], &toks("x"), true, 2, false);
        let without = extract_dislm_features(&[], &toks("x"), false, 2, false);
        assert_eq!(with.get("B"), 1);
        assert_eq!(without.get("B"), 0);
    }

    fn small_examples() -> Vec<DisLmExample> {
        let mut examples = Vec::new();
        for _ in 0..3 {
            examples.push(DisLmExample {
                history: toks("wake me at"),
                cands: cand_set("9:00", &["nine", "nine oh oh"], &[true, false]),
                pass_through: vec![false, false],
            });
            examples.push(DisLmExample {
                history: toks("i"),
                cands: cand_set("am", &["a m", "am"], &[false, true]),
                pass_through: vec![false, true],
            });
        }
        examples
    }

    #[test]
    fn fixed_bias_survives_training() {
        let config =
            DisLmConfig { bias: BiasMode::Fixed(-7.5), max_iter: 50, ..Default::default() };
        let model = train_dislm(&small_examples(), &config).unwrap();
        assert_eq!(model.bias, -7.5);
    }

    #[test]
    fn tuned_bias_moves_when_pass_through_always_wrong() {
        let mut examples = Vec::new();
        for _ in 0..4 {
            examples.push(DisLmExample {
                history: toks("call"),
                cands: cand_set("x", &["a", "x"], &[true, false]),
                pass_through: vec![false, true],
            });
        }
        let config = DisLmConfig {
            bias: BiasMode::Tuned,
            l2: 0.0,
            max_iter: 100,
            ..Default::default()
        };
        let model = train_dislm(&examples, &config).unwrap();
        assert!(model.bias < DEFAULT_BIAS, "bias {} should drop", model.bias);
        // And the argmax ranks pass-through last.
        let choice = decode_sentence(&model, &[cand_set("x", &["a", "x"], &[false, false])]);
        assert_eq!(choice, vec![0]);
    }

    #[test]
    fn empty_model_scores_zero_everywhere() {
        let model = DisLmModel {
            ngram_weights: HashMap::new(),
            bias: DEFAULT_BIAS,
            bias_mode: BiasMode::Fixed(DEFAULT_BIAS),
            boundary: false,
            order: 3,
            iterations: 0,
            final_objective: 0.0,
        };
        let enc = encode_as_fst(&model);
        assert_eq!(enc.path_weight(&toks("any words at all")), 0.0);
    }

    #[test]
    fn unigram_only_model_is_order_free() {
        let mut ngram_weights = HashMap::new();
        ngram_weights.insert(vec!["a".to_string()], 1.5);
        ngram_weights.insert(vec!["b".to_string()], -0.5);
        let model = DisLmModel {
            ngram_weights,
            bias: DEFAULT_BIAS,
            bias_mode: BiasMode::Fixed(DEFAULT_BIAS),
            boundary: false,
            order: 3,
            iterations: 0,
            final_objective: 0.0,
        };
        let enc = encode_as_fst(&model);
        assert!((enc.path_weight(&toks("a b")) - -1.0).abs() < 1e-12);
        assert!((enc.path_weight(&toks("b a")) - -1.0).abs() < 1e-12);
        assert!((enc.path_weight(&toks("a a b")) - -2.5).abs() < 1e-12);
    }

    #[test]
    fn automaton_score_equals_feature_dot_product() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vocab = ["one", "two", "nine", "oh", "a", "m"];
        for _ in 0..50 {
            // Random model over random n-grams.
            let mut ngram_weights = HashMap::new();
            for _ in 0..rng.random_range(1..30) {
                let n = rng.random_range(1..4usize);
                let gram: Vec<String> = (0..n)
                    .map(|_| vocab[rng.random_range(0..vocab.len())].to_string())
                    .collect();
                ngram_weights.insert(gram, rng.random_range(-2.0..2.0));
            }
            let model = DisLmModel {
                ngram_weights,
                bias: 0.0,
                bias_mode: BiasMode::Fixed(0.0),
                boundary: false,
                order: 3,
                iterations: 0,
                final_objective: 0.0,
            };
            let enc = encode_as_fst(&model);

            let len = rng.random_range(1..8);
            let seq: Vec<String> =
                (0..len).map(|_| vocab[rng.random_range(0..vocab.len())].to_string()).collect();

            // Independent route: one big candidate over empty history.
            let weights_by_name: HashMap<String, f64> = model
                .ngram_weights
                .iter()
                .map(|(g, &w)| (format!("{NGRAM_PREFIX}{}", g.join(" ")), w))
                .collect();
            let dot = extract_dislm_features(&[], &seq, false, 3, false).dot(&weights_by_name);
            let auto = enc.path_weight(&seq);
            assert!(
                (auto + dot).abs() < 1e-9,
                "automaton {auto} vs negated dot {dot} for {seq:?}"
            );
        }
    }

    #[test]
    fn all_singletons_decode_to_identity() {
        let model = train_dislm(&small_examples(), &DisLmConfig::default()).unwrap();
        let sets = vec![cand_set("x", &["x"], &[true]), cand_set("y", &["y"], &[true])];
        assert_eq!(decode_sentence(&model, &sets), vec![0, 0]);
    }

    #[test]
    fn two_by_two_matches_exhaustive_scoring() {
        let model = train_dislm(&small_examples(), &DisLmConfig::default()).unwrap();
        let sets = vec![
            cand_set("9:00", &["nine", "nine oh oh"], &[false, false]),
            cand_set("am", &["a m", "am"], &[false, false]),
        ];
        let got = decode_sentence(&model, &sets);

        let weights_by_name: HashMap<String, f64> = model
            .ngram_weights
            .iter()
            .map(|(g, &w)| (format!("{NGRAM_PREFIX}{}", g.join(" ")), w))
            .collect();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for i in 0..2 {
            for j in 0..2 {
                let first = &sets[0].candidates[i];
                let second = &sets[1].candidates[j];
                let mut score =
                    extract_dislm_features(&[], first, false, 3, false).dot(&weights_by_name);
                if sets[0].is_pass_through(i) {
                    score += model.bias;
                }
                score += extract_dislm_features(first, second, false, 3, false)
                    .dot(&weights_by_name);
                if sets[1].is_pass_through(j) {
                    score += model.bias;
                }
                if best.as_ref().map_or(true, |(s, _)| score > *s + 1e-12) {
                    best = Some((score, vec![i, j]));
                }
            }
        }
        assert_eq!(got, best.unwrap().1);
    }

    #[test]
    fn boundary_markers_flip_grouped_reading() {
        // Histories mimicking digit-string training make the digit reading
        // attractive; the marker lets grouped-plus-marker n-grams win.
        let mut ngram_weights = HashMap::new();
        ngram_weights.insert(toks("one one nine"), 2.0);
        ngram_weights.insert(toks("eleven <p> nine"), 5.0);
        ngram_weights.insert(toks("nineteen eleven"), 1.0);
        ngram_weights.insert(toks("one nine"), 1.0);
        let model = DisLmModel {
            ngram_weights,
            bias: DEFAULT_BIAS,
            bias_mode: BiasMode::Fixed(DEFAULT_BIAS),
            boundary: true,
            order: 3,
            iterations: 0,
            final_objective: 0.0,
        };
        let sets = vec![
            cand_set("1911", &["one nine one one", "nineteen eleven"], &[false, false]),
            cand_set("9mm", &["nine millimeter"], &[false]),
        ];
        let got = decode_sentence(&model, &sets);
        assert_eq!(got, vec![1, 0], "grouped reading should win under markers");
    }

    #[test]
    fn model_text_roundtrip() {
        let model = train_dislm(
            &small_examples(),
            &DisLmConfig { bias: BiasMode::Tuned, ..Default::default() },
        )
        .unwrap();
        let back = DisLmModel::from_text(&model.to_text()).unwrap();
        assert_eq!(model.order, back.order);
        assert_eq!(model.boundary, back.boundary);
        assert!((model.bias - back.bias).abs() < 1e-15);
        assert_eq!(model.ngram_weights.len(), back.ngram_weights.len());
        for (k, v) in &model.ngram_weights {
            assert!((back.ngram_weights[k] - v).abs() < 1e-15);
        }
    }
}
