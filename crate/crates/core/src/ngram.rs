//! Backoff n-gram language models over spoken tokens.
//!
//! Two smoothing estimators: Katz (Good-Turing discounts for counts 1..5,
//! the classic k=5 cutoff) for the baseline decoder, and Witten-Bell for
//! the candidate-pruning model. Both store probabilities in backoff form,
//! so every stored context satisfies sum-to-one over the vocabulary
//! including the backoff mass. A single unknown type catches
//! out-of-vocabulary words with a floor probability.

use std::collections::HashMap;

use thiserror::Error;

use crate::candidates::CandidateSet;

pub const BOS: u32 = 0;
pub const EOS: u32 = 1;
pub const UNK: u32 = 2;
const RESERVED: [&str; 3] = ["<s>", "</s>", "<unk>"];

/// Floor probability handed to the unknown type when discounting frees no
/// mass of its own.
const UNK_FLOOR: f64 = 1e-7;

/// Minimum probability mass a context reserves for backoff.
const MIN_BACKOFF_MASS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("cannot train a language model on an empty corpus")]
    EmptyCorpus,
    #[error("unsupported n-gram order {0} (1-3)")]
    BadOrder(usize),
    #[error("model text error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    Katz,
    WittenBell,
}

/// Bidirectional word/id map with reserved sentence-begin, sentence-end and
/// unknown entries.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        let mut v = Vocabulary { words: Vec::new(), ids: HashMap::new() };
        for w in RESERVED {
            v.intern(w);
        }
        v
    }

    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> u32 {
        self.ids.get(word).copied().unwrap_or(UNK)
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// All predictable ids: corpus words plus end-of-sentence and unknown,
    /// excluding sentence-begin.
    pub fn predictable(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.words.len() as u32).filter(|&id| id != BOS)
    }
}

/// A trained backoff n-gram model. Natural-log probabilities internally;
/// the text format uses log10 per n-gram-exchange convention.
#[derive(Debug, Clone)]
pub struct NgramLm {
    order: usize,
    smoothing: Smoothing,
    vocab: Vocabulary,
    /// (context, word) to ln P(word | context); context length < order.
    probs: HashMap<(Vec<u32>, u32), f64>,
    /// context to ln(backoff weight); absent means weight 1.
    backoffs: HashMap<Vec<u32>, f64>,
}

pub fn train_ngram(
    sentences: &[Vec<String>],
    order: usize,
    smoothing: Smoothing,
) -> Result<NgramLm, NgramError> {
    if sentences.is_empty() {
        return Err(NgramError::EmptyCorpus);
    }
    if !(1..=3).contains(&order) {
        return Err(NgramError::BadOrder(order));
    }

    let mut vocab = Vocabulary::new();
    let ids: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| s.iter().map(|w| vocab.intern(w)).collect())
        .collect();

    // counts[n-1]: context (length n-1) -> word -> count.
    let mut counts: Vec<HashMap<Vec<u32>, HashMap<u32, u64>>> = vec![HashMap::new(); order];
    for sent in &ids {
        let mut padded: Vec<u32> = vec![BOS; order - 1];
        padded.extend(sent);
        padded.push(EOS);
        for i in (order - 1)..padded.len() {
            let w = padded[i];
            for n in 1..=order {
                if i + 1 < n {
                    continue;
                }
                let ctx = padded[i + 1 - n..i].to_vec();
                *counts[n - 1].entry(ctx).or_default().entry(w).or_insert(0) += 1;
            }
        }
    }

    let mut lm = NgramLm {
        order,
        smoothing,
        vocab,
        probs: HashMap::new(),
        backoffs: HashMap::new(),
    };
    match smoothing {
        Smoothing::Katz => lm.estimate_katz(&counts),
        Smoothing::WittenBell => lm.estimate_witten_bell(&counts),
    }
    Ok(lm)
}

impl NgramLm {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Raw stored count-derived probability, used by tests inspecting the
    /// tables directly.
    pub fn stored_ln_prob(&self, context: &[&str], word: &str) -> Option<f64> {
        let ctx: Vec<u32> = context.iter().map(|w| self.vocab.id(w)).collect();
        self.probs.get(&(ctx, self.vocab.id(word))).copied()
    }

    /// ln P(word | context), backing off as needed. `context` may be any
    /// length; only the last `order - 1` ids matter.
    pub fn cond_ln_prob(&self, context: &[u32], word: u32) -> f64 {
        let start = context.len().saturating_sub(self.order - 1);
        self.lookup(&context[start..], word)
    }

    fn lookup(&self, context: &[u32], word: u32) -> f64 {
        if let Some(&lp) = self.probs.get(&(context.to_vec(), word)) {
            return lp;
        }
        if context.is_empty() {
            // Unigram table covers every seen word; anything else is unknown.
            return *self
                .probs
                .get(&(Vec::new(), UNK))
                .expect("unigram table always has an unknown entry");
        }
        let alpha = self.backoffs.get(context).copied().unwrap_or(0.0);
        alpha + self.lookup(&context[1..], word)
    }

    /// ln probability of a full sentence with begin/end padding.
    pub fn score_sequence(&self, tokens: &[impl AsRef<str>]) -> f64 {
        let mut hist = vec![BOS; self.order - 1];
        let mut total = 0.0;
        for t in tokens {
            let id = self.vocab.id(t.as_ref());
            total += self.cond_ln_prob(&hist, id);
            hist.push(id);
        }
        total += self.cond_ln_prob(&hist, EOS);
        total
    }

    fn estimate_katz(&mut self, counts: &[HashMap<Vec<u32>, HashMap<u32, u64>>]) {
        const K: u64 = 5;
        for n in 1..=self.order {
            let table = &counts[n - 1];
            // Good-Turing count-of-counts over all n-grams of this order.
            let mut nr = [0u64; (K + 2) as usize];
            for words in table.values() {
                for &c in words.values() {
                    if c <= K + 1 {
                        nr[c as usize] += 1;
                    }
                }
            }
            let discounts = katz_discounts(&nr, K);

            let mut contexts: Vec<&Vec<u32>> = table.keys().collect();
            contexts.sort();
            for ctx in contexts {
                let words = &table[ctx];
                let total: u64 = words.values().sum();
                let mut seen_mass = 0.0;
                let mut sorted: Vec<(&u32, &u64)> = words.iter().collect();
                sorted.sort();
                for (&w, &c) in &sorted {
                    let d = if (c as usize) < discounts.len() { discounts[c as usize] } else { 1.0 };
                    let p = d * c as f64 / total as f64;
                    seen_mass += p;
                    self.probs.insert((ctx.clone(), w), p.ln());
                }
                // Keep every in-vocabulary word reachable: when discounting
                // frees no mass (all counts above the cutoff, or degenerate
                // count-of-counts), scale the seen entries down to fund a
                // minimal reserve.
                let floor = if n == 1 { UNK_FLOOR } else { MIN_BACKOFF_MASS };
                let mut leftover = 1.0 - seen_mass;
                if leftover < floor {
                    let scale = (1.0 - floor) / seen_mass;
                    for (&w, _) in &sorted {
                        let key = (ctx.clone(), w);
                        let lp = self.probs[&key] + scale.ln();
                        self.probs.insert(key, lp);
                    }
                    leftover = floor;
                }
                if n == 1 {
                    self.probs.insert((ctx.clone(), UNK), leftover.ln());
                } else {
                    // Mass of the lower-order distribution on words unseen
                    // here; positive because the unknown type always has
                    // lower-order mass and is never seen in counts.
                    let mut lower_seen = 0.0;
                    for (&w, _) in &sorted {
                        lower_seen += self.lookup(&ctx[1..], w).exp();
                    }
                    let denom = (1.0 - lower_seen).max(f64::MIN_POSITIVE);
                    self.backoffs.insert(ctx.clone(), (leftover / denom).ln());
                }
            }
        }
    }

    fn estimate_witten_bell(&mut self, counts: &[HashMap<Vec<u32>, HashMap<u32, u64>>]) {
        for n in 1..=self.order {
            let table = &counts[n - 1];
            let mut contexts: Vec<&Vec<u32>> = table.keys().collect();
            contexts.sort();
            for ctx in contexts {
                let words = &table[ctx];
                let total: u64 = words.values().sum();
                let types = words.len() as f64;
                let lambda = total as f64 / (total as f64 + types);
                let mut sorted: Vec<(&u32, &u64)> = words.iter().collect();
                sorted.sort();
                if n == 1 {
                    // Base distribution: uniform over seen types plus unknown.
                    let base = 1.0 / (types + 1.0);
                    for (&w, &c) in &sorted {
                        let p = lambda * c as f64 / total as f64 + (1.0 - lambda) * base;
                        self.probs.insert((ctx.clone(), w), p.ln());
                    }
                    self.probs.insert((ctx.clone(), UNK), ((1.0 - lambda) * base).ln());
                } else {
                    for (&w, &c) in &sorted {
                        let lower = self.lookup(&ctx[1..], w).exp();
                        let p = lambda * c as f64 / total as f64 + (1.0 - lambda) * lower;
                        self.probs.insert((ctx.clone(), w), p.ln());
                    }
                    self.backoffs.insert(ctx.clone(), (1.0 - lambda).ln());
                }
            }
        }
    }
}

/// Good-Turing discount ratios d_c for c = 0..=K, with d_c = 1 fallbacks
/// whenever the count-of-counts are too sparse for the estimate.
fn katz_discounts(nr: &[u64], k: u64) -> Vec<f64> {
    let mut d = vec![1.0; (k + 1) as usize];
    let n1 = nr[1] as f64;
    let nk1 = nr[(k + 1) as usize] as f64;
    if nr[1] == 0 {
        return d;
    }
    let a = (k as f64 + 1.0) * nk1 / n1;
    if a >= 1.0 {
        return d;
    }
    for c in 1..=k {
        let ncv = nr[c as usize] as f64;
        let nc1 = nr[(c + 1) as usize] as f64;
        if ncv == 0.0 || nc1 == 0.0 {
            continue;
        }
        let c_star = (c as f64 + 1.0) * nc1 / ncv;
        let dc = (c_star / c as f64 - a) / (1.0 - a);
        if dc > 0.0 && dc <= 1.0 {
            d[c as usize] = dc;
        }
    }
    d
}

/// Pick one candidate per token maximizing the total sentence probability,
/// exactly, by dynamic programming over (order-1)-token histories. Ties go
/// to the joint choice that is lexicographically first in candidate order.
pub fn baseline_decode(cand_sets: &[CandidateSet], lm: &NgramLm) -> Vec<usize> {
    assert!(cand_sets.iter().all(|c| !c.is_empty()));
    let hist_len = lm.order - 1;

    #[derive(Clone)]
    struct Cell {
        score: f64,
        choices: Vec<usize>,
    }

    let mut states: Vec<Vec<u32>> = vec![vec![BOS; hist_len]];
    let mut cells: Vec<Cell> = vec![Cell { score: 0.0, choices: Vec::new() }];

    for cs in cand_sets {
        let mut next_index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut next_states: Vec<Vec<u32>> = Vec::new();
        let mut next_cells: Vec<Cell> = Vec::new();

        for (si, hist) in states.iter().enumerate() {
            let base = &cells[si];
            for (j, cand) in cs.candidates.iter().enumerate() {
                let mut h = hist.clone();
                let mut score = base.score;
                for w in cand {
                    let id = lm.vocab.id(w);
                    score += lm.cond_ln_prob(&h, id);
                    h.push(id);
                }
                let tail = h[h.len() - hist_len.min(h.len())..].to_vec();
                let mut choices = base.choices.clone();
                choices.push(j);
                match next_index.get(&tail) {
                    Some(&idx) => {
                        let cur = &mut next_cells[idx];
                        if score > cur.score
                            || (score == cur.score && choices < cur.choices)
                        {
                            *cur = Cell { score, choices };
                        }
                    }
                    None => {
                        next_index.insert(tail.clone(), next_states.len());
                        next_states.push(tail);
                        next_cells.push(Cell { score, choices });
                    }
                }
            }
        }
        states = next_states;
        cells = next_cells;
    }

    let mut best: Option<Cell> = None;
    for (si, hist) in states.iter().enumerate() {
        let mut cell = cells[si].clone();
        cell.score += lm.cond_ln_prob(hist, EOS);
        match &best {
            Some(b) if cell.score < b.score => {}
            Some(b) if cell.score == b.score && cell.choices >= b.choices => {}
            _ => best = Some(cell),
        }
    }
    best.expect("at least one state").choices
}

// ---------------------------------------------------------------------------
// Text serialization: per-order sections, log10 probabilities and backoffs.
// ---------------------------------------------------------------------------

impl NgramLm {
    pub fn to_text(&self) -> String {
        const LN10: f64 = std::f64::consts::LN_10;
        // Every n-gram that carries a probability, plus every backoff
        // context (those lacking a probability of their own, like a
        // sentence-begin run, get the -99 dummy).
        let mut grams: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.order];
        for (ctx, w) in self.probs.keys() {
            let mut full = ctx.clone();
            full.push(*w);
            grams[ctx.len()].push(full);
        }
        for ctx in self.backoffs.keys() {
            if !self.probs.contains_key(&(ctx[..ctx.len() - 1].to_vec(), ctx[ctx.len() - 1])) {
                grams[ctx.len() - 1].push(ctx.clone());
            }
        }
        for g in &mut grams {
            g.sort_by(|a, b| {
                let ka: Vec<&str> = a.iter().map(|&i| self.vocab.word(i)).collect();
                let kb: Vec<&str> = b.iter().map(|&i| self.vocab.word(i)).collect();
                ka.cmp(&kb)
            });
        }

        let mut out = String::new();
        out.push_str(&format!(
            "# order {} smoothing {}\n\\data\\\n",
            self.order,
            match self.smoothing {
                Smoothing::Katz => "katz",
                Smoothing::WittenBell => "witten-bell",
            }
        ));
        for n in 1..=self.order {
            out.push_str(&format!("ngram {}={}\n", n, grams[n - 1].len()));
        }
        for n in 1..=self.order {
            out.push_str(&format!("\n\\{n}-grams:\n"));
            for full in &grams[n - 1] {
                let (ctx, w) = full.split_at(n - 1);
                let lp = self
                    .probs
                    .get(&(ctx.to_vec(), w[0]))
                    .map(|&p| p / LN10)
                    .unwrap_or(-99.0);
                let gram: Vec<&str> = full.iter().map(|&i| self.vocab.word(i)).collect();
                match self.backoffs.get(full) {
                    Some(&b) if n < self.order => {
                        out.push_str(&format!("{:.6}\t{}\t{:.6}\n", lp, gram.join(" "), b / LN10))
                    }
                    _ => out.push_str(&format!("{:.6}\t{}\n", lp, gram.join(" "))),
                }
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }

    pub fn from_text(text: &str) -> Result<NgramLm, NgramError> {
        const LN10: f64 = std::f64::consts::LN_10;
        let err = |line: usize, msg: &str| NgramError::Format { line, msg: msg.to_string() };
        let mut order = 0usize;
        let mut smoothing = Smoothing::Katz;
        let mut vocab = Vocabulary::new();
        let mut probs = HashMap::new();
        let mut backoffs = HashMap::new();
        let mut section = 0usize;

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line == "\\data\\" || line == "\\end\\" || line.starts_with("ngram ") {
                continue;
            }
            if let Some(meta) = line.strip_prefix("# order ") {
                let mut parts = meta.split_whitespace();
                order = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(lineno, "bad order"))?;
                if parts.next() != Some("smoothing") {
                    return Err(err(lineno, "missing smoothing"));
                }
                smoothing = match parts.next() {
                    Some("katz") => Smoothing::Katz,
                    Some("witten-bell") => Smoothing::WittenBell,
                    _ => return Err(err(lineno, "unknown smoothing")),
                };
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('\\') {
                section = rest
                    .strip_suffix("-grams:")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(lineno, "bad section header"))?;
                continue;
            }
            if section == 0 {
                return Err(err(lineno, "entry outside any section"));
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 {
                return Err(err(lineno, "expected `logprob<TAB>ngram[<TAB>backoff]`"));
            }
            let lp: f64 = fields[0].parse().map_err(|_| err(lineno, "bad probability"))?;
            let words: Vec<&str> = fields[1].split(' ').collect();
            if words.len() != section {
                return Err(err(lineno, "ngram length does not match section"));
            }
            let ids: Vec<u32> = words.iter().map(|w| vocab.intern(w)).collect();
            let (ctx, w) = ids.split_at(section - 1);
            // -99 marks context-only entries that exist for their backoff.
            if lp > -98.9 {
                probs.insert((ctx.to_vec(), w[0]), lp * LN10);
            }
            if fields.len() >= 3 {
                let bo: f64 = fields[2].parse().map_err(|_| err(lineno, "bad backoff"))?;
                backoffs.insert(ids, bo * LN10);
            }
        }
        if order == 0 {
            return Err(err(1, "missing order header"));
        }
        Ok(NgramLm { order, smoothing, vocab, probs, backoffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::CandidateSet;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn sum_over_vocab(lm: &NgramLm, ctx: &[u32]) -> f64 {
        lm.vocab.predictable().map(|w| lm.cond_ln_prob(ctx, w).exp()).sum()
    }

    #[test]
    fn raw_unigram_counts_show_through() {
        let lm = train_ngram(&[toks("a a b")], 1, Smoothing::WittenBell).unwrap();
        // MLE before smoothing is 2/4 and 1/4 (with </s>); smoothing keeps
        // the ordering and the distribution sums to one.
        let pa = lm.cond_ln_prob(&[], lm.vocab.id("a")).exp();
        let pb = lm.cond_ln_prob(&[], lm.vocab.id("b")).exp();
        assert!(pa > pb);
        assert!((sum_over_vocab(&lm, &[]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn distributions_sum_to_one_for_sampled_contexts() {
        let corpus = vec![
            toks("wake me at nine a m"),
            toks("wake me at ten"),
            toks("call me at nine"),
            toks("nine a m"),
        ];
        for smoothing in [Smoothing::Katz, Smoothing::WittenBell] {
            for order in [1, 2, 3] {
                let lm = train_ngram(&corpus, order, smoothing).unwrap();
                let v = |w: &str| lm.vocab.id(w);
                let contexts: Vec<Vec<u32>> = vec![
                    vec![],
                    vec![BOS],
                    vec![v("wake")],
                    vec![v("me"), v("at")],
                    vec![v("at"), v("nine")],
                    vec![v("zzz")],
                    vec![BOS, BOS],
                ];
                for ctx in contexts {
                    if ctx.len() >= order {
                        continue;
                    }
                    let s = sum_over_vocab(&lm, &ctx);
                    assert!(
                        (s - 1.0).abs() < 1e-6,
                        "order {order} {smoothing:?} ctx {ctx:?} sums to {s}"
                    );
                }
            }
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            train_ngram(&[], 2, Smoothing::Katz),
            Err(NgramError::EmptyCorpus)
        ));
    }

    #[test]
    fn empty_sequence_scores_end_given_begin() {
        let lm = train_ngram(&[toks("a b")], 2, Smoothing::WittenBell).unwrap();
        let empty: Vec<String> = Vec::new();
        let got = lm.score_sequence(&empty);
        let want = lm.cond_ln_prob(&[BOS], EOS);
        assert_eq!(got, want);
    }

    #[test]
    fn chain_rule_matches_hand_computation() {
        let lm = train_ngram(&[toks("a b c")], 2, Smoothing::WittenBell).unwrap();
        let v = |w: &str| lm.vocab.id(w);
        let want = lm.cond_ln_prob(&[BOS], v("a"))
            + lm.cond_ln_prob(&[v("a")], v("b"))
            + lm.cond_ln_prob(&[v("b")], v("c"))
            + lm.cond_ln_prob(&[v("c")], EOS);
        assert!((lm.score_sequence(&toks("a b c")) - want).abs() < 1e-12);
    }

    #[test]
    fn training_sentence_beats_shuffled_unknowns() {
        let lm = train_ngram(&[toks("a b c"), toks("a b d")], 3, Smoothing::Katz).unwrap();
        assert!(lm.score_sequence(&toks("a b c")) > lm.score_sequence(&toks("d c a")));
    }

    #[test]
    fn appending_tokens_lowers_log_prob() {
        let lm = train_ngram(&[toks("a b")], 2, Smoothing::WittenBell).unwrap();
        let shorter = lm.score_sequence(&toks("a b"));
        let longer = lm.score_sequence(&toks("a b zzz"));
        assert!(longer < shorter);
    }

    #[test]
    fn unigram_model_is_order_consistent() {
        let lm = train_ngram(&[toks("a b a")], 1, Smoothing::Katz).unwrap();
        let v = |w: &str| lm.vocab.id(w);
        let sum = lm.cond_ln_prob(&[], v("a")) * 2.0
            + lm.cond_ln_prob(&[], v("b"))
            + lm.cond_ln_prob(&[], EOS);
        assert!((lm.score_sequence(&toks("a b a")) - sum).abs() < 1e-12);
    }

    fn cand(written: &str, options: &[&str]) -> CandidateSet {
        let candidates: Vec<Vec<String>> = options.iter().map(|o| toks(o)).collect();
        let pass = options.iter().position(|&o| o == written).unwrap_or(0);
        let n = candidates.len();
        CandidateSet {
            written: written.to_string(),
            candidates,
            good_mask: vec![false; n],
            pass_through_index: pass,
        }
    }

    #[test]
    fn all_pass_through_decodes_to_identity() {
        let lm = train_ngram(&[toks("x y")], 3, Smoothing::Katz).unwrap();
        let sets = vec![cand("x", &["x"]), cand("y", &["y"])];
        assert_eq!(baseline_decode(&sets, &lm), vec![0, 0]);
    }

    #[test]
    fn two_by_two_matches_brute_force() {
        let corpus = vec![toks("a b"), toks("a b"), toks("c d")];
        let lm = train_ngram(&corpus, 2, Smoothing::Katz).unwrap();
        let sets = vec![cand("1", &["a", "c"]), cand("2", &["d", "b"])];
        let got = baseline_decode(&sets, &lm);

        let mut best: Option<(f64, Vec<usize>)> = None;
        for i in 0..2 {
            for j in 0..2 {
                let mut sent = sets[0].candidates[i].clone();
                sent.extend(sets[1].candidates[j].clone());
                let score = lm.score_sequence(&sent);
                if best.as_ref().map_or(true, |(s, _)| score > *s) {
                    best = Some((score, vec![i, j]));
                }
            }
        }
        assert_eq!(got, best.unwrap().1);
    }

    #[test]
    fn ties_prefer_first_candidate() {
        let lm = train_ngram(&[toks("a")], 1, Smoothing::WittenBell).unwrap();
        // Both candidates are the same token sequence, so scores tie exactly.
        let sets = vec![cand("x", &["a", "a"])];
        assert_eq!(baseline_decode(&sets, &lm), vec![0]);
    }

    #[test]
    fn text_roundtrip_preserves_scores() {
        let corpus = vec![toks("wake me at nine"), toks("wake me up")];
        for smoothing in [Smoothing::Katz, Smoothing::WittenBell] {
            let lm = train_ngram(&corpus, 3, smoothing).unwrap();
            let back = NgramLm::from_text(&lm.to_text()).unwrap();
            for probe in ["wake me at nine", "me wake", "zzz", "wake me up"] {
                let a = lm.score_sequence(&toks(probe));
                let b = back.score_sequence(&toks(probe));
                assert!((a - b).abs() < 1e-4, "{probe}: {a} vs {b}");
            }
        }
    }
}
