//! Aligned written/spoken corpora and synthetic data generation.
//!
//! A sentence is a sequence of (written token, spoken token sequence)
//! pairs, aligned at the word level. The file format is one pair per line,
//! `written<TAB>spoken words space-separated`, blank lines between
//! sentences, `#` line comments.
//!
//! The synthetic generator stands in for transcribed voice-query data. It
//! mixes pass-through filler words with semiotic-class tokens whose gold
//! readings depend on context — time tokens read differently before a
//! period word, four-digit tokens read paired after months or before
//! measures, five-digit tokens read digit by digit — so context carries
//! real signal for the ranking models.

use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::NumberSpec;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("whitespace inside token at line {line}")]
    WhitespaceInToken { line: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One aligned sentence: written tokens with their spoken realizations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlignedSentence {
    pub pairs: Vec<(String, Vec<String>)>,
}

impl AlignedSentence {
    pub fn written(&self) -> Vec<&str> {
        self.pairs.iter().map(|(w, _)| w.as_str()).collect()
    }

    pub fn spoken(&self) -> Vec<&str> {
        self.pairs.iter().flat_map(|(_, z)| z.iter().map(String::as_str)).collect()
    }

    /// Whether token `i` changes under normalization (z differs from the
    /// written token itself).
    pub fn is_normalized(&self, i: usize) -> bool {
        let (w, z) = &self.pairs[i];
        !(z.len() == 1 && z[0] == *w)
    }
}

pub type Corpus = Vec<AlignedSentence>;

pub fn corpus_to_text(corpus: &[AlignedSentence]) -> String {
    let mut out = String::new();
    for (i, sent) in corpus.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (w, z) in &sent.pairs {
            let _ = writeln!(out, "{w}\t{}", z.join(" "));
        }
    }
    out
}

pub fn corpus_from_text(text: &str) -> Result<Corpus, CorpusError> {
    let mut corpus = Vec::new();
    let mut current = AlignedSentence::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.pairs.is_empty() {
                corpus.push(std::mem::take(&mut current));
            }
            continue;
        }
        let Some((written, spoken)) = line.split_once('\t') else {
            return Err(CorpusError::Parse {
                line: lineno,
                msg: "expected `written<TAB>spoken ...`".to_string(),
            });
        };
        if written.is_empty() || spoken.trim().is_empty() {
            return Err(CorpusError::Parse {
                line: lineno,
                msg: "empty written token or spoken side".to_string(),
            });
        }
        if written.contains(char::is_whitespace) {
            return Err(CorpusError::WhitespaceInToken { line: lineno });
        }
        let z: Vec<String> = spoken.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
        current.pairs.push((written.to_string(), z));
    }
    if !current.pairs.is_empty() {
        corpus.push(current);
    }
    Ok(corpus)
}

pub fn save_corpus(corpus: &[AlignedSentence], path: &Path) -> Result<(), CorpusError> {
    std::fs::write(path, corpus_to_text(corpus)).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    corpus_from_text(&text)
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation.
// ---------------------------------------------------------------------------

/// Semiotic token families the generator emits; each sentence gets exactly
/// one primary pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemioticClass {
    /// "9:00" or "3:30", optionally followed by a separate am/pm token.
    Time,
    /// "9:30pm" with the period attached to the token.
    TimeAttached,
    /// Four-digit token after a month word or "since": paired reading.
    Year,
    /// Plain 2-4 digit token: full cardinal reading.
    Cardinal,
    /// Five digits: digit-by-digit reading.
    FiveDigit,
    /// Three digits after "room"/"flight"/"bus": paired reading.
    PairedSmall,
    /// "23rd": ordinal reading.
    Ordinal,
    /// "$25": number plus currency word.
    Currency,
    /// "9mm": number plus unit word.
    Measure,
    /// Four-digit paired reading directly before a measure token.
    MeasurePair,
    /// "maps.com": spelled with "dot".
    Url,
    /// "5.5": integer part, "point", fractional digits.
    Decimal,
    /// "+" read as an operator word.
    Plus,
}

impl SemioticClass {
    pub const ALL: [SemioticClass; 13] = [
        SemioticClass::Time,
        SemioticClass::TimeAttached,
        SemioticClass::Year,
        SemioticClass::Cardinal,
        SemioticClass::FiveDigit,
        SemioticClass::PairedSmall,
        SemioticClass::Ordinal,
        SemioticClass::Currency,
        SemioticClass::Measure,
        SemioticClass::MeasurePair,
        SemioticClass::Url,
        SemioticClass::Decimal,
        SemioticClass::Plus,
    ];
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub train_sentences: usize,
    pub dev_sentences: usize,
    pub test_sentences: usize,
    pub class_weights: Vec<(SemioticClass, f64)>,
    /// Probability that a time/paired sentence opens with the "i am ..."
    /// pass-through trap.
    pub am_trap_rate: f64,
    pub numbers: NumberSpec,
}

impl SynthConfig {
    pub fn new(numbers: NumberSpec) -> SynthConfig {
        SynthConfig {
            train_sentences: 5000,
            dev_sentences: 500,
            test_sentences: 500,
            class_weights: vec![
                (SemioticClass::Time, 0.16),
                (SemioticClass::TimeAttached, 0.06),
                (SemioticClass::Year, 0.10),
                (SemioticClass::Cardinal, 0.14),
                (SemioticClass::FiveDigit, 0.10),
                (SemioticClass::PairedSmall, 0.10),
                (SemioticClass::Ordinal, 0.08),
                (SemioticClass::Currency, 0.08),
                (SemioticClass::Measure, 0.06),
                (SemioticClass::MeasurePair, 0.05),
                (SemioticClass::Url, 0.04),
                (SemioticClass::Decimal, 0.02),
                (SemioticClass::Plus, 0.01),
            ],
            am_trap_rate: 0.05,
            numbers,
        }
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.class_weights.is_empty() {
            return Err(CorpusError::InvalidConfig("no class weights".to_string()));
        }
        if self.class_weights.iter().any(|(_, w)| *w < 0.0)
            || self.class_weights.iter().map(|(_, w)| w).sum::<f64>() <= 0.0
        {
            return Err(CorpusError::InvalidConfig("class weights must be nonnegative and sum positive".to_string()));
        }
        if !(0.0..=1.0).contains(&self.am_trap_rate) {
            return Err(CorpusError::InvalidConfig("am_trap_rate outside [0, 1]".to_string()));
        }
        if self.train_sentences == 0 || self.test_sentences == 0 {
            return Err(CorpusError::InvalidConfig("empty split".to_string()));
        }
        Ok(())
    }
}

const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december",
];

/// Deterministically generate (train, dev, test) corpora.
pub fn generate_synthetic(
    config: &SynthConfig,
    seed: u64,
) -> Result<(Corpus, Corpus, Corpus), CorpusError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = Generator { config };
    let mut make = |n: usize, rng: &mut ChaCha8Rng| -> Corpus {
        (0..n).map(|_| gen.sentence(rng)).collect()
    };
    let train = make(config.train_sentences, &mut rng);
    let dev = make(config.dev_sentences, &mut rng);
    let test = make(config.test_sentences, &mut rng);
    Ok((train, dev, test))
}

/// Spoken-side readings of randomly generated numbers, for training the
/// candidate-pruning language model.
pub fn generate_number_corpus(
    numbers: &NumberSpec,
    count: usize,
    seed: u64,
) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = NumberWords { spec: numbers };
    (0..count)
        .map(|_| match rng.random_range(0..4u32) {
            0 => words.cardinal(rng.random_range(10..100)),
            1 => words.cardinal(rng.random_range(100..1000)),
            2 => words.cardinal(rng.random_range(1000..10000)),
            _ => {
                let n: u32 = rng.random_range(10000..100000);
                words.digits(&n.to_string())
            }
        })
        .collect()
}

/// Gold readings built from the same word tables the number transducer
/// uses, so every generated reading is in the grammar's output inventory.
struct NumberWords<'a> {
    spec: &'a NumberSpec,
}

impl<'a> NumberWords<'a> {
    fn unit(&self, u: u32) -> String {
        self.spec.unit_word(u).to_string()
    }

    /// 10-99 as a spoken word sequence.
    fn two_digit(&self, n: u32) -> Vec<String> {
        assert!((10..100).contains(&n));
        if n < 20 {
            vec![self.spec.teen_word(n).to_string()]
        } else if n % 10 == 0 {
            vec![self.spec.ten_word(n).to_string()]
        } else {
            vec![self.spec.ten_word(n / 10 * 10).to_string(), self.unit(n % 10)]
        }
    }

    /// Full cardinal reading of 1..=999999.
    fn cardinal(&self, n: u64) -> Vec<String> {
        assert!(n >= 1 && n <= 999_999);
        let mut out = Vec::new();
        if n >= 1000 {
            out.extend(self.cardinal(n / 1000));
            out.push(self.spec.scale_word(1000).to_string());
            if n % 1000 > 0 {
                out.extend(self.cardinal(n % 1000));
            }
            return out;
        }
        if n >= 100 {
            out.push(self.unit((n / 100) as u32));
            out.push(self.spec.scale_word(100).to_string());
            if n % 100 > 0 {
                out.extend(self.under_hundred((n % 100) as u32));
            }
            return out;
        }
        self.under_hundred(n as u32)
    }

    fn under_hundred(&self, n: u32) -> Vec<String> {
        if n >= 10 {
            self.two_digit(n)
        } else {
            vec![self.unit(n)]
        }
    }

    /// Digit-by-digit with the informal zero ("oh").
    fn digits(&self, s: &str) -> Vec<String> {
        s.chars()
            .map(|c| {
                let d = c.to_digit(10).expect("digit");
                let words = self.spec.digit_words(d);
                words.last().expect("digit word").to_string()
            })
            .collect()
    }

    /// Pair position of a paired reading: 10-99 as two-digit, 1-9 as
    /// "oh X".
    fn pair(&self, n: u32) -> Vec<String> {
        if n >= 10 {
            self.two_digit(n)
        } else {
            let oh = self.spec.digit_words(0).last().unwrap().to_string();
            vec![oh, self.unit(n)]
        }
    }

    /// Four-digit paired reading (second pair nonzero).
    fn paired4(&self, n: u32) -> Vec<String> {
        let mut out = self.two_digit(n / 100);
        out.extend(self.pair(n % 100));
        out
    }

    /// Ordinal reading of 1..=99.
    fn ordinal(&self, n: u32) -> Vec<String> {
        let mut words = self.under_hundred(n);
        let last = words.pop().unwrap();
        words.push(self.spec.ordinalize(&last));
        words
    }

    fn ordinal_suffix(&self, n: u32) -> &'static str {
        match (n % 100, n % 10) {
            (11..=13, _) => "th",
            (_, 1) => "st",
            (_, 2) => "nd",
            (_, 3) => "rd",
            _ => "th",
        }
    }
}

struct Generator<'a> {
    config: &'a SynthConfig,
}

impl<'a> Generator<'a> {
    fn pick_class(&self, rng: &mut ChaCha8Rng) -> SemioticClass {
        let total: f64 = self.config.class_weights.iter().map(|(_, w)| w).sum();
        let mut x = rng.random_range(0.0..total);
        for (class, w) in &self.config.class_weights {
            if x < *w {
                return *class;
            }
            x -= w;
        }
        self.config.class_weights.last().unwrap().0
    }

    fn sentence(&self, rng: &mut ChaCha8Rng) -> AlignedSentence {
        let class = self.pick_class(rng);
        let words = NumberWords { spec: &self.config.numbers };
        let mut s = AlignedSentence::default();

        let pass = |s: &mut AlignedSentence, tokens: &str| {
            for t in tokens.split_whitespace() {
                s.pairs.push((t.to_string(), vec![t.to_string()]));
            }
        };
        let pair = |s: &mut AlignedSentence, written: String, z: Vec<String>| {
            s.pairs.push((written, z));
        };
        let pick = |rng: &mut ChaCha8Rng, options: &[&'static str]| -> &'static str {
            options[rng.random_range(0..options.len())]
        };

        // The pass-through trap: "am" as a verb, which the covering grammar
        // can also read as a letter sequence.
        let trap = rng.random_bool(self.config.am_trap_rate);
        if trap {
            pass(&mut s, pick(rng, &["i am busy", "i am free", "i am here", "i am late"]));
        }

        match class {
            SemioticClass::Time | SemioticClass::TimeAttached => {
                let hour = rng.random_range(1..13u32);
                let minute = rng.random_range(0..60u32);
                let with_period = class == SemioticClass::TimeAttached || rng.random_bool(0.6);
                let pm = pick(rng, &["am", "pm"]);
                let pm_spoken: Vec<String> =
                    pm.chars().map(|c| c.to_string()).collect();

                let mut time_z = words.under_hundred(hour);
                if minute == 0 {
                    if !with_period {
                        time_z.push("o'clock".to_string());
                    }
                } else {
                    time_z.extend(words.pair(minute));
                }

                if !trap {
                    pass(
                        &mut s,
                        pick(rng, &["wake me at", "set an alarm for", "call me at", "meet me at"]),
                    );
                } else {
                    pass(&mut s, "at");
                }
                match class {
                    SemioticClass::Time => {
                        pair(&mut s, format!("{hour}:{minute:02}"), time_z);
                        if with_period {
                            pair(&mut s, pm.to_string(), pm_spoken);
                        }
                    }
                    _ => {
                        let mut z = time_z;
                        z.extend(pm_spoken);
                        pair(&mut s, format!("{hour}:{minute:02}{pm}"), z);
                    }
                }
            }
            SemioticClass::Year => {
                let first = rng.random_range(10..21u32);
                let second = rng.random_range(1..100u32);
                let year = first * 100 + second;
                if rng.random_bool(0.5) {
                    pass(&mut s, pick(rng, &["meet me in", "my birthday is in", "it opened in"]));
                    pass(&mut s, MONTHS[rng.random_range(0..12)]);
                } else {
                    pass(&mut s, pick(rng, &["open since", "running since", "here since"]));
                }
                pair(&mut s, year.to_string(), words.paired4(year));
            }
            SemioticClass::Cardinal => {
                let n: u64 = match rng.random_range(0..3u32) {
                    0 => rng.random_range(21..100),
                    1 => rng.random_range(101..1000),
                    _ => rng.random_range(1001..10000),
                };
                pass(&mut s, pick(rng, &["the total is", "the price is", "count to", "we sold"]));
                pair(&mut s, n.to_string(), words.cardinal(n));
            }
            SemioticClass::FiveDigit => {
                let n: u32 = rng.random_range(10000..100000);
                pass(&mut s, pick(rng, &["zip code", "my zip is", "the code is"]));
                pair(&mut s, n.to_string(), words.digits(&n.to_string()));
            }
            SemioticClass::PairedSmall => {
                let lead = rng.random_range(1..10u32);
                let second = rng.random_range(1..100u32);
                let n = lead * 100 + second;
                if !trap {
                    pass(&mut s, pick(rng, &["i am in", "we are in", "booked"]));
                }
                pass(&mut s, pick(rng, &["room", "flight", "bus"]));
                let mut z = vec![words.unit(lead)];
                z.extend(words.pair(second));
                pair(&mut s, n.to_string(), z);
            }
            SemioticClass::Ordinal => {
                let n = rng.random_range(1..32u32);
                pass(&mut s, pick(rng, &["the", "on the", "until the"]));
                pair(
                    &mut s,
                    format!("{n}{}", words.ordinal_suffix(n)),
                    words.ordinal(n),
                );
                pass(&mut s, "of");
                pass(&mut s, MONTHS[rng.random_range(0..12)]);
            }
            SemioticClass::Currency => {
                let n: u64 = rng.random_range(2..1000);
                pass(&mut s, pick(rng, &["it costs", "i paid", "tickets are"]));
                let mut z = words.cardinal(n);
                z.push("dollars".to_string());
                pair(&mut s, format!("${n}"), z);
            }
            SemioticClass::Measure => {
                let n: u64 = rng.random_range(2..100);
                pass(&mut s, pick(rng, &["a", "the", "using a"]));
                let mut z = words.cardinal(n);
                z.push("millimeter".to_string());
                pair(&mut s, format!("{n}mm"), z);
                pass(&mut s, pick(rng, &["lens", "socket", "round"]));
            }
            SemioticClass::MeasurePair => {
                let first = rng.random_range(10..100u32);
                let second = rng.random_range(10..100u32);
                let year_like = first * 100 + second;
                let n = rng.random_range(2..10u64);
                pass(&mut s, pick(rng, &["caliber", "the", "a"]));
                pair(&mut s, year_like.to_string(), words.paired4(year_like));
                let mut z = words.cardinal(n);
                z.push("millimeter".to_string());
                pair(&mut s, format!("{n}mm"), z);
            }
            SemioticClass::Url => {
                let word = pick(rng, &["weather", "news", "maps", "mail", "shop", "games"]);
                let tld = pick(rng, &["com", "net", "org"]);
                pass(&mut s, pick(rng, &["go to", "visit", "check"]));
                pair(
                    &mut s,
                    format!("{word}.{tld}"),
                    vec![word.to_string(), "dot".to_string(), tld.to_string()],
                );
            }
            SemioticClass::Decimal => {
                let a = rng.random_range(1..10u32);
                let b = rng.random_range(1..10u32);
                pass(&mut s, pick(rng, &["the version is", "it measures", "pi is about"]));
                pair(
                    &mut s,
                    format!("{a}.{b}"),
                    vec![words.unit(a), "point".to_string(), words.unit(b)],
                );
            }
            SemioticClass::Plus => {
                let a = rng.random_range(2..100u64);
                let b = rng.random_range(2..100u64);
                pass(&mut s, pick(rng, &["what is", "add"]));
                pair(&mut s, a.to_string(), words.cardinal(a));
                pair(&mut s, "+".to_string(), vec!["plus".to_string()]);
                pair(&mut s, b.to_string(), words.cardinal(b));
            }
        }

        if rng.random_bool(0.3) {
            pass(&mut s, pick(rng, &["please", "now", "today", "thanks"]));
        }
        s
    }
}
