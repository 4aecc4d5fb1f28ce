//! Built-in number verbalizer.
//!
//! Builds a transducer from digit strings (up to `max_digits` characters)
//! to their spoken readings. Readings are rule-generated from a
//! [`NumberSpec`] word table rather than learned; the enabled
//! [`ReadingMode`]s control which reading families the transducer offers:
//!
//! * cardinal — `123` to `one hundred twenty three`
//! * ordinal — `23` to `twenty third`
//! * digit-by-digit — `123` to `one two three` (zero may read `oh`)
//! * paired — two-digit grouping: `1911` to `nineteen eleven`,
//!   `920` to `nine twenty`
//! * hundreds — `2200` to `twenty two hundred`

use std::collections::{BTreeMap, BTreeSet};

use crate::fst::{concat, cross, union_all, Fst};

use super::GrammarError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReadingMode {
    Cardinal,
    Ordinal,
    DigitByDigit,
    Paired,
    Hundreds,
}

impl ReadingMode {
    pub const ALL: [ReadingMode; 5] = [
        ReadingMode::Cardinal,
        ReadingMode::Ordinal,
        ReadingMode::DigitByDigit,
        ReadingMode::Paired,
        ReadingMode::Hundreds,
    ];

    fn from_name(name: &str) -> Option<ReadingMode> {
        Some(match name {
            "cardinal" => ReadingMode::Cardinal,
            "ordinal" => ReadingMode::Ordinal,
            "digit" => ReadingMode::DigitByDigit,
            "paired" => ReadingMode::Paired,
            "hundreds" => ReadingMode::Hundreds,
            _ => return None,
        })
    }
}

/// Word tables for number readings.
///
/// Loaded from a TSV of `section<TAB>key<TAB>word` lines with sections
/// `unit` (1-9), `teen` (10-19), `ten` (20,30,..90), `scale` (100, 1000),
/// `digit` (0-9; repeated keys give variants such as `zero`/`oh`),
/// `ordinal` (cardinal word to ordinal word), and optional `mode` lines
/// naming the enabled reading modes (all are enabled when absent).
#[derive(Debug, Clone)]
pub struct NumberSpec {
    units: BTreeMap<u32, Vec<String>>,
    teens: BTreeMap<u32, Vec<String>>,
    tens: BTreeMap<u32, Vec<String>>,
    scales: BTreeMap<u64, Vec<String>>,
    digits: BTreeMap<u32, Vec<String>>,
    ordinals: BTreeMap<String, String>,
    modes: BTreeSet<ReadingMode>,
}

impl NumberSpec {
    pub fn parse(text: &str) -> Result<NumberSpec, GrammarError> {
        let mut spec = NumberSpec {
            units: BTreeMap::new(),
            teens: BTreeMap::new(),
            tens: BTreeMap::new(),
            scales: BTreeMap::new(),
            digits: BTreeMap::new(),
            ordinals: BTreeMap::new(),
            modes: BTreeSet::new(),
        };
        let mut any_mode_line = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| GrammarError::NumberFormat { line: lineno, msg: msg.to_string() };
            match fields[0] {
                "mode" => {
                    if fields.len() != 2 {
                        return Err(bad("mode lines are `mode<TAB>name`"));
                    }
                    let mode = ReadingMode::from_name(fields[1])
                        .ok_or_else(|| bad(&format!("unknown mode `{}`", fields[1])))?;
                    spec.modes.insert(mode);
                    any_mode_line = true;
                }
                "ordinal" => {
                    if fields.len() != 3 {
                        return Err(bad("ordinal lines are `ordinal<TAB>word<TAB>ordinal-word`"));
                    }
                    spec.ordinals.insert(fields[1].to_string(), fields[2].to_string());
                }
                section @ ("unit" | "teen" | "ten" | "scale" | "digit") => {
                    if fields.len() != 3 {
                        return Err(bad("expected `section<TAB>key<TAB>word`"));
                    }
                    let key: u64 = fields[1].parse().map_err(|_| bad("numeric key expected"))?;
                    let word = fields[2].to_string();
                    if word.is_empty() || word.contains(char::is_whitespace) {
                        return Err(bad("words must be single nonempty tokens"));
                    }
                    match section {
                        "unit" => spec.units.entry(key as u32).or_default().push(word),
                        "teen" => spec.teens.entry(key as u32).or_default().push(word),
                        "ten" => spec.tens.entry(key as u32).or_default().push(word),
                        "scale" => spec.scales.entry(key).or_default().push(word),
                        "digit" => spec.digits.entry(key as u32).or_default().push(word),
                        _ => unreachable!(),
                    }
                }
                other => return Err(bad(&format!("unknown section `{other}`"))),
            }
        }
        if !any_mode_line {
            spec.modes = ReadingMode::ALL.into_iter().collect();
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), GrammarError> {
        let bad = |msg: String| GrammarError::NumberFormat { line: 0, msg };
        for d in 0..=9u32 {
            if self.digits.get(&d).map_or(true, Vec::is_empty) {
                return Err(bad(format!("digit {d} has no word form")));
            }
        }
        for u in 1..=9u32 {
            if self.units.get(&u).map_or(true, Vec::is_empty) {
                return Err(bad(format!("unit {u} has no word form")));
            }
        }
        for t in 10..=19u32 {
            if self.teens.get(&t).map_or(true, Vec::is_empty) {
                return Err(bad(format!("teen {t} has no word form")));
            }
        }
        for t in [20u32, 30, 40, 50, 60, 70, 80, 90] {
            if self.tens.get(&t).map_or(true, Vec::is_empty) {
                return Err(bad(format!("ten {t} has no word form")));
            }
        }
        for s in [100u64, 1000] {
            if self.scales.get(&s).map_or(true, Vec::is_empty) {
                return Err(bad(format!("scale {s} has no word form")));
            }
        }
        if self.modes.is_empty() {
            return Err(bad("no reading modes enabled".to_string()));
        }
        Ok(())
    }

    pub fn modes(&self) -> impl Iterator<Item = ReadingMode> + '_ {
        self.modes.iter().copied()
    }

    pub fn with_modes(&self, modes: &[ReadingMode]) -> NumberSpec {
        let mut out = self.clone();
        out.modes = modes.iter().copied().collect();
        out
    }

    pub(crate) fn unit_word(&self, u: u32) -> &str {
        &self.units[&u][0]
    }
    pub(crate) fn teen_word(&self, t: u32) -> &str {
        &self.teens[&t][0]
    }
    pub(crate) fn ten_word(&self, t: u32) -> &str {
        &self.tens[&t][0]
    }
    pub(crate) fn scale_word(&self, s: u64) -> &str {
        &self.scales[&s][0]
    }
    /// Formal and informal digit words; index 0 is the formal form and the
    /// last entry the pair-position variant ("zero" vs "oh").
    pub(crate) fn digit_words(&self, d: u32) -> &[String] {
        &self.digits[&d]
    }

    /// Ordinal form of a cardinal word. Falls back to `word + "th"` for
    /// words absent from the table.
    pub(crate) fn ordinalize(&self, word: &str) -> String {
        self.ordinals.get(word).cloned().unwrap_or_else(|| format!("{word}th"))
    }
}

struct Builder<'a> {
    spec: &'a NumberSpec,
}

/// Insert a word on the output tape, prefixed by a space.
fn emit(word: &str) -> Fst {
    cross("", &format!(" {word}"))
}

/// Consume `digits` from the input and emit ` word`.
fn read(digits: &str, word: &str) -> Fst {
    cross(digits, &format!(" {word}"))
}

fn cat(parts: &[&Fst]) -> Fst {
    let mut it = parts.iter();
    let first = (*it.next().expect("nonempty")).clone();
    it.fold(first, |acc, p| concat(&acc, p))
}

impl<'a> Builder<'a> {
    /// Single nonzero digit as a unit word; ordinal form when `ord`.
    fn units(&self, ord: bool) -> Fst {
        let parts: Vec<Fst> = (1..=9)
            .map(|u| {
                let w = self.spec.unit_word(u);
                let w = if ord { self.spec.ordinalize(w) } else { w.to_string() };
                read(&u.to_string(), &w)
            })
            .collect();
        union_all(&parts.iter().collect::<Vec<_>>())
    }

    /// Exactly two digits, 10-99, read as one two-digit cardinal.
    fn two_digit(&self, ord: bool) -> Fst {
        let mut parts: Vec<Fst> = Vec::new();
        for t in 10..=19 {
            let w = self.spec.teen_word(t);
            let w = if ord { self.spec.ordinalize(w) } else { w.to_string() };
            parts.push(read(&t.to_string(), &w));
        }
        for tens in (20..=90).step_by(10) {
            let prefix_digit = (tens / 10).to_string();
            let ten_word = self.spec.ten_word(tens);
            // Exact ten: "20" -> "twenty" / "twentieth".
            let exact_word =
                if ord { self.spec.ordinalize(ten_word) } else { ten_word.to_string() };
            parts.push(read(&format!("{prefix_digit}0"), &exact_word));
            // Composite: "21" -> "twenty one" / "twenty first".
            parts.push(cat(&[&read(&prefix_digit, ten_word), &self.units(ord)]));
        }
        union_all(&parts.iter().collect::<Vec<_>>())
    }

    /// Exactly three digits, 100-999, full cardinal with "hundred".
    fn three_digit(&self, ord: bool) -> Fst {
        let hundred = self.spec.scale_word(100);
        let hundred_final =
            if ord { self.spec.ordinalize(hundred) } else { hundred.to_string() };
        let lead = self.units(false);
        let exact = cat(&[&lead, &emit(&hundred_final), &cross("00", "")]);
        let with_tens = cat(&[&lead, &emit(hundred), &self.two_digit(ord)]);
        let with_units = cat(&[&lead, &emit(hundred), &cross("0", ""), &self.units(ord)]);
        union_all(&[&exact, &with_tens, &with_units])
    }

    /// `len`-digit numbers (4-6 digits) with "thousand".
    fn thousands(&self, len: usize, ord: bool) -> Fst {
        let thousand = self.spec.scale_word(1000);
        let lead = match len {
            4 => self.units(false),
            5 => self.two_digit(false),
            6 => self.three_digit(false),
            _ => unreachable!("thousands covers 4-6 digit strings"),
        };
        let thousand_final =
            if ord { self.spec.ordinalize(thousand) } else { thousand.to_string() };
        let exact = cat(&[&lead, &emit(&thousand_final), &cross("000", "")]);
        let rest = union_all(&[
            &cat(&[&cross("00", ""), &self.units(ord)]),
            &cat(&[&cross("0", ""), &self.two_digit(ord)]),
            &self.three_digit(ord),
        ]);
        let with_rest = cat(&[&lead, &emit(thousand), &rest]);
        union_all(&[&exact, &with_rest])
    }

    fn cardinal(&self, max_digits: usize, ord: bool) -> Fst {
        let mut parts: Vec<Fst> = Vec::new();
        if !ord {
            // Bare zero; other lengths never start with 0.
            parts.push(read("0", &self.spec.digits[&0][0]));
        }
        parts.push(self.units(ord));
        if max_digits >= 2 {
            parts.push(self.two_digit(ord));
        }
        if max_digits >= 3 {
            parts.push(self.three_digit(ord));
        }
        for len in 4..=max_digits.min(6) {
            parts.push(self.thousands(len, ord));
        }
        union_all(&parts.iter().collect::<Vec<_>>())
    }

    /// Any single digit as a digit word; all listed variants.
    fn digit(&self) -> Fst {
        let mut parts: Vec<Fst> = Vec::new();
        for (d, words) in &self.spec.digits {
            for w in words {
                parts.push(read(&d.to_string(), w));
            }
        }
        union_all(&parts.iter().collect::<Vec<_>>())
    }

    fn digit_by_digit(&self, max_digits: usize) -> Fst {
        let d = self.digit();
        let mut lengths: Vec<Fst> = Vec::new();
        let mut cur = d.clone();
        lengths.push(cur.clone());
        for _ in 1..max_digits {
            cur = concat(&cur, &d);
            lengths.push(cur.clone());
        }
        union_all(&lengths.iter().collect::<Vec<_>>())
    }

    /// "oh"-prefixed unit for pair positions: "05" -> "oh five".
    fn oh_unit(&self) -> Fst {
        let zero_variants = &self.spec.digits[&0];
        let oh = zero_variants.last().expect("digit 0 has a form");
        cat(&[&read("0", oh), &self.units(false)])
    }

    fn paired(&self, max_digits: usize) -> Fst {
        let mut parts: Vec<Fst> = Vec::new();
        let second = union_all(&[&self.two_digit(false), &self.oh_unit()]);
        if max_digits >= 3 {
            parts.push(cat(&[&self.units(false), &second]));
        }
        if max_digits >= 4 {
            parts.push(cat(&[&self.two_digit(false), &second]));
        }
        if parts.is_empty() {
            return Fst::new();
        }
        union_all(&parts.iter().collect::<Vec<_>>())
    }

    fn hundreds(&self, max_digits: usize) -> Fst {
        if max_digits < 4 {
            return Fst::new();
        }
        let hundred = self.spec.scale_word(100);
        cat(&[&self.two_digit(false), &emit(hundred), &cross("00", "")])
    }
}

/// Build the number transducer for digit strings of length 1 to
/// `max_digits` under the spec's enabled reading modes. The result is
/// acyclic; its outputs carry a leading space that a wrapping grammar
/// strips or keeps as a separator.
pub fn build_number_fst(spec: &NumberSpec, max_digits: usize) -> Fst {
    assert!(max_digits >= 1, "max_digits must be at least 1");
    let b = Builder { spec };
    let mut parts: Vec<Fst> = Vec::new();
    for mode in &spec.modes {
        let f = match mode {
            ReadingMode::Cardinal => b.cardinal(max_digits, false),
            ReadingMode::Ordinal => b.cardinal(max_digits, true),
            ReadingMode::DigitByDigit => b.digit_by_digit(max_digits),
            ReadingMode::Paired => b.paired(max_digits),
            ReadingMode::Hundreds => b.hundreds(max_digits),
        };
        parts.push(f);
    }
    let refs: Vec<&Fst> = parts.iter().collect();
    // Outputs all start with an inserted space; strip it here so readings
    // are plain space-separated word sequences.
    strip_leading_space(&union_all(&refs)).connect()
}

/// Each builder word is emitted as " word"; compose with a space-stripping
/// head so the full reading is "w1 w2 ..." without the leading separator.
fn strip_leading_space(f: &Fst) -> Fst {
    use crate::fst::{compose, Arc, EPSILON};
    // Identity loop over every output label f can produce, preceded by one
    // space that is consumed silently.
    let mut any = Fst::new();
    let s = any.add_state();
    any.set_start(s);
    any.set_final(s, 0.0);
    let mut labels: BTreeSet<u32> = BTreeSet::new();
    for st in f.states() {
        for arc in f.arcs(st) {
            if arc.olabel != EPSILON {
                labels.insert(arc.olabel);
            }
        }
    }
    for l in labels {
        any.add_arc(s, Arc::new(l, l, 0.0, s));
    }
    let head = concat(&cross(" ", ""), &any);
    compose(f, &head)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{compose, literal, nshortest};

    fn english() -> NumberSpec {
        NumberSpec::parse(include_str!("../../fixtures/numbers.tsv")).unwrap()
    }

    fn readings(f: &Fst, token: &str) -> Vec<String> {
        let c = compose(&literal(token), f);
        let mut outs: Vec<String> = nshortest(&c, 500)
            .unwrap()
            .into_iter()
            .map(|p| p.output)
            .collect();
        outs.sort();
        outs.dedup();
        outs
    }

    #[test]
    fn one_two_three_has_the_three_families() {
        let f = build_number_fst(&english(), 5);
        let r = readings(&f, "123");
        assert!(r.contains(&"one hundred twenty three".to_string()), "{r:?}");
        assert!(r.contains(&"one two three".to_string()), "{r:?}");
        assert!(r.contains(&"one twenty three".to_string()), "{r:?}");
    }

    #[test]
    fn twenty_two_hundred_variants() {
        let f = build_number_fst(&english(), 5);
        let r = readings(&f, "2200");
        assert!(r.contains(&"two thousand two hundred".to_string()), "{r:?}");
        assert!(r.contains(&"twenty two hundred".to_string()), "{r:?}");
    }

    #[test]
    fn zero_reads_both_zero_and_oh() {
        let f = build_number_fst(&english(), 5);
        let r = readings(&f, "0");
        assert!(r.contains(&"zero".to_string()), "{r:?}");
        assert!(r.contains(&"oh".to_string()), "{r:?}");
    }

    #[test]
    fn nine_ninety_variants() {
        let f = build_number_fst(&english(), 5);
        let r = readings(&f, "990");
        assert!(r.contains(&"nine hundred ninety".to_string()), "{r:?}");
        assert!(r.contains(&"nine ninety".to_string()), "{r:?}");
        assert!(r.contains(&"nine nine oh".to_string()), "{r:?}");
    }

    #[test]
    fn ordinals_read_correctly() {
        let f = build_number_fst(&english().with_modes(&[ReadingMode::Ordinal]), 5);
        assert_eq!(readings(&f, "23"), vec!["twenty third"]);
        assert_eq!(readings(&f, "12"), vec!["twelfth"]);
        assert_eq!(readings(&f, "100"), vec!["one hundredth"]);
    }

    #[test]
    fn paired_four_digit_year_style() {
        let f = build_number_fst(&english().with_modes(&[ReadingMode::Paired]), 5);
        let r = readings(&f, "1911");
        assert_eq!(r, vec!["nineteen eleven"]);
        let r = readings(&f, "1905");
        assert_eq!(r, vec!["nineteen oh five"]);
        let r = readings(&f, "920");
        assert_eq!(r, vec!["nine twenty"]);
    }

    #[test]
    fn five_digit_digit_by_digit() {
        let f = build_number_fst(&english().with_modes(&[ReadingMode::DigitByDigit]), 5);
        let r = readings(&f, "90210");
        assert!(r.contains(&"nine oh two one oh".to_string()), "{r:?}");
        assert!(r.contains(&"nine zero two one zero".to_string()), "{r:?}");
    }

    #[test]
    fn acyclic_for_finite_max_digits() {
        let f = build_number_fst(&english(), 6);
        assert!(f.is_acyclic());
    }

    #[test]
    fn cardinal_rejects_leading_zero() {
        let f = build_number_fst(&english().with_modes(&[ReadingMode::Cardinal]), 5);
        assert!(readings(&f, "05").is_empty());
        assert!(!readings(&f, "50").is_empty());
    }
}
