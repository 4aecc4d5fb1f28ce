//! Line-oriented text format.
//!
//! ```text
//! FST <start-state-id>
//! A <src> <dst> <ilabel> <olabel> <weight>
//! F <state> <weight>
//! ```
//!
//! Labels are codepoint integers with epsilon written as 0; weights carry 9
//! significant digits. An empty transducer serializes to the bare header
//! `FST -`.

use super::{Arc, Fst, FstError};

pub fn serialize(f: &Fst) -> String {
    let mut out = String::new();
    match f.start() {
        Some(s) => out.push_str(&format!("FST {s}\n")),
        None => out.push_str("FST -\n"),
    }
    for s in f.states() {
        for arc in f.arcs(s) {
            out.push_str(&format!(
                "A {} {} {} {} {:.8e}\n",
                s, arc.nextstate, arc.ilabel, arc.olabel, arc.weight
            ));
        }
    }
    for s in f.states() {
        if let Some(w) = f.final_weight(s) {
            out.push_str(&format!("F {} {:.8e}\n", s, w));
        }
    }
    out
}

pub fn deserialize(text: &str) -> Result<Fst, FstError> {
    let err = |line: usize, msg: &str| FstError::Parse { line, msg: msg.to_string() };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing FST header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("FST") {
        return Err(err(1, "expected `FST <start>` header"));
    }
    let start_field = parts.next().ok_or_else(|| err(1, "missing start state"))?;

    let mut f = Fst::new();
    let ensure_state = |f: &mut Fst, s: usize| {
        while f.num_states() <= s {
            f.add_state();
        }
    };

    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "A" => {
                if fields.len() != 6 {
                    return Err(err(lineno, "arc line needs 5 fields"));
                }
                let src: usize =
                    fields[1].parse().map_err(|_| err(lineno, "bad source state"))?;
                let dst: usize =
                    fields[2].parse().map_err(|_| err(lineno, "bad target state"))?;
                let il: u32 = fields[3].parse().map_err(|_| err(lineno, "bad input label"))?;
                let ol: u32 = fields[4].parse().map_err(|_| err(lineno, "bad output label"))?;
                let w: f64 = fields[5].parse().map_err(|_| err(lineno, "bad weight"))?;
                ensure_state(&mut f, src.max(dst));
                f.add_arc(src, Arc::new(il, ol, w, dst));
            }
            "F" => {
                if fields.len() != 3 {
                    return Err(err(lineno, "final line needs 2 fields"));
                }
                let s: usize = fields[1].parse().map_err(|_| err(lineno, "bad state"))?;
                let w: f64 = fields[2].parse().map_err(|_| err(lineno, "bad weight"))?;
                ensure_state(&mut f, s);
                f.set_final(s, w);
            }
            other => return Err(err(lineno, &format!("unknown record `{other}`"))),
        }
    }

    if start_field != "-" {
        let s: usize = start_field.parse().map_err(|_| err(1, "bad start state"))?;
        ensure_state(&mut f, s);
        f.set_start(s);
    } else if f.num_states() > 0 {
        return Err(err(1, "records present but no start state"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::super::{cross, nshortest, union, weighted};
    use super::*;

    #[test]
    fn roundtrip_preserves_paths() {
        let f = union(&weighted(&cross("ab", "xy"), 1.25), &cross("c", "z"));
        let g = deserialize(&serialize(&f)).unwrap();
        let mut pf = nshortest(&f, 10).unwrap();
        let mut pg = nshortest(&g, 10).unwrap();
        let key = |p: &super::super::Path| (p.output.clone(), p.input.clone());
        pf.sort_by_key(&key);
        pg.sort_by_key(&key);
        assert_eq!(pf.len(), pg.len());
        for (a, b) in pf.iter().zip(pg.iter()) {
            assert_eq!(a.input, b.input);
            assert_eq!(a.output, b.output);
            assert!((a.weight - b.weight).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_fst_is_header_only() {
        let text = serialize(&Fst::new());
        assert_eq!(text, "FST -\n");
        let f = deserialize(&text).unwrap();
        assert_eq!(f.num_states(), 0);
    }

    #[test]
    fn hand_written_two_liner_parses() {
        let f = deserialize("FST 0\nA 0 1 97 98 5.00000000e-1\nF 1 0.0\n").unwrap();
        let paths = nshortest(&f, 2).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].input, "a");
        assert_eq!(paths[0].output, "b");
        assert!((paths[0].weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let e = deserialize("FST 0\nA 0 1 97\n").unwrap_err();
        match e {
            FstError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
