use textnorm_core::corpus::{generate_synthetic, SynthConfig};
use textnorm_core::experiment::*;
use textnorm_core::eval::wer;

fn main() {
    let sources = GrammarSources::fixtures();
    let numbers = sources.number_spec().unwrap();
    let synth = SynthConfig {
        train_sentences: 1000,
        dev_sentences: 100,
        test_sentences: 200,
        ..SynthConfig::new(numbers)
    };
    let hp = Hyperparams::default();
    let (train, _dev, test) = generate_synthetic(&synth, 2024).unwrap();
    let grammar = GrammarKind::LanguageSpecific;
    let verbalizer = sources.compile(grammar, hp.number_max_digits).unwrap();
    let mut gen = CandidateGen::new(&verbalizer, hp.candidate_cap, None);
    let systems = train_all_systems(&train, &verbalizer, &mut gen, &hp).unwrap();

    for system in [SystemKind::DisLmTuned, SystemKind::DisLmTunedBoundary, SystemKind::DisLmHallucinated] {
        let output = decode_corpus(system, &systems, &test, &mut gen);
        let report = wer(&output, &test, system.label()).unwrap();
        println!("== {} wer {:.2}%", system.label(), report.wer * 100.0);
        let mut shown = 0;
        for (sys, sent) in output.iter().zip(&test) {
            for (out, (w, z)) in sys.iter().zip(&sent.pairs) {
                if out != z && shown < 12 {
                    println!("  `{w}`: got {:?} want {:?}   [sentence: {}]",
                        out.join(" "), z.join(" "),
                        sent.written().join(" "));
                    shown += 1;
                }
            }
        }
    }
}
