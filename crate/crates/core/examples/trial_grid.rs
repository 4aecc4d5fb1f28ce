use textnorm_core::corpus::SynthConfig;
use textnorm_core::experiment::{run_grid, GrammarSources, Hyperparams};

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
    let start = std::time::Instant::now();
    let grid = run_grid(&sources, &synth, &hp, 2024).unwrap();
    println!("{}", grid.to_table());
    println!("elapsed: {:.1}s", start.elapsed().as_secs_f64());
}
