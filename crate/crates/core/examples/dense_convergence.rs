//! Sampled paths from B(1/3) against a dense class: the predictor settles on
//! the truth, and sequences from outside the class are flagged.

use unipred::constructions::{dense_experiment, deficiency_sups, DenseConfig, SequenceSource};
use unipred::measure::{ratio, ParamClass};
use unipred::mixture::{Mixture, WeightChoice};

fn main() -> unipred::Result<()> {
    let cfg = DenseConfig {
        class: ParamClass::dense(8)?,
        weights: WeightChoice::Surrogate,
        theta_true: ratio(1, 3),
        n: 10_000,
        seed: 1,
        paths: 100,
    };
    let r = dense_experiment(&cfg)?;
    println!(
        "{} paths, mean |xi(1|x) - 1/3| over t in [{}, {}]: {:.3e}",
        r.paths.len(),
        r.window.0,
        r.window.1,
        r.mean_last_decade_deviation
    );
    for p in r.paths.iter().take(5) {
        println!(
            "  stream {}: final predictive {:.5}, deficiency sup {:.4}",
            p.stream, p.final_predictive, p.deficiency_sup
        );
    }

    let outside = dense_experiment(&DenseConfig { theta_true: ratio(3, 10), paths: 4, ..cfg.clone() })?;
    println!("\ntheta = 3/10: {}", outside.warning.as_deref().unwrap_or("in class"));

    let mix = Mixture::from_class(&ParamClass::dense(8)?, &WeightChoice::Surrogate)?;
    let greedy = SequenceSource::GreedyGap { theta0: ratio(1, 4), theta1: ratio(1, 2) }.generate(20_000)?;
    println!("\ndeficiency sups of the dense mixture on the greedy gap sequence:");
    for (name, sup) in deficiency_sups(&mix, &greedy)? {
        println!("  {name:<7} {sup:.3}");
    }
    Ok(())
}
