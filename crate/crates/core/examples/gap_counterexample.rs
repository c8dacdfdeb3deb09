//! A deterministic sequence that is random for both ends of a gap in the
//! parameter class, while the mixture predictor keeps oscillating strictly
//! between them.

use unipred::constructions::{gap_experiment, GapSequenceBuilder};
use unipred::measure::{ratio, ParamClass};
use unipred::mixture::WeightChoice;

fn main() -> unipred::Result<()> {
    let mut g = GapSequenceBuilder::new(ratio(1, 4), ratio(1, 2))?;
    let prefix: String = (&mut g).take(40).map(|s| char::from(b'0' + s)).collect();
    println!("greedy sequence: {prefix}...");
    println!("balance frequency {:.6}, state bound {:.6}", g.balance_frequency(), g.bound());

    let class = ParamClass::gapped(vec![ratio(1, 4), ratio(1, 2)], ratio(1, 4), ratio(1, 2))?;
    for n in [1_000, 10_000, 100_000] {
        let r = gap_experiment(&class, &WeightChoice::Uniform, n)?;
        println!(
            "n = {n:>6}: max|S| {:.4}, sup deficiency ({:.4}, {:.4}), predictive in [{:.4}, {:.4}] over t in [{}, {}]",
            r.max_abs_state,
            r.deficiency0.sup(),
            r.deficiency1.sup(),
            r.window_min,
            r.window_max,
            r.window.0,
            r.window.1
        );
    }

    let wide = ParamClass::gapped_rationals(8, ratio(1, 4), ratio(1, 2))?;
    let r = gap_experiment(&wide, &WeightChoice::Surrogate, 100_000)?;
    println!(
        "\nall p/q with q <= 8 outside (1/4, 1/2): distance from 1/4 >= {:.4}, from 1/2 >= {:.4}",
        r.distance_theta0, r.distance_theta1
    );
    Ok(())
}
