//! Step-by-step tracing of a sequence: predictive, Hellinger term and the
//! running log-deficiency ln xi(x_1..n) / mu(x_1..n).

use unipred::constructions::sample_sequence;
use unipred::diagnostics::{deficiency_trace, hellinger_report, PathTracer};
use unipred::measure::{ratio, BernoulliModel, ParamClass, Seq};
use unipred::mixture::{Mixture, WeightChoice};

fn main() -> unipred::Result<()> {
    let mix = Mixture::from_class(&ParamClass::dense(6)?, &WeightChoice::Surrogate)?;
    let mu = BernoulliModel::new(ratio(1, 3))?;
    let x = sample_sequence(&mu, 2_000, 3)?;

    let mut tracer = PathTracer::new(&mix, &mu);
    for &s in x.prefix(8) {
        let r = tracer.step(s)?;
        println!(
            "t = {}: x = {}, xi = {:.4}, mu = {:.4}, hellinger {:.2e}, deficiency {:.4}",
            r.t, r.symbol, r.xi, r.mu, r.hellinger, r.log_deficiency
        );
    }

    let report = hellinger_report(&mix, &mu, &x)?;
    println!("\non-path Hellinger sum {:.4} (expected-sum bound {:.4})", report.total(), report.bound);

    let sampled = deficiency_trace(&mix, &mu, &x)?;
    println!("sampled path: sup deficiency {:.4}, random at level e^1: {}", sampled.sup(), sampled.is_random_at_level(1f64.exp()));
    let ones = Seq::new(vec![1; 2_000]);
    let skewed = deficiency_trace(&mix, &mu, &ones)?;
    println!(
        "all ones: sup deficiency {:.1}, still growing over the last 100 steps: {}",
        skewed.sup(),
        skewed.still_growing(100)
    );
    Ok(())
}
