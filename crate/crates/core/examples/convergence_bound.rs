//! Expected Hellinger sums of the mixture predictor against the true
//! Bernoulli source, by exhaustive enumeration and by Monte Carlo.

use unipred::diagnostics::{exact_expected_sum, mc_expected_sum, ExpectationJob, Functional};
use unipred::measure::{ratio, BernoulliModel, ParamClass};
use unipred::mixture::{Mixture, WeightChoice};

fn main() -> unipred::Result<()> {
    let class = ParamClass::custom(vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)])?;
    let mix = Mixture::from_class(&class, &WeightChoice::Surrogate)?;
    println!("exact sums, n = 12");
    for theta in class.thetas() {
        let truth = BernoulliModel::new(theta.clone())?;
        let job = ExpectationJob::new(&mix, &truth, 12);
        let h = exact_expected_sum(&job)?;
        let s = exact_expected_sum(&job.functional(Functional::SquaredDiff))?;
        println!(
            "  mu = B({theta}): hellinger {:.5} <= {:.5}, squared {:.5} <= {:.5} ({})",
            h.value,
            h.bound,
            s.value,
            s.bound,
            s.envelope.label()
        );
    }

    let mix = Mixture::from_class(&ParamClass::dense(8)?, &WeightChoice::Surrogate)?;
    let truth = BernoulliModel::new(ratio(1, 3))?;
    let est = mc_expected_sum(&ExpectationJob::new(&mix, &truth, 1000).monte_carlo(1, 1000))?;
    println!("\nMonte Carlo, dense class q <= 8, mu = B(1/3), n = 1000, 1000 paths");
    println!("  mean sum {:.4} +- {:.4}, bound {:.4}", est.estimate, est.stderr, est.bound);
    for (from, to) in [(1, 10), (1, 100), (101, 500), (900, 1000)] {
        println!("  mean term over t in [{from}, {to}]: {:.3e}", est.window_mean(from, to));
    }
    for eps in [1e-2, 1e-3] {
        println!("  fraction of steps with mean term below {eps}: {:.3}", est.converged_fraction(eps));
    }
    Ok(())
}
