//! Builds Bayes mixtures over Bernoulli classes and checks that the mixture
//! dominates each component by its prior weight, exactly and in log-float.

use unipred::measure::{ratio, ParamClass, Seq};
use unipred::mixture::{dominance_check, Backend, Mixture, WeightChoice};

fn main() -> unipred::Result<()> {
    let classes = [
        ("{1/4, 1/2}", ParamClass::custom(vec![ratio(1, 4), ratio(1, 2)])?, WeightChoice::Uniform),
        ("p/q, q <= 8", ParamClass::dense(8)?, WeightChoice::Surrogate),
    ];
    for (label, class, weights) in classes {
        let mix = Mixture::from_class(&class, &weights)?;
        println!("class {label}: {} components, weight sum {}", mix.len(), mix.weight_sum());
        for backend in [Backend::Exact, Backend::Float] {
            let report = dominance_check(&mix, 10, backend)?;
            let worst = report.worst().expect("nonempty class");
            println!(
                "  {backend:?}: {} strings checked, passed = {}, tightest {} at x = {} (slack {:.6})",
                report.checks, report.passed, worst.name, worst.at, worst.min_slack
            );
        }
    }

    let mix = Mixture::from_class(&ParamClass::dense(4)?, &WeightChoice::Surrogate)?;
    let x = Seq::parse("0010010001")?;
    let xi = mix.mix_joint(&x)?;
    println!("\nxi({x}) = {:.6e}", xi.prob());
    for c in mix.components() {
        let nu = unipred::measure::joint(c.model(), &x)?;
        println!("  w * {:<7} = {:.6e}", c.name(), c.log_weight().prob() * nu.prob());
    }
    Ok(())
}
