use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use unipred::cli::ExperimentConfig;
use unipred::constructions::{gap_experiment, GapSequenceBuilder, SequenceSource};
use unipred::diagnostics::{
    deficiency_trace, exact_expected_sum, mc_expected_sum, ratio_trace, ExpectationJob,
};
use unipred::measure::{
    joint, joint_exact, ratio, BernoulliModel, ExactProb, ParamClass, PredictiveModel, Seq,
    VanishingPairModel,
};
use unipred::mixture::{Mixture, PosteriorState, WeightChoice};
use unipred::solomonoff::Dyadic;

fn theta() -> impl Strategy<Value = BigRational> {
    (1i64..=12).prop_flat_map(|q| (0..=q).prop_map(move |p| ratio(p, q)))
}

fn binary(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..=max_len)
}

fn class() -> impl Strategy<Value = ParamClass> {
    prop::collection::btree_set((1i64..=7, 8i64..=8), 1..5).prop_map(|set| {
        let thetas: Vec<_> = set.into_iter().map(|(p, q)| ratio(p, q)).collect();
        ParamClass::custom(thetas).unwrap()
    })
}

fn weighted(class: &ParamClass) -> Mixture {
    Mixture::from_class(class, &WeightChoice::Surrogate).unwrap()
}

fn exact(p: &ExactProb) -> &BigRational {
    p.value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernoulli_chain_rule_is_exact(t in theta(), x in binary(12)) {
        let m = BernoulliModel::new(t).unwrap();
        let parent = joint_exact(&m, &x).unwrap();
        let mut x0 = x.clone();
        x0.push(0);
        let mut x1 = x;
        x1.push(1);
        let children = exact(&joint_exact(&m, &x0).unwrap()) + exact(&joint_exact(&m, &x1).unwrap());
        prop_assert_eq!(&children, exact(&parent));
    }

    #[test]
    fn bernoulli_joint_ignores_order(t in theta(), mut x in binary(16), k in 0usize..16) {
        let m = BernoulliModel::new(t).unwrap();
        let before = joint_exact(&m, &x).unwrap();
        if !x.is_empty() {
            let k = k % x.len();
            x.rotate_left(k);
            x.reverse();
        }
        prop_assert_eq!(joint_exact(&m, &x).unwrap(), before);
    }

    #[test]
    fn float_joint_matches_exact(t in theta(), x in binary(12)) {
        let m = BernoulliModel::new(t).unwrap();
        let e = joint_exact(&m, &x).unwrap().to_f64();
        let f = joint(&m, &x).unwrap().prob();
        prop_assert!((f - e).abs() <= 1e-9 * e.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn vanishing_pair_conditionals_are_interior(k in 1u32..4, t in 1usize..200) {
        let m = VanishingPairModel::new(k);
        let h = Seq::zeros(t - 1);
        let p = m.conditional(h.prefix(t - 1), 1).unwrap().prob();
        prop_assert!(p > 0.0 && p < 1.0);
        if t == 1 {
            prop_assert_eq!(m.conditional_exact(&[], 1).unwrap(), ExactProb::from_ratio(1, 2));
        }
    }

    #[test]
    fn mixture_is_a_measure(c in class(), x in binary(10)) {
        let mix = weighted(&c);
        let parent = mix.mix_joint_exact(&x).unwrap();
        let mut x0 = x.clone();
        x0.push(0);
        let mut x1 = x;
        x1.push(1);
        let children = exact(&mix.mix_joint_exact(&x0).unwrap()) + exact(&mix.mix_joint_exact(&x1).unwrap());
        prop_assert!(children <= *exact(&parent));
    }

    #[test]
    fn predictive_is_posterior_average(c in class(), h in binary(12)) {
        let mix = weighted(&c);
        let state = PosteriorState::from_history(&mix, &h).unwrap();
        let w = state.weights().unwrap();
        for a in 0..2u8 {
            let avg: f64 = mix
                .components()
                .iter()
                .zip(&w)
                .map(|(comp, w)| w * comp.model().conditional(&h, a).unwrap().prob())
                .sum();
            let p = mix.predictive(&h, a).unwrap().prob();
            prop_assert!((p - avg).abs() <= 1e-9, "{} vs {}", p, avg);
        }
    }

    #[test]
    fn posterior_never_below_prior(c in class(), x in binary(40)) {
        let mix = weighted(&c);
        let xi = mix.mix_joint(&x).unwrap().ln();
        for comp in mix.components() {
            let mu = joint(comp.model(), &x).unwrap();
            if !mu.is_zero() {
                prop_assert!(xi - mu.ln() >= comp.log_weight().ln() - 1e-9);
            }
        }
    }

    #[test]
    fn component_order_is_irrelevant(c in class(), x in binary(12), k in 0usize..4) {
        let mix = weighted(&c);
        let mut parts: Vec<(BigRational, Arc<dyn PredictiveModel>)> = mix
            .components()
            .iter()
            .map(|comp| (comp.weight().clone(), comp.model_arc().clone()))
            .collect();
        let shift = k % parts.len();
        parts.rotate_left(shift);
        parts.reverse();
        let shuffled = Mixture::new(parts).unwrap();
        let a = mix.mix_joint(&x).unwrap().ln();
        let b = shuffled.mix_joint(&x).unwrap().ln();
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert_eq!(mix.mix_joint_exact(&x).unwrap(), shuffled.mix_joint_exact(&x).unwrap());
    }

    #[test]
    fn ratio_trace_telescopes(c in class(), x in binary(60), pick in 0usize..4) {
        let mix = weighted(&c);
        let truth = mix.components()[pick % mix.len()].model_arc().clone();
        let ratios = ratio_trace(&mix, truth.as_ref(), &x).unwrap();
        let trace = deficiency_trace(&mix, truth.as_ref(), &x).unwrap();
        let mut acc = mix.mix_joint(&[]).unwrap().ln();
        for (r, d) in ratios.iter().zip(&trace.log_ratios) {
            acc += r.ln();
            prop_assert!((acc - d).abs() <= 1e-9);
        }
    }

    #[test]
    fn greedy_state_is_bounded(lo in 1i64..7, gap in 1i64..6, n in 1usize..2000) {
        let hi = (lo + gap).min(7);
        prop_assume!(hi > lo);
        let mut g = GapSequenceBuilder::new(ratio(lo, 8), ratio(hi, 8)).unwrap();
        for _ in 0..n {
            g.next_symbol();
            prop_assert!(g.state().abs() <= g.bound() + 1e-12);
        }
    }

    #[test]
    fn dyadic_addition_is_rational_addition(a in 0u64..1 << 20, ea in 0u32..24, b in 0u64..1 << 20, eb in 0u32..24) {
        let (x, y) = (Dyadic::new(a, ea), Dyadic::new(b, eb));
        prop_assert_eq!((x + y).to_rational(), x.to_rational() + y.to_rational());
        prop_assert_eq!(x <= y, x.to_rational() <= y.to_rational());
    }

    #[test]
    fn config_round_trips(n in 1usize..100_000, seed in any::<u64>(), samples in 2usize..5000, q in 1u32..20) {
        let c = ExperimentConfig { n, seed, samples, q, ..ExperimentConfig::default() };
        let text = c.serialize();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(back.serialize(), text);
        prop_assert_eq!(back, c);
    }
}

#[test]
fn cumulative_sum_extends_with_horizon() {
    let class = ParamClass::custom(vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)]).unwrap();
    let mix = weighted(&class);
    let truth = BernoulliModel::from_ratio(3, 4).unwrap();
    let mut previous: Option<Vec<f64>> = None;
    for n in 1..=10 {
        let r = exact_expected_sum(&ExpectationJob::new(&mix, &truth, n)).unwrap();
        let cumulative = r.cumulative();
        assert!(cumulative.windows(2).all(|w| w[1] >= w[0]));
        if let Some(p) = previous {
            for (a, b) in p.iter().zip(&r.per_step) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        previous = Some(r.per_step);
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let mix = weighted(&ParamClass::dense(4).unwrap());
    let truth = BernoulliModel::from_ratio(1, 3).unwrap();
    let job = ExpectationJob::new(&mix, &truth, 10);
    let exact = exact_expected_sum(&job).unwrap();
    let mc = mc_expected_sum(&job.monte_carlo(7, 4000)).unwrap();
    assert!((mc.estimate - exact.value).abs() <= 4.0 * mc.stderr, "{} vs {}", mc.estimate, exact.value);
}

#[test]
fn frequency_law_decays_like_one_over_n() {
    for n in [1_000usize, 10_000, 100_000] {
        let class = ParamClass::gapped(vec![ratio(1, 4), ratio(1, 2)], ratio(1, 4), ratio(1, 2)).unwrap();
        let r = gap_experiment(&class, &WeightChoice::Uniform, n).unwrap();
        let err = (r.ones_frequency - r.balance_frequency).abs();
        assert!(err <= r.frequency_error_bound(), "n = {n}: {err}");
    }
}

#[test]
fn mutual_randomness_factor() {
    let class = ParamClass::gapped(vec![ratio(1, 4), ratio(1, 2)], ratio(1, 4), ratio(1, 2)).unwrap();
    let r = gap_experiment(&class, &WeightChoice::Uniform, 50_000).unwrap();
    let (s0, s1) = (r.deficiency0.sup(), r.deficiency1.sup());
    assert!(s0.is_finite() && s1.is_finite());
    let ln_min_w = 0.5f64.ln();
    assert!((s0 - s1).abs() <= r.max_abs_state - ln_min_w);
    assert!(s0.max(s1) <= r.max_abs_state);
}

#[test]
fn sequence_sources_are_reproducible() {
    let sources = [
        SequenceSource::Sampled { model: Arc::new(BernoulliModel::from_ratio(2, 7).unwrap()), seed: 11 },
        SequenceSource::GreedyGap { theta0: ratio(1, 4), theta1: ratio(1, 2) },
        SequenceSource::AllZeros,
        SequenceSource::Literal(Seq::parse("0110").unwrap()),
    ];
    for s in &sources {
        let a = s.generate(4).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| s.generate(4).unwrap());
        assert_eq!(a, b);
    }
    let long = &sources[0];
    assert_eq!(long.generate(5_000).unwrap(), long.generate(5_000).unwrap());
}

#[test]
fn weights_are_exact_rationals() {
    let mix = weighted(&ParamClass::dense(8).unwrap());
    let total = mix.weight_sum();
    assert!(total <= BigRational::from_integer(BigInt::from(1)));
}
