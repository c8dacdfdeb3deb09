use std::sync::Arc;

use crate::diagnostics::{DeficiencyTrace, PathTracer};
use crate::error::{Error, Result};
use crate::measure::{ratio, PredictiveModel, VanishingPairModel};
use crate::mixture::Mixture;

/// Accepted range for `ratio(n) / ratio(n/10)` once `n ≥ 10⁴`.
pub const GROWTH_RANGE: (f64, f64) = (8.0, 12.0);

/// The ratio `ξ(1|0_{<t}) / μ(1|0_{<t})` along the all-zeros sequence for
/// `μ = vanishing(t^-3)`, `ν = vanishing(t^-2)` mixed with weights ½, ½.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    /// Ratio at `t = 1..=n`.
    pub ratios: Vec<f64>,
    /// Deficiency of `0_{1:n}` against `μ`.
    pub deficiency: DeficiencyTrace,
}

impl DivergenceReport {
    pub fn ratio_at(&self, t: usize) -> f64 {
        self.ratios[t - 1]
    }

    /// `ratio(n) / ratio(n/10)`.
    pub fn growth(&self) -> f64 {
        let n = self.ratios.len();
        self.ratio_at(n) / self.ratio_at(n / 10)
    }

    pub fn growth_in_range(&self) -> bool {
        let g = self.growth();
        GROWTH_RANGE.0 <= g && g <= GROWTH_RANGE.1
    }
}

pub fn divergence_example(n: usize) -> Result<DivergenceReport> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!("divergence example needs n ≥ 10, got {n}")));
    }
    let mu: Arc<dyn PredictiveModel> = Arc::new(VanishingPairModel::new(3));
    let nu: Arc<dyn PredictiveModel> = Arc::new(VanishingPairModel::new(2));
    let mix = Mixture::new(vec![(ratio(1, 2), mu.clone()), (ratio(1, 2), nu)])?;
    let mut tracer = PathTracer::new(&mix, mu.as_ref());
    let mut ratios = Vec::with_capacity(n);
    let mut log_ratios = Vec::with_capacity(n);
    for _ in 0..n {
        let p_xi = tracer.predictive(1)?;
        let t = tracer.len() + 1;
        let p_mu = mu.conditional(&vec![0; t - 1], 1)?.prob();
        ratios.push(p_xi / p_mu);
        log_ratios.push(tracer.step(0)?.log_deficiency);
    }
    Ok(DivergenceReport {
        ratios,
        deficiency: DeficiencyTrace::from_log_ratios(log_ratios, None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `ξ(1|0_{<t}) / μ(1|0_{<t}) = π_μ + π_ν t` with the posterior
    /// `π_ν ∝ ν(0_{<t})`, computed here from the product formula directly.
    fn oracle_ratio(t: usize) -> f64 {
        let (mut mu0, mut nu0) = (1.0f64, 1.0f64);
        for s in 1..t {
            let s = s as f64;
            mu0 *= 1.0 - 0.5 * s.powi(-3);
            nu0 *= 1.0 - 0.5 * s.powi(-2);
        }
        let (pm, pn) = (mu0 / (mu0 + nu0), nu0 / (mu0 + nu0));
        pm + pn * t as f64
    }

    #[test]
    fn first_ratio_is_one() {
        let r = divergence_example(10).unwrap();
        assert!((r.ratio_at(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_product_formula() {
        let r = divergence_example(200).unwrap();
        for t in [1, 2, 3, 10, 57, 200] {
            assert!((r.ratio_at(t) - oracle_ratio(t)).abs() < 1e-9 * oracle_ratio(t), "t={t}");
        }
    }

    #[test]
    fn zeros_are_random_for_mu() {
        let r = divergence_example(1_000).unwrap();
        // ν(0_{1:t}) ≤ μ(0_{1:t}) for t ≥ 1, so ξ/μ ≤ 1 throughout.
        assert!(r.deficiency.sup() <= 1e-12);
        assert!(r.deficiency.log_ratios.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn rejects_short_horizons() {
        assert!(divergence_example(9).is_err());
    }
}
