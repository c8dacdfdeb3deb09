//! Special sequences and the experiments built on them: sampling from a
//! measure, the greedy two-sided balancing sequence for a gapped class, dense
//! class convergence runs and the vanishing-pair divergence example.

mod dense;
mod divergence;
mod gap;

use std::sync::Arc;

pub use dense::{dense_experiment, deficiency_sups, DenseConfig, DensePath, DenseReport, DenseTrace};
pub use divergence::{divergence_example, DivergenceReport, GROWTH_RANGE};
pub use gap::{gap_experiment, greedy_gap_sequence, GapReport, GapSequenceBuilder};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::measure::{MeasureKind, PredictiveModel, Seq};
use crate::rng::{draw_symbol, path_rng};

/// Draws `x_{1:n}` from a measure with stream 0 of `seed`.
pub fn sample_sequence(model: &dyn PredictiveModel, n: usize, seed: u64) -> Result<Seq> {
    sample_stream(model, n, seed, 0)
}

/// Draws `x_{1:n}` from a measure with stream `stream` of `seed`.
pub fn sample_stream(model: &dyn PredictiveModel, n: usize, seed: u64, stream: u64) -> Result<Seq> {
    if model.kind() != MeasureKind::Measure {
        return Err(Error::NotAMeasure(model.name().to_string()));
    }
    let mut rng = path_rng(seed, stream);
    let mut seq = Seq::empty();
    let mut probs = Vec::with_capacity(model.alphabet().size());
    for _ in 0..n {
        probs.clear();
        for a in model.alphabet().symbols() {
            probs.push(model.conditional(&seq, a)?.prob());
        }
        seq.push(draw_symbol(&probs, &mut rng));
    }
    Ok(seq)
}

/// A deterministic recipe for a sequence.
#[derive(Debug, Clone)]
pub enum SequenceSource {
    Sampled {
        model: Arc<dyn PredictiveModel>,
        seed: u64,
    },
    GreedyGap {
        theta0: BigRational,
        theta1: BigRational,
    },
    AllZeros,
    Literal(Seq),
}

impl SequenceSource {
    /// The first `n` symbols. A literal shorter than `n` is returned whole.
    pub fn generate(&self, n: usize) -> Result<Seq> {
        match self {
            SequenceSource::Sampled { model, seed } => sample_sequence(model.as_ref(), n, *seed),
            SequenceSource::GreedyGap { theta0, theta1 } => {
                greedy_gap_sequence(theta0.clone(), theta1.clone(), n)
            }
            SequenceSource::AllZeros => Ok(Seq::zeros(n)),
            SequenceSource::Literal(s) => Ok(Seq::from(s.prefix(n.min(s.len())))),
        }
    }
}
