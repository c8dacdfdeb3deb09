//! Alphabets, sequences, log-domain and exact arithmetic, the
//! (semi)measure interface and the concrete model families.

mod class;
mod logprob;
mod models;
mod seq;

pub use class::{ratio, rationals_up_to, ClassTag, ParamClass};
pub use logprob::{log_relative_diff, relative_diff, ExactProb, LogProb};
pub(crate) use logprob::cmp_f64;
pub use models::{
    chain_rule_joint, joint, joint_exact, joint_exact_within, validate_model, BernoulliModel,
    MeasureKind, PredictiveModel, ValidationReport, VanishingPairModel, CROSS_BACKEND_TOL,
    DEFAULT_ORACLE_HORIZON, EXACT_IDENTITY_TOL,
};
pub use seq::{Alphabet, Seq};
