//! Bayes mixtures over countable model classes, convergence and randomness
//! diagnostics, and a budgeted lower approximation of Solomonoff's universal
//! prior.
//!
//! Each capability has a runnable program under `examples/`:
//!
//! ```bash
//! cargo run -p unipred --example mixture_dominance
//! cargo run -p unipred --example convergence_bound
//! cargo run -p unipred --example gap_counterexample
//! cargo run -p unipred --example dense_convergence
//! cargo run -p unipred --example ratio_divergence
//! cargo run -p unipred --example randomness_deficiency
//! cargo run -p unipred --example solomonoff_prior
//! cargo run -p unipred --example experiment_runner
//! ```
//!
//! The `unipred` binary wraps the experiment runner in [`cli`].

pub mod cli;
pub mod coding;
pub mod constructions;
pub mod diagnostics;
pub mod error;
pub mod measure;
pub mod mixture;
pub mod rng;
pub mod solomonoff;

pub use error::{Error, Result};
