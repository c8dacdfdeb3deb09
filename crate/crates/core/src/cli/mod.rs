//! Configuration, output files and the experiment runner behind the `unipred` binary.

mod config;
mod csv;
mod run;

pub use config::{
    parse_backend, parse_rational, parse_rational_list, ClassKind, Experiment, ExperimentConfig,
    WeightKind,
};
pub use csv::{fmt_f64, CsvTable};
pub use run::{build_class, exit_code, run, Check, CheckStatus, RunOutcome, DENSE_DEVIATION_BOUND};
