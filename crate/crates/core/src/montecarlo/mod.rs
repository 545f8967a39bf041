//! Finite-dimensional symbol-error-rate experiments and their large-system
//! predictions.

mod experiment;
mod seed;
mod ser;

pub use experiment::{predicted_sinr, run_experiment, run_trial, ExperimentConfig, SerPoint, SerResult};
pub use seed::child_seed;
pub use ser::{q_function, ser_closed_form, wilson_interval, WILSON_Z95};
