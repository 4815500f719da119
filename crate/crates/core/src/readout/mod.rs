//! Stochastic single-shot dispersive readout.
//!
//! A true register outcome is mapped to one IQ voltage sample per qubit. The
//! error channel is applied before blob selection: an optional correlated
//! flip of both outcomes, then per-qubit relaxation (|1⟩ → |0⟩ with the
//! decay probability) or excitation, then isotropic Gaussian blob noise.

mod model;
mod shots;
mod sim;

use thiserror::Error;

pub use model::{IqPoint, QubitReadout, ReadoutModel, DEFAULT_ANGLES, DEFAULT_SIGMA};
pub use shots::{read_shot_csv, write_shot_csv, ShotFile, ShotRecord, ShotSet};
pub use sim::{calibration_run, experiment_run, joint_outcome, sample_shot, DEFAULT_SHOTS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReadoutError {
    #[error("invalid readout model: {0}")]
    Model(String),
    #[error("{0}")]
    Argument(String),
    #[error("invalid prepared-state label {0:?}")]
    Label(String),
    #[error("qubit {qubit} not measured in shot set {prepared:?}")]
    QubitMissing { qubit: usize, prepared: String },
    #[error("shot CSV line {line}: {message}")]
    Format { line: usize, message: String },
}
