//! Threshold fitting, shot classification, the multiplied and conditional
//! readout-probability paradigms, and Hellinger-fidelity scoring.
//!
//! Matrices are prepared-state-indexed rows throughout; count matrices keep
//! the measured-first `n[measured][prepared]` layout.

mod counts;
mod hellinger;
mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use counts::{
    conditional_counts, conditional_paradigm, multiplied_paradigm, multiplied_paradigm_from_shots,
    single_qubit_counts, single_qubit_matrix, CountMatrix,
};
pub use hellinger::{
    hellinger_distance, hellinger_fidelity, hellinger_fidelity_from_distance,
    NORMALIZATION_TOLERANCE,
};
pub use threshold::{fit_threshold, fit_threshold_for, SlopeIntercept, Threshold};

use crate::probability::{ProbabilityError, ProbabilityMatrix};
use crate::readout::ReadoutError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("degenerate threshold geometry: {0}")]
    DegenerateGeometry(String),
    #[error("empty shot set")]
    EmptyShotSet,
    #[error("no shots for prepared state {0:?}")]
    MissingPreparation(String),
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
}

/// Per-prepared-state Hellinger fidelity of each paradigm against the ideal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTable {
    pub labels: Vec<String>,
    pub multiplied: Vec<f64>,
    pub conditional: Vec<f64>,
}

impl FidelityTable {
    /// `conditional − multiplied` per row.
    pub fn absolute_gain(&self) -> Vec<f64> {
        self.conditional
            .iter()
            .zip(&self.multiplied)
            .map(|(c, m)| c - m)
            .collect()
    }

    /// `(conditional − multiplied) / multiplied` per row; infinite when the multiplied score is 0.
    pub fn relative_gain(&self) -> Vec<f64> {
        self.conditional
            .iter()
            .zip(&self.multiplied)
            .map(|(c, m)| relative_delta(*c, *m))
            .collect()
    }
}

pub(crate) fn relative_delta(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b) / b
    }
}

pub fn paradigm_report(
    ideal: &ProbabilityMatrix,
    multiplied: &ProbabilityMatrix,
    conditional: &ProbabilityMatrix,
) -> Result<FidelityTable, AnalysisError> {
    let dim = ideal.dim();
    if multiplied.dim() != dim || conditional.dim() != dim {
        return Err(AnalysisError::Argument(format!(
            "matrix dimensions differ: ideal {dim}, multiplied {}, conditional {}",
            multiplied.dim(),
            conditional.dim()
        )));
    }
    let score = |m: &ProbabilityMatrix| -> Result<Vec<f64>, AnalysisError> {
        (0..dim)
            .map(|r| hellinger_fidelity(ideal.row(r), m.row(r)))
            .collect()
    };
    Ok(FidelityTable {
        labels: ideal.labels().to_vec(),
        multiplied: score(multiplied)?,
        conditional: score(conditional)?,
    })
}

/// Binomial standard error `√(p(1−p)/n)`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}
