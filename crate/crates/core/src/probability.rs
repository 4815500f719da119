//! Probability vectors and prepared × measured probability matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis;

/// Tolerance on the entry sum of a [`ProbabilityVector`].
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbabilityError {
    #[error("probability entry {index} = {value} outside [0, 1]")]
    EntryOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("dimension {0} is not a power of two")]
    BadDimension(usize),
    #[error("matrix has {rows} rows of length {cols}, expected square {dim}×{dim}")]
    NotSquare {
        rows: usize,
        cols: usize,
        dim: usize,
    },
}

/// Born-rule output: non-negative entries over the computational basis, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, ProbabilityError> {
        if !entries.len().is_power_of_two() {
            return Err(ProbabilityError::BadDimension(entries.len()));
        }
        check_stochastic(&entries, SUM_TOLERANCE)?;
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.entries.len().trailing_zeros() as usize
    }

    pub fn labels(&self) -> Vec<String> {
        basis::labels(self.num_qubits())
    }

    /// Probability that register qubit `qubit` reads 1.
    pub fn marginal_one(&self, qubit: usize) -> f64 {
        self.entries
            .iter()
            .enumerate()
            .filter(|(i, _)| basis::bit(*i, qubit) == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.entries
    }
}

pub(crate) fn check_stochastic(entries: &[f64], tolerance: f64) -> Result<(), ProbabilityError> {
    for (index, &value) in entries.iter().enumerate() {
        if !(-tolerance..=1.0 + tolerance).contains(&value) || !value.is_finite() {
            return Err(ProbabilityError::EntryOutOfRange { index, value });
        }
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > tolerance {
        return Err(ProbabilityError::NotNormalized { sum });
    }
    Ok(())
}

/// Readout probability matrix, rows indexed by the prepared state and columns
/// by the measured state. Every row is a probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMatrix {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ProbabilityMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbabilityError> {
        let dim = rows.len();
        if !dim.is_power_of_two() {
            return Err(ProbabilityError::BadDimension(dim));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(ProbabilityError::NotSquare {
                rows: dim,
                cols: bad.len(),
                dim,
            });
        }
        for row in &rows {
            check_stochastic(row, SUM_TOLERANCE)?;
        }
        Ok(Self {
            labels: basis::labels(dim.trailing_zeros() as usize),
            rows,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(rows).expect("identity is stochastic")
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, prepared: usize) -> &[f64] {
        &self.rows[prepared]
    }

    pub fn get(&self, prepared: usize, measured: usize) -> f64 {
        self.rows[prepared][measured]
    }

    /// Kronecker product `self ⊗ other`; `self` supplies the high bits.
    pub fn kron(&self, other: &ProbabilityMatrix) -> ProbabilityMatrix {
        let (n, m) = (self.dim(), other.dim());
        let mut rows = vec![vec![0.0; n * m]; n * m];
        for i in 0..n {
            for k in 0..m {
                for j in 0..n {
                    for l in 0..m {
                        rows[i * m + k][j * m + l] = self.rows[i][j] * other.rows[k][l];
                    }
                }
            }
        }
        ProbabilityMatrix {
            labels: basis::labels((n * m).trailing_zeros() as usize),
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        assert!(ProbabilityMatrix::new(vec![vec![0.5, 0.4], vec![0.0, 1.0]]).is_err());
        assert!(ProbabilityMatrix::new(vec![vec![1.0, 0.0, 0.0]]).is_err());
        assert!(ProbabilityMatrix::new(vec![vec![1.2, -0.2], vec![0.0, 1.0]]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn marginals_follow_bit_order() {
        let p = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!((p.marginal_one(basis::CONTROL) - 0.7).abs() < 1e-12);
        assert!((p.marginal_one(basis::TARGET) - 0.6).abs() < 1e-12);
    }
}
