use num_complex::Complex64;

use super::gates::{hadamard_matrix, Matrix2, Rotation};
use super::CircuitError;
use crate::basis;
use crate::probability::ProbabilityVector;

/// Largest register this simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Pure state of an `n`-qubit register as `2^n` complex amplitudes.
///
/// Amplitude `k` belongs to the basis state whose register-qubit `q` bit is
/// `(k >> q) & 1`; see [`crate::basis`] for the control/target layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self, CircuitError> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(CircuitError::RegisterSize(num_qubits));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(CircuitError::QubitIndex {
                qubit: index,
                num_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Basis state from a most-significant-first label such as `"01"`.
    pub fn from_label(label: &str) -> Result<Self, CircuitError> {
        let (index, n) = basis::parse_label(label).map_err(|e| CircuitError::Label(e.0.clone()))?;
        Self::basis_state(n, index)
    }

    /// Wraps raw amplitudes, normalizing them. Fails on a zero or non-finite vector.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, CircuitError> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
            return Err(CircuitError::RegisterSize(dim));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(CircuitError::Unnormalizable);
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), CircuitError> {
        if qubit >= self.num_qubits {
            return Err(CircuitError::QubitIndex {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(), CircuitError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(CircuitError::SameQubit(a));
        }
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix to one tensor factor.
    pub fn apply_single(&self, qubit: usize, u: &Matrix2) -> Result<Self, CircuitError> {
        self.check_qubit(qubit)?;
        let mut out = self.clone();
        let stride = 1usize << qubit;
        for base in 0..self.amplitudes.len() {
            if base & stride != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[base], self.amplitudes[base | stride]);
            out.amplitudes[base] = u[0][0] * a0 + u[0][1] * a1;
            out.amplitudes[base | stride] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(out)
    }

    pub fn apply_rotation(&self, qubit: usize, rotation: Rotation) -> Result<Self, CircuitError> {
        if !rotation.angle.is_finite() {
            return Err(CircuitError::NonFiniteAngle(rotation.angle));
        }
        self.apply_single(qubit, &rotation.matrix())
    }

    /// Hadamard realised as `Rx(π)·Ry(π/2)`; matches the textbook gate up to a global phase.
    pub fn apply_hadamard(&self, qubit: usize) -> Result<Self, CircuitError> {
        self.apply_single(qubit, &hadamard_matrix())
    }

    /// Controlled-Z: negates every amplitude whose `a` and `b` bits are both set.
    pub fn apply_cz(&self, a: usize, b: usize) -> Result<Self, CircuitError> {
        self.check_pair(a, b)?;
        let mask = (1usize << a) | (1usize << b);
        let mut out = self.clone();
        for (k, amp) in out.amplitudes.iter_mut().enumerate() {
            if k & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(out)
    }

    /// CNOT built as `(1⊗H)·CZ·(1⊗H)` on `(control, target)`.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self, CircuitError> {
        self.check_pair(control, target)?;
        self.apply_hadamard(target)?
            .apply_cz(control, target)?
            .apply_hadamard(target)
    }

    /// Born-rule probabilities `|amplitude_k|²`.
    pub fn probabilities(&self) -> ProbabilityVector {
        let norm = self.norm_sqr();
        let entries = self
            .amplitudes
            .iter()
            .map(|a| (a.norm_sqr() / norm).clamp(0.0, 1.0))
            .collect();
        ProbabilityVector::new(entries).expect("normalized state yields a probability vector")
    }
}

/// Born-rule output of a normalized state.
pub fn ideal_probabilities(state: &QuantumState) -> ProbabilityVector {
    state.probabilities()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn rotation_examples() {
        let zero = QuantumState::zero(1).unwrap();
        let p = zero
            .apply_rotation(0, Rotation::x(PI))
            .unwrap()
            .probabilities();
        assert!(p.entries()[0].abs() < 1e-15 && (p.entries()[1] - 1.0).abs() < 1e-15);
        for theta in [0.3, 1.0, -2.2, 7.0] {
            let p = zero
                .apply_rotation(0, Rotation::z(theta))
                .unwrap()
                .probabilities();
            assert_eq!(p.entries(), &[1.0, 0.0]);
        }
        let s = zero.apply_rotation(0, Rotation::y(PI / 2.0)).unwrap();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_qubit_is_an_error() {
        let s = QuantumState::zero(2).unwrap();
        assert!(matches!(
            s.apply_rotation(2, Rotation::x(1.0)),
            Err(CircuitError::QubitIndex { qubit: 2, .. })
        ));
        assert!(matches!(s.apply_cz(1, 1), Err(CircuitError::SameQubit(1))));
        assert!(matches!(
            s.apply_cnot(0, 0),
            Err(CircuitError::SameQubit(0))
        ));
        assert!(s.apply_rotation(0, Rotation::x(f64::NAN)).is_err());
    }

    #[test]
    fn cz_examples() {
        let s = QuantumState::from_label("11")
            .unwrap()
            .apply_cz(0, 1)
            .unwrap();
        assert_eq!(s.amplitudes()[3], Complex64::new(-1.0, 0.0));
        let s = QuantumState::from_label("00")
            .unwrap()
            .apply_cz(0, 1)
            .unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = QuantumState::from_label("10")
            .unwrap()
            .apply_cnot(1, 0)
            .unwrap()
            .probabilities();
        assert!((s.entries()[3] - 1.0).abs() < 1e-12);
        let s = QuantumState::from_label("00")
            .unwrap()
            .apply_cnot(1, 0)
            .unwrap()
            .probabilities();
        assert!((s.entries()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_gives_equal_superposition() {
        let p = QuantumState::zero(1)
            .unwrap()
            .apply_hadamard(0)
            .unwrap()
            .probabilities();
        assert!((p.entries()[0] - 0.5).abs() < 1e-15);
        assert!((p.entries()[1] - 0.5).abs() < 1e-15);
    }
}
