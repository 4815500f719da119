//! Exact state-vector simulation of the rotation/Hadamard/CZ/CNOT gate set.
//!
//! Gates are perfect unitaries. Hadamard is the native `Ry(π/2)` then `Rx(π)`
//! pair and CNOT is `(1⊗H)·CZ·(1⊗H)`, so both carry a global phase relative
//! to their textbook matrices. Global phase is unobservable and every
//! matrix-equivalence check aligns it on the first nonzero entry.

mod gates;
mod program;
mod state;

use thiserror::Error;

pub use gates::{hadamard_matrix, matmul2, Axis, Matrix2, Rotation};
pub use program::{Circuit, Gate};
pub use state::{ideal_probabilities, QuantumState, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitIndex { qubit: usize, num_qubits: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("unsupported register size {0}")]
    RegisterSize(usize),
    #[error("rotation angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("amplitude vector cannot be normalized")]
    Unnormalizable,
    #[error("unknown basis-state label {0:?}")]
    Label(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Default assignment of the single-qubit random circuit: Hadamard on the
/// control, then `Rx(π/4)` and `Rx(π)` on the target.
pub const SINGLE_QUBIT_DEFAULT: &str = "\
# single-qubit gate random circuit (default assignment)
H 1
RX 0 0.7853981633974483
RX 0 3.141592653589793
";

/// Bell circuit (Hadamard on the control, CNOT onto the target) from a
/// two-qubit basis label: `00 → Φ+`, `01 → Ψ+`, `10 → Φ−`, `11 → Ψ−`,
/// each up to a global phase.
pub fn bell_circuit(initial: &str) -> Result<QuantumState, CircuitError> {
    let start = QuantumState::from_label(initial)?;
    if start.num_qubits() != 2 {
        return Err(CircuitError::Label(initial.to_string()));
    }
    Circuit::bell().run(&start)
}

/// Runs `circuit` on the basis state named by `initial`.
pub fn run_circuit(circuit: &Circuit, initial: &str) -> Result<QuantumState, CircuitError> {
    let start = QuantumState::from_label(initial)?;
    if circuit.width() > start.num_qubits() {
        return Err(CircuitError::QubitIndex {
            qubit: circuit.width() - 1,
            num_qubits: start.num_qubits(),
        });
    }
    circuit.run(&start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn bell_outputs() {
        let p = ideal_probabilities(&bell_circuit("00").unwrap());
        assert_eq!(p.len(), 4);
        for (got, want) in p.entries().iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let p = ideal_probabilities(&bell_circuit("01").unwrap());
        for (got, want) in p.entries().iter().zip([0.0, 0.5, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // Φ−: amplitudes of |00⟩ and |11⟩ differ by a relative sign.
        let s = bell_circuit("10").unwrap();
        let a = s.amplitudes();
        assert!(((a[3] / a[0]) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(bell_circuit("2").is_err());
        assert!(bell_circuit("000").is_err());
        assert!(bell_circuit("ab").is_err());
    }

    #[test]
    fn run_circuit_rejects_wide_programs() {
        let c = Circuit::parse("H 2").unwrap();
        assert!(run_circuit(&c, "00").is_err());
    }

    #[test]
    fn default_single_qubit_circuit_parses() {
        let c = Circuit::parse(SINGLE_QUBIT_DEFAULT).unwrap();
        assert_eq!(c.gates.len(), 3);
    }
}
