//! Two transmons coupled through a bus resonator, in the number basis.
//!
//! `H = Σ_i (ν_i b_i†b_i − EC_i/2 · b_i†b_i†b_i b_i) + ν_r a†a + Σ_i g_ir (b_i†a + b_i a†)`
//!
//! Mode order in the tensor product is (qubit 1, qubit 2, resonator), with
//! the resonator as the fastest-varying index. All coefficients are real, so
//! the matrix is real symmetric.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::DeviceError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystemModel {
    pub nu1_ghz: f64,
    pub nu2_ghz: f64,
    pub ec1_ghz: f64,
    pub ec2_ghz: f64,
    pub nu_r_ghz: f64,
    pub g1r_ghz: f64,
    pub g2r_ghz: f64,
    /// Levels kept per mode: (qubit 1, qubit 2, resonator).
    pub truncation: [usize; 3],
}

/// Ratio `|ν_i − ν_r| / g_ir` above which a qubit counts as dispersive.
pub const DISPERSIVE_RATIO: f64 = 10.0;

impl CoupledSystemModel {
    pub fn dimension(&self) -> usize {
        self.truncation.iter().product()
    }

    /// Both qubits detuned from the bus by more than [`DISPERSIVE_RATIO`] couplings.
    pub fn is_dispersive(&self) -> bool {
        [(self.nu1_ghz, self.g1r_ghz), (self.nu2_ghz, self.g2r_ghz)]
            .iter()
            .all(|&(nu, g)| g == 0.0 || (nu - self.nu_r_ghz).abs() / g.abs() > DISPERSIVE_RATIO)
    }

    /// Bus-mediated exchange coupling `g1 g2 (1/Δ1 + 1/Δ2) / 2`, with `Δ_i = ν_i − ν_r`.
    pub fn effective_coupling(&self) -> f64 {
        let d1 = self.nu1_ghz - self.nu_r_ghz;
        let d2 = self.nu2_ghz - self.nu_r_ghz;
        0.5 * self.g1r_ghz * self.g2r_ghz * (1.0 / d1 + 1.0 / d2)
    }

    /// Qubit frequencies including the resonator-induced shift `g²/Δ`.
    pub fn shifted_qubit_frequencies(&self) -> (f64, f64) {
        let d1 = self.nu1_ghz - self.nu_r_ghz;
        let d2 = self.nu2_ghz - self.nu_r_ghz;
        (
            self.nu1_ghz + self.g1r_ghz.powi(2) / d1,
            self.nu2_ghz + self.g2r_ghz.powi(2) / d2,
        )
    }

    fn index(&self, n1: usize, n2: usize, nr: usize) -> usize {
        let [_, t2, tr] = self.truncation;
        (n1 * t2 + n2) * tr + nr
    }
}

/// Dense Hamiltonian matrix in GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    model: CoupledSystemModel,
    matrix: DMatrix<f64>,
}

impl Hamiltonian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sorted_eigenvalues(self.matrix.clone())
    }

    /// Eigenvalues of the block with `excitations` total quanta, ascending.
    ///
    /// The coupling conserves excitation number, so this block is exact.
    pub fn sector_eigenvalues(&self, excitations: usize) -> Vec<f64> {
        let [t1, t2, tr] = self.model.truncation;
        let mut members = Vec::new();
        for n1 in 0..t1 {
            for n2 in 0..t2 {
                for nr in 0..tr {
                    if n1 + n2 + nr == excitations {
                        members.push(self.model.index(n1, n2, nr));
                    }
                }
            }
        }
        let block = DMatrix::from_fn(members.len(), members.len(), |i, j| {
            self.matrix[(members[i], members[j])]
        });
        sorted_eigenvalues(block)
    }
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Bare energy of transmon level `n`: `ν·n − EC/2 · n(n−1)`.
pub fn transmon_level(nu: f64, ec: f64, n: usize) -> f64 {
    let n = n as f64;
    nu * n - 0.5 * ec * n * (n - 1.0)
}

pub fn build_hamiltonian(model: &CoupledSystemModel) -> Result<Hamiltonian, DeviceError> {
    if model.truncation.iter().any(|&t| t < 2) {
        return Err(DeviceError::Argument(format!(
            "every mode needs at least 2 levels, got {:?}",
            model.truncation
        )));
    }
    if model.dimension() > 4096 {
        return Err(DeviceError::Argument(format!(
            "Hilbert space of dimension {} is too large for dense diagonalization",
            model.dimension()
        )));
    }
    let [t1, t2, tr] = model.truncation;
    let dim = model.dimension();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for n1 in 0..t1 {
        for n2 in 0..t2 {
            for nr in 0..tr {
                let i = model.index(n1, n2, nr);
                h[(i, i)] = transmon_level(model.nu1_ghz, model.ec1_ghz, n1)
                    + transmon_level(model.nu2_ghz, model.ec2_ghz, n2)
                    + model.nu_r_ghz * nr as f64;
                // b_i† a : move one quantum from the resonator into qubit i.
                if nr >= 1 {
                    if n1 + 1 < t1 {
                        let j = model.index(n1 + 1, n2, nr - 1);
                        let amp = model.g1r_ghz * ((n1 + 1) as f64).sqrt() * (nr as f64).sqrt();
                        h[(j, i)] += amp;
                        h[(i, j)] += amp;
                    }
                    if n2 + 1 < t2 {
                        let j = model.index(n1, n2 + 1, nr - 1);
                        let amp = model.g2r_ghz * ((n2 + 1) as f64).sqrt() * (nr as f64).sqrt();
                        h[(j, i)] += amp;
                        h[(i, j)] += amp;
                    }
                }
            }
        }
    }
    Ok(Hamiltonian {
        model: *model,
        matrix: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::dressed_frequencies;

    fn model(g: f64) -> CoupledSystemModel {
        CoupledSystemModel {
            nu1_ghz: 5.0,
            nu2_ghz: 5.0,
            ec1_ghz: 0.3,
            ec2_ghz: 0.25,
            nu_r_ghz: 7.0,
            g1r_ghz: g,
            g2r_ghz: g,
            truncation: [3, 3, 3],
        }
    }

    #[test]
    fn rejects_tiny_truncation() {
        let mut m = model(0.04);
        m.truncation = [3, 1, 3];
        assert!(build_hamiltonian(&m).is_err());
    }

    #[test]
    fn symmetric_with_expected_dimension() {
        let h = build_hamiltonian(&model(0.04)).unwrap();
        assert_eq!(h.matrix().nrows(), 27);
        let m = h.matrix();
        assert!((m - m.transpose()).amax() < 1e-12);
    }

    #[test]
    fn uncoupled_spectrum_is_sum_of_ladders() {
        let m = model(0.0);
        let h = build_hamiltonian(&m).unwrap();
        let mut bare = Vec::new();
        for n1 in 0..3 {
            for n2 in 0..3 {
                for nr in 0..3 {
                    bare.push(
                        transmon_level(m.nu1_ghz, m.ec1_ghz, n1)
                            + transmon_level(m.nu2_ghz, m.ec2_ghz, n2)
                            + m.nu_r_ghz * nr as f64,
                    );
                }
            }
        }
        bare.sort_by(f64::total_cmp);
        for (a, b) in h.eigenvalues().iter().zip(&bare) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn anharmonic_ladder() {
        let (nu, ec) = (4.5546, 0.340);
        let e1 = transmon_level(nu, ec, 1);
        let e2 = transmon_level(nu, ec, 2);
        assert!((e2 - 2.0 * e1 + ec).abs() < 1e-12);
    }

    #[test]
    fn dispersive_single_excitation_pair_matches_dressed_formula() {
        // g/Δ = 0.04 / 2 = 0.02
        let m = model(0.04);
        assert!(m.is_dispersive());
        let h = build_hamiltonian(&m).unwrap();
        let sector = h.sector_eigenvalues(1);
        let (nu1, nu2) = m.shifted_qubit_frequencies();
        let (upper, lower) = dressed_frequencies(nu1, nu2, m.effective_coupling().abs());
        let g = 0.04;
        let tol = (g / 2.0_f64).powi(2) * g;
        assert!((sector[0] - lower).abs() < tol, "{} vs {lower}", sector[0]);
        assert!((sector[1] - upper).abs() < tol, "{} vs {upper}", sector[1]);
        // The full spectrum contains the same pair just above the ground state.
        let all = h.eigenvalues();
        assert!(all[0].abs() < 1e-12);
        assert!((all[1] - sector[0]).abs() < 1e-10);
        assert!((all[2] - sector[1]).abs() < 1e-10);
    }
}
