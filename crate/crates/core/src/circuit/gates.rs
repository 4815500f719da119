use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A 2×2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Pauli axis selecting σ_x, σ_y or σ_z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Single-qubit rotation `exp(-i θ σ_axis / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub axis: Axis,
    pub angle: f64,
}

impl Rotation {
    pub fn new(axis: Axis, angle: f64) -> Self {
        Self { axis, angle }
    }

    pub fn x(angle: f64) -> Self {
        Self::new(Axis::X, angle)
    }

    pub fn y(angle: f64) -> Self {
        Self::new(Axis::Y, angle)
    }

    pub fn z(angle: f64) -> Self {
        Self::new(Axis::Z, angle)
    }

    /// Closed form `cos(θ/2)·1 − i sin(θ/2)·σ_axis`.
    pub fn matrix(&self) -> Matrix2 {
        let half = self.angle / 2.0;
        let (s, c) = half.sin_cos();
        let zero = Complex64::new(0.0, 0.0);
        match self.axis {
            Axis::X => [
                [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
            ],
            Axis::Y => [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
            Axis::Z => [[Complex64::new(c, -s), zero], [zero, Complex64::new(c, s)]],
        }
    }
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Hadamard as the native pulse pair: `Ry(π/2)` first, then `Rx(π)`.
///
/// Equals the textbook Hadamard times the global phase `-i`.
pub fn hadamard_matrix() -> Matrix2 {
    matmul2(
        &Rotation::x(std::f64::consts::PI).matrix(),
        &Rotation::y(std::f64::consts::FRAC_PI_2).matrix(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn max_unitarity_defect(u: &Matrix2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn rotations_are_unitary() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for k in 0..24 {
                let r = Rotation::new(axis, -3.0 * PI + k as f64 * 0.37);
                assert!(max_unitarity_defect(&r.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let m = Rotation::new(axis, 0.0).matrix();
            assert_eq!(m[0][0], Complex64::new(1.0, 0.0));
            assert_eq!(m[1][1], Complex64::new(1.0, 0.0));
            assert_eq!(m[0][1].norm(), 0.0);
            assert_eq!(m[1][0].norm(), 0.0);
        }
    }

    #[test]
    fn decomposed_hadamard_is_minus_i_times_textbook() {
        let h = hadamard_matrix();
        let expect = [[1.0, 1.0], [1.0, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                let want = Complex64::new(0.0, -FRAC_1_SQRT_2 * expect[i][j]);
                assert!((h[i][j] - want).norm() < 1e-15);
            }
        }
    }
}
