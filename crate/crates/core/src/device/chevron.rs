//! |11⟩ ↔ |02⟩ swap dynamics under a flux pulse.
//!
//! The main-text spelling of the pair is |11⟩ ↔ |20⟩; both name the same
//! two-level manifold where the tuned qubit holds two quanta. The exchange
//! coupling `J` acts on it with matrix element `√2·J`, so the resonant
//! oscillation frequency is `Ω = 2√2·J` and population leaves |11⟩ as
//! `Ω²/(Ω²+δ²) · sin²(π·√(Ω²+δ²)·t)`.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Resonant oscillation frequency `2√2·J` in GHz.
pub fn swap_frequency(j_ghz: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * j_ghz
}

/// Population transferred out of |11⟩ after `duration_ns` at detuning `detuning_ghz`.
pub fn chevron_population(j_ghz: f64, detuning_ghz: f64, duration_ns: f64) -> f64 {
    let omega = swap_frequency(j_ghz);
    let generalized = omega.hypot(detuning_ghz);
    if generalized == 0.0 {
        return 0.0;
    }
    let amplitude = (omega / generalized).powi(2);
    let s = (std::f64::consts::PI * generalized * duration_ns).sin();
    (amplitude * s * s).clamp(0.0, 1.0)
}

/// Period of the population oscillation in ns, `1/√(Ω²+δ²)`.
pub fn chevron_period_ns(j_ghz: f64, detuning_ghz: f64) -> f64 {
    1.0 / swap_frequency(j_ghz).hypot(detuning_ghz)
}

/// First time of complete transfer on resonance, `1/(4√2·J)` ns.
pub fn first_full_transfer_ns(j_ghz: f64) -> f64 {
    0.5 / swap_frequency(j_ghz)
}

/// Splitting of the pair adjacent to the |11⟩/|02⟩ degeneracy in the
/// two-excitation block of two directly exchange-coupled transmons,
/// `J(b1†b2 + b1 b2†)`, with basis (|20⟩, |11⟩, |02⟩).
///
/// Qubit 2 is tuned to `ν1 + EC2` so |11⟩ and |02⟩ are degenerate.
pub fn two_excitation_splitting(nu1_ghz: f64, ec1_ghz: f64, ec2_ghz: f64, j_ghz: f64) -> f64 {
    let nu2 = nu1_ghz + ec2_ghz;
    let e20 = 2.0 * nu1_ghz - ec1_ghz;
    let e11 = nu1_ghz + nu2;
    let e02 = 2.0 * nu2 - ec2_ghz;
    let c = std::f64::consts::SQRT_2 * j_ghz;
    let h = Matrix3::new(e20, c, 0.0, c, e11, c, 0.0, c, e02);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    // |20⟩ sits lowest (ν1 < ν2), the degenerate pair on top.
    ev[2] - ev[1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevronPoint {
    pub detuning_ghz: f64,
    pub duration_ns: f64,
    pub population: f64,
}

/// Population on a detuning × duration grid, detuning-major.
pub fn chevron_map(j_ghz: f64, detunings_ghz: &[f64], durations_ns: &[f64]) -> Vec<ChevronPoint> {
    detunings_ghz
        .iter()
        .flat_map(|&d| {
            durations_ns.iter().map(move |&t| ChevronPoint {
                detuning_ghz: d,
                duration_ns: t,
                population: chevron_population(j_ghz, d, t),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn starts_empty() {
        assert_eq!(chevron_population(0.012, 0.0, 0.0), 0.0);
        assert_eq!(chevron_population(0.012, 0.03, 0.0), 0.0);
    }

    #[test]
    fn resonant_full_transfer_time() {
        let t = first_full_transfer_ns(0.012);
        assert!((t - 14.731391274719739).abs() < 1e-9);
        assert!((chevron_population(0.012, 0.0, t) - 1.0).abs() < 1e-12);
        assert!((t - 16.0).abs() <= 4.0);
    }

    #[test]
    fn large_detuning_suppresses_transfer() {
        let j = 0.012;
        let delta = 10.0 * swap_frequency(j);
        let peak = (0..2000)
            .map(|k| chevron_population(j, delta, k as f64 * 0.01))
            .fold(0.0, f64::max);
        assert!(peak < 0.01, "{peak}");
    }

    #[test]
    fn rabi_frequency_matches_block_eigensplitting() {
        let j = 0.012;
        let split = two_excitation_splitting(4.5546, 0.340, 0.274, j);
        // |20⟩ is detuned by EC1 + EC2 from the pair; its admixture shifts the splitting at O(J²/ΔE).
        let tol = 4.0 * j * j / (0.340 + 0.274);
        assert!((split - swap_frequency(j)).abs() < tol, "{split}");
    }

    proptest! {
        #[test]
        fn population_is_a_probability(j in 0.0f64..0.1, d in -1.0f64..1.0, t in 0.0f64..500.0) {
            let p = chevron_population(j, d, t);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn period_shrinks_with_detuning(j in 0.001f64..0.05, d in 0.0f64..0.5, extra in 1e-4f64..0.5) {
            prop_assert!(chevron_period_ns(j, d + extra) < chevron_period_ns(j, d));
            prop_assert!(chevron_period_ns(j, -(d + extra)) < chevron_period_ns(j, d));
        }
    }
}
