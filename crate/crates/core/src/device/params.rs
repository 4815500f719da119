use serde::{Deserialize, Serialize};

use super::DeviceError;
use crate::basis::{CONTROL, TARGET};

/// Physical constants of one transmon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    /// Sweet-spot |0⟩→|1⟩ frequency, GHz.
    pub freq_ghz: f64,
    /// Charging energy, GHz.
    pub ec_ghz: f64,
    /// Relaxation time, µs.
    pub t1_us: f64,
    /// Hahn-echo dephasing time, µs.
    pub t2echo_us: f64,
}

/// Two-qubit subregister constants, indexed by register qubit (0 = Q0, 1 = Q2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub qubits: [QubitParams; 2],
    /// Effective qubit–qubit coupling, GHz.
    pub j_ghz: f64,
    /// Readout pulse duration, ns.
    pub readout_duration_ns: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        let mut qubits = [QubitParams {
            freq_ghz: 0.0,
            ec_ghz: 0.0,
            t1_us: 0.0,
            t2echo_us: 0.0,
        }; 2];
        qubits[TARGET] = QubitParams {
            freq_ghz: 4.5546,
            ec_ghz: 0.340,
            t1_us: 24.0,
            t2echo_us: 10.0,
        };
        qubits[CONTROL] = QubitParams {
            freq_ghz: 5.6503,
            ec_ghz: 0.274,
            t1_us: 8.0,
            t2echo_us: 6.0,
        };
        Self {
            qubits,
            j_ghz: 0.012,
            readout_duration_ns: 200.0,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        for (k, q) in self.qubits.iter().enumerate() {
            let name = crate::basis::physical_name(k);
            for (field, v) in [
                ("freq_ghz", q.freq_ghz),
                ("ec_ghz", q.ec_ghz),
                ("t1_us", q.t1_us),
                ("t2echo_us", q.t2echo_us),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(DeviceError::Argument(format!(
                        "{name}.{field} must be positive, got {v}"
                    )));
                }
            }
            if q.t2echo_us > 2.0 * q.t1_us {
                return Err(DeviceError::Argument(format!(
                    "{name}: T2echo = {} µs exceeds 2·T1 = {} µs",
                    q.t2echo_us,
                    2.0 * q.t1_us
                )));
            }
        }
        for (field, v) in [
            ("j_ghz", self.j_ghz),
            ("readout_duration_ns", self.readout_duration_ns),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DeviceError::Argument(format!(
                    "{field} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Probability that an excited qubit relaxes during the readout pulse,
    /// `1 − exp(−t_ro / T1)`.
    pub fn decay_probability(&self, qubit: usize) -> f64 {
        let t1_ns = self.qubits[qubit].t1_us * 1e3;
        1.0 - (-self.readout_duration_ns / t1_ns).exp()
    }
}

/// Flux-tuned Josephson energy of a symmetric SQUID, `EJ0·cos(π·φ/φ0)`.
///
/// Negative beyond half a flux quantum; callers decide the usable window.
pub fn josephson_energy(ej0_ghz: f64, flux_ratio: f64) -> f64 {
    ej0_ghz * (std::f64::consts::PI * flux_ratio).cos()
}

/// Transmon |0⟩→|1⟩ frequency `√(8·EJ·EC) − EC`.
pub fn transmon_frequency(ej_ghz: f64, ec_ghz: f64) -> Result<f64, DeviceError> {
    if !(ej_ghz > 0.0 && ec_ghz > 0.0) || !ej_ghz.is_finite() || !ec_ghz.is_finite() {
        return Err(DeviceError::Argument(format!(
            "transmon energies must be positive, got EJ = {ej_ghz}, EC = {ec_ghz}"
        )));
    }
    Ok((8.0 * ej_ghz * ec_ghz).sqrt() - ec_ghz)
}

/// Josephson energy that puts a transmon with charging energy `ec_ghz` at `freq_ghz`.
pub fn invert_for_ej(freq_ghz: f64, ec_ghz: f64) -> Result<f64, DeviceError> {
    if !(freq_ghz > 0.0 && ec_ghz > 0.0) || !freq_ghz.is_finite() || !ec_ghz.is_finite() {
        return Err(DeviceError::Argument(format!(
            "frequency and EC must be positive, got {freq_ghz}, {ec_ghz}"
        )));
    }
    Ok((freq_ghz + ec_ghz).powi(2) / (8.0 * ec_ghz))
}

/// Swept-qubit frequency at a given flux bias, from its sweet-spot EJ0 and EC.
pub fn flux_tuned_frequency(
    ej0_ghz: f64,
    ec_ghz: f64,
    flux_ratio: f64,
) -> Result<f64, DeviceError> {
    transmon_frequency(josephson_energy(ej0_ghz, flux_ratio), ec_ghz)
}

/// Dispersive shift `χ = g²/Δ`.
pub fn dispersive_shift(g_ghz: f64, delta_ghz: f64) -> Result<f64, DeviceError> {
    if delta_ghz == 0.0 || !delta_ghz.is_finite() {
        return Err(DeviceError::Argument(
            "dispersive shift undefined at zero detuning".into(),
        ));
    }
    Ok(g_ghz * g_ghz / delta_ghz)
}

/// Dressed frequencies of two coupled modes, upper branch first:
/// `((ν1+ν2) ± √((ν1−ν2)² + 4J²)) / 2`.
pub fn dressed_frequencies(nu1: f64, nu2: f64, j: f64) -> (f64, f64) {
    let mean = 0.5 * (nu1 + nu2);
    let half_split = 0.5 * (nu1 - nu2).hypot(2.0 * j);
    (mean + half_split, mean - half_split)
}
