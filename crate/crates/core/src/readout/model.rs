use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ReadoutError;
use crate::basis::{CONTROL, TARGET};
use crate::device::DeviceParams;

/// A point in the IQ plane, volts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IqPoint {
    pub i: f64,
    pub q: f64,
}

impl IqPoint {
    pub const fn new(i: f64, q: f64) -> Self {
        Self { i, q }
    }

    pub fn distance(&self, other: &IqPoint) -> f64 {
        (self.i - other.i).hypot(self.q - other.q)
    }
}

/// Blob geometry and error channel of one qubit's readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitReadout {
    pub center0: IqPoint,
    pub center1: IqPoint,
    /// Isotropic blob standard deviation, volts. Zero gives noiseless blobs.
    pub sigma: f64,
    /// Probability that |1⟩ relaxes to |0⟩ before it is resolved.
    pub decay_probability: f64,
    /// Probability that |0⟩ is excited to |1⟩ during readout.
    pub excitation_probability: f64,
}

/// Default blob standard deviation: centers at distance 2 V, separation/σ = 4.
pub const DEFAULT_SIGMA: f64 = 0.5;
/// Default rotation of the blob axis per register qubit (Q0, Q2), radians.
pub const DEFAULT_ANGLES: [f64; 2] = [0.35, 2.2];

impl QubitReadout {
    /// Centers at `±(1, 0)` V rotated by `angle_rad`: |0⟩ at `+`, |1⟩ at `−`.
    pub fn rotated(angle_rad: f64, sigma: f64, decay_probability: f64) -> Self {
        let (s, c) = angle_rad.sin_cos();
        Self {
            center0: IqPoint::new(c, s),
            center1: IqPoint::new(-c, -s),
            sigma,
            decay_probability,
            excitation_probability: 0.0,
        }
    }

    pub fn validate(&self, name: &str) -> Result<(), ReadoutError> {
        let finite = [
            self.center0.i,
            self.center0.q,
            self.center1.i,
            self.center1.q,
            self.sigma,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(ReadoutError::Model(format!(
                "{name}: non-finite blob geometry"
            )));
        }
        if self.center0 == self.center1 {
            return Err(ReadoutError::Model(format!(
                "{name}: blob centers coincide"
            )));
        }
        if self.sigma < 0.0 {
            return Err(ReadoutError::Model(format!(
                "{name}: sigma must be non-negative"
            )));
        }
        for (field, p) in [
            ("decay_probability", self.decay_probability),
            ("excitation_probability", self.excitation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ReadoutError::Model(format!(
                    "{name}: {field} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Readout of the two-qubit register, indexed by register qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub qubits: [QubitReadout; 2],
    /// Probability that both qubits' outcomes flip together in a simultaneous readout.
    pub correlated_flip_probability: f64,
}

impl ReadoutModel {
    /// Default geometry with decay probabilities `1 − exp(−t_ro/T1)` from `device`.
    pub fn from_device(device: &DeviceParams) -> Self {
        let mut qubits = [QubitReadout::rotated(0.0, DEFAULT_SIGMA, 0.0); 2];
        for q in [TARGET, CONTROL] {
            qubits[q] = QubitReadout::rotated(
                DEFAULT_ANGLES[q],
                DEFAULT_SIGMA,
                device.decay_probability(q),
            );
        }
        Self {
            qubits,
            correlated_flip_probability: 0.0,
        }
    }

    /// Default geometry with every noise source switched off.
    pub fn noiseless() -> Self {
        let mut qubits = [QubitReadout::rotated(0.0, 0.0, 0.0); 2];
        for q in [TARGET, CONTROL] {
            qubits[q] = QubitReadout::rotated(DEFAULT_ANGLES[q], 0.0, 0.0);
        }
        Self {
            qubits,
            correlated_flip_probability: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        for (k, q) in self.qubits.iter().enumerate() {
            q.validate(crate::basis::physical_name(k))?;
        }
        if !(0.0..=1.0).contains(&self.correlated_flip_probability) {
            return Err(ReadoutError::Model(format!(
                "correlated_flip_probability = {} outside [0, 1]",
                self.correlated_flip_probability
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("model serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let m = ReadoutModel::from_device(&DeviceParams::default());
        m.validate().unwrap();
        for q in &m.qubits {
            assert!((q.center0.distance(&q.center1) / q.sigma - 4.0).abs() < 1e-12);
        }
        assert!((m.qubits[CONTROL].decay_probability - 0.024690087971667385).abs() < 1e-12);
        assert!((m.qubits[TARGET].decay_probability - 0.008298707361124036).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut m = ReadoutModel::noiseless();
        m.validate().unwrap();
        m.qubits[0].center1 = m.qubits[0].center0;
        assert!(m.validate().is_err());
        let mut m = ReadoutModel::noiseless();
        m.correlated_flip_probability = 1.5;
        assert!(m.validate().is_err());
        let mut m = ReadoutModel::noiseless();
        m.qubits[1].sigma = -0.1;
        assert!(m.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ReadoutModel::noiseless();
        let mut b = a;
        assert_eq!(a.hash(), b.hash());
        b.qubits[0].sigma = 0.1;
        assert_ne!(a.hash(), b.hash());
    }
}
