//! Conditional-oscillation analysis: conditional phase and leakage of a CZ.
//!
//! Each variant (control left in |0⟩ = Off, control flipped = On) yields a
//! fringe: readout signal versus the phase of the final π/2 pulse on the
//! target, sampled on both the target and control channels.

use std::io::Read;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::DeviceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeData {
    pub phases_rad: Vec<f64>,
    pub target: Vec<f64>,
    pub control: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct FringeRow {
    phase_deg: f64,
    target: f64,
    control: f64,
}

impl FringeData {
    pub fn new(
        phases_rad: Vec<f64>,
        target: Vec<f64>,
        control: Vec<f64>,
    ) -> Result<Self, DeviceError> {
        if phases_rad.len() != target.len() || phases_rad.len() != control.len() {
            return Err(DeviceError::Argument(format!(
                "fringe columns differ in length: {} phases, {} target, {} control",
                phases_rad.len(),
                target.len(),
                control.len()
            )));
        }
        if phases_rad
            .iter()
            .chain(&target)
            .chain(&control)
            .any(|v| !v.is_finite())
        {
            return Err(DeviceError::Argument(
                "fringe contains non-finite values".into(),
            ));
        }
        Ok(Self {
            phases_rad,
            target,
            control,
        })
    }

    /// Parses `phase_deg,target,control` CSV with a one-line header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, DeviceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut phases, mut target, mut control) = (Vec::new(), Vec::new(), Vec::new());
        for (i, row) in rdr.deserialize::<FringeRow>().enumerate() {
            let row = row.map_err(|e| DeviceError::Data {
                line: i + 2,
                message: e.to_string(),
            })?;
            phases.push(row.phase_deg.to_radians());
            target.push(row.target);
            control.push(row.control);
        }
        Self::new(phases, target, control)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase_deg,target,control\n");
        for ((p, t), c) in self.phases_rad.iter().zip(&self.target).zip(&self.control) {
            out.push_str(&format!("{},{},{}\n", p.to_degrees(), t, c));
        }
        out
    }

    /// Synthetic fringe `amplitude·cos(φ + phase0) + offset` on the target and a
    /// flat `control_level` on the control, `n` phases over one period.
    #[allow(clippy::too_many_arguments)]
    pub fn synthetic<R: Rng + ?Sized>(
        n: usize,
        amplitude: f64,
        phase0_rad: f64,
        offset: f64,
        control_level: f64,
        noise: f64,
        rng: &mut R,
    ) -> Result<Self, DeviceError> {
        let dist =
            Normal::new(0.0, noise.max(0.0)).map_err(|e| DeviceError::Argument(e.to_string()))?;
        let phases: Vec<f64> = (0..n)
            .map(|k| std::f64::consts::TAU * k as f64 / n as f64)
            .collect();
        let target = phases
            .iter()
            .map(|&p| amplitude * (p + phase0_rad).cos() + offset + dist.sample(rng))
            .collect();
        let control = phases
            .iter()
            .map(|_| control_level + dist.sample(rng))
            .collect();
        Self::new(phases, target, control)
    }
}

/// `amplitude·cos(φ + phase0) + offset`, with `amplitude ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub amplitude: f64,
    pub phase0_rad: f64,
    pub offset: f64,
}

/// Linear least squares on `a·cos φ + b·sin φ + c`.
pub fn fit_cosine(phases_rad: &[f64], values: &[f64]) -> Result<CosineFit, DeviceError> {
    if phases_rad.len() != values.len() || phases_rad.len() < 3 {
        return Err(DeviceError::Fit {
            message: "cosine fit needs at least 3 samples".into(),
            diagnostics: format!("{} phases, {} values", phases_rad.len(), values.len()),
        });
    }
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&p, &y) in phases_rad.iter().zip(values) {
        let row = Vector3::new(p.cos(), p.sin(), 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata.lu().solve(&aty).ok_or_else(|| DeviceError::Fit {
        message: "phase samples do not constrain a cosine".into(),
        diagnostics: format!("{} samples", phases_rad.len()),
    })?;
    let (a, b, c) = (sol[0], sol[1], sol[2]);
    // a·cos φ + b·sin φ = A·cos(φ + φ0) with A cos φ0 = a, A sin φ0 = −b.
    Ok(CosineFit {
        amplitude: a.hypot(b),
        phase0_rad: (-b).atan2(a),
        offset: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPhase {
    /// Wrapped into [0°, 360°).
    pub theta_deg: f64,
    /// Offset difference On − Off on the control channel, in input units.
    pub leakage: f64,
    pub on_target: CosineFit,
    pub off_target: CosineFit,
    pub on_control: CosineFit,
    pub off_control: CosineFit,
}

fn phase_span_ok(phases: &[f64]) -> bool {
    if phases.len() < 3 {
        return false;
    }
    let mut sorted = phases.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = sorted[sorted.len() - 1] - sorted[0];
    let step = span / (sorted.len() - 1) as f64;
    span + step >= std::f64::consts::TAU - 1e-9
}

fn check_fringe(name: &str, f: &FringeData) -> Result<CosineFit, DeviceError> {
    if !phase_span_ok(&f.phases_rad) {
        return Err(DeviceError::Argument(format!(
            "{name} fringe does not cover a full phase period"
        )));
    }
    let fit = fit_cosine(&f.phases_rad, &f.target)?;
    let scale = f.target.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if fit.amplitude <= 1e-9 * scale {
        return Err(DeviceError::Fit {
            message: format!("{name} target fringe is flat"),
            diagnostics: format!(
                "fitted amplitude {:e}, signal scale {scale:e}",
                fit.amplitude
            ),
        });
    }
    Ok(fit)
}

/// Conditional phase `θ2Q = φ0(On) − φ0(Off)` and the control-channel offset shift.
pub fn conditional_phase(
    on: &FringeData,
    off: &FringeData,
) -> Result<ConditionalPhase, DeviceError> {
    let on_target = check_fringe("On", on)?;
    let off_target = check_fringe("Off", off)?;
    let on_control = fit_cosine(&on.phases_rad, &on.control)?;
    let off_control = fit_cosine(&off.phases_rad, &off.control)?;
    let theta = (on_target.phase0_rad - off_target.phase0_rad)
        .to_degrees()
        .rem_euclid(360.0);
    Ok(ConditionalPhase {
        // rem_euclid can round up to exactly 360 for tiny negative inputs.
        theta_deg: if theta >= 360.0 { 0.0 } else { theta },
        leakage: on_control.offset - off_control.offset,
        on_target,
        off_target,
        on_control,
        off_control,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(shift_deg: f64, noise: f64, seed: u64) -> (FringeData, FringeData) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let off = FringeData::synthetic(36, 0.02, 0.4, 0.05, 0.010, noise, &mut rng).unwrap();
        let on = FringeData::synthetic(
            36,
            0.02,
            0.4 + shift_deg.to_radians(),
            0.05,
            0.01966,
            noise,
            &mut rng,
        )
        .unwrap();
        (on, off)
    }

    #[test]
    fn ideal_cz_gives_half_turn() {
        let (on, off) = pair(180.0, 0.0, 1);
        let r = conditional_phase(&on, &off).unwrap();
        assert!((r.theta_deg - 180.0).abs() < 1e-9);
        assert!((r.leakage - 0.00966).abs() < 1e-12);
    }

    #[test]
    fn identical_fringes_give_zero() {
        let (_, off) = pair(0.0, 0.0, 2);
        let r = conditional_phase(&off, &off).unwrap();
        assert!(r.theta_deg.abs() < 1e-9 || (360.0 - r.theta_deg) < 1e-9);
        assert_eq!(r.leakage, 0.0);
    }

    #[test]
    fn planted_shift_under_noise() {
        let (on, off) = pair(191.0, 5e-4, 3);
        let r = conditional_phase(&on, &off).unwrap();
        assert!((r.theta_deg - 191.0).abs() < 1.0, "{}", r.theta_deg);
    }

    #[test]
    fn flat_fringe_is_a_fit_error() {
        let (on, _) = pair(0.0, 0.0, 4);
        let flat = FringeData::new(on.phases_rad.clone(), vec![0.3; 36], vec![0.0; 36]).unwrap();
        assert!(matches!(
            conditional_phase(&on, &flat),
            Err(DeviceError::Fit { .. })
        ));
    }

    #[test]
    fn partial_period_is_rejected() {
        let phases: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let f = FringeData::new(
            phases.clone(),
            phases.iter().map(|p| p.cos()).collect(),
            vec![0.0; 10],
        )
        .unwrap();
        assert!(conditional_phase(&f, &f).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let (on, _) = pair(191.0, 0.0, 5);
        let back = FringeData::from_csv(on.to_csv().as_bytes()).unwrap();
        for (a, b) in back.phases_rad.iter().zip(&on.phases_rad) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(FringeData::from_csv("phase_deg,target,control\n1,2\n".as_bytes()).is_err());
    }
}
