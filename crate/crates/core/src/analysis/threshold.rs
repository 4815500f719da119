use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::readout::{IqPoint, ShotSet};

/// State-discrimination line `a·I + b·Q + c = 0` with `(a, b)` a unit vector.
///
/// The positive side (`a·I + b·Q + c ≥ 0`) is |0⟩. The line is the
/// perpendicular bisector of the blob means, oriented from the calibration
/// data rather than a fixed inequality, because the sign convention differs
/// between qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub ground_mean: IqPoint,
    pub excited_mean: IqPoint,
}

/// `I(Q) = intercept + slope·Q`, when the line is not horizontal in Q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeIntercept {
    pub intercept: f64,
    pub slope: f64,
    /// Whether |0⟩ is assigned when `I > I(Q)`.
    pub ground_when_above: bool,
}

fn mean(points: &[IqPoint]) -> IqPoint {
    let n = points.len() as f64;
    let (si, sq) = points
        .iter()
        .fold((0.0, 0.0), |(si, sq), p| (si + p.i, sq + p.q));
    IqPoint::new(si / n, sq / n)
}

impl Threshold {
    /// Perpendicular bisector of the segment from `excited_mean` to `ground_mean`.
    pub fn from_means(ground_mean: IqPoint, excited_mean: IqPoint) -> Result<Self, AnalysisError> {
        let (dx, dy) = (
            ground_mean.i - excited_mean.i,
            ground_mean.q - excited_mean.q,
        );
        let norm = dx.hypot(dy);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(AnalysisError::DegenerateGeometry(format!(
                "blob means coincide at ({}, {})",
                ground_mean.i, ground_mean.q
            )));
        }
        let (a, b) = (dx / norm, dy / norm);
        let (mi, mq) = (
            0.5 * (ground_mean.i + excited_mean.i),
            0.5 * (ground_mean.q + excited_mean.q),
        );
        let t = Self {
            a,
            b,
            c: -(a * mi + b * mq),
            ground_mean,
            excited_mean,
        };
        let side = t.value(&ground_mean);
        if side.is_nan() || side <= 0.0 {
            return Err(AnalysisError::DegenerateGeometry(
                "ground mean does not fall on the |0⟩ side".into(),
            ));
        }
        Ok(t)
    }

    #[inline]
    pub fn value(&self, p: &IqPoint) -> f64 {
        self.a * p.i + self.b * p.q + self.c
    }

    /// 0 on the ground side or exactly on the line, 1 otherwise.
    #[inline]
    pub fn classify(&self, p: &IqPoint) -> u8 {
        if self.value(p) >= 0.0 {
            0
        } else {
            1
        }
    }

    pub fn slope_intercept(&self) -> Option<SlopeIntercept> {
        if self.a.abs() < 1e-12 {
            return None;
        }
        Some(SlopeIntercept {
            intercept: -self.c / self.a,
            slope: -self.b / self.a,
            ground_when_above: self.a > 0.0,
        })
    }
}

/// Threshold for `qubit` from its ground and excited calibration sets.
pub fn fit_threshold_for(
    qubit: usize,
    ground: &ShotSet,
    excited: &ShotSet,
) -> Result<Threshold, AnalysisError> {
    let g = ground.points(qubit)?;
    let e = excited.points(qubit)?;
    if g.is_empty() || e.is_empty() {
        return Err(AnalysisError::EmptyShotSet);
    }
    Threshold::from_means(mean(&g), mean(&e))
}

/// Threshold from single-qubit calibration sets.
pub fn fit_threshold(ground: &ShotSet, excited: &ShotSet) -> Result<Threshold, AnalysisError> {
    let qubit = *ground.qubits.first().ok_or(AnalysisError::EmptyShotSet)?;
    if ground.qubits.len() != 1 || excited.qubits != ground.qubits {
        return Err(AnalysisError::Argument(
            "calibration sets must measure the same single qubit".into(),
        ));
    }
    fit_threshold_for(qubit, ground, excited)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_close(t: &Threshold, a: f64, b: f64, c: f64) -> bool {
        let n = a.hypot(b);
        (t.a - a / n).abs() < 1e-9 && (t.b - b / n).abs() < 1e-9 && (t.c - c / n).abs() < 1e-9
    }

    #[test]
    fn horizontal_pair() {
        let t = Threshold::from_means(IqPoint::new(1.0, 0.0), IqPoint::new(-1.0, 0.0)).unwrap();
        assert!(line_close(&t, 1.0, 0.0, 0.0));
        let si = t.slope_intercept().unwrap();
        assert!(si.ground_when_above && si.intercept.abs() < 1e-12 && si.slope.abs() < 1e-12);
    }

    #[test]
    fn vertical_pair_has_no_slope_form() {
        let t = Threshold::from_means(IqPoint::new(0.0, 1.0), IqPoint::new(0.0, -1.0)).unwrap();
        assert!(line_close(&t, 0.0, 1.0, 0.0));
        assert!(t.slope_intercept().is_none());
    }

    #[test]
    fn oblique_pair() {
        let t = Threshold::from_means(IqPoint::new(2.0, 1.0), IqPoint::new(0.0, -1.0)).unwrap();
        assert!(line_close(&t, 1.0, 1.0, -1.0));
        assert_eq!(t.classify(&IqPoint::new(1.0, 0.0)), 0);
    }

    #[test]
    fn ties_and_means() {
        let t = Threshold::from_means(IqPoint::new(-0.3, 0.8), IqPoint::new(0.9, -0.2)).unwrap();
        assert_eq!(t.classify(&t.ground_mean), 0);
        assert_eq!(t.classify(&t.excited_mean), 1);
        let mid = IqPoint::new(0.5 * (-0.3 + 0.9), 0.5 * (0.8 + -0.2));
        assert_eq!(t.value(&mid), 0.0);
        assert_eq!(t.classify(&mid), 0);
        // Ground to the left: |0⟩ is assigned below the I(Q) line.
        assert!(!t.slope_intercept().unwrap().ground_when_above);
    }

    #[test]
    fn coincident_means_fail() {
        let p = IqPoint::new(0.5, 0.5);
        assert!(matches!(
            Threshold::from_means(p, p),
            Err(AnalysisError::DegenerateGeometry(_))
        ));
    }
}
