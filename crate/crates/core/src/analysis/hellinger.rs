use super::AnalysisError;

/// Inputs whose sums stray further than this from 1 are rejected.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn check(p: &[f64], q: &[f64]) -> Result<(), AnalysisError> {
    if p.len() != q.len() || p.is_empty() {
        return Err(AnalysisError::Argument(format!(
            "distributions have dimensions {} and {}",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("p", p), ("q", q)] {
        if d.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(AnalysisError::Argument(format!(
                "{name} has a negative or non-finite entry"
            )));
        }
        let sum: f64 = d.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(AnalysisError::Argument(format!(
                "{name} sums to {sum}, expected 1"
            )));
        }
    }
    Ok(())
}

/// Hellinger fidelity `[Σ √(p_i q_i)]²`.
pub fn hellinger_fidelity(p: &[f64], q: &[f64]) -> Result<f64, AnalysisError> {
    check(p, q)?;
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

/// Hellinger distance `(1/√2)·√(Σ (√p_i − √q_i)²)`.
pub fn hellinger_distance(p: &[f64], q: &[f64]) -> Result<f64, AnalysisError> {
    check(p, q)?;
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    Ok(std::f64::consts::FRAC_1_SQRT_2 * s.sqrt())
}

/// Hellinger fidelity through the distance, `(1 − D_H²)²`.
pub fn hellinger_fidelity_from_distance(p: &[f64], q: &[f64]) -> Result<f64, AnalysisError> {
    let d = hellinger_distance(p, q)?;
    Ok((1.0 - d * d).powi(2).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_disjoint() {
        let p = [0.2, 0.3, 0.5];
        assert!((hellinger_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(hellinger_fidelity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(hellinger_fidelity_from_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap() < 1e-15);
    }

    #[test]
    fn bell_against_uniform_is_one_half() {
        let p = [0.5, 0.0, 0.0, 0.5];
        let q = [0.25; 4];
        assert!((hellinger_fidelity(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        assert!((hellinger_fidelity_from_distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(hellinger_fidelity(&[0.5, 0.5], &[1.0, 0.0, 0.0]).is_err());
        assert!(hellinger_fidelity(&[0.5, 0.6], &[1.0, 0.0]).is_err());
        assert!(hellinger_fidelity(&[1.5, -0.5], &[1.0, 0.0]).is_err());
        assert!(hellinger_fidelity(&[], &[]).is_err());
        // Within the normalization tolerance is accepted.
        assert!(hellinger_fidelity(&[0.5, 0.5 + 5e-7], &[1.0, 0.0]).is_ok());
    }
}
