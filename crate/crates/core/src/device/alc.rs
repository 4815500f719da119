//! Avoided-level-crossing spectroscopy data and the coupling fit.
//!
//! Each point records the bare frequency of the swept qubit (`control_ghz`),
//! the measured dressed frequency, and which branch it belongs to. The fit
//! recovers the fixed qubit's frequency and the exchange coupling `J` from
//! [`dressed_frequencies`](super::dressed_frequencies).

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{dressed_frequencies, DeviceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Upper,
    #[serde(rename = "-")]
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Upper => "+",
            Branch::Lower => "-",
        })
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "upper" | "Upper" => Ok(Branch::Upper),
            "-" | "lower" | "Lower" => Ok(Branch::Lower),
            other => Err(format!("unknown branch {other:?}, expected + or -")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlcPoint {
    pub control_ghz: f64,
    pub frequency_ghz: f64,
    pub branch: Branch,
}

/// Minimum points on each branch.
pub const MIN_POINTS_PER_BRANCH: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlcDataset {
    points: Vec<AlcPoint>,
}

#[derive(Debug, Deserialize)]
struct AlcRow {
    control_ghz: f64,
    frequency_ghz: f64,
    branch: String,
}

impl AlcDataset {
    pub fn new(points: Vec<AlcPoint>) -> Result<Self, DeviceError> {
        if let Some(p) = points
            .iter()
            .find(|p| !p.control_ghz.is_finite() || !p.frequency_ghz.is_finite())
        {
            return Err(DeviceError::Argument(format!("non-finite ALC point {p:?}")));
        }
        for branch in [Branch::Upper, Branch::Lower] {
            let n = points.iter().filter(|p| p.branch == branch).count();
            if n < MIN_POINTS_PER_BRANCH {
                return Err(DeviceError::Argument(format!(
                    "branch {branch} has {n} points, need at least {MIN_POINTS_PER_BRANCH}"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[AlcPoint] {
        &self.points
    }

    /// Parses `control_ghz,frequency_ghz,branch` CSV with a one-line header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, DeviceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, row) in rdr.deserialize::<AlcRow>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| DeviceError::Data {
                line,
                message: e.to_string(),
            })?;
            let branch = row
                .branch
                .parse()
                .map_err(|message| DeviceError::Data { line, message })?;
            points.push(AlcPoint {
                control_ghz: row.control_ghz,
                frequency_ghz: row.frequency_ghz,
                branch,
            });
        }
        Self::new(points)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("control_ghz,frequency_ghz,branch\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                p.control_ghz, p.frequency_ghz, p.branch
            ));
        }
        out
    }

    /// Both branches sampled at every control value, plus optional Gaussian frequency noise.
    pub fn synthetic<R: Rng + ?Sized>(
        fixed_ghz: f64,
        j_ghz: f64,
        controls: &[f64],
        noise_ghz: f64,
        rng: &mut R,
    ) -> Result<Self, DeviceError> {
        let noise = Normal::new(0.0, noise_ghz.max(0.0))
            .map_err(|e| DeviceError::Argument(e.to_string()))?;
        let mut points = Vec::with_capacity(2 * controls.len());
        for &x in controls {
            let (upper, lower) = dressed_frequencies(fixed_ghz, x, j_ghz);
            for (branch, y) in [(Branch::Upper, upper), (Branch::Lower, lower)] {
                points.push(AlcPoint {
                    control_ghz: x,
                    frequency_ghz: y + noise.sample(rng),
                    branch,
                });
            }
        }
        Self::new(points)
    }
}

/// Result of [`fit_avoided_crossing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlcFit {
    pub fixed_ghz: f64,
    /// Non-negative coupling.
    pub j_ghz: f64,
    /// Root-mean-square residual.
    pub rms_ghz: f64,
    pub iterations: usize,
}

/// Initial couplings for the multi-start search, GHz.
pub const J_STARTS_GHZ: [f64; 5] = [0.001, 0.005, 0.010, 0.020, 0.050];
const MAX_ITERATIONS: usize = 500;

fn model_and_gradient(p: &AlcPoint, fixed: f64, j: f64) -> (f64, Vector2<f64>) {
    let s = p.branch.sign();
    let d = fixed - p.control_ghz;
    let root = d.hypot(2.0 * j);
    let value = 0.5 * (fixed + p.control_ghz + s * root);
    let (ratio, dj) = if root > 1e-300 {
        (d / root, 2.0 * j / root)
    } else {
        (0.0, 1.0)
    };
    (value, Vector2::new(0.5 * (1.0 + s * ratio), s * dj))
}

fn cost(points: &[AlcPoint], fixed: f64, j: f64) -> f64 {
    points
        .iter()
        .map(|p| (model_and_gradient(p, fixed, j).0 - p.frequency_ghz).powi(2))
        .sum()
}

struct Outcome {
    fixed: f64,
    j: f64,
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(points: &[AlcPoint], fixed0: f64, j0: f64) -> Outcome {
    let mut p = Vector2::new(fixed0, j0);
    let mut c = cost(points, p[0], p[1]);
    let mut lambda = 1e-3;
    for it in 1..=MAX_ITERATIONS {
        let mut jtj = Matrix2::zeros();
        let mut jtr = Vector2::zeros();
        for pt in points {
            let (value, grad) = model_and_gradient(pt, p[0], p[1]);
            let r = value - pt.frequency_ghz;
            jtj += grad * grad.transpose();
            jtr += grad * r;
        }
        if jtr.amax() < 1e-18 {
            return Outcome {
                fixed: p[0],
                j: p[1],
                cost: c,
                iterations: it,
                converged: true,
            };
        }
        loop {
            let mut damped = jtj;
            for k in 0..2 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                if lambda > 1e16 {
                    return Outcome {
                        fixed: p[0],
                        j: p[1],
                        cost: c,
                        iterations: it,
                        converged: true,
                    };
                }
                continue;
            };
            let trial = p + step;
            let tc = cost(points, trial[0], trial[1]);
            if tc.is_finite() && tc <= c {
                let small_step = step.norm() <= 1e-13 * (p.norm() + 1e-13);
                let small_gain = c - tc <= 1e-16 * c.max(1e-300);
                p = trial;
                c = tc;
                lambda = (lambda * 0.3).max(1e-12);
                if small_step || (small_gain && c < 1e-24) {
                    return Outcome {
                        fixed: p[0],
                        j: p[1],
                        cost: c,
                        iterations: it,
                        converged: true,
                    };
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // No descent direction left at machine precision.
                return Outcome {
                    fixed: p[0],
                    j: p[1],
                    cost: c,
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    Outcome {
        fixed: p[0],
        j: p[1],
        cost: c,
        iterations: MAX_ITERATIONS,
        converged: false,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares fit of the dressed-frequency formula over `(ν_fixed, J)`.
///
/// Levenberg–Marquardt from every combination of the [`J_STARTS_GHZ`] grid and
/// two fixed-frequency guesses (median frequency and the branch sum rule);
/// the lowest-cost converged run wins.
pub fn fit_avoided_crossing(data: &AlcDataset) -> Result<AlcFit, DeviceError> {
    let points = data.points();
    let xs: Vec<f64> = points.iter().map(|p| p.control_ghz).collect();
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if points.len() < 4 || xmax.is_nan() || xmax <= xmin {
        return Err(DeviceError::Fit {
            message: "degenerate ALC data: need at least 4 points at distinct control values"
                .into(),
            diagnostics: format!("{} points, control range [{xmin}, {xmax}]", points.len()),
        });
    }

    let mean_of = |branch: Branch, f: fn(&AlcPoint) -> f64| {
        let v: Vec<f64> = points
            .iter()
            .filter(|p| p.branch == branch)
            .map(f)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let sum_rule = mean_of(Branch::Upper, |p| p.frequency_ghz)
        + mean_of(Branch::Lower, |p| p.frequency_ghz)
        - 0.5
            * (mean_of(Branch::Upper, |p| p.control_ghz)
                + mean_of(Branch::Lower, |p| p.control_ghz));
    let fixed_starts = [
        median(points.iter().map(|p| p.frequency_ghz).collect()),
        sum_rule,
    ];

    let mut best: Option<Outcome> = None;
    let mut worst_iterations = 0;
    for &fixed0 in &fixed_starts {
        for &j0 in &J_STARTS_GHZ {
            let out = levenberg_marquardt(points, fixed0, j0);
            worst_iterations = worst_iterations.max(out.iterations);
            if !out.converged || !out.cost.is_finite() {
                continue;
            }
            if best.as_ref().is_none_or(|b| out.cost < b.cost) {
                best = Some(out);
            }
        }
    }
    let best = best.ok_or_else(|| DeviceError::Fit {
        message: format!("no start converged within {MAX_ITERATIONS} iterations"),
        diagnostics: format!(
            "starts: fixed {fixed_starts:?} GHz × J {J_STARTS_GHZ:?} GHz; max iterations used {worst_iterations}"
        ),
    })?;
    Ok(AlcFit {
        fixed_ghz: best.fixed,
        j_ghz: best.j.abs(),
        rms_ghz: (best.cost / points.len() as f64).sqrt(),
        iterations: best.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sweep(center: f64, half_width: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| center - half_width + 2.0 * half_width * k as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn recovers_noiseless_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data =
            AlcDataset::synthetic(4.5546, 0.012, &sweep(4.56, 0.15, 31), 0.0, &mut rng).unwrap();
        let fit = fit_avoided_crossing(&data).unwrap();
        assert!((fit.j_ghz - 0.012).abs() < 1e-6, "{fit:?}");
        assert!((fit.fixed_ghz - 4.5546).abs() < 1e-6, "{fit:?}");
        assert!(fit.rms_ghz < 1e-9);
    }

    #[test]
    fn zero_coupling_is_recovered_as_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = AlcDataset::synthetic(5.0, 0.0, &sweep(5.0, 0.1, 20), 0.0, &mut rng).unwrap();
        let fit = fit_avoided_crossing(&data).unwrap();
        assert!(fit.j_ghz < 1e-4, "{fit:?}");
    }

    #[test]
    fn degenerate_controls_fail() {
        let pts = (0..6)
            .map(|k| AlcPoint {
                control_ghz: 5.0,
                frequency_ghz: 5.0 + k as f64 * 1e-3,
                branch: if k % 2 == 0 {
                    Branch::Upper
                } else {
                    Branch::Lower
                },
            })
            .collect();
        let data = AlcDataset::new(pts).unwrap();
        assert!(matches!(
            fit_avoided_crossing(&data),
            Err(DeviceError::Fit { .. })
        ));
    }

    #[test]
    fn dataset_requires_both_branches() {
        let pts = (0..5)
            .map(|k| AlcPoint {
                control_ghz: k as f64,
                frequency_ghz: 5.0,
                branch: Branch::Upper,
            })
            .collect();
        assert!(AlcDataset::new(pts).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = AlcDataset::synthetic(5.0, 0.01, &sweep(5.0, 0.1, 5), 1e-4, &mut rng).unwrap();
        let back = AlcDataset::from_csv(data.to_csv().as_bytes()).unwrap();
        assert_eq!(back, data);
        let err = AlcDataset::from_csv("control_ghz,frequency_ghz,branch\n1.0,2.0,x\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, DeviceError::Data { line: 2, .. }), "{err}");
        assert!(
            AlcDataset::from_csv("control_ghz,frequency_ghz,branch\n1.0,abc,+\n".as_bytes())
                .is_err()
        );
    }
}
