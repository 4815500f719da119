use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::report::*;
use super::{ExperimentError, Scenario};
use crate::analysis::{
    conditional_paradigm, fit_threshold, multiplied_paradigm, multiplied_paradigm_from_shots,
    paradigm_report, relative_delta, single_qubit_matrix, Threshold,
};
use crate::basis::{self, CONTROL, TARGET};
use crate::circuit::{Circuit, QuantumState};
use crate::device::{
    chevron_map, chevron_period_ns, conditional_phase, first_full_transfer_ns,
    fit_avoided_crossing, two_excitation_splitting, AlcDataset, ChevronPoint, FringeData,
};
use crate::probability::ProbabilityMatrix;
use crate::readout::{calibration_run, experiment_run, ShotSet};
use crate::rng::substream;

// Second element of every substream path; keeps the purposes independent.
const STREAM_CALIBRATION: u64 = 0;
const STREAM_EXPERIMENT: u64 = 1;
const STREAM_ALC: u64 = 2;
const STREAM_FRINGE: u64 = 3;

/// Bulky per-run data that goes to CSV rather than into the report.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    /// Per repetition: calibration sets, then the four experiment sets.
    /// Filled only when shot dumps are requested.
    pub shots: Vec<Vec<ShotSet>>,
    pub chevron: Vec<ChevronPoint>,
    pub alc_data: Option<AlcDataset>,
    pub fringes: Option<(FringeData, FringeData)>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Artifacts,
    /// Model hash carried into shot dumps.
    pub model_hash: String,
}

/// `(max − min)/2`; zero for fewer than two values.
pub fn semi_dispersion(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    0.5 * (hi - lo)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn aggregate_matrices<'a>(
    mats: impl Iterator<Item = &'a ProbabilityMatrix> + Clone,
) -> MatrixAggregate {
    let first = mats.clone().next().expect("at least one repetition");
    let dim = first.dim();
    let cell = |r: usize, c: usize| -> Vec<f64> { mats.clone().map(|m| m.get(r, c)).collect() };
    MatrixAggregate {
        labels: first.labels().to_vec(),
        mean: (0..dim)
            .map(|r| (0..dim).map(|c| mean(&cell(r, c))).collect())
            .collect(),
        semi_dispersion: (0..dim)
            .map(|r| (0..dim).map(|c| semi_dispersion(&cell(r, c))).collect())
            .collect(),
    }
}

struct Calibration {
    sets: [[ShotSet; 2]; 2],
    thresholds: [Threshold; 2],
    matrices: [ProbabilityMatrix; 2],
}

fn calibrate(cfg: &ScenarioConfig, rep: usize) -> Result<Calibration, ExperimentError> {
    let shots = |qubit: usize, prepared: u8| {
        let mut rng = substream(
            cfg.seed,
            &[
                rep as u64,
                STREAM_CALIBRATION,
                qubit as u64,
                prepared as u64,
            ],
        );
        calibration_run(
            qubit,
            prepared,
            cfg.n_shots,
            &cfg.readout,
            cfg.seed,
            &mut rng,
        )
    };
    let sets = [
        [shots(TARGET, 0)?, shots(TARGET, 1)?],
        [shots(CONTROL, 0)?, shots(CONTROL, 1)?],
    ];
    let thresholds = [
        fit_threshold(&sets[TARGET][0], &sets[TARGET][1])?,
        fit_threshold(&sets[CONTROL][0], &sets[CONTROL][1])?,
    ];
    let matrices = [
        single_qubit_matrix(&sets[TARGET][0], &sets[TARGET][1], &thresholds[TARGET])?,
        single_qubit_matrix(&sets[CONTROL][0], &sets[CONTROL][1], &thresholds[CONTROL])?,
    ];
    Ok(Calibration {
        sets,
        thresholds,
        matrices,
    })
}

fn readout_rep(
    cfg: &ScenarioConfig,
    circuit: &Circuit,
    rep: usize,
) -> Result<(ReadoutRep, Vec<ShotSet>), ExperimentError> {
    let cal = calibrate(cfg, rep)?;
    let mut ideal_rows = Vec::with_capacity(4);
    let mut experiments = Vec::with_capacity(4);
    for k in 0..4 {
        let state = circuit.run(&QuantumState::basis_state(2, k)?)?;
        ideal_rows.push(state.probabilities().into_inner());
        let mut rng = substream(cfg.seed, &[rep as u64, STREAM_EXPERIMENT, k as u64]);
        experiments.push(experiment_run(
            &state,
            &basis::label(k, 2),
            cfg.n_shots,
            &cfg.readout,
            cfg.seed,
            &mut rng,
        )?);
    }
    let ideal =
        ProbabilityMatrix::new(ideal_rows).map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    let multiplied = multiplied_paradigm_from_shots(&experiments, &cal.thresholds)?;
    let conditional = conditional_paradigm(&experiments, &cal.thresholds)?;
    let fidelity = paradigm_report(&ideal, &multiplied, &conditional)?;
    let shots = if cfg.dump_shots {
        cal.sets
            .iter()
            .flatten()
            .cloned()
            .chain(experiments)
            .collect()
    } else {
        Vec::new()
    };
    Ok((
        ReadoutRep {
            index: rep,
            thresholds: cal.thresholds.map(ThresholdSummary::from),
            calibration: cal.matrices,
            ideal,
            multiplied,
            conditional,
            fidelity,
        },
        shots,
    ))
}

fn fidelity_aggregate(reps: &[ReadoutRep]) -> FidelityAggregate {
    let rows = reps[0].fidelity.labels.len();
    let column = |pick: fn(&ReadoutRep) -> &Vec<f64>, r: usize| -> Vec<f64> {
        reps.iter().map(|rep| pick(rep)[r]).collect()
    };
    let mult: Vec<Vec<f64>> = (0..rows)
        .map(|r| column(|x| &x.fidelity.multiplied, r))
        .collect();
    let cond: Vec<Vec<f64>> = (0..rows)
        .map(|r| column(|x| &x.fidelity.conditional, r))
        .collect();
    let multiplied: Vec<f64> = mult.iter().map(|v| mean(v)).collect();
    let conditional: Vec<f64> = cond.iter().map(|v| mean(v)).collect();
    FidelityAggregate {
        labels: reps[0].fidelity.labels.clone(),
        multiplied_err: mult.iter().map(|v| semi_dispersion(v)).collect(),
        conditional_err: cond.iter().map(|v| semi_dispersion(v)).collect(),
        absolute_gain: conditional
            .iter()
            .zip(&multiplied)
            .map(|(c, m)| c - m)
            .collect(),
        relative_gain: conditional
            .iter()
            .zip(&multiplied)
            .map(|(c, m)| Some(relative_delta(*c, *m)).filter(|v| v.is_finite()))
            .collect(),
        multiplied,
        conditional,
    }
}

fn run_readout(
    cfg: &ScenarioConfig,
    artifacts: &mut Artifacts,
) -> Result<ScenarioResult, ExperimentError> {
    let circuit = cfg.circuit.clone().unwrap_or_default();
    let results: Vec<(ReadoutRep, Vec<ShotSet>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| readout_rep(cfg, &circuit, rep))
        .collect::<Result<_, _>>()?;
    let (reps, shots): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    if cfg.dump_shots {
        artifacts.shots = shots;
    }
    let aggregate = ReadoutAggregate {
        ideal: aggregate_matrices(reps.iter().map(|r| &r.ideal)),
        multiplied: aggregate_matrices(reps.iter().map(|r| &r.multiplied)),
        conditional: aggregate_matrices(reps.iter().map(|r| &r.conditional)),
        fidelity: fidelity_aggregate(&reps),
    };
    Ok(ScenarioResult::Readout(ReadoutResult {
        circuit: circuit.to_text(),
        repetitions: reps,
        aggregate,
    }))
}

fn run_calibration(
    cfg: &ScenarioConfig,
    artifacts: &mut Artifacts,
) -> Result<ScenarioResult, ExperimentError> {
    let results: Vec<(CalibrationRep, Vec<ShotSet>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let cal = calibrate(cfg, rep)?;
            let multiplied = multiplied_paradigm(&cal.matrices[CONTROL], &cal.matrices[TARGET])?;
            let shots = if cfg.dump_shots {
                cal.sets.iter().flatten().cloned().collect()
            } else {
                Vec::new()
            };
            let [q0, q2] = cal.matrices;
            Ok((
                CalibrationRep {
                    index: rep,
                    thresholds: cal.thresholds.map(ThresholdSummary::from),
                    q0,
                    q2,
                    multiplied,
                },
                shots,
            ))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let (reps, shots): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    if cfg.dump_shots {
        artifacts.shots = shots;
    }
    let aggregate = CalibrationAggregate {
        q0: aggregate_matrices(reps.iter().map(|r| &r.q0)),
        q2: aggregate_matrices(reps.iter().map(|r| &r.q2)),
        multiplied: aggregate_matrices(reps.iter().map(|r| &r.multiplied)),
    };
    Ok(ScenarioResult::Calibration {
        repetitions: reps,
        aggregate,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn run_chevron(
    cfg: &ScenarioConfig,
    artifacts: &mut Artifacts,
) -> Result<ScenarioResult, ExperimentError> {
    let s = &cfg.chevron;
    let grid_ok = s.detuning_span_ghz >= 0.0 && s.max_duration_ns > 0.0;
    if !grid_ok {
        return Err(ExperimentError::config(
            None,
            "chevron grid needs a non-negative detuning span and a positive duration",
        ));
    }
    let j = cfg.device.j_ghz;
    let detunings = linspace(-s.detuning_span_ghz, s.detuning_span_ghz, s.detuning_points);
    let durations = linspace(0.0, s.max_duration_ns, s.duration_points);
    artifacts.chevron = chevron_map(j, &detunings, &durations);
    let (q0, q2) = (cfg.device.qubits[TARGET], cfg.device.qubits[CONTROL]);
    Ok(ScenarioResult::Chevron(ChevronResult {
        j_ghz: j,
        first_full_transfer_ns: first_full_transfer_ns(j),
        period_at_resonance_ns: chevron_period_ns(j, 0.0),
        two_excitation_splitting_ghz: two_excitation_splitting(
            q0.freq_ghz,
            q0.ec_ghz,
            q2.ec_ghz,
            j,
        ),
        detunings: detunings.len(),
        durations: durations.len(),
    }))
}

fn run_alc(
    cfg: &ScenarioConfig,
    artifacts: &mut Artifacts,
) -> Result<ScenarioResult, ExperimentError> {
    let s = &cfg.alc;
    let planted = s.planted_j_ghz.unwrap_or(cfg.device.j_ghz);
    let fixed = s.fixed_ghz.unwrap_or(cfg.device.qubits[TARGET].freq_ghz);
    let controls = linspace(fixed - s.span_ghz, fixed + s.span_ghz, s.points);
    let datasets: Vec<AlcDataset> = (0..cfg.repetitions)
        .map(|rep| match &cfg.alc_data {
            Some(d) => Ok(d.clone()),
            None => {
                let mut rng = substream(cfg.seed, &[rep as u64, STREAM_ALC]);
                AlcDataset::synthetic(fixed, planted, &controls, s.noise_ghz, &mut rng)
            }
        })
        .collect::<Result<_, _>>()?;
    let fits = datasets
        .par_iter()
        .map(fit_avoided_crossing)
        .collect::<Result<Vec<_>, _>>()?;
    artifacts.alc_data = datasets.into_iter().next();
    let j_mhz: Vec<f64> = fits.iter().map(|f| f.j_ghz * 1e3).collect();
    Ok(ScenarioResult::Alc(AlcResult {
        source: match &s.data {
            Some(p) if cfg.alc_data.is_some() => p.display().to_string(),
            _ => "synthetic".into(),
        },
        planted_j_ghz: cfg.alc_data.is_none().then_some(planted),
        j_mhz_mean: mean(&j_mhz),
        j_mhz_semi_dispersion: semi_dispersion(&j_mhz),
        fits,
    }))
}

/// Off-fringe phase of the synthetic data; arbitrary, only the difference matters.
const OFF_PHASE_RAD: f64 = 0.3;
const FRINGE_OFFSET_V: f64 = 0.5;
const CONTROL_LEVEL_V: f64 = 0.05;

fn wrap_deg(x: f64) -> f64 {
    let r = x.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

fn run_cond_osc(
    cfg: &ScenarioConfig,
    artifacts: &mut Artifacts,
) -> Result<ScenarioResult, ExperimentError> {
    let s = &cfg.condosc;
    let pairs: Vec<(FringeData, FringeData)> = (0..cfg.repetitions)
        .map(|rep| match &cfg.fringes {
            Some(f) => Ok(f.clone()),
            None => {
                let mut rng = substream(cfg.seed, &[rep as u64, STREAM_FRINGE]);
                let off = FringeData::synthetic(
                    s.points,
                    s.amplitude_v,
                    OFF_PHASE_RAD,
                    FRINGE_OFFSET_V,
                    CONTROL_LEVEL_V,
                    s.noise_v,
                    &mut rng,
                )?;
                let on = FringeData::synthetic(
                    s.points,
                    s.amplitude_v,
                    OFF_PHASE_RAD + s.planted_deg.to_radians(),
                    FRINGE_OFFSET_V,
                    CONTROL_LEVEL_V + s.planted_leakage,
                    s.noise_v,
                    &mut rng,
                )?;
                Ok((on, off))
            }
        })
        .collect::<Result<_, crate::device::DeviceError>>()?;
    let fits = pairs
        .iter()
        .map(|(on, off)| conditional_phase(on, off))
        .collect::<Result<Vec<_>, _>>()?;
    artifacts.fringes = pairs.into_iter().next();

    let (sin, cos) = fits.iter().fold((0.0, 0.0), |(s, c), f| {
        let t = f.theta_deg.to_radians();
        (s + t.sin(), c + t.cos())
    });
    let center = wrap_deg(sin.atan2(cos).to_degrees());
    let deviations: Vec<f64> = fits
        .iter()
        .map(|f| (f.theta_deg - center + 180.0).rem_euclid(360.0) - 180.0)
        .collect();
    let leakage: Vec<f64> = fits.iter().map(|f| f.leakage).collect();
    Ok(ScenarioResult::CondOsc(CondOscResult {
        source: match (&s.on, &cfg.fringes) {
            (Some(p), Some(_)) => p.display().to_string(),
            _ => "synthetic".into(),
        },
        planted_deg: cfg.fringes.is_none().then_some(s.planted_deg),
        theta_deg_mean: center,
        theta_deg_semi_dispersion: semi_dispersion(&deviations),
        leakage_mean: mean(&leakage),
        fits,
    }))
}

/// Runs every repetition of `cfg.scenario` and assembles the report.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, ExperimentError> {
    let mut artifacts = Artifacts::default();
    let result = match cfg.scenario {
        s if s.is_readout() => run_readout(cfg, &mut artifacts)?,
        Scenario::Calibrate => run_calibration(cfg, &mut artifacts)?,
        Scenario::Chevron => run_chevron(cfg, &mut artifacts)?,
        Scenario::AlcFit => run_alc(cfg, &mut artifacts)?,
        Scenario::CondOsc => run_cond_osc(cfg, &mut artifacts)?,
        _ => unreachable!("readout scenarios handled above"),
    };
    let model_hash = cfg.readout.hash();
    let report = RunReport {
        scenario: cfg.scenario,
        provenance: Provenance {
            seed: cfg.seed,
            config_hash: cfg.hash(),
            model_hash: model_hash.clone(),
            noise: cfg.noise,
            n_shots: cfg.n_shots,
            repetitions: cfg.repetitions,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        result,
    };
    Ok(RunOutput {
        report,
        artifacts,
        model_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::NoiseMode;

    fn config(scenario: Scenario, reps: usize, shots: usize) -> ScenarioConfig {
        let mut c = ScenarioConfig::defaults(scenario, 7).unwrap();
        c.repetitions = reps;
        c.n_shots = shots;
        c
    }

    #[test]
    fn semi_dispersion_basics() {
        assert_eq!(semi_dispersion(&[0.3]), 0.0);
        assert_eq!(semi_dispersion(&[0.1, 0.5, 0.3]), 0.2);
    }

    #[test]
    fn noiseless_bell_separates_paradigms() {
        let mut c = config(Scenario::Bell, 2, 760);
        c.noise = NoiseMode::Off;
        c.readout = crate::readout::ReadoutModel::noiseless();
        let out = run_scenario(&c).unwrap();
        let f = out.report.fidelity().unwrap();
        for r in 0..4 {
            assert!((f.multiplied[r] - 0.5).abs() < 0.03, "{f:?}");
            assert!(f.conditional[r] >= 0.97, "{f:?}");
        }
    }

    #[test]
    fn init_is_diagonal_dominant_and_q2_excited_is_weakest() {
        let out = run_scenario(&config(Scenario::Init, 3, 760)).unwrap();
        let ScenarioResult::Readout(r) = &out.report.result else {
            panic!("readout result expected")
        };
        let m = &r.aggregate.conditional.mean;
        for (k, row) in m.iter().enumerate() {
            assert!(row.iter().enumerate().all(|(c, v)| c == k || *v < row[k]));
            assert!(row[k] > 0.6);
        }
        let q2_excited = m[2][2].min(m[3][3]);
        assert!(q2_excited < m[0][0].min(m[1][1]));
    }

    #[test]
    fn single_repetition_has_zero_error_bars() {
        let out = run_scenario(&config(Scenario::Cnot, 1, 100)).unwrap();
        let f = out.report.fidelity().unwrap();
        assert!(f
            .multiplied_err
            .iter()
            .chain(&f.conditional_err)
            .all(|e| *e == 0.0));
    }

    #[test]
    fn calibration_matrices_follow_decay() {
        let out = run_scenario(&config(Scenario::Calibrate, 1, 760)).unwrap();
        let ScenarioResult::Calibration { repetitions, .. } = &out.report.result else {
            panic!("calibration result expected")
        };
        let rep = &repetitions[0];
        // Q2 decays more than Q0.
        assert!(rep.q2.get(1, 0) > rep.q0.get(1, 0));
        assert_eq!(rep.multiplied.dim(), 4);
    }

    #[test]
    fn chevron_and_fits() {
        let out = run_scenario(&config(Scenario::Chevron, 1, 1)).unwrap();
        let ScenarioResult::Chevron(c) = &out.report.result else {
            panic!()
        };
        assert!((c.first_full_transfer_ns - 14.731391274719739).abs() < 1e-9);
        assert_eq!(out.artifacts.chevron.len(), c.detunings * c.durations);

        let out = run_scenario(&config(Scenario::AlcFit, 4, 1)).unwrap();
        let ScenarioResult::Alc(a) = &out.report.result else {
            panic!()
        };
        assert!((a.j_mhz_mean - 12.0).abs() < 2.0, "{a:?}");

        let out = run_scenario(&config(Scenario::CondOsc, 4, 1)).unwrap();
        let ScenarioResult::CondOsc(o) = &out.report.result else {
            panic!()
        };
        assert!((o.theta_deg_mean - 191.0).abs() < 1.0, "{o:?}");
    }

    #[test]
    fn circular_mean_straddles_zero() {
        let mut c = config(Scenario::CondOsc, 6, 1);
        c.condosc.planted_deg = 0.0;
        c.condosc.noise_v = 0.01;
        let out = run_scenario(&c).unwrap();
        let ScenarioResult::CondOsc(o) = &out.report.result else {
            panic!()
        };
        let d = (o.theta_deg_mean + 180.0).rem_euclid(360.0) - 180.0;
        assert!(d.abs() < 2.0 && o.theta_deg_semi_dispersion < 5.0, "{o:?}");
        assert!(o.fits.iter().all(|f| (0.0..360.0).contains(&f.theta_deg)));
    }
}
