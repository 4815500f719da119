use proptest::prelude::*;
use qreadout_core::analysis::{
    conditional_counts, conditional_paradigm, fit_threshold, multiplied_paradigm_from_shots,
    single_qubit_matrix,
};
use qreadout_core::basis::{CONTROL, TARGET};
use qreadout_core::circuit::{bell_circuit, Circuit, QuantumState, SINGLE_QUBIT_DEFAULT};
use qreadout_core::device::DeviceParams;
use qreadout_core::readout::{calibration_run, experiment_run, ReadoutModel, ShotSet};
use qreadout_core::rng::substream;

fn thresholds(
    model: &ReadoutModel,
    n: usize,
    seed: u64,
) -> [qreadout_core::analysis::Threshold; 2] {
    [TARGET, CONTROL].map(|q| {
        let g =
            calibration_run(q, 0, n, model, seed, &mut substream(seed, &[q as u64, 0])).unwrap();
        let e =
            calibration_run(q, 1, n, model, seed, &mut substream(seed, &[q as u64, 1])).unwrap();
        fit_threshold(&g, &e).unwrap()
    })
}

fn experiments(circuit: &Circuit, model: &ReadoutModel, n: usize, seed: u64) -> Vec<ShotSet> {
    (0..4)
        .map(|k| {
            let s = circuit
                .run(&QuantumState::basis_state(2, k).unwrap())
                .unwrap();
            let label = qreadout_core::basis::label(k, 2);
            experiment_run(
                &s,
                &label,
                n,
                model,
                seed,
                &mut substream(seed, &[9, k as u64]),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn decay_with_narrow_blobs_gives_the_closed_form_matrix() {
    let mut model = ReadoutModel::noiseless();
    model.qubits[CONTROL].decay_probability = 0.2;
    let n = 20_000;
    let g = calibration_run(CONTROL, 0, n, &model, 1, &mut substream(1, &[0])).unwrap();
    let e = calibration_run(CONTROL, 1, n, &model, 1, &mut substream(1, &[1])).unwrap();
    let m = single_qubit_matrix(&g, &e, &fit_threshold(&g, &e).unwrap()).unwrap();
    assert_eq!(m.row(0), &[1.0, 0.0]);
    let sigma = (0.2 * 0.8 / n as f64).sqrt();
    assert!((m.get(1, 0) - 0.2).abs() < 4.0 * sigma, "{:?}", m.rows());
}

#[test]
fn default_q2_misassignment_matches_decay() {
    let model = ReadoutModel::from_device(&DeviceParams::default());
    let d = model.qubits[CONTROL].decay_probability;
    assert!((d - 0.024690087971667385).abs() < 1e-15);
    let n = 760;
    let g = calibration_run(CONTROL, 0, n, &model, 2, &mut substream(2, &[0])).unwrap();
    let e = calibration_run(CONTROL, 1, n, &model, 2, &mut substream(2, &[1])).unwrap();
    let m = single_qubit_matrix(&g, &e, &fit_threshold(&g, &e).unwrap()).unwrap();
    // Decay plus the Gaussian overlap of the blobs.
    let overlap = 0.5 * erfc_approx(1.0 / (0.5 * std::f64::consts::SQRT_2));
    let p = d * (1.0 - overlap) + (1.0 - d) * overlap;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!(
        (m.get(1, 0) - p).abs() < 3.0 * sigma,
        "p10 = {}, expected {p}",
        m.get(1, 0)
    );
}

/// Complementary error function (Abramowitz–Stegun 7.1.26, |ε| < 1.5e-7).
fn erfc_approx(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736
                + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    poly * (-x * x).exp()
}

#[test]
fn noiseless_bell_shots_never_disagree() {
    let model = ReadoutModel::noiseless();
    let th = thresholds(&model, 50, 3);
    let sets = experiments(&Circuit::bell(), &model, 2000, 3);
    let c = conditional_counts(&sets, &th).unwrap();
    for prepared in [0, 2] {
        assert_eq!(c.get(0b01, prepared) + c.get(0b10, prepared), 0);
    }
    for prepared in [1, 3] {
        assert_eq!(c.get(0b00, prepared) + c.get(0b11, prepared), 0);
    }
    assert!(bell_circuit("00").is_ok());
}

#[test]
fn product_states_agree_across_paradigms() {
    let model = ReadoutModel::from_device(&DeviceParams::default());
    let n = 760;
    let circuit = Circuit::parse(SINGLE_QUBIT_DEFAULT).unwrap();
    for seed in 0..5 {
        let th = thresholds(&model, n, 100 + seed);
        let sets = experiments(&circuit, &model, n, 100 + seed);
        let cond = conditional_paradigm(&sets, &th).unwrap();
        let mult = multiplied_paradigm_from_shots(&sets, &th).unwrap();
        for r in 0..4 {
            for k in 0..4 {
                let p = cond.get(r, k);
                let s = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
                assert!(
                    (p - mult.get(r, k)).abs() <= 3.0 * s,
                    "seed {seed} row {r} col {k}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn same_seed_same_shots(seed in any::<u64>()) {
        let model = ReadoutModel::from_device(&DeviceParams::default());
        let s = bell_circuit("01").unwrap();
        let a = experiment_run(&s, "01", 50, &model, seed, &mut substream(seed, &[1])).unwrap();
        let b = experiment_run(&s, "01", 50, &model, seed, &mut substream(seed, &[1])).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn noiseless_classification_is_exact(seed in any::<u64>(), a0 in 0.0f64..6.3, a1 in 0.0f64..6.3) {
        let mut model = ReadoutModel::noiseless();
        model.qubits[TARGET] = qreadout_core::readout::QubitReadout::rotated(a0, 0.0, 0.0);
        model.qubits[CONTROL] = qreadout_core::readout::QubitReadout::rotated(a1, 0.0, 0.0);
        let th = thresholds(&model, 5, seed);
        let sets = experiments(&Circuit::new(Vec::new()), &model, 20, seed);
        let m = conditional_paradigm(&sets, &th).unwrap();
        prop_assert_eq!(m, qreadout_core::probability::ProbabilityMatrix::identity(4));
    }

    #[test]
    fn misassignment_grows_with_decay(seed in any::<u64>(), d1 in 0.0f64..0.5, extra in 0.0f64..0.5) {
        // Same stream for both rates: a shot that decays at d1 also decays at d1 + extra.
        let rate = |d: f64| {
            let mut model = ReadoutModel::noiseless();
            model.qubits[TARGET].decay_probability = d;
            let e = calibration_run(TARGET, 1, 200, &model, seed, &mut substream(seed, &[4])).unwrap();
            let g = calibration_run(TARGET, 0, 5, &model, seed, &mut substream(seed, &[5])).unwrap();
            let t = qreadout_core::analysis::Threshold::from_means(
                model.qubits[TARGET].center0, model.qubits[TARGET].center1).unwrap();
            single_qubit_matrix(&g, &e, &t).unwrap().get(1, 0)
        };
        prop_assert!(rate(d1 + extra) >= rate(d1));
    }

    #[test]
    fn every_shot_lands_in_one_quadrant(seed in any::<u64>(), flip in 0.0f64..0.3) {
        let mut model = ReadoutModel::from_device(&DeviceParams::default());
        model.correlated_flip_probability = flip;
        let th = thresholds(&model, 30, seed);
        let sets = experiments(&Circuit::bell(), &model, 40, seed);
        let c = conditional_counts(&sets, &th).unwrap();
        for p in 0..4 {
            prop_assert_eq!(c.column_sum(p), 40);
        }
    }
}
