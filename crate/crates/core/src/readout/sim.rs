use rand::Rng;
use rand_distr::StandardNormal;

use super::model::{IqPoint, ReadoutModel};
use super::shots::{ShotRecord, ShotSet};
use super::ReadoutError;
use crate::basis;
use crate::circuit::QuantumState;

/// Shots per prepared state used throughout the calibration and circuit runs.
pub const DEFAULT_SHOTS: usize = 760;

/// Draws one simultaneous measurement of `qubits` whose true outcomes are `outcomes`.
///
/// Random draws per shot, in order: one uniform for the correlated flip (only
/// when two or more qubits are read), then per qubit one uniform for
/// decay/excitation and two standard normals for the blob noise. The draw
/// count does not depend on the outcomes.
pub fn sample_shot<R: Rng + ?Sized>(
    index: usize,
    qubits: &[usize],
    outcomes: &[u8],
    model: &ReadoutModel,
    rng: &mut R,
) -> ShotRecord {
    debug_assert_eq!(qubits.len(), outcomes.len());
    let flip = if qubits.len() >= 2 {
        rng.random::<f64>() < model.correlated_flip_probability
    } else {
        false
    };
    let iq = qubits
        .iter()
        .zip(outcomes)
        .map(|(&q, &bit)| {
            let params = &model.qubits[q];
            let bit = if flip { bit ^ 1 } else { bit };
            let u: f64 = rng.random();
            let emitted = match bit {
                1 if u < params.decay_probability => 0,
                0 if u < params.excitation_probability => 1,
                b => b,
            };
            let center = if emitted == 1 {
                params.center1
            } else {
                params.center0
            };
            let ni: f64 = rng.sample(StandardNormal);
            let nq: f64 = rng.sample(StandardNormal);
            IqPoint::new(center.i + params.sigma * ni, center.q + params.sigma * nq)
        })
        .collect();
    ShotRecord { index, iq }
}

/// Samples one basis state with probability `|amplitude|²` and returns its bits
/// per register qubit (`bits[k]` is register qubit `k`).
pub fn joint_outcome<R: Rng + ?Sized>(state: &QuantumState, rng: &mut R) -> Vec<u8> {
    let u: f64 = rng.random::<f64>() * state.norm_sqr();
    let amps = state.amplitudes();
    let mut acc = 0.0;
    let mut chosen = amps.len() - 1;
    for (k, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            chosen = k;
            break;
        }
    }
    // Never land on a zero-probability tail state through rounding.
    while amps[chosen].norm_sqr() == 0.0 && chosen > 0 {
        chosen -= 1;
    }
    (0..state.num_qubits())
        .map(|q| basis::bit(chosen, q))
        .collect()
}

/// `n_shots` single-qubit shots of `qubit` prepared in `prepared` (0 or 1).
pub fn calibration_run<R: Rng + ?Sized>(
    qubit: usize,
    prepared: u8,
    n_shots: usize,
    model: &ReadoutModel,
    seed: u64,
    rng: &mut R,
) -> Result<ShotSet, ReadoutError> {
    if n_shots == 0 {
        return Err(ReadoutError::Argument("n_shots must be at least 1".into()));
    }
    if prepared > 1 {
        return Err(ReadoutError::Label(prepared.to_string()));
    }
    if qubit >= model.qubits.len() {
        return Err(ReadoutError::QubitMissing {
            qubit,
            prepared: prepared.to_string(),
        });
    }
    let records = (1..=n_shots)
        .map(|m| sample_shot(m, &[qubit], &[prepared], model, rng))
        .collect();
    Ok(ShotSet {
        prepared: prepared.to_string(),
        qubits: vec![qubit],
        records,
        seed,
    })
}

/// `n_shots` simultaneous two-qubit shots of a circuit output `state`,
/// recorded under the prepared-state label `prepared`.
pub fn experiment_run<R: Rng + ?Sized>(
    state: &QuantumState,
    prepared: &str,
    n_shots: usize,
    model: &ReadoutModel,
    seed: u64,
    rng: &mut R,
) -> Result<ShotSet, ReadoutError> {
    if state.num_qubits() != 2 {
        return Err(ReadoutError::Argument(format!(
            "experiment runs read a two-qubit register, got {} qubits",
            state.num_qubits()
        )));
    }
    if n_shots == 0 {
        return Err(ReadoutError::Argument("n_shots must be at least 1".into()));
    }
    let (_, width) = basis::parse_label(prepared).map_err(|e| ReadoutError::Label(e.0))?;
    if width != 2 {
        return Err(ReadoutError::Label(prepared.to_string()));
    }
    let qubits = [basis::TARGET, basis::CONTROL];
    let records = (1..=n_shots)
        .map(|m| {
            let bits = joint_outcome(state, rng);
            sample_shot(m, &qubits, &bits, model, rng)
        })
        .collect();
    Ok(ShotSet {
        prepared: prepared.to_string(),
        qubits: qubits.to_vec(),
        records,
        seed,
    })
}
