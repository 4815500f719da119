//! Count vectors and the two readout-probability paradigms.

use serde::{Deserialize, Serialize};

use super::threshold::Threshold;
use super::AnalysisError;
use crate::basis::{self, CONTROL, TARGET};
use crate::probability::ProbabilityMatrix;
use crate::readout::ShotSet;

/// Counts `n[measured][prepared]`; each prepared column sums to its shot count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountMatrix {
    counts: Vec<Vec<u64>>,
}

impl CountMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            counts: vec![vec![0; dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, measured: usize, prepared: usize) -> u64 {
        self.counts[measured][prepared]
    }

    pub fn add(&mut self, measured: usize, prepared: usize) {
        self.counts[measured][prepared] += 1;
    }

    /// Shots recorded for `prepared`.
    pub fn column_sum(&self, prepared: usize) -> u64 {
        self.counts.iter().map(|row| row[prepared]).sum()
    }

    /// `p[prepared][measured] = n[measured][prepared] / N_shot(prepared)`.
    pub fn to_probabilities(&self) -> Result<ProbabilityMatrix, AnalysisError> {
        let dim = self.dim();
        let rows = (0..dim)
            .map(|prepared| {
                let total = self.column_sum(prepared);
                if total == 0 {
                    return Err(AnalysisError::MissingPreparation(basis::label(
                        prepared,
                        dim.trailing_zeros() as usize,
                    )));
                }
                Ok((0..dim)
                    .map(|measured| self.counts[measured][prepared] as f64 / total as f64)
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>, _>>()?;
        Ok(ProbabilityMatrix::new(rows)?)
    }
}

/// Classify one qubit of every shot of a calibration set.
fn single_counts(
    qubit: usize,
    set: &ShotSet,
    threshold: &Threshold,
    counts: &mut CountMatrix,
    prepared: usize,
) -> Result<(), AnalysisError> {
    for p in set.points(qubit)? {
        counts.add(threshold.classify(&p) as usize, prepared);
    }
    Ok(())
}

/// 2×2 readout matrix of one qubit from its ground and excited calibration sets.
pub fn single_qubit_matrix(
    ground: &ShotSet,
    excited: &ShotSet,
    threshold: &Threshold,
) -> Result<ProbabilityMatrix, AnalysisError> {
    let qubit = *ground.qubits.first().ok_or(AnalysisError::EmptyShotSet)?;
    single_qubit_counts(qubit, ground, excited, threshold)?.to_probabilities()
}

pub fn single_qubit_counts(
    qubit: usize,
    ground: &ShotSet,
    excited: &ShotSet,
    threshold: &Threshold,
) -> Result<CountMatrix, AnalysisError> {
    if ground.is_empty() || excited.is_empty() {
        return Err(AnalysisError::EmptyShotSet);
    }
    let mut counts = CountMatrix::zeros(2);
    single_counts(qubit, ground, threshold, &mut counts, 0)?;
    single_counts(qubit, excited, threshold, &mut counts, 1)?;
    Ok(counts)
}

/// Multiplied paradigm: `p_Q2 ⊗ p_Q0`, control (Q2) as the high bit.
pub fn multiplied_paradigm(
    control: &ProbabilityMatrix,
    target: &ProbabilityMatrix,
) -> Result<ProbabilityMatrix, AnalysisError> {
    if control.dim() != 2 || target.dim() != 2 {
        return Err(AnalysisError::Argument(format!(
            "multiplied paradigm takes two 2×2 matrices, got {}×{} and {}×{}",
            control.dim(),
            control.dim(),
            target.dim(),
            target.dim()
        )));
    }
    // Re-validate rows so that hand-built inputs surface as argument errors.
    ProbabilityMatrix::new(control.rows().to_vec())?;
    ProbabilityMatrix::new(target.rows().to_vec())?;
    Ok(control.kron(target))
}

/// Orders two-qubit experiment sets by prepared index; all four must be present once.
fn by_prepared(experiments: &[ShotSet]) -> Result<[&ShotSet; 4], AnalysisError> {
    let mut slots: [Option<&ShotSet>; 4] = [None; 4];
    for set in experiments {
        if set.qubits != [TARGET, CONTROL] {
            return Err(AnalysisError::Argument(format!(
                "shot set {:?} does not read both register qubits",
                set.prepared
            )));
        }
        let k = set.prepared_index()?;
        if slots[k].replace(set).is_some() {
            return Err(AnalysisError::Argument(format!(
                "prepared state {:?} appears twice",
                set.prepared
            )));
        }
    }
    let mut out = Vec::with_capacity(4);
    for (k, slot) in slots.iter().enumerate() {
        let set = slot.ok_or_else(|| AnalysisError::MissingPreparation(basis::label(k, 2)))?;
        if set.is_empty() {
            return Err(AnalysisError::EmptyShotSet);
        }
        out.push(set);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Joint per-shot counts: each shot lands in exactly one of the four
/// (Q2, Q0) quadrants cut by the two thresholds.
pub fn conditional_counts(
    experiments: &[ShotSet],
    thresholds: &[Threshold; 2],
) -> Result<CountMatrix, AnalysisError> {
    let sets = by_prepared(experiments)?;
    let mut counts = CountMatrix::zeros(4);
    for (prepared, set) in sets.iter().enumerate() {
        let (ct, cc) = (
            set.column(TARGET).expect("checked"),
            set.column(CONTROL).expect("checked"),
        );
        for r in &set.records {
            let bits = [
                thresholds[TARGET].classify(&r.iq[ct]),
                thresholds[CONTROL].classify(&r.iq[cc]),
            ];
            counts.add(basis::index_from_bits(&bits), prepared);
        }
    }
    Ok(counts)
}

/// Conditional paradigm: joint counts normalized per prepared state.
pub fn conditional_paradigm(
    experiments: &[ShotSet],
    thresholds: &[Threshold; 2],
) -> Result<ProbabilityMatrix, AnalysisError> {
    conditional_counts(experiments, thresholds)?.to_probabilities()
}

/// Multiplied paradigm on circuit outputs: for each prepared state, the
/// product of the two single-qubit outcome distributions counted separately
/// from the same shots.
pub fn multiplied_paradigm_from_shots(
    experiments: &[ShotSet],
    thresholds: &[Threshold; 2],
) -> Result<ProbabilityMatrix, AnalysisError> {
    let sets = by_prepared(experiments)?;
    let mut rows = Vec::with_capacity(4);
    for set in sets {
        let n = set.len() as f64;
        let ones = |qubit: usize| -> Result<f64, AnalysisError> {
            let k = set
                .points(qubit)?
                .iter()
                .filter(|p| thresholds[qubit].classify(p) == 1)
                .count();
            Ok(k as f64 / n)
        };
        let (pc, pt) = (ones(CONTROL)?, ones(TARGET)?);
        let control = ProbabilityMatrix::new(vec![vec![1.0 - pc, pc], vec![1.0 - pc, pc]])?;
        let target = ProbabilityMatrix::new(vec![vec![1.0 - pt, pt], vec![1.0 - pt, pt]])?;
        rows.push(control.kron(&target).row(0).to_vec());
    }
    Ok(ProbabilityMatrix::new(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::{IqPoint, ShotRecord};

    fn thresholds() -> [Threshold; 2] {
        [
            Threshold::from_means(IqPoint::new(1.0, 0.0), IqPoint::new(-1.0, 0.0)).unwrap(),
            Threshold::from_means(IqPoint::new(0.0, 1.0), IqPoint::new(0.0, -1.0)).unwrap(),
        ]
    }

    fn point(qubit: usize, bit: u8) -> IqPoint {
        let s = if bit == 0 { 1.0 } else { -1.0 };
        if qubit == TARGET {
            IqPoint::new(s, 0.0)
        } else {
            IqPoint::new(0.0, s)
        }
    }

    /// Set whose shots cycle through the given joint outcomes (bits per register qubit).
    fn set(prepared: &str, outcomes: &[[u8; 2]], n: usize) -> ShotSet {
        ShotSet {
            prepared: prepared.into(),
            qubits: vec![TARGET, CONTROL],
            records: (0..n)
                .map(|k| {
                    let o = outcomes[k % outcomes.len()];
                    ShotRecord {
                        index: k + 1,
                        iq: vec![point(TARGET, o[0]), point(CONTROL, o[1])],
                    }
                })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn ground_shots_fill_first_column() {
        let sets: Vec<ShotSet> = ["00", "01", "10", "11"]
            .iter()
            .map(|l| set(l, &[[0, 0]], 10))
            .collect();
        let m = conditional_paradigm(&sets, &thresholds()).unwrap();
        for r in 0..4 {
            assert_eq!(m.row(r), &[1.0, 0.0, 0.0, 0.0]);
        }
        let c = conditional_counts(&sets, &thresholds()).unwrap();
        for p in 0..4 {
            assert_eq!(c.column_sum(p), 10);
        }
    }

    #[test]
    fn correlated_shots_separate_the_paradigms() {
        // Half |00⟩, half |11⟩ for every preparation.
        let sets: Vec<ShotSet> = ["00", "01", "10", "11"]
            .iter()
            .map(|l| set(l, &[[0, 0], [1, 1]], 100))
            .collect();
        let cond = conditional_paradigm(&sets, &thresholds()).unwrap();
        let mult = multiplied_paradigm_from_shots(&sets, &thresholds()).unwrap();
        assert_eq!(cond.row(0), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(mult.row(0), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn quadrant_labels_follow_register_order() {
        // Q2 excited, Q0 ground → label "10".
        let sets: Vec<ShotSet> = ["00", "01", "10", "11"]
            .iter()
            .map(|l| set(l, &[[0, 1]], 4))
            .collect();
        let m = conditional_paradigm(&sets, &thresholds()).unwrap();
        assert_eq!(m.row(3), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn missing_or_duplicate_preparations() {
        let sets: Vec<ShotSet> = ["00", "01", "10"]
            .iter()
            .map(|l| set(l, &[[0, 0]], 3))
            .collect();
        assert!(matches!(
            conditional_paradigm(&sets, &thresholds()),
            Err(AnalysisError::MissingPreparation(_))
        ));
        let sets: Vec<ShotSet> = ["00", "01", "10", "10"]
            .iter()
            .map(|l| set(l, &[[0, 0]], 3))
            .collect();
        assert!(conditional_paradigm(&sets, &thresholds()).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let id = ProbabilityMatrix::identity(2);
        assert_eq!(
            multiplied_paradigm(&id, &id).unwrap(),
            ProbabilityMatrix::identity(4)
        );
        let noisy = ProbabilityMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let m = multiplied_paradigm(&noisy, &id).unwrap();
        let expect = [
            [0.9, 0.0, 0.1, 0.0],
            [0.0, 0.9, 0.0, 0.1],
            [0.2, 0.0, 0.8, 0.0],
            [0.0, 0.2, 0.0, 0.8],
        ];
        for (r, row) in expect.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!((m.get(r, c) - v).abs() < 1e-15);
            }
        }
        assert!(multiplied_paradigm(&m, &id).is_err());
    }
}
