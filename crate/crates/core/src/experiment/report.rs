use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{NoiseMode, Scenario};
use crate::analysis::{FidelityTable, SlopeIntercept, Threshold};
use crate::device::{AlcFit, ConditionalPhase};
use crate::probability::ProbabilityMatrix;

/// Decimal places kept in serialized reports.
const REPORT_DECIMALS: i32 = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub model_hash: String,
    pub noise: NoiseMode,
    pub n_shots: usize,
    pub repetitions: usize,
    pub timestamp: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub line: Threshold,
    /// `I(Q) = A + B·Q` when the line admits it.
    pub slope_intercept: Option<SlopeIntercept>,
}

impl From<Threshold> for ThresholdSummary {
    fn from(t: Threshold) -> Self {
        Self {
            line: t,
            slope_intercept: t.slope_intercept(),
        }
    }
}

/// Entry-wise mean and semi-dispersion `(max − min)/2` over repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixAggregate {
    pub labels: Vec<String>,
    pub mean: Vec<Vec<f64>>,
    pub semi_dispersion: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityAggregate {
    pub labels: Vec<String>,
    pub multiplied: Vec<f64>,
    pub multiplied_err: Vec<f64>,
    pub conditional: Vec<f64>,
    pub conditional_err: Vec<f64>,
    /// `conditional − multiplied`.
    pub absolute_gain: Vec<f64>,
    /// `(conditional − multiplied)/multiplied`; null when the multiplied score is 0.
    pub relative_gain: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRep {
    pub index: usize,
    pub thresholds: [ThresholdSummary; 2],
    pub calibration: [ProbabilityMatrix; 2],
    pub ideal: ProbabilityMatrix,
    pub multiplied: ProbabilityMatrix,
    pub conditional: ProbabilityMatrix,
    pub fidelity: FidelityTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutAggregate {
    pub ideal: MatrixAggregate,
    pub multiplied: MatrixAggregate,
    pub conditional: MatrixAggregate,
    pub fidelity: FidelityAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutResult {
    pub circuit: String,
    pub repetitions: Vec<ReadoutRep>,
    pub aggregate: ReadoutAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRep {
    pub index: usize,
    pub thresholds: [ThresholdSummary; 2],
    pub q0: ProbabilityMatrix,
    pub q2: ProbabilityMatrix,
    /// `p_Q2 ⊗ p_Q0`.
    pub multiplied: ProbabilityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationAggregate {
    pub q0: MatrixAggregate,
    pub q2: MatrixAggregate,
    pub multiplied: MatrixAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevronResult {
    pub j_ghz: f64,
    pub first_full_transfer_ns: f64,
    pub period_at_resonance_ns: f64,
    /// Exact splitting of the two-excitation manifold at the |11⟩–|02⟩ resonance.
    pub two_excitation_splitting_ghz: f64,
    pub detunings: usize,
    pub durations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlcResult {
    /// `synthetic` or the dataset path.
    pub source: String,
    pub planted_j_ghz: Option<f64>,
    pub fits: Vec<AlcFit>,
    pub j_mhz_mean: f64,
    pub j_mhz_semi_dispersion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondOscResult {
    pub source: String,
    pub planted_deg: Option<f64>,
    pub fits: Vec<ConditionalPhase>,
    /// Circular mean, in [0°, 360°).
    pub theta_deg_mean: f64,
    pub theta_deg_semi_dispersion: f64,
    pub leakage_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioResult {
    Readout(ReadoutResult),
    Calibration {
        repetitions: Vec<CalibrationRep>,
        aggregate: CalibrationAggregate,
    },
    Chevron(ChevronResult),
    Alc(AlcResult),
    CondOsc(CondOscResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub provenance: Provenance,
    pub result: ScenarioResult,
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let scale = 10f64.powi(REPORT_DECIMALS);
            let r = (x * scale).round() / scale;
            // Avoid emitting -0.0.
            let r = if r == 0.0 { 0.0 } else { r };
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

impl RunReport {
    /// JSON tree with every float rounded to the report precision.
    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_value(&mut v);
        v
    }

    /// Pretty JSON as written to `report.json`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("value serializes");
        s.push('\n');
        s
    }

    /// The report without its timestamp; equal across runs with the same config and seed.
    pub fn payload_json(&self) -> String {
        let mut v = self.to_value();
        if let Some(p) = v.get_mut("provenance").and_then(Value::as_object_mut) {
            p.remove("timestamp");
        }
        serde_json::to_string(&v).expect("value serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn fidelity(&self) -> Option<&FidelityAggregate> {
        match &self.result {
            ScenarioResult::Readout(r) => Some(&r.aggregate.fidelity),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_walk() {
        let mut v = serde_json::json!({"a": [0.1234567891234, -1e-12, 3], "b": {"c": 2.5}});
        round_value(&mut v);
        assert_eq!(v["a"][0], 0.123456789);
        assert_eq!(v["a"][1], 0.0);
        assert_eq!(v["a"][2], 3);
        assert_eq!(v["b"]["c"], 2.5);
        assert!(!v.to_string().contains("-0"));
    }
}
