//! Batch driver: scenario configuration, end-to-end runs over seeded
//! repetitions, report assembly and file output.

mod config;
mod output;
mod report;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    parse_entries, AlcSettings, ChevronSettings, CondOscSettings, ConfigEntry,
    QubitReadoutOverride, RunOptions, ScenarioConfig, Settings,
};
pub use output::{compare, emit_outputs, load_report, Column, CompareRow};
pub use report::{
    AlcResult, CalibrationAggregate, CalibrationRep, ChevronResult, CondOscResult,
    FidelityAggregate, MatrixAggregate, Provenance, ReadoutAggregate, ReadoutRep, ReadoutResult,
    RunReport, ScenarioResult, ThresholdSummary,
};
pub use run::{run_scenario, semi_dispersion, Artifacts, RunOutput};

use crate::analysis::AnalysisError;
use crate::circuit::CircuitError;
use crate::device::DeviceError;
use crate::readout::ReadoutError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{}", config_message(.path, *.line, .message))]
    Config {
        path: Option<String>,
        line: Option<usize>,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

fn config_message(path: &Option<String>, line: Option<usize>, message: &str) -> String {
    match (path, line) {
        (Some(p), Some(l)) => format!("{p}:{l}: {message}"),
        (Some(p), None) => format!("{p}: {message}"),
        (None, Some(l)) => format!("config line {l}: {message}"),
        (None, None) => format!("config: {message}"),
    }
}

impl ExperimentError {
    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Self::Config {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Process exit code: 2 usage, 3 config, 4 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Config { .. } => 3,
            Self::Io { .. } | Self::Runtime(_) => 4,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for ExperimentError {
            fn from(e: $t) -> Self {
                Self::Runtime(e.to_string())
            }
        }
    )*};
}
runtime_from!(AnalysisError, CircuitError, DeviceError, ReadoutError);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Calibrate,
    Init,
    SingleQubit,
    Cnot,
    Bell,
    Chevron,
    AlcFit,
    CondOsc,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Calibrate,
        Scenario::Init,
        Scenario::SingleQubit,
        Scenario::Cnot,
        Scenario::Bell,
        Scenario::Chevron,
        Scenario::AlcFit,
        Scenario::CondOsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Calibrate => "calibrate",
            Scenario::Init => "init",
            Scenario::SingleQubit => "single-qubit",
            Scenario::Cnot => "cnot",
            Scenario::Bell => "bell",
            Scenario::Chevron => "chevron",
            Scenario::AlcFit => "alc-fit",
            Scenario::CondOsc => "cond-osc",
        }
    }

    /// Repetitions when neither the config nor the command line sets them.
    pub fn default_repetitions(self) -> usize {
        match self {
            Scenario::Bell => 5,
            Scenario::Init | Scenario::Cnot | Scenario::SingleQubit | Scenario::Calibrate => 10,
            Scenario::AlcFit | Scenario::CondOsc => 10,
            Scenario::Chevron => 1,
        }
    }

    /// Scenarios that prepare the four basis states and score both paradigms.
    pub fn is_readout(self) -> bool {
        matches!(
            self,
            Scenario::Init | Scenario::SingleQubit | Scenario::Cnot | Scenario::Bell
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                ExperimentError::Usage(format!(
                    "unknown scenario {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Which readout model a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Zero blob width, no decay, no correlated flips.
    Off,
    /// Default geometry, decay from the device T1 values.
    #[default]
    Default,
    /// Default, then the config's `readout.*` overrides.
    Custom,
}

impl FromStr for NoiseMode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(Self::Off),
            "default" => Ok(Self::Default),
            "custom" => Ok(Self::Custom),
            _ => Err(ExperimentError::Usage(format!(
                "noise mode must be off, default or custom, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Off => "off",
            Self::Default => "default",
            Self::Custom => "custom",
        })
    }
}
