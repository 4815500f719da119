//! Flat `key = value` configuration with unit-suffixed keys.
//!
//! ```text
//! # device
//! q0.t1_us = 24
//! q2.readout.sigma_v = 0.4
//! readout.correlated_flip_probability = 0.05
//! n_shots = 760
//! ```
//!
//! `#` starts a comment. Unknown or repeated keys are errors. Relative file
//! paths resolve against the config file's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentError, NoiseMode, Scenario};
use crate::basis::{CONTROL, TARGET};
use crate::circuit::{Circuit, SINGLE_QUBIT_DEFAULT};
use crate::device::{AlcDataset, DeviceParams, FringeData};
use crate::readout::{ReadoutModel, DEFAULT_SHOTS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits config text into entries; rejects malformed lines and repeated keys.
pub fn parse_entries(text: &str) -> Result<Vec<ConfigEntry>, ExperimentError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| {
            ExperimentError::config(Some(line), format!("expected `key = value`, got {body:?}"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ExperimentError::config(Some(line), "empty key or value"));
        }
        if !seen.insert(key.to_string()) {
            return Err(ExperimentError::config(
                Some(line),
                format!("key {key:?} repeated"),
            ));
        }
        out.push(ConfigEntry {
            key: key.into(),
            value: value.into(),
            line,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QubitReadoutOverride {
    pub sigma_v: Option<f64>,
    pub angle_rad: Option<f64>,
    pub decay_probability: Option<f64>,
    pub excitation_probability: Option<f64>,
}

impl QubitReadoutOverride {
    fn is_set(&self) -> bool {
        *self != Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlcSettings {
    /// Measured dataset; synthetic data is generated when absent.
    pub data: Option<PathBuf>,
    /// Planted coupling for synthetic data; the device J when unset.
    pub planted_j_ghz: Option<f64>,
    pub noise_ghz: f64,
    /// Frequency of the fixed qubit; Q0 when unset.
    pub fixed_ghz: Option<f64>,
    pub span_ghz: f64,
    pub points: usize,
}

impl Default for AlcSettings {
    fn default() -> Self {
        Self {
            data: None,
            planted_j_ghz: None,
            noise_ghz: 0.0005,
            fixed_ghz: None,
            span_ghz: 0.15,
            points: 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondOscSettings {
    pub on: Option<PathBuf>,
    pub off: Option<PathBuf>,
    pub planted_deg: f64,
    pub planted_leakage: f64,
    pub amplitude_v: f64,
    pub noise_v: f64,
    pub points: usize,
}

impl Default for CondOscSettings {
    fn default() -> Self {
        Self {
            on: None,
            off: None,
            planted_deg: 191.0,
            planted_leakage: 0.0,
            amplitude_v: 0.5,
            noise_v: 0.01,
            points: 36,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChevronSettings {
    pub detuning_span_ghz: f64,
    pub detuning_points: usize,
    pub max_duration_ns: f64,
    pub duration_points: usize,
}

impl Default for ChevronSettings {
    fn default() -> Self {
        Self {
            detuning_span_ghz: 0.1,
            detuning_points: 41,
            max_duration_ns: 80.0,
            duration_points: 161,
        }
    }
}

/// Everything a config file can say, before any file is read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub device: DeviceParams,
    pub readout: [QubitReadoutOverride; 2],
    pub correlated_flip_probability: Option<f64>,
    pub noise: Option<NoiseMode>,
    pub n_shots: Option<usize>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub circuit_file: Option<PathBuf>,
    pub alc: AlcSettings,
    pub condosc: CondOscSettings,
    pub chevron: ChevronSettings,
}

fn real(e: &ConfigEntry) -> Result<f64, ExperimentError> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ExperimentError::config(
            Some(e.line),
            format!("{}: expected a finite number, got {:?}", e.key, e.value),
        )),
    }
}

fn count(e: &ConfigEntry) -> Result<usize, ExperimentError> {
    match e.value.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(ExperimentError::config(
            Some(e.line),
            format!("{}: expected a positive integer, got {:?}", e.key, e.value),
        )),
    }
}

impl Settings {
    /// Parses config text; no files are touched.
    pub fn from_text(text: &str) -> Result<Self, ExperimentError> {
        let mut s = Settings::default();
        for e in parse_entries(text)? {
            s.apply(&e)?;
        }
        Ok(s)
    }

    fn apply(&mut self, e: &ConfigEntry) -> Result<(), ExperimentError> {
        let key = e.key.as_str();
        if let Some((qubit, rest)) = split_qubit(key) {
            return self.apply_qubit(qubit, rest, e);
        }
        match key {
            "pair.j_ghz" => self.device.j_ghz = real(e)?,
            "readout.duration_ns" => self.device.readout_duration_ns = real(e)?,
            "readout.correlated_flip_probability" => {
                self.correlated_flip_probability = Some(real(e)?)
            }
            "noise" => {
                self.noise = Some(e.value.parse().map_err(|err: ExperimentError| {
                    ExperimentError::config(Some(e.line), err.to_string())
                })?)
            }
            "n_shots" => self.n_shots = Some(count(e)?),
            "repetitions" => self.repetitions = Some(count(e)?),
            "seed" => {
                self.seed = Some(e.value.parse().map_err(|_| {
                    ExperimentError::config(
                        Some(e.line),
                        format!("seed: expected a u64, got {:?}", e.value),
                    )
                })?)
            }
            "circuit.file" => self.circuit_file = Some(PathBuf::from(&e.value)),
            "alc.data" => self.alc.data = Some(PathBuf::from(&e.value)),
            "alc.planted_j_ghz" => self.alc.planted_j_ghz = Some(real(e)?),
            "alc.noise_ghz" => self.alc.noise_ghz = real(e)?,
            "alc.fixed_ghz" => self.alc.fixed_ghz = Some(real(e)?),
            "alc.span_ghz" => self.alc.span_ghz = real(e)?,
            "alc.points" => self.alc.points = count(e)?,
            "condosc.on" => self.condosc.on = Some(PathBuf::from(&e.value)),
            "condosc.off" => self.condosc.off = Some(PathBuf::from(&e.value)),
            "condosc.planted_deg" => self.condosc.planted_deg = real(e)?,
            "condosc.planted_leakage" => self.condosc.planted_leakage = real(e)?,
            "condosc.amplitude_v" => self.condosc.amplitude_v = real(e)?,
            "condosc.noise_v" => self.condosc.noise_v = real(e)?,
            "condosc.points" => self.condosc.points = count(e)?,
            "chevron.detuning_span_ghz" => self.chevron.detuning_span_ghz = real(e)?,
            "chevron.detuning_points" => self.chevron.detuning_points = count(e)?,
            "chevron.max_duration_ns" => self.chevron.max_duration_ns = real(e)?,
            "chevron.duration_points" => self.chevron.duration_points = count(e)?,
            _ => return Err(unknown(e)),
        }
        Ok(())
    }

    fn apply_qubit(
        &mut self,
        qubit: usize,
        rest: &str,
        e: &ConfigEntry,
    ) -> Result<(), ExperimentError> {
        let dev = &mut self.device.qubits[qubit];
        let ro = &mut self.readout[qubit];
        match rest {
            "freq_ghz" => dev.freq_ghz = real(e)?,
            "ec_ghz" => dev.ec_ghz = real(e)?,
            "t1_us" => dev.t1_us = real(e)?,
            "t2echo_us" => dev.t2echo_us = real(e)?,
            "readout.sigma_v" => ro.sigma_v = Some(real(e)?),
            "readout.angle_rad" => ro.angle_rad = Some(real(e)?),
            "readout.decay_probability" => ro.decay_probability = Some(real(e)?),
            "readout.excitation_probability" => ro.excitation_probability = Some(real(e)?),
            _ => return Err(unknown(e)),
        }
        Ok(())
    }

    fn has_readout_overrides(&self) -> bool {
        self.readout.iter().any(QubitReadoutOverride::is_set)
            || self.correlated_flip_probability.is_some()
    }
}

fn unknown(e: &ConfigEntry) -> ExperimentError {
    ExperimentError::config(Some(e.line), format!("unknown key {:?}", e.key))
}

fn split_qubit(key: &str) -> Option<(usize, &str)> {
    if let Some(rest) = key.strip_prefix("q0.") {
        Some((TARGET, rest))
    } else {
        key.strip_prefix("q2.").map(|rest| (CONTROL, rest))
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub n_shots: Option<usize>,
    pub repetitions: Option<usize>,
    pub noise: Option<NoiseMode>,
    pub dump_shots: bool,
}

/// Fully resolved run description: referenced files are loaded and every
/// default is filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub device: DeviceParams,
    pub noise: NoiseMode,
    pub readout: ReadoutModel,
    pub n_shots: usize,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(skip)]
    pub dump_shots: bool,
    /// Circuit for the readout scenarios (`init` runs the empty circuit).
    pub circuit: Option<Circuit>,
    pub alc: AlcSettings,
    pub alc_data: Option<AlcDataset>,
    pub condosc: CondOscSettings,
    pub fringes: Option<(FringeData, FringeData)>,
    pub chevron: ChevronSettings,
    /// Non-fatal notes for the operator, such as ignored keys.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn resolve_path(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn read_file(base: Option<&Path>, p: &Path) -> Result<(PathBuf, String), ExperimentError> {
    let path = resolve_path(base, p);
    let text = fs::read_to_string(&path).map_err(|e| ExperimentError::Config {
        path: Some(path.display().to_string()),
        line: None,
        message: e.to_string(),
    })?;
    Ok((path, text))
}

fn file_error(path: &Path, err: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config {
        path: Some(path.display().to_string()),
        line: None,
        message: err.to_string(),
    }
}

impl ScenarioConfig {
    /// Default device and readout for `scenario`, seeded with `seed`.
    pub fn defaults(scenario: Scenario, seed: u64) -> Result<Self, ExperimentError> {
        Self::resolve(
            scenario,
            Settings::default(),
            &RunOptions {
                seed: Some(seed),
                ..RunOptions::default()
            },
            None,
        )
    }

    /// Reads a config file and resolves it.
    pub fn load(
        scenario: Scenario,
        path: &Path,
        options: &RunOptions,
    ) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|e| file_error(path, e))?;
        let settings = Settings::from_text(&text).map_err(|e| match e {
            ExperimentError::Config { line, message, .. } => ExperimentError::Config {
                path: Some(path.display().to_string()),
                line,
                message,
            },
            other => other,
        })?;
        Self::resolve(scenario, settings, options, path.parent())
    }

    pub fn resolve(
        scenario: Scenario,
        settings: Settings,
        options: &RunOptions,
        base_dir: Option<&Path>,
    ) -> Result<Self, ExperimentError> {
        settings
            .device
            .validate()
            .map_err(|e| ExperimentError::config(None, e.to_string()))?;
        let mut warnings = Vec::new();
        let noise = options.noise.or(settings.noise).unwrap_or_default();
        let readout = match noise {
            NoiseMode::Off => ReadoutModel::noiseless(),
            NoiseMode::Default => ReadoutModel::from_device(&settings.device),
            NoiseMode::Custom => custom_model(&settings),
        };
        if noise != NoiseMode::Custom && settings.has_readout_overrides() {
            warnings.push(format!(
                "readout.* keys are ignored with noise mode {noise}"
            ));
        }
        readout
            .validate()
            .map_err(|e| ExperimentError::config(None, e.to_string()))?;

        let seed = options.seed.or(settings.seed).ok_or_else(|| {
            ExperimentError::Usage("a seed is required (--seed or `seed =`)".into())
        })?;
        let n_shots = options
            .n_shots
            .or(settings.n_shots)
            .unwrap_or(DEFAULT_SHOTS);
        let mut repetitions = options
            .repetitions
            .or(settings.repetitions)
            .unwrap_or_else(|| scenario.default_repetitions());
        if n_shots == 0 || repetitions == 0 {
            return Err(ExperimentError::Usage(
                "shots and repetitions must be at least 1".into(),
            ));
        }

        let circuit = match scenario {
            Scenario::Init => Some(Circuit::new(Vec::new())),
            Scenario::Cnot => Some(Circuit::cnot()),
            Scenario::Bell => Some(Circuit::bell()),
            Scenario::SingleQubit => Some(match &settings.circuit_file {
                Some(p) => {
                    let (path, text) = read_file(base_dir, p)?;
                    Circuit::parse(&text).map_err(|e| file_error(&path, e))?
                }
                None => Circuit::parse(SINGLE_QUBIT_DEFAULT).expect("built-in circuit parses"),
            }),
            _ => None,
        };
        if let Some(c) = &circuit {
            if c.width() > 2 {
                return Err(ExperimentError::config(
                    None,
                    format!("circuit addresses {} qubits; the register has 2", c.width()),
                ));
            }
        }

        let alc_data = match (&settings.alc.data, scenario) {
            (Some(p), Scenario::AlcFit) => {
                let (path, text) = read_file(base_dir, p)?;
                if options.repetitions.or(settings.repetitions).is_none() {
                    repetitions = 1;
                }
                Some(AlcDataset::from_csv(text.as_bytes()).map_err(|e| file_error(&path, e))?)
            }
            _ => None,
        };
        let fringes = match (&settings.condosc.on, &settings.condosc.off, scenario) {
            (Some(on), Some(off), Scenario::CondOsc) => {
                let load = |p: &Path| -> Result<FringeData, ExperimentError> {
                    let (path, text) = read_file(base_dir, p)?;
                    FringeData::from_csv(text.as_bytes()).map_err(|e| file_error(&path, e))
                };
                if options.repetitions.or(settings.repetitions).is_none() {
                    repetitions = 1;
                }
                Some((load(on)?, load(off)?))
            }
            (Some(_), None, Scenario::CondOsc) | (None, Some(_), Scenario::CondOsc) => {
                return Err(ExperimentError::config(
                    None,
                    "condosc.on and condosc.off must be given together",
                ))
            }
            _ => None,
        };

        Ok(Self {
            scenario,
            device: settings.device,
            noise,
            readout,
            n_shots,
            repetitions,
            seed,
            dump_shots: options.dump_shots,
            circuit,
            alc: settings.alc,
            alc_data,
            condosc: settings.condosc,
            fringes,
            chevron: settings.chevron,
            warnings,
        })
    }

    /// SHA-256 of the resolved configuration, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

fn custom_model(settings: &Settings) -> ReadoutModel {
    let mut model = ReadoutModel::from_device(&settings.device);
    for (q, o) in settings.readout.iter().enumerate() {
        let base = model.qubits[q];
        let angle = o.angle_rad.unwrap_or(crate::readout::DEFAULT_ANGLES[q]);
        let mut r = crate::readout::QubitReadout::rotated(
            angle,
            o.sigma_v.unwrap_or(base.sigma),
            o.decay_probability.unwrap_or(base.decay_probability),
        );
        r.excitation_probability = o
            .excitation_probability
            .unwrap_or(base.excitation_probability);
        model.qubits[q] = r;
    }
    if let Some(p) = settings.correlated_flip_probability {
        model.correlated_flip_probability = p;
    }
    model
}
