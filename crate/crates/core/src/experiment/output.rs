use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::report::{FidelityAggregate, MatrixAggregate, RunReport, ScenarioResult};
use super::run::RunOutput;
use super::ExperimentError;
use crate::analysis::relative_delta;
use crate::readout::write_shot_csv;

fn fmt_f(x: f64) -> String {
    // Same precision as report.json.
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn matrix_csv(m: &MatrixAggregate) -> String {
    let mut s = String::from("prepared");
    for l in &m.labels {
        write!(s, ",{l}").unwrap();
    }
    for l in &m.labels {
        write!(s, ",err_{l}").unwrap();
    }
    s.push('\n');
    for (k, l) in m.labels.iter().enumerate() {
        s.push_str(l);
        for v in m.mean[k].iter().chain(&m.semi_dispersion[k]) {
            write!(s, ",{}", fmt_f(*v)).unwrap();
        }
        s.push('\n');
    }
    s
}

fn fidelity_csv(f: &FidelityAggregate) -> String {
    let mut s = String::from(
        "prepared,multiplied,multiplied_err,conditional,conditional_err,absolute_gain,relative_gain\n",
    );
    for (k, l) in f.labels.iter().enumerate() {
        writeln!(
            s,
            "{l},{},{},{},{},{},{}",
            fmt_f(f.multiplied[k]),
            fmt_f(f.multiplied_err[k]),
            fmt_f(f.conditional[k]),
            fmt_f(f.conditional_err[k]),
            fmt_f(f.absolute_gain[k]),
            opt_f(f.relative_gain[k])
        )
        .unwrap();
    }
    s
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &[u8]) -> Result<(), ExperimentError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| ExperimentError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

fn check_nonempty(report: &RunReport) -> Result<(), ExperimentError> {
    let empty = match &report.result {
        ScenarioResult::Readout(r) => r.repetitions.is_empty(),
        ScenarioResult::Calibration { repetitions, .. } => repetitions.is_empty(),
        ScenarioResult::Alc(a) => a.fits.is_empty(),
        ScenarioResult::CondOsc(c) => c.fits.is_empty(),
        ScenarioResult::Chevron(_) => false,
    };
    if empty {
        return Err(ExperimentError::Runtime("report has no repetitions".into()));
    }
    Ok(())
}

/// Writes the report and its CSV companions into `out_dir`; returns the paths in write order.
///
/// Readout scenarios: `report.json`, `matrix_{ideal,multiplied,conditional}.csv`,
/// `fidelity_table.csv` and, when shots were kept, `shots_rep<k>.csv`.
/// Calibration: `report.json`, `matrix_{q0,q2,multiplied}.csv`.
/// Chevron: `report.json`, `chevron.csv`. ALC: `report.json`, `alc_fit.csv`,
/// `alc_data.csv`. Conditional oscillation: `report.json`, `fringes.csv`.
pub fn emit_outputs(output: &RunOutput, out_dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let report = &output.report;
    check_nonempty(report)?;
    fs::create_dir_all(out_dir).map_err(|e| ExperimentError::io(out_dir, e))?;
    let mut w = Writer {
        dir: out_dir,
        written: Vec::new(),
    };
    w.put("report.json", report.to_json().as_bytes())?;
    let a = &output.artifacts;
    match &report.result {
        ScenarioResult::Readout(r) => {
            w.put(
                "matrix_ideal.csv",
                matrix_csv(&r.aggregate.ideal).as_bytes(),
            )?;
            w.put(
                "matrix_multiplied.csv",
                matrix_csv(&r.aggregate.multiplied).as_bytes(),
            )?;
            w.put(
                "matrix_conditional.csv",
                matrix_csv(&r.aggregate.conditional).as_bytes(),
            )?;
            w.put(
                "fidelity_table.csv",
                fidelity_csv(&r.aggregate.fidelity).as_bytes(),
            )?;
        }
        ScenarioResult::Calibration { aggregate, .. } => {
            w.put("matrix_q0.csv", matrix_csv(&aggregate.q0).as_bytes())?;
            w.put("matrix_q2.csv", matrix_csv(&aggregate.q2).as_bytes())?;
            w.put(
                "matrix_multiplied.csv",
                matrix_csv(&aggregate.multiplied).as_bytes(),
            )?;
        }
        ScenarioResult::Chevron(_) => {
            let mut s = String::from("detuning_ghz,duration_ns,population\n");
            for p in &a.chevron {
                writeln!(
                    s,
                    "{},{},{}",
                    fmt_f(p.detuning_ghz),
                    fmt_f(p.duration_ns),
                    fmt_f(p.population)
                )
                .unwrap();
            }
            w.put("chevron.csv", s.as_bytes())?;
        }
        ScenarioResult::Alc(r) => {
            let mut s = String::from("repetition,fixed_ghz,j_ghz,j_mhz,rms_ghz,iterations\n");
            for (k, f) in r.fits.iter().enumerate() {
                writeln!(
                    s,
                    "{k},{},{},{},{},{}",
                    fmt_f(f.fixed_ghz),
                    fmt_f(f.j_ghz),
                    fmt_f(f.j_ghz * 1e3),
                    fmt_f(f.rms_ghz),
                    f.iterations
                )
                .unwrap();
            }
            w.put("alc_fit.csv", s.as_bytes())?;
            if let Some(d) = &a.alc_data {
                w.put("alc_data.csv", d.to_csv().as_bytes())?;
            }
        }
        ScenarioResult::CondOsc(_) => {
            if let Some((on, off)) = &a.fringes {
                let mut s = String::from("phase_deg,on_target,off_target,on_control,off_control\n");
                let n = on.phases_rad.len().min(off.phases_rad.len());
                for k in 0..n {
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        fmt_f(on.phases_rad[k].to_degrees()),
                        fmt_f(on.target[k]),
                        fmt_f(off.target[k]),
                        fmt_f(on.control[k]),
                        fmt_f(off.control[k])
                    )
                    .unwrap();
                }
                w.put("fringes.csv", s.as_bytes())?;
            }
        }
    }
    for (k, sets) in a.shots.iter().enumerate() {
        let mut buf = Vec::new();
        write_shot_csv(&mut buf, report.provenance.seed, &output.model_hash, sets)
            .map_err(|e| ExperimentError::Runtime(e.to_string()))?;
        w.put(&format!("shots_rep{k}.csv"), &buf)?;
    }
    Ok(w.written)
}

pub fn load_report(path: &Path) -> Result<RunReport, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
    RunReport::from_json(&text)
        .map_err(|e| ExperimentError::Usage(format!("{}: not a run report: {e}", path.display())))
}

/// Fidelity column of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Column {
    Multiplied,
    #[default]
    Conditional,
}

impl FromStr for Column {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiplied" => Ok(Self::Multiplied),
            "conditional" => Ok(Self::Conditional),
            _ => Err(ExperimentError::Usage(format!(
                "column must be multiplied or conditional, got {s:?}"
            ))),
        }
    }
}

impl Column {
    fn pick(self, f: &FidelityAggregate) -> &[f64] {
        match self {
            Self::Multiplied => &f.multiplied,
            Self::Conditional => &f.conditional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub a: f64,
    pub b: f64,
    /// `a − b`.
    pub delta: f64,
    /// `(a − b)/b`; `None` when `b` is 0.
    pub relative: Option<f64>,
}

/// Per-state fidelity deltas between two readout reports of the same scenario.
pub fn compare(
    a: &RunReport,
    b: &RunReport,
    column_a: Column,
    column_b: Column,
) -> Result<Vec<CompareRow>, ExperimentError> {
    if a.scenario != b.scenario {
        return Err(ExperimentError::Usage(format!(
            "reports are from different scenarios ({} vs {})",
            a.scenario, b.scenario
        )));
    }
    let (fa, fb) = match (a.fidelity(), b.fidelity()) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(ExperimentError::Usage(format!(
                "scenario {} has no fidelity table",
                a.scenario
            )))
        }
    };
    if fa.labels != fb.labels {
        return Err(ExperimentError::Usage(
            "reports use different basis labels".into(),
        ));
    }
    let (va, vb) = (column_a.pick(fa), column_b.pick(fb));
    Ok(fa
        .labels
        .iter()
        .enumerate()
        .map(|(k, label)| CompareRow {
            label: label.clone(),
            a: va[k],
            b: vb[k],
            delta: va[k] - vb[k],
            relative: Some(relative_delta(va[k], vb[k])).filter(|v| v.is_finite()),
        })
        .collect())
}
