//! Shot records and their CSV encoding.
//!
//! ```text
//! # seed=42
//! # model_hash=3f1c…
//! shot,qubit,I,Q,prepared_label
//! 1,0,0.912,0.301,01
//! 1,1,-0.544,0.861,01
//! ```
//!
//! One row per (shot, qubit). Consecutive rows with the same prepared label
//! form one [`ShotSet`]; single-qubit calibration labels (`0`, `1`) are also
//! split by qubit.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::model::IqPoint;
use super::ReadoutError;
use crate::basis;

/// One simultaneous measurement; `iq[k]` belongs to the set's `qubits[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// 1-based shot index.
    pub index: usize,
    pub iq: Vec<IqPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSet {
    /// Prepared basis label, most-significant-first over `qubits` in descending register order.
    pub prepared: String,
    /// Register qubits measured, ascending.
    pub qubits: Vec<usize>,
    pub records: Vec<ShotRecord>,
    pub seed: u64,
}

impl ShotSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Column of `qubit` in each record, if it was measured.
    pub fn column(&self, qubit: usize) -> Option<usize> {
        self.qubits.iter().position(|&q| q == qubit)
    }

    /// IQ samples of `qubit` across all shots.
    pub fn points(&self, qubit: usize) -> Result<Vec<IqPoint>, ReadoutError> {
        let col = self.column(qubit).ok_or(ReadoutError::QubitMissing {
            qubit,
            prepared: self.prepared.clone(),
        })?;
        Ok(self.records.iter().map(|r| r.iq[col]).collect())
    }

    /// Prepared basis index over the measured qubits.
    pub fn prepared_index(&self) -> Result<usize, ReadoutError> {
        let (index, n) =
            basis::parse_label(&self.prepared).map_err(|e| ReadoutError::Label(e.0))?;
        if n != self.qubits.len() {
            return Err(ReadoutError::Label(self.prepared.clone()));
        }
        Ok(index)
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        self.prepared_index()?;
        for (k, r) in self.records.iter().enumerate() {
            if r.index != k + 1 {
                return Err(ReadoutError::Format {
                    line: 0,
                    message: format!("shot {} out of sequence, expected {}", r.index, k + 1),
                });
            }
            if r.iq.len() != self.qubits.len()
                || r.iq.iter().any(|p| !p.i.is_finite() || !p.q.is_finite())
            {
                return Err(ReadoutError::Format {
                    line: 0,
                    message: format!("shot {} malformed", r.index),
                });
            }
        }
        Ok(())
    }
}

/// A CSV shot dump: provenance header plus the sets in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotFile {
    pub seed: u64,
    pub model_hash: String,
    pub sets: Vec<ShotSet>,
}

pub fn write_shot_csv<W: Write>(
    mut out: W,
    seed: u64,
    model_hash: &str,
    sets: &[ShotSet],
) -> std::io::Result<()> {
    writeln!(out, "# seed={seed}")?;
    writeln!(out, "# model_hash={model_hash}")?;
    writeln!(out, "shot,qubit,I,Q,prepared_label")?;
    for set in sets {
        for r in &set.records {
            for (q, p) in set.qubits.iter().zip(&r.iq) {
                writeln!(out, "{},{},{},{},{}", r.index, q, p.i, p.q, set.prepared)?;
            }
        }
    }
    Ok(())
}

fn format_err(line: usize, message: impl Into<String>) -> ReadoutError {
    ReadoutError::Format {
        line,
        message: message.into(),
    }
}

pub fn read_shot_csv<R: Read>(input: R) -> Result<ShotFile, ReadoutError> {
    let reader = BufReader::new(input);
    let mut seed = None;
    let mut model_hash = None;
    let mut header_seen = false;
    let mut sets: Vec<ShotSet> = Vec::new();
    let mut current_shot: Option<usize> = None;

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| format_err(line_no, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                match k.trim() {
                    "seed" => {
                        seed = Some(v.trim().parse::<u64>().map_err(|_| {
                            format_err(line_no, format!("invalid seed {:?}", v.trim()))
                        })?)
                    }
                    "model_hash" => model_hash = Some(v.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["shot", "qubit", "I", "Q", "prepared_label"] {
                return Err(format_err(line_no, format!("unexpected header {line:?}")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(format_err(
                line_no,
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        let shot: usize = cols[0]
            .parse()
            .map_err(|_| format_err(line_no, format!("invalid shot index {:?}", cols[0])))?;
        let qubit: usize = cols[1]
            .parse()
            .map_err(|_| format_err(line_no, format!("invalid qubit {:?}", cols[1])))?;
        let parse_v = |s: &str| -> Result<f64, ReadoutError> {
            let v: f64 = s
                .parse()
                .map_err(|_| format_err(line_no, format!("invalid voltage {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format_err(line_no, format!("non-finite voltage {s:?}")))
            }
        };
        let point = IqPoint::new(parse_v(cols[2])?, parse_v(cols[3])?);
        let label = cols[4];
        basis::parse_label(label).map_err(|e| format_err(line_no, e.to_string()))?;

        let single = label.len() == 1;
        let continues = sets
            .last()
            .is_some_and(|s| s.prepared == label && (!single || s.qubits.first() == Some(&qubit)))
            && (current_shot == Some(shot) || current_shot.map(|c| c + 1) == Some(shot));
        if !continues {
            if shot != 1 {
                return Err(format_err(
                    line_no,
                    format!("set {label:?} does not start at shot 1"),
                ));
            }
            sets.push(ShotSet {
                prepared: label.to_string(),
                qubits: Vec::new(),
                records: Vec::new(),
                seed: 0,
            });
        }
        let set = sets.last_mut().expect("pushed above");
        if current_shot != Some(shot) || !continues {
            if set.records.len() + 1 != shot {
                return Err(format_err(line_no, format!("shot {shot} out of sequence")));
            }
            set.records.push(ShotRecord {
                index: shot,
                iq: Vec::new(),
            });
            current_shot = Some(shot);
        }
        let first_shot = set.records.len() == 1;
        let record = set.records.last_mut().expect("pushed above");
        if first_shot {
            if set.qubits.last().is_some_and(|&q| q >= qubit) {
                return Err(format_err(
                    line_no,
                    "qubits must be listed in ascending order",
                ));
            }
            set.qubits.push(qubit);
        } else if set.qubits.get(record.iq.len()) != Some(&qubit) {
            return Err(format_err(
                line_no,
                format!("unexpected qubit {qubit} in shot {shot}"),
            ));
        }
        record.iq.push(point);
    }
    if !header_seen {
        return Err(format_err(0, "missing column header"));
    }
    let seed = seed.ok_or_else(|| format_err(0, "missing '# seed=' header"))?;
    let model_hash = model_hash.ok_or_else(|| format_err(0, "missing '# model_hash=' header"))?;
    for set in &mut sets {
        set.seed = seed;
        set.validate()?;
    }
    Ok(ShotFile {
        seed,
        model_hash,
        sets,
    })
}
