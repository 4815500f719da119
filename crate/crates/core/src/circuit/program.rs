//! Line-oriented gate programs.
//!
//! One gate per line, `GATE qubit [qubit|angle_radians]`; gate names are
//! case-insensitive and `#` starts a comment:
//!
//! ```text
//! # Hadamard on the control, then CNOT onto the target
//! H 1
//! CNOT 1 0
//! RY 0 1.5707963268
//! CZ 0 1
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gates::Rotation;
use super::state::QuantumState;
use super::CircuitError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    H { qubit: usize },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState, CircuitError> {
        match *self {
            Gate::Rx { qubit, angle } => state.apply_rotation(qubit, Rotation::x(angle)),
            Gate::Ry { qubit, angle } => state.apply_rotation(qubit, Rotation::y(angle)),
            Gate::Rz { qubit, angle } => state.apply_rotation(qubit, Rotation::z(angle)),
            Gate::H { qubit } => state.apply_hadamard(qubit),
            Gate::Cz { a, b } => state.apply_cz(a, b),
            Gate::Cnot { control, target } => state.apply_cnot(control, target),
        }
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => qubit,
            Gate::H { qubit } => qubit,
            Gate::Cz { a, b } => a.max(b),
            Gate::Cnot { control, target } => control.max(target),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rx { qubit, angle } => write!(f, "RX {qubit} {angle}"),
            Gate::Ry { qubit, angle } => write!(f, "RY {qubit} {angle}"),
            Gate::Rz { qubit, angle } => write!(f, "RZ {qubit} {angle}"),
            Gate::H { qubit } => write!(f, "H {qubit}"),
            Gate::Cz { a, b } => write!(f, "CZ {a} {b}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// An ordered gate list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    /// Hadamard on the control followed by CNOT(control → target).
    pub fn bell() -> Self {
        use crate::basis::{CONTROL, TARGET};
        Self::new(vec![
            Gate::H { qubit: CONTROL },
            Gate::Cnot {
                control: CONTROL,
                target: TARGET,
            },
        ])
    }

    pub fn cnot() -> Self {
        use crate::basis::{CONTROL, TARGET};
        Self::new(vec![Gate::Cnot {
            control: CONTROL,
            target: TARGET,
        }])
    }

    /// Parses the line-oriented text format. Errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        let mut gates = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            gates.push(parse_gate(line).map_err(|message| CircuitError::Parse {
                line: n + 1,
                message,
            })?);
        }
        Ok(Self { gates })
    }

    /// Highest register index referenced plus one.
    pub fn width(&self) -> usize {
        self.gates
            .iter()
            .map(|g| g.max_qubit() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn run(&self, initial: &QuantumState) -> Result<QuantumState, CircuitError> {
        self.gates
            .iter()
            .try_fold(initial.clone(), |state, gate| gate.apply(&state))
    }

    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn parse_gate(line: &str) -> Result<Gate, String> {
    let mut parts = line.split_whitespace();
    let name = parts.next().ok_or("empty gate line")?.to_ascii_uppercase();
    let args: Vec<&str> = parts.collect();
    let expect = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!(
                "{name} takes {n} argument{}, found {}",
                if n == 1 { "" } else { "s" },
                args.len()
            ))
        }
    };
    match name.as_str() {
        "RX" | "RY" | "RZ" => {
            expect(2)?;
            let qubit = parse_qubit(args[0])?;
            let angle = parse_angle(args[1])?;
            Ok(match name.as_str() {
                "RX" => Gate::Rx { qubit, angle },
                "RY" => Gate::Ry { qubit, angle },
                _ => Gate::Rz { qubit, angle },
            })
        }
        "H" => {
            expect(1)?;
            Ok(Gate::H {
                qubit: parse_qubit(args[0])?,
            })
        }
        "CZ" => {
            expect(2)?;
            let (a, b) = (parse_qubit(args[0])?, parse_qubit(args[1])?);
            if a == b {
                return Err(format!("CZ needs two distinct qubits, got {a} twice"));
            }
            Ok(Gate::Cz { a, b })
        }
        "CNOT" | "CX" => {
            expect(2)?;
            let (control, target) = (parse_qubit(args[0])?, parse_qubit(args[1])?);
            if control == target {
                return Err(format!("CNOT control and target are both {control}"));
            }
            Ok(Gate::Cnot { control, target })
        }
        other => Err(format!("unknown gate {other:?}")),
    }
}

fn parse_qubit(s: &str) -> Result<usize, String> {
    let q: usize = s
        .parse()
        .map_err(|_| format!("invalid qubit index {s:?}"))?;
    if q >= super::state::MAX_QUBITS {
        return Err(format!("qubit index {q} exceeds register limit"));
    }
    Ok(q)
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid angle {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("angle {s:?} is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_examples() {
        let c = Circuit::parse(
            "RY 0 1.5707963268\nCZ 0 1\n  h 1  # trailing\n\n# only comment\ncnot 1 0",
        )
        .unwrap();
        assert_eq!(c.gates.len(), 4);
        assert_eq!(c.gates[2], Gate::H { qubit: 1 });
        assert_eq!(c.width(), 2);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Circuit::parse("H 0\nRX 0\n").unwrap_err();
        assert!(matches!(err, CircuitError::Parse { line: 2, .. }), "{err}");
        for bad in [
            "FOO 1", "RX a 1.0", "RX 0 nan", "RZ 0 inf", "CZ 1 1", "H 0 1", "CNOT 2 2",
        ] {
            assert!(Circuit::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn text_round_trips() {
        let c =
            Circuit::parse("H 1\nRX 0 0.7853981633974483\nRX 0 3.141592653589793\nCZ 1 0").unwrap();
        assert_eq!(Circuit::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn empty_program_is_identity() {
        let s = QuantumState::from_label("00").unwrap();
        assert_eq!(Circuit::parse("").unwrap().run(&s).unwrap(), s);
    }
}
