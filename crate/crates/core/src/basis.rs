//! Register layout and basis-state labels.
//!
//! The two-qubit register is `{control, target} = {Q2, Q0}`. Register index 1
//! is the control qubit Q2 and is the *high* bit of a basis index; register
//! index 0 is the target qubit Q0 and is the *low* bit. Labels are written
//! most-significant-first, so `"10"` means Q2 in |1⟩ and Q0 in |0⟩ (index 2).
//!
//! Every other module (state vectors, joint outcomes, probability matrices,
//! the Kronecker product of single-qubit matrices) uses this ordering.

use std::fmt;

/// Register index of the target qubit Q0 (low bit).
pub const TARGET: usize = 0;
/// Register index of the control qubit Q2 (high bit).
pub const CONTROL: usize = 1;

/// Physical name of a register qubit in the two-qubit subregister.
pub fn physical_name(qubit: usize) -> &'static str {
    match qubit {
        TARGET => "Q0",
        CONTROL => "Q2",
        _ => "Q?",
    }
}

/// Value of `qubit`'s bit in basis index `index`.
#[inline]
pub fn bit(index: usize, qubit: usize) -> u8 {
    ((index >> qubit) & 1) as u8
}

/// Basis index assembled from per-qubit bits, `bits[k]` being register qubit `k`.
pub fn index_from_bits(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (k, &b)| acc | ((b as usize & 1) << k))
}

/// Label of basis index `index` on `num_qubits` qubits, most-significant-first.
pub fn label(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|q| if bit(index, q) == 1 { '1' } else { '0' })
        .collect()
}

/// All labels of an `num_qubits` register in index order.
pub fn labels(num_qubits: usize) -> Vec<String> {
    (0..1usize << num_qubits)
        .map(|i| label(i, num_qubits))
        .collect()
}

/// Parse a most-significant-first label such as `"01"` into a basis index.
pub fn parse_label(text: &str) -> Result<(usize, usize), LabelError> {
    let text = text.trim();
    let text = text
        .strip_prefix('|')
        .and_then(|t| t.strip_suffix('>').or_else(|| t.strip_suffix('⟩')))
        .unwrap_or(text);
    if text.is_empty() || text.len() > 16 {
        return Err(LabelError(text.to_string()));
    }
    let mut index = 0usize;
    for c in text.chars() {
        index <<= 1;
        match c {
            '0' => {}
            '1' => index |= 1,
            _ => return Err(LabelError(text.to_string())),
        }
    }
    Ok((index, text.len()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelError(pub String);

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid basis-state label {:?}", self.0)
    }
}

impl std::error::Error for LabelError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_is_high_bit() {
        assert_eq!(index_from_bits(&[0, 1]), 2);
        assert_eq!(label(2, 2), "10");
        assert_eq!(bit(2, CONTROL), 1);
        assert_eq!(bit(2, TARGET), 0);
    }

    #[test]
    fn labels_round_trip() {
        for (i, l) in labels(2).iter().enumerate() {
            assert_eq!(parse_label(l).unwrap(), (i, 2));
        }
        assert_eq!(parse_label("|11⟩").unwrap(), (3, 2));
        assert_eq!(parse_label("|01>").unwrap(), (1, 2));
        assert!(parse_label("12").is_err());
        assert!(parse_label("").is_err());
    }
}
