//! Pauli operators and the base-4 indexing of Pauli strings.
//!
//! Ordering contract: digits `0..3` map to `I, X, Y, Z`, and qubit 0 is the
//! most significant digit. The same convention fixes computational-basis
//! indices (qubit 0 is the most significant bit) and Kronecker factors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C0, C1, CI};

/// A single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Pauli digit of this axis in the `I, X, Y, Z` ordering.
    pub fn digit(self) -> u8 {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        pauli_matrix(self.digit())
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(Axis::X),
            "Y" => Ok(Axis::Y),
            "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidNoise(format!("unknown axis `{other}`"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(c)
    }
}

/// 2×2 matrix of the Pauli with digit `d` (0 = I, 1 = X, 2 = Y, 3 = Z).
pub fn pauli_matrix(d: u8) -> ComplexMatrix {
    let data = match d {
        0 => vec![C1, C0, C0, C1],
        1 => vec![C0, C1, C1, C0],
        2 => vec![C0, -CI, CI, C0],
        3 => vec![C1, C0, C0, -C1],
        _ => panic!("Pauli digit out of range: {d}"),
    };
    ComplexMatrix::from_vec(2, 2, data).expect("static shape")
}

/// Base-4 label of an n-qubit Pauli string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    digits: Vec<u8>,
}

impl PauliIndex {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::OutOfRange("empty Pauli string".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 3) {
            return Err(Error::OutOfRange(format!("Pauli digit {d}")));
        }
        Ok(Self { digits })
    }

    pub fn from_flat(index: usize, n_qubits: usize) -> Self {
        assert!(index < 4usize.pow(n_qubits as u32));
        let digits = (0..n_qubits)
            .map(|q| ((index >> (2 * (n_qubits - 1 - q))) & 3) as u8)
            .collect();
        Self { digits }
    }

    /// Parses a label such as `"ZIZ"`.
    pub fn parse(label: &str) -> Result<Self> {
        let digits = label
            .chars()
            .map(|c| match c {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(Error::OutOfRange(format!("Pauli label `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits)
    }

    pub fn n_qubits(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn flat(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * 4 + d as usize)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.digits[1..]
            .iter()
            .fold(pauli_matrix(self.digits[0]), |acc, &d| acc.kron(&pauli_matrix(d)))
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            f.write_str(["I", "X", "Y", "Z"][*d as usize])?;
        }
        Ok(())
    }
}

/// All `4^n` Pauli-string matrices in flat-index order.
pub fn pauli_basis(n_qubits: usize) -> Vec<ComplexMatrix> {
    (0..4usize.pow(n_qubits as u32))
        .map(|k| PauliIndex::from_flat(k, n_qubits).matrix())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_round_trip() {
        for k in 0..64 {
            let p = PauliIndex::from_flat(k, 3);
            assert_eq!(p.flat(), k);
        }
        assert_eq!(PauliIndex::parse("ZIX").unwrap().flat(), 3 * 16 + 1);
        assert_eq!(PauliIndex::from_flat(3 * 16 + 1, 3).to_string(), "ZIX");
    }

    #[test]
    fn bad_labels() {
        assert!(PauliIndex::parse("ZQ").is_err());
        assert!(PauliIndex::new(vec![4]).is_err());
        assert!(PauliIndex::new(vec![]).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // Z on qubit 0 of two qubits is diag(1, 1, -1, -1).
        let z0 = PauliIndex::parse("ZI").unwrap().matrix();
        let diag: Vec<f64> = (0..4).map(|i| z0[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn paulis_are_hermitian_involutions() {
        for p in pauli_basis(2) {
            assert!(p.hermiticity_error() < 1e-15);
            assert!(p.matmul(&p).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
    }
}
