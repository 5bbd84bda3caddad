//! Dense density-matrix reference path.
//!
//! Channels are applied as Kraus sums directly on `2ⁿ×2ⁿ` density matrices,
//! with no Pauli-basis step anywhere. Tests use it as an independent check on
//! the PTM pipeline; the random generators produce the test ensembles.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{ComplexMatrix, C0};

/// `ρ ↦ Σ_m K_m ρ K_m†`.
pub fn evolve_density(rho: &ComplexMatrix, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let d = rho.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus {
        out = &out + &k.matmul(rho).matmul(&k.adjoint());
    }
    out
}

/// `tr(Mρ)`, real part.
pub fn dense_expectation(observable: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    observable.matmul(rho).trace().re
}

/// Lifts a local operator on `qubits` (first listed = most significant) to
/// the full `n`-qubit Hilbert space.
pub fn embed_operator(local: &ComplexMatrix, qubits: &[usize], n_qubits: usize) -> ComplexMatrix {
    let k = qubits.len();
    assert_eq!(local.rows(), 1 << k);
    let d = 1usize << n_qubits;
    let bit = |idx: usize, q: usize| (idx >> (n_qubits - 1 - q)) & 1;
    let local_index = |idx: usize| {
        qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit(idx, q))
    };
    let mask: usize = qubits.iter().map(|&q| 1usize << (n_qubits - 1 - q)).sum();
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r & !mask != c & !mask {
            C0
        } else {
            local[(local_index(r), local_index(c))]
        }
    })
}

/// Embeds every operator of a Kraus set.
pub fn embed_kraus(kraus: &[ComplexMatrix], qubits: &[usize], n_qubits: usize) -> Vec<ComplexMatrix> {
    kraus
        .iter()
        .map(|k| embed_operator(k, qubits, n_qubits))
        .collect()
}

/// Kraus set of a product channel `A ⊗ B`.
pub fn kron_kraus(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    a.iter()
        .flat_map(|ka| b.iter().map(move |kb| ka.kron(kb)))
        .collect()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

/// Orthonormalises the columns of `m` (modified Gram–Schmidt).
fn orthonormal_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<Complex64> = (0..rows).map(|i| m[(i, j)]).collect();
        for u in &q {
            let ov: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ov * ui;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= nrm);
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    orthonormal_columns(&random_gaussian_matrix(d, d, rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_gaussian_matrix(d, d, rng);
    (&g + &g.adjoint()).scale(0.5.into())
}

/// Kraus operators of a random `n`-qubit CPTP channel with `rank` terms,
/// sliced from a random isometry.
pub fn random_channel<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let d = 1usize << n_qubits;
    let iso = orthonormal_columns(&random_gaussian_matrix(d * rank, d, rng));
    (0..rank)
        .map(|m| ComplexMatrix::from_fn(d, d, |i, j| iso[(m * d + i, j)]))
        .collect()
}

/// Density matrix `|ψ⟩⟨ψ|` of a computational basis state.
pub fn basis_density(n_qubits: usize, index: usize) -> ComplexMatrix {
    let d = 1usize << n_qubits;
    let mut rho = ComplexMatrix::zeros(d, d);
    rho[(index, index)] = 1.0.into();
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_channel_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=2 {
            let ks = random_channel(n, 3, &mut rng);
            let d = 1 << n;
            let mut sum = ComplexMatrix::zeros(d, d);
            for k in &ks {
                sum = &sum + &k.adjoint().matmul(k);
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        }
        assert!(random_unitary(4, &mut rng).unitarity_error() < 1e-12);
    }

    #[test]
    fn embed_operator_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_unitary(2, &mut rng);
        let id = ComplexMatrix::identity(2);
        let full = id.kron(&a).kron(&id);
        assert!(embed_operator(&a, &[1], 3).max_abs_diff(&full) < 1e-15);
        let ab = random_unitary(4, &mut rng);
        // Reversed order on adjacent qubits equals swap-conjugated kron.
        let e = embed_operator(&ab, &[0, 1], 2);
        assert!(e.max_abs_diff(&ab) < 1e-15);
    }
}
