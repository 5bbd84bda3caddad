//! Pauli-basis vectorisation and Pauli transfer matrices.
//!
//! Operators are expanded as `O = Σ_k c_k P_k` with `c_k = tr(P_k† O)/d`, so
//! both states and observables carry the `1/d` normalisation and
//! `⟨O⟩ = tr(Oρ) = d · Σ_k o_k ρ_k`. A channel's PTM has entries
//! `R_ij = tr(P_i Λ(P_j))/d` and acts on coefficient vectors by matrix product.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, ComplexMatrix, C0};
use crate::pauli::{pauli_basis, PauliIndex};

/// Admission tolerance for unitarity, Hermiticity and Kraus completeness.
pub const ADMISSION_TOL: f64 = 1e-10;

fn dim_for(n_qubits: usize) -> usize {
    4usize.pow(n_qubits as u32)
}

fn qubits_for_hilbert_dim(d: usize) -> Option<usize> {
    (d.is_power_of_two() && d >= 2).then(|| d.trailing_zeros() as usize)
}

fn qubits_for_pauli_dim(d2: usize) -> Option<usize> {
    let q = qubits_for_hilbert_dim(d2)?;
    (q % 2 == 0).then_some(q / 2)
}

/// Trace of `P·O` where `P` is a Pauli string; `P` has one nonzero per row.
fn pauli_trace(p: &ComplexMatrix, o: &ComplexMatrix) -> Complex64 {
    let d = p.rows();
    let mut acc = C0;
    for r in 0..d {
        for c in 0..d {
            let pv = p[(r, c)];
            if pv != C0 {
                acc += pv * o[(c, r)];
            }
        }
    }
    acc
}

/// Real coefficient vector of an operator in the normalised Pauli basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PauliVector {
    pub fn new(n_qubits: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = dim_for(n_qubits);
        if n_qubits == 0 || coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("Pauli coefficient".into()));
        }
        Ok(Self { n_qubits, coeffs })
    }

    /// `|0…0⟩⟨0…0|`: coefficient `1/d` on every string made of `I` and `Z` only.
    pub fn ground_state(n_qubits: usize) -> Self {
        let d = (1usize << n_qubits) as f64;
        let coeffs = (0..dim_for(n_qubits))
            .map(|k| {
                let only_iz = PauliIndex::from_flat(k, n_qubits)
                    .digits()
                    .iter()
                    .all(|&dg| dg == 0 || dg == 3);
                if only_iz {
                    1.0 / d
                } else {
                    0.0
                }
            })
            .collect();
        Self { n_qubits, coeffs }
    }

    /// `|+…+⟩⟨+…+|`: coefficient `1/d` on every string made of `I` and `X` only.
    pub fn plus_state(n_qubits: usize) -> Self {
        let d = (1usize << n_qubits) as f64;
        let coeffs = (0..dim_for(n_qubits))
            .map(|k| {
                let only_ix = PauliIndex::from_flat(k, n_qubits)
                    .digits()
                    .iter()
                    .all(|&dg| dg == 0 || dg == 1);
                if only_ix {
                    1.0 / d
                } else {
                    0.0
                }
            })
            .collect();
        Self { n_qubits, coeffs }
    }

    /// The vector of a single Pauli string observable `P` (coefficient 1).
    pub fn pauli_observable(label: &PauliIndex) -> Self {
        let n = label.n_qubits();
        let mut coeffs = vec![0.0; dim_for(n)];
        coeffs[label.flat()] = 1.0;
        Self { n_qubits: n, coeffs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Applies a `k`-qubit PTM to the listed qubits in place. The first listed
    /// qubit is the most significant digit of the local operator.
    pub fn apply_local(&mut self, local: &Ptm, qubits: &[usize]) {
        apply_local_slice(&mut self.coeffs, self.n_qubits, local, qubits);
    }
}

/// In-place local PTM application on a raw coefficient slice.
pub(crate) fn apply_local_slice(state: &mut [f64], n_qubits: usize, local: &Ptm, qubits: &[usize]) {
    let k = qubits.len();
    assert_eq!(local.n_qubits, k, "local PTM arity");
    assert!(k <= 3 && qubits.iter().all(|&q| q < n_qubits));
    let ld = dim_for(k);
    let mut offsets = [0usize; 64];
    let strides: Vec<usize> = qubits
        .iter()
        .map(|&q| 1usize << (2 * (n_qubits - 1 - q)))
        .collect();
    for (l, off) in offsets.iter_mut().enumerate().take(ld) {
        *off = (0..k)
            .map(|t| ((l >> (2 * (k - 1 - t))) & 3) * strides[t])
            .sum();
    }
    let mask: usize = strides.iter().map(|s| 3 * s).sum();
    let mut buf = [0.0f64; 64];
    let m = &local.data;
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for l in 0..ld {
            buf[l] = state[base + offsets[l]];
        }
        for i in 0..ld {
            let row = &m[i * ld..(i + 1) * ld];
            let mut acc = 0.0;
            for j in 0..ld {
                acc += row[j] * buf[j];
            }
            state[base + offsets[i]] = acc;
        }
    }
}

/// Pauli transfer matrix of an `n`-qubit Hermiticity-preserving map.
#[derive(Clone, Debug, PartialEq)]
pub struct Ptm {
    n_qubits: usize,
    data: Vec<f64>,
}

impl Ptm {
    pub fn identity(n_qubits: usize) -> Self {
        let d = dim_for(n_qubits);
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            data[i * d + i] = 1.0;
        }
        Self { n_qubits, data }
    }

    pub fn from_vec(n_qubits: usize, data: Vec<f64>) -> Result<Self> {
        let d = dim_for(n_qubits);
        if n_qubits == 0 || data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("PTM entry".into()));
        }
        Ok(Self { n_qubits, data })
    }

    /// Single-qubit PTM from literal rows.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Self {
            n_qubits: 1,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diagonal(n_qubits: usize, diag: &[f64]) -> Result<Self> {
        let d = dim_for(n_qubits);
        if diag.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: diag.len(),
            });
        }
        let mut data = vec![0.0; d * d];
        for (i, &v) in diag.iter().enumerate() {
            data[i * d + i] = v;
        }
        Self::from_vec(n_qubits, data)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Side length `4^n`.
    pub fn dim(&self) -> usize {
        dim_for(self.n_qubits)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self {
            n_qubits: self.n_qubits,
            data,
        }
    }

    /// Matrix product `self · rhs` (so `rhs` acts first).
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n_qubits, rhs.n_qubits, "PTM size mismatch");
        let d = self.dim();
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        Self {
            n_qubits: self.n_qubits,
            data,
        }
    }

    pub fn apply(&self, v: &PauliVector) -> Result<PauliVector> {
        if v.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.coeffs.len(),
            });
        }
        let d = self.dim();
        let coeffs = (0..d)
            .map(|i| {
                self.data[i * d..(i + 1) * d]
                    .iter()
                    .zip(&v.coeffs)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(PauliVector {
            n_qubits: self.n_qubits,
            coeffs,
        })
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Max deviation of `RᵀR` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        self.transpose()
            .matmul(self)
            .max_abs_diff(&Ptm::identity(self.n_qubits))
    }

    /// Max deviation of the first row from `(1, 0, …, 0)`.
    pub fn trace_preservation_error(&self) -> f64 {
        (0..self.dim())
            .map(|j| (self.get(0, j) - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// Lifts a local PTM acting on `qubits` into an `n`-qubit PTM.
    pub fn embed(&self, qubits: &[usize], n_qubits: usize) -> Self {
        let d = dim_for(n_qubits);
        let mut data = vec![0.0; d * d];
        let mut col = vec![0.0; d];
        for j in 0..d {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            apply_local_slice(&mut col, n_qubits, self, qubits);
            for i in 0..d {
                data[i * d + j] = col[i];
            }
        }
        Self { n_qubits, data }
    }

    /// Choi matrix `(1/d) Σ_j P_jᵀ ⊗ Λ(P_j)`, built from the PTM alone.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.n_qubits;
        let basis = pauli_basis(n);
        let hd = 1usize << n;
        let mut choi = ComplexMatrix::zeros(hd * hd, hd * hd);
        for (j, pj) in basis.iter().enumerate() {
            let mut image = ComplexMatrix::zeros(hd, hd);
            for (i, pi) in basis.iter().enumerate() {
                let r = self.get(i, j);
                if r != 0.0 {
                    image = &image + &pi.scale(r.into());
                }
            }
            choi = &choi + &pj.transpose().kron(&image);
        }
        choi.scale((1.0 / hd as f64).into())
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.choi())
            .map(|v| v[0])
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Checks complete positivity (Choi spectrum ≥ `-psd_tol`) and trace
    /// preservation (first row `e₁` to `tp_tol`).
    pub fn check_cptp(&self, psd_tol: f64, tp_tol: f64) -> Result<()> {
        let tp = self.trace_preservation_error();
        if tp > tp_tol {
            return Err(Error::Diagnostic(format!(
                "channel is not trace preserving (first-row deviation {tp:.3e})"
            )));
        }
        let min_eig = self.min_choi_eigenvalue();
        if min_eig < -psd_tol {
            return Err(Error::Diagnostic(format!(
                "channel is not completely positive (Choi eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Ptm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        let labels: Vec<String> = (0..d)
            .map(|k| PauliIndex::from_flat(k, self.n_qubits).to_string())
            .collect();
        let w = self.n_qubits.max(2);
        write!(f, "{:w$}", "")?;
        for l in &labels {
            write!(f, " {l:>10}")?;
        }
        writeln!(f)?;
        for i in 0..d {
            write!(f, "{:w$}", labels[i])?;
            for j in 0..d {
                let v = self.get(i, j);
                let v = if v.abs() < 5e-16 { 0.0 } else { v };
                write!(f, " {v:>10.6}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Complex Pauli coefficients `tr(P_k† O)/d` of an arbitrary operator.
pub fn vectorize_complex(op: &ComplexMatrix, n_qubits: usize) -> Result<Vec<Complex64>> {
    let d = 1usize << n_qubits;
    if op.rows() != d || op.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: op.rows(),
        });
    }
    Ok(pauli_basis(n_qubits)
        .iter()
        .map(|p| pauli_trace(p, op) / d as f64)
        .collect())
}

/// Inverse of [`vectorize_complex`].
pub fn devectorize_complex(coeffs: &[Complex64]) -> Result<ComplexMatrix> {
    let n = qubits_for_pauli_dim(coeffs.len()).ok_or(Error::DimensionMismatch {
        expected: 4,
        got: coeffs.len(),
    })?;
    let d = 1usize << n;
    let mut out = ComplexMatrix::zeros(d, d);
    for (c, p) in coeffs.iter().zip(pauli_basis(n)) {
        if *c != C0 {
            out = &out + &p.scale(*c);
        }
    }
    Ok(out)
}

/// Real Pauli vector of a Hermitian operator; fails on imaginary residue.
pub fn vectorize(op: &ComplexMatrix, n_qubits: usize) -> Result<PauliVector> {
    let coeffs = vectorize_complex(op, n_qubits)?;
    let im = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if im > 1e-12 {
        return Err(Error::NotHermitian(im));
    }
    PauliVector::new(n_qubits, coeffs.iter().map(|c| c.re).collect())
}

pub fn devectorize(v: &PauliVector) -> ComplexMatrix {
    let coeffs: Vec<Complex64> = v.coeffs.iter().map(|&c| c.into()).collect();
    devectorize_complex(&coeffs).expect("PauliVector has a valid length")
}

fn ptm_from_images(n_qubits: usize, mut image: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Result<Ptm> {
    let d = 1usize << n_qubits;
    let basis = pauli_basis(n_qubits);
    let dim = basis.len();
    let mut data = vec![0.0; dim * dim];
    let mut worst_im = 0.0f64;
    for (j, pj) in basis.iter().enumerate() {
        let img = image(pj);
        for (i, pi) in basis.iter().enumerate() {
            let v = pauli_trace(pi, &img) / d as f64;
            worst_im = worst_im.max(v.im.abs());
            data[i * dim + j] = v.re;
        }
    }
    if worst_im > ADMISSION_TOL {
        return Err(Error::ComplexPtm(worst_im));
    }
    Ptm::from_vec(n_qubits, data)
}

/// PTM of `ρ ↦ UρU†`.
pub fn ptm_from_unitary(u: &ComplexMatrix) -> Result<Ptm> {
    let n = qubits_for_hilbert_dim(u.rows())
        .filter(|_| u.is_square())
        .ok_or(Error::DimensionMismatch {
            expected: u.rows(),
            got: u.cols(),
        })?;
    let err = u.unitarity_error();
    if err > ADMISSION_TOL {
        return Err(Error::NotUnitary(err));
    }
    let ud = u.adjoint();
    ptm_from_images(n, |p| u.matmul(p).matmul(&ud))
}

/// PTM of `ρ ↦ Σ_m K_m ρ K_m†`, requiring `Σ K†K = I`.
pub fn ptm_from_kraus(kraus: &[ComplexMatrix]) -> Result<Ptm> {
    ptm_from_kraus_with(kraus, true)
}

/// As [`ptm_from_kraus`], optionally skipping the completeness check for
/// deliberately non-trace-preserving maps.
pub fn ptm_from_kraus_with(kraus: &[ComplexMatrix], require_complete: bool) -> Result<Ptm> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidNoise("empty Kraus list".into()))?;
    let d = first.rows();
    let n = qubits_for_hilbert_dim(d).ok_or(Error::DimensionMismatch { expected: 2, got: d })?;
    if let Some(k) = kraus.iter().find(|k| k.rows() != d || k.cols() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: k.rows(),
        });
    }
    if require_complete {
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in kraus {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if err > ADMISSION_TOL {
            return Err(Error::IncompleteKraus(err));
        }
    }
    let adj: Vec<ComplexMatrix> = kraus.iter().map(|k| k.adjoint()).collect();
    ptm_from_images(n, |p| {
        let mut acc = ComplexMatrix::zeros(d, d);
        for (k, kd) in kraus.iter().zip(&adj) {
            acc = &acc + &k.matmul(p).matmul(kd);
        }
        acc
    })
}

/// Composes channels in circuit order: the first element acts first.
pub fn compose(seq: &[Ptm]) -> Result<Ptm> {
    let first = seq
        .first()
        .ok_or_else(|| Error::InvalidModel("empty channel sequence".into()))?;
    let mut acc = first.clone();
    for r in &seq[1..] {
        if r.n_qubits != acc.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: acc.dim(),
                got: r.dim(),
            });
        }
        acc = r.matmul(&acc);
    }
    Ok(acc)
}

/// Kronecker product of PTMs; `a` acts on the most-significant qubits.
pub fn tensor(a: &Ptm, b: &Ptm) -> Ptm {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            data[i * d + j] = a.get(i / db, j / db) * b.get(i % db, j % db);
        }
    }
    Ptm {
        n_qubits: a.n_qubits + b.n_qubits,
        data,
    }
}

/// `⟨M⟩ = d · Σ_j M_j ρ_j`.
pub fn expectation(observable: &PauliVector, rho: &PauliVector) -> Result<f64> {
    if observable.coeffs.len() != rho.coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: observable.coeffs.len(),
            got: rho.coeffs.len(),
        });
    }
    let d = (1usize << rho.n_qubits) as f64;
    Ok(d * observable
        .coeffs
        .iter()
        .zip(&rho.coeffs)
        .map(|(a, b)| a * b)
        .sum::<f64>())
}

/// Phase spectrum `{λ_a − λ_b}` of the superoperator of `e^{-ixH}`, ascending.
pub fn encoding_spectrum(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let (vals, _) = hermitian_eigen(h)?;
    let mut diffs: Vec<f64> = vals
        .iter()
        .flat_map(|a| vals.iter().map(move |b| a - b))
        .collect();
    diffs.sort_by(f64::total_cmp);
    Ok(diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_rotation, CI};
    use crate::oracle::{evolve_density, random_channel, random_hermitian, random_unitary};
    use crate::pauli::{pauli_matrix, Axis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ket0() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])
    }

    #[test]
    fn vectorize_basis_states() {
        let v = vectorize(&ket0(), 1).unwrap();
        assert_eq!(v.coeffs(), &[0.5, 0.0, 0.0, 0.5]);
        let v = vectorize(&ComplexMatrix::identity(2), 1).unwrap();
        assert_eq!(v.coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(PauliVector::ground_state(1).coeffs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn devectorize_basis_states() {
        let v = PauliVector::new(1, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(devectorize(&v).max_abs_diff(&ket0()) < 1e-15);
        let v = PauliVector::new(1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(devectorize(&v).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn vectorize_rejects_wrong_shape() {
        assert!(vectorize(&ComplexMatrix::identity(3), 1).is_err());
        assert!(vectorize(&ComplexMatrix::identity(2), 2).is_err());
        assert!(PauliVector::new(1, vec![0.0; 5]).is_err());
    }

    #[test]
    fn round_trip_random_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let d = 1 << n;
            let h = random_hermitian(d, &mut rng);
            let v = vectorize(&h, n).unwrap();
            assert!(devectorize(&v).max_abs_diff(&h) < 1e-12);

            let g = ComplexMatrix::from_fn(d, d, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let c = vectorize_complex(&g, n).unwrap();
            assert!(devectorize_complex(&c).unwrap().max_abs_diff(&g) < 1e-12);
        }
        let coeffs: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = PauliVector::new(2, coeffs.clone()).unwrap();
        let back = vectorize(&devectorize(&v), 2).unwrap();
        for (a, b) in back.coeffs().iter().zip(&coeffs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_x_ptm() {
        let r = ptm_from_unitary(&pauli_matrix(1)).unwrap();
        let expected = Ptm::diagonal(1, &[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert!(r.max_abs_diff(&expected) < 1e-15);
        let id = ptm_from_unitary(&ComplexMatrix::identity(2)).unwrap();
        assert!(id.max_abs_diff(&Ptm::identity(1)) < 1e-15);
    }

    #[test]
    fn rz_ptm_matches_kraus_route() {
        let u = pauli_rotation(&Axis::Z.matrix(), 0.7);
        let a = ptm_from_unitary(&u).unwrap();
        let b = ptm_from_kraus(&[u]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(a.orthogonality_error() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
        assert!(matches!(ptm_from_unitary(&m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn amplitude_damping_from_kraus() {
        let g: f64 = 0.36;
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]);
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]);
        let r = ptm_from_kraus(&[k0, k1]).unwrap();
        let mut expected = Ptm::diagonal(1, &[1.0, 0.8, 0.8, 0.64]).unwrap();
        expected.set(3, 0, 0.36);
        assert!(r.max_abs_diff(&expected) < 1e-12, "{r}");
    }

    #[test]
    fn incomplete_kraus_rejected_unless_relaxed() {
        let k = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
        assert!(matches!(
            ptm_from_kraus(&[k.clone()]),
            Err(Error::IncompleteKraus(_))
        ));
        let r = ptm_from_kraus_with(&[k], false).unwrap();
        assert!(r.trace_preservation_error() > 0.1);
    }

    #[test]
    fn random_channel_choi_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for rank in 1..=4 {
            let r = ptm_from_kraus(&random_channel(1, rank, &mut rng)).unwrap();
            assert!(r.min_choi_eigenvalue() > -1e-9);
            assert!(r.trace_preservation_error() < 1e-12);
            r.check_cptp(1e-9, 1e-12).unwrap();
        }
        // A transpose map is positive but not completely positive.
        let transpose = Ptm::diagonal(1, &[1.0, 1.0, -1.0, 1.0]).unwrap();
        assert!(transpose.check_cptp(1e-9, 1e-12).is_err());
    }

    #[test]
    fn compose_examples() {
        let x = ptm_from_unitary(&pauli_matrix(1)).unwrap();
        assert!(compose(&[x.clone(), x]).unwrap().max_abs_diff(&Ptm::identity(1)) < 1e-15);
        let z = Axis::Z.matrix();
        let ra = ptm_from_unitary(&pauli_rotation(&z, 0.3)).unwrap();
        let rb = ptm_from_unitary(&pauli_rotation(&z, 1.1)).unwrap();
        let rab = ptm_from_unitary(&pauli_rotation(&z, 1.4)).unwrap();
        assert!(compose(&[ra, rb]).unwrap().max_abs_diff(&rab) < 1e-12);
        assert!(compose(&[]).is_err());
        assert!(compose(&[Ptm::identity(1), Ptm::identity(2)]).is_err());
    }

    #[test]
    fn compose_order_matches_density_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let channels: Vec<Vec<ComplexMatrix>> = (0..5)
                .map(|i| {
                    if i % 2 == 0 {
                        vec![random_unitary(2, &mut rng)]
                    } else {
                        random_channel(1, 2, &mut rng)
                    }
                })
                .collect();
            let ptms: Vec<Ptm> = channels.iter().map(|k| ptm_from_kraus(k).unwrap()).collect();
            let rho0 = ket0();
            let out = compose(&ptms)
                .unwrap()
                .apply(&vectorize(&rho0, 1).unwrap())
                .unwrap();
            let dense = channels.iter().fold(rho0, |rho, k| evolve_density(&rho, k));
            let dv = vectorize(&dense, 1).unwrap();
            for (a, b) in out.coeffs().iter().zip(dv.coeffs()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let ii = tensor(&Ptm::identity(1), &Ptm::identity(1));
        assert!(ii.max_abs_diff(&Ptm::identity(2)) < 1e-15);

        let x = ptm_from_unitary(&pauli_matrix(1)).unwrap();
        let xi = tensor(&x, &Ptm::identity(1));
        let z0 = PauliVector::pauli_observable(&PauliIndex::parse("ZI").unwrap());
        let flipped = xi.apply(&z0).unwrap();
        assert_eq!(flipped.coeffs()[PauliIndex::parse("ZI").unwrap().flat()], -1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ka = random_channel(1, 2, &mut rng);
        let kb = random_channel(1, 3, &mut rng);
        let joint: Vec<ComplexMatrix> = ka
            .iter()
            .flat_map(|a| kb.iter().map(move |b| a.kron(b)))
            .collect();
        let lhs = tensor(&ptm_from_kraus(&ka).unwrap(), &ptm_from_kraus(&kb).unwrap());
        let rhs = ptm_from_kraus(&joint).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn embed_matches_tensor_and_local_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = ptm_from_kraus(&random_channel(1, 2, &mut rng)).unwrap();
        let b = ptm_from_kraus(&random_channel(1, 2, &mut rng)).unwrap();
        let id = Ptm::identity(1);
        let full = tensor(&tensor(&id, &a), &id);
        assert!(a.embed(&[1], 3).max_abs_diff(&full) < 1e-15);
        // Two-qubit local op on non-adjacent, reversed qubits.
        let ab = tensor(&a, &b);
        let full = tensor(&tensor(&b, &id), &a);
        assert!(ab.embed(&[2, 0], 3).max_abs_diff(&full) < 1e-14);
    }

    #[test]
    fn expectation_examples() {
        let rho = PauliVector::ground_state(1);
        let z = PauliVector::pauli_observable(&PauliIndex::parse("Z").unwrap());
        let x = PauliVector::pauli_observable(&PauliIndex::parse("X").unwrap());
        assert!((expectation(&z, &rho).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&x, &rho).unwrap().abs() < 1e-15);
        assert!(expectation(&x, &PauliVector::ground_state(2)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            let d = 1 << n;
            let m = random_hermitian(d, &mut rng);
            let u = random_unitary(d, &mut rng);
            let mut psi = ComplexMatrix::zeros(d, d);
            psi[(0, 0)] = 1.0.into();
            let rho = u.matmul(&psi).matmul(&u.adjoint());
            let dense = m.matmul(&rho).trace();
            assert!(dense.im.abs() < 1e-12);
            let got = expectation(&vectorize(&m, n).unwrap(), &vectorize(&rho, n).unwrap()).unwrap();
            assert!((got - dense.re).abs() < 1e-12);
        }
    }

    #[test]
    fn encoding_spectrum_examples() {
        let half_x = pauli_matrix(1).scale(0.5.into());
        let s = encoding_spectrum(&half_x).unwrap();
        for (a, b) in s.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let s = encoding_spectrum(&pauli_matrix(3)).unwrap();
        for (a, b) in s.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let bad = ComplexMatrix::from_vec(2, 2, vec![C0, CI, CI, C0]).unwrap();
        assert!(encoding_spectrum(&bad).is_err());
    }

    #[test]
    fn encoding_spectrum_random_two_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let h = random_hermitian(2, &mut rng);
            // Closed-form eigenvalues of a 2×2 Hermitian matrix.
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(0, 1)].norm();
            let gap = ((a - d).powi(2) + 4.0 * b * b).sqrt();
            let s = encoding_spectrum(&h).unwrap();
            for (got, want) in s.iter().zip([-gap, 0.0, 0.0, gap]) {
                assert!((got - want).abs() < 1e-12);
            }
        }
    }
}
