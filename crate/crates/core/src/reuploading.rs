//! Single-qubit data re-uploading model.
//!
//! Circuit for `L` layers, left to right in time:
//! `W₁ N S(x) N W₂ N S(x) N … W_{L+1} N`, with `N` the noise channel.
//! Standard variant: `W = Rz·Ry·Rz`, `S(x) = Rx(x)`, start in `|0⟩`,
//! measure `Z`. The `x_swapped` variant exchanges the X and Z axes
//! everywhere, including preparation in `|+⟩` and measurement of `X`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::channels::{realize, NoiseKind, NoiseSpec, Twirl};
use crate::error::{Error, Result};
use crate::gates::rotation;
use crate::linalg::ComplexMatrix;
use crate::oracle::{dense_expectation, evolve_density};
use crate::pauli::Axis;
use crate::ptm::Ptm;

pub const MAX_LAYERS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisVariant {
    #[default]
    Standard,
    XSwapped,
}

impl BasisVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisVariant::Standard => "standard",
            BasisVariant::XSwapped => "x_swapped",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(BasisVariant::Standard),
            "x_swapped" => Ok(BasisVariant::XSwapped),
            other => Err(Error::InvalidModel(format!("unknown basis variant `{other}`"))),
        }
    }

    /// Outer axis of every trainable block (`Rz·Ry·Rz` → Z).
    pub fn block_axis(self) -> Axis {
        match self {
            BasisVariant::Standard => Axis::Z,
            BasisVariant::XSwapped => Axis::X,
        }
    }

    pub fn encoding_axis(self) -> Axis {
        match self {
            BasisVariant::Standard => Axis::X,
            BasisVariant::XSwapped => Axis::Z,
        }
    }

    /// Preparation and measurement axis.
    pub fn readout_axis(self) -> Axis {
        self.block_axis()
    }
}

pub(crate) type M4 = [[f64; 4]; 4];

fn ptm_to_m4(r: &Ptm) -> M4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = r.get(i, j);
        }
    }
    m
}

fn m4_apply(m: &M4, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

/// `r ↦ r·m` for a row vector.
fn m4_apply_row(m: &M4, r: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (j, o) in out.iter_mut().enumerate() {
        *o = r[0] * m[0][j] + r[1] * m[1][j] + r[2] * m[2][j] + r[3] * m[3][j];
    }
    out
}

/// Components `(a, b)` of the plane rotated by a Pauli rotation about `axis`,
/// ordered so that `a' = c·a − s·b`, `b' = s·a + c·b`.
fn plane(axis: Axis) -> (usize, usize) {
    match axis {
        Axis::X => (2, 3),
        Axis::Y => (3, 1),
        Axis::Z => (1, 2),
    }
}

fn rot_apply(axis: Axis, angle: f64, v: &mut [f64; 4]) {
    let (s, c) = angle.sin_cos();
    let (a, b) = plane(axis);
    let (va, vb) = (v[a], v[b]);
    v[a] = c * va - s * vb;
    v[b] = s * va + c * vb;
}

fn rot_apply_row(axis: Axis, angle: f64, r: &mut [f64; 4]) {
    let (s, c) = angle.sin_cos();
    let (a, b) = plane(axis);
    let (ra, rb) = (r[a], r[b]);
    r[a] = c * ra + s * rb;
    r[b] = -s * ra + c * rb;
}

#[derive(Clone, Copy, Debug)]
enum Gate {
    /// Rotation by `θ[param]`.
    Param(Axis, usize),
    /// Encoding rotation by `x`.
    Encode(Axis),
    Noise,
}

/// A re-uploading model with fixed noise; only `theta` changes during training.
#[derive(Clone, Debug)]
pub struct ReuploadModel {
    layers: usize,
    theta: Vec<f64>,
    noise: NoiseSpec,
    variant: BasisVariant,
    noise_ptm: Option<M4>,
    gates: Vec<Gate>,
}

impl ReuploadModel {
    pub fn new(layers: usize, theta: Vec<f64>, noise: NoiseSpec, variant: BasisVariant) -> Result<Self> {
        if !(1..=MAX_LAYERS).contains(&layers) {
            return Err(Error::InvalidModel(format!(
                "layer count {layers} outside 1..={MAX_LAYERS}"
            )));
        }
        let n = Self::param_count(layers);
        if theta.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: theta.len(),
            });
        }
        check_finite(&theta)?;
        let r = realize(&noise)?;
        let noise_ptm = if r == Ptm::identity(1) {
            None
        } else {
            Some(ptm_to_m4(&r))
        };
        let block = variant.block_axis();
        let mut gates = Vec::new();
        for l in 0..=layers {
            gates.push(Gate::Param(block, 3 * l));
            gates.push(Gate::Param(Axis::Y, 3 * l + 1));
            gates.push(Gate::Param(block, 3 * l + 2));
            gates.push(Gate::Noise);
            if l < layers {
                gates.push(Gate::Encode(variant.encoding_axis()));
                gates.push(Gate::Noise);
            }
        }
        Ok(Self {
            layers,
            theta,
            noise,
            variant,
            noise_ptm,
            gates,
        })
    }

    /// Model with all angles zero.
    pub fn zeros(layers: usize, noise: NoiseSpec, variant: BasisVariant) -> Result<Self> {
        Self::new(layers, vec![0.0; Self::param_count(layers)], noise, variant)
    }

    pub fn param_count(layers: usize) -> usize {
        3 * (layers + 1)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn variant(&self) -> BasisVariant {
        self.variant
    }

    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.theta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.theta.len(),
                got: theta.len(),
            });
        }
        check_finite(theta)?;
        self.theta.copy_from_slice(theta);
        Ok(())
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        let mut m = self.clone();
        m.set_theta(&theta)?;
        Ok(m)
    }

    /// Same angles with a different noise channel.
    pub fn with_noise(&self, noise: NoiseSpec) -> Result<Self> {
        Self::new(self.layers, self.theta.clone(), noise, self.variant)
    }

    fn initial_bloch(&self) -> [f64; 4] {
        let mut v = [1.0, 0.0, 0.0, 0.0];
        v[self.variant.readout_axis().digit() as usize] = 1.0;
        v
    }

    fn readout_row(&self) -> [f64; 4] {
        let mut r = [0.0; 4];
        r[self.variant.readout_axis().digit() as usize] = 1.0;
        r
    }

    fn apply_gate(&self, g: Gate, theta: &[f64], x: f64, v: &mut [f64; 4]) {
        match g {
            Gate::Param(axis, i) => rot_apply(axis, theta[i], v),
            Gate::Encode(axis) => rot_apply(axis, x, v),
            Gate::Noise => {
                if let Some(n) = &self.noise_ptm {
                    *v = m4_apply(n, v);
                }
            }
        }
    }

    fn apply_gate_row(&self, g: Gate, theta: &[f64], x: f64, r: &mut [f64; 4]) {
        match g {
            Gate::Param(axis, i) => rot_apply_row(axis, theta[i], r),
            Gate::Encode(axis) => rot_apply_row(axis, x, r),
            Gate::Noise => {
                if let Some(n) = &self.noise_ptm {
                    *r = m4_apply_row(n, r);
                }
            }
        }
    }

    /// Noisy output `f̃(x, θ)`.
    pub fn forward(&self, x: f64) -> f64 {
        self.forward_with(&self.theta, x)
    }

    /// Output at alternative angles, same noise and structure.
    pub fn forward_with(&self, theta: &[f64], x: f64) -> f64 {
        let mut v = self.initial_bloch();
        for &g in &self.gates {
            self.apply_gate(g, theta, x, &mut v);
        }
        v[self.variant.readout_axis().digit() as usize]
    }

    /// PTM of the whole circuit at input `x`.
    pub fn circuit_ptm(&self, x: f64) -> Ptm {
        let mut cols = [[0.0; 4]; 4];
        for (j, col) in cols.iter_mut().enumerate() {
            let mut v = [0.0; 4];
            v[j] = 1.0;
            for &g in &self.gates {
                self.apply_gate(g, &self.theta, x, &mut v);
            }
            *col = v;
        }
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = cols[j][i];
            }
        }
        Ptm::from_rows(rows)
    }

    /// Parameter-shift gradient `∂f̃/∂θᵢ` for every angle.
    ///
    /// Prefix states and suffix read-out rows are cached so each shifted
    /// evaluation only recomputes its own gate.
    pub fn gradient(&self, x: f64) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.gates.len() + 1);
        let mut v = self.initial_bloch();
        prefix.push(v);
        for &g in &self.gates {
            self.apply_gate(g, &self.theta, x, &mut v);
            prefix.push(v);
        }
        let mut grad = vec![0.0; self.theta.len()];
        let mut r = self.readout_row();
        for (k, &g) in self.gates.iter().enumerate().rev() {
            if let Gate::Param(axis, i) = g {
                let before = &prefix[k];
                let shifted = |delta: f64| {
                    let mut s = *before;
                    rot_apply(axis, self.theta[i] + delta, &mut s);
                    s.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>()
                };
                grad[i] = 0.5 * (shifted(FRAC_PI_2) - shifted(-FRAC_PI_2));
            }
            self.apply_gate_row(g, &self.theta, x, &mut r);
        }
        grad
    }

    /// Single component of the gradient via two full shifted evaluations.
    pub fn gradient_component(&self, x: f64, index: usize) -> Result<f64> {
        if index >= self.theta.len() {
            return Err(Error::OutOfRange(format!("parameter index {index}")));
        }
        let mut t = self.theta.clone();
        t[index] += FRAC_PI_2;
        let plus = self.forward_with(&t, x);
        t[index] -= 2.0 * FRAC_PI_2;
        let minus = self.forward_with(&t, x);
        Ok(0.5 * (plus - minus))
    }

    /// Central finite-difference gradient, used as a check on parameter shift.
    pub fn gradient_finite_difference(&self, x: f64, h: f64) -> Vec<f64> {
        (0..self.theta.len())
            .map(|i| {
                let mut t = self.theta.clone();
                t[i] += h;
                let plus = self.forward_with(&t, x);
                t[i] -= 2.0 * h;
                let minus = self.forward_with(&t, x);
                (plus - minus) / (2.0 * h)
            })
            .collect()
    }

    /// Output computed on the 2×2 density matrix with Kraus operators,
    /// independent of the PTM path.
    pub fn forward_dense(&self, x: f64) -> Result<f64> {
        let kraus = self.noise.kraus()?;
        let axis = self.variant.readout_axis();
        let m = axis.matrix();
        let mut rho = (&ComplexMatrix::identity(2) + &m).scale(0.5.into());
        for &g in &self.gates {
            rho = match g {
                Gate::Param(a, i) => evolve_density(&rho, &[rotation(a, self.theta[i])]),
                Gate::Encode(a) => evolve_density(&rho, &[rotation(a, x)]),
                Gate::Noise => evolve_density(&rho, &kraus),
            };
        }
        Ok(dense_expectation(&m, &rho))
    }

    /// Noiseless model equivalent to this coherently-noisy one.
    ///
    /// Only defined when the noise is an untwirled rotation about the block
    /// axis, which merges into the neighbouring outer rotations.
    pub fn absorb_coherent(&self) -> Result<Self> {
        if self.noise.kind != NoiseKind::Coherent || self.noise.twirl != Twirl::None {
            return Err(Error::Unsupported(
                "absorption needs untwirled coherent noise".into(),
            ));
        }
        if self.noise.coherent_axis != self.variant.block_axis() {
            return Err(Error::Unsupported(format!(
                "coherent axis {} does not match block axis {}",
                self.noise.coherent_axis,
                self.variant.block_axis()
            )));
        }
        let theta = coherent_shift(&self.theta, self.layers, self.noise.angle());
        Self::new(self.layers, theta, NoiseSpec::none(), self.variant)
    }
}

/// `h(θ)`: absorbs a block-axis rotation by `delta` after every block.
///
/// The rotation after `W_l` merges into the last outer angle of `W_l`; the
/// one after each encoding merges into the first outer angle of the next block.
pub fn coherent_shift(theta: &[f64], layers: usize, delta: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    for l in 0..=layers {
        t[3 * l + 2] += delta;
        if l > 0 {
            t[3 * l] += delta;
        }
    }
    t
}

fn check_finite(theta: &[f64]) -> Result<()> {
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("model angles".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::Twirl;
    use crate::rng::{trial_rng, uniform_angles};
    use rand::Rng;

    fn random_model(seed: u64, layers: usize, noise: NoiseSpec, variant: BasisVariant) -> ReuploadModel {
        let mut rng = trial_rng(seed, "model-test", layers as u64);
        let theta = uniform_angles(&mut rng, ReuploadModel::param_count(layers));
        ReuploadModel::new(layers, theta, noise, variant).unwrap()
    }

    fn noise_zoo() -> Vec<NoiseSpec> {
        vec![
            NoiseSpec::none(),
            NoiseSpec::amplitude_damping(0.2),
            NoiseSpec::amplitude_damping(0.2).with_twirl(Twirl::Pauli),
            NoiseSpec::amplitude_damping(0.2).with_twirl(Twirl::Clifford),
            NoiseSpec::reversed_amplitude_damping(0.3),
            NoiseSpec::pauli(0.05, 0.02, 0.1),
            NoiseSpec::depolarizing(0.15),
            NoiseSpec::coherent(Axis::Z, 0.4),
            NoiseSpec::coherent(Axis::Y, 0.4),
        ]
    }

    #[test]
    fn zero_angles_give_identity_at_zero_input() {
        let m = ReuploadModel::zeros(1, NoiseSpec::none(), BasisVariant::Standard).unwrap();
        assert!(m.circuit_ptm(0.0).max_abs_diff(&Ptm::identity(1)) < 1e-15);
    }

    #[test]
    fn zero_angles_give_cosine() {
        for layers in 1..=4 {
            let m = ReuploadModel::zeros(layers, NoiseSpec::none(), BasisVariant::Standard).unwrap();
            for &x in &[0.0, 0.3, 1.7, -2.2] {
                assert!((m.forward(x) - (layers as f64 * x).cos()).abs() < 1e-14);
            }
        }
        let m = ReuploadModel::zeros(2, NoiseSpec::none(), BasisVariant::XSwapped).unwrap();
        assert!((m.forward(0.9) - (1.8f64).cos()).abs() < 1e-14);
    }

    #[test]
    fn noiseless_circuit_is_orthogonal() {
        for v in [BasisVariant::Standard, BasisVariant::XSwapped] {
            let m = random_model(1, 3, NoiseSpec::none(), v);
            assert!(m.circuit_ptm(0.77).orthogonality_error() < 1e-13);
        }
    }

    #[test]
    fn full_damping_pins_output() {
        for seed in 0..5 {
            let m = random_model(seed, 2, NoiseSpec::amplitude_damping(1.0), BasisVariant::Standard);
            assert!((m.forward(1.3) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_matches_dense_oracle() {
        for v in [BasisVariant::Standard, BasisVariant::XSwapped] {
            for (k, noise) in noise_zoo().into_iter().enumerate() {
                let m = random_model(k as u64, 2, noise, v);
                for &x in &[0.0, 1.1, -3.0] {
                    let a = m.forward(x);
                    let b = m.forward_dense(x).unwrap();
                    assert!((a - b).abs() < 1e-12, "{} {a} {b}", m.noise());
                    assert!(a.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn circuit_ptm_reproduces_forward() {
        let m = random_model(3, 2, NoiseSpec::amplitude_damping(0.3), BasisVariant::Standard);
        let r = m.circuit_ptm(0.4);
        // f = (Z row of R)·(1, 0, 0, 1) in Bloch coordinates.
        let f = r.get(3, 0) + r.get(3, 3);
        assert!((f - m.forward(0.4)).abs() < 1e-14);
    }

    #[test]
    fn parameter_shift_matches_finite_differences() {
        let mut rng = trial_rng(5, "xs", 0);
        for v in [BasisVariant::Standard, BasisVariant::XSwapped] {
            for (k, noise) in noise_zoo().into_iter().enumerate() {
                let m = random_model(10 + k as u64, 2, noise, v);
                let x = rng.gen_range(0.0..6.0);
                let ps = m.gradient(x);
                let fd = m.gradient_finite_difference(x, 1e-6);
                for (i, (a, b)) in ps.iter().zip(&fd).enumerate() {
                    assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3), "{i}: {a} {b}");
                    assert!((a - m.gradient_component(x, i).unwrap()).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_input_final_rotation_gradient() {
        let m = ReuploadModel::zeros(1, NoiseSpec::none(), BasisVariant::Standard).unwrap();
        let g = m.gradient(0.0);
        assert!(g[4].abs() < 1e-15);
    }

    #[test]
    fn coherent_absorption_identity() {
        let mut rng = trial_rng(9, "absorb", 0);
        for v in [BasisVariant::Standard, BasisVariant::XSwapped] {
            for layers in 1..=4 {
                let delta = rng.gen_range(-1.0..1.0);
                let noise = NoiseSpec::coherent(v.block_axis(), delta);
                let m = random_model(layers as u64, layers, noise, v);
                let clean = m.absorb_coherent().unwrap();
                for _ in 0..10 {
                    let x = rng.gen_range(-6.0..6.0);
                    assert!((m.forward(x) - clean.forward(x)).abs() < 1e-12);
                }
            }
        }
        let m = random_model(0, 2, NoiseSpec::coherent(Axis::Y, 0.1), BasisVariant::Standard);
        assert!(m.absorb_coherent().is_err());
    }

    #[test]
    fn rejects_bad_models() {
        assert!(ReuploadModel::zeros(0, NoiseSpec::none(), BasisVariant::Standard).is_err());
        assert!(ReuploadModel::zeros(7, NoiseSpec::none(), BasisVariant::Standard).is_err());
        assert!(ReuploadModel::new(1, vec![0.0; 5], NoiseSpec::none(), BasisVariant::Standard).is_err());
        assert!(ReuploadModel::new(1, vec![f64::NAN; 6], NoiseSpec::none(), BasisVariant::Standard).is_err());
    }

    #[test]
    fn zero_strength_noise_is_bitwise_noiseless() {
        let clean = random_model(4, 2, NoiseSpec::none(), BasisVariant::Standard);
        for noise in [
            NoiseSpec::amplitude_damping(0.0),
            NoiseSpec::amplitude_damping(0.0).with_twirl(Twirl::Pauli),
            NoiseSpec::amplitude_damping(0.0).with_twirl(Twirl::Clifford),
            NoiseSpec::depolarizing(0.0),
        ] {
            let m = clean.with_noise(noise).unwrap();
            assert_eq!(m.gradient(0.3), clean.gradient(0.3));
        }
    }
}
