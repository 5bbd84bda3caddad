//! Single-qubit noise channels, twirls, and twirl-equivalent channels.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{hadamard, phase_s, rotation, rotation_ptm};
use crate::linalg::ComplexMatrix;
use crate::pauli::{pauli_matrix, Axis};
use crate::ptm::{ptm_from_unitary, Ptm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    AmplitudeDamping,
    ReversedAmplitudeDamping,
    Pauli,
    Depolarizing,
    Coherent,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::ReversedAmplitudeDamping => "reversed_amplitude_damping",
            NoiseKind::Pauli => "pauli",
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Coherent => "coherent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "none" => NoiseKind::None,
            "amplitude_damping" => NoiseKind::AmplitudeDamping,
            "reversed_amplitude_damping" => NoiseKind::ReversedAmplitudeDamping,
            "pauli" => NoiseKind::Pauli,
            "depolarizing" => NoiseKind::Depolarizing,
            "coherent" => NoiseKind::Coherent,
            other => return Err(Error::InvalidNoise(format!("unknown noise kind `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Twirl {
    #[default]
    None,
    Pauli,
    Clifford,
}

impl Twirl {
    pub fn as_str(self) -> &'static str {
        match self {
            Twirl::None => "none",
            Twirl::Pauli => "pauli",
            Twirl::Clifford => "clifford",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "none" => Twirl::None,
            "pauli" => Twirl::Pauli,
            "clifford" => Twirl::Clifford,
            other => return Err(Error::InvalidNoise(format!("unknown twirl `{other}`"))),
        })
    }
}

fn default_axis() -> Axis {
    Axis::Z
}

/// Description of a single-qubit noise channel plus an optional twirl.
///
/// `strength` is γ for the damping kinds, `p_depol` for depolarizing and the
/// rotation angle (radians) for coherent noise unless `coherent_angle` is set.
/// The Pauli kind reads `pauli_probs` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub strength: f64,
    #[serde(default)]
    pub pauli_probs: [f64; 3],
    #[serde(default = "default_axis")]
    pub coherent_axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent_angle: Option<f64>,
    #[serde(default)]
    pub twirl: Twirl,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseSpec {
    fn base(kind: NoiseKind, strength: f64) -> Self {
        Self {
            kind,
            strength,
            pauli_probs: [0.0; 3],
            coherent_axis: Axis::Z,
            coherent_angle: None,
            twirl: Twirl::None,
        }
    }

    pub fn none() -> Self {
        Self::base(NoiseKind::None, 0.0)
    }

    pub fn amplitude_damping(gamma: f64) -> Self {
        Self::base(NoiseKind::AmplitudeDamping, gamma)
    }

    pub fn reversed_amplitude_damping(gamma: f64) -> Self {
        Self::base(NoiseKind::ReversedAmplitudeDamping, gamma)
    }

    pub fn depolarizing(p: f64) -> Self {
        Self::base(NoiseKind::Depolarizing, p)
    }

    pub fn pauli(px: f64, py: f64, pz: f64) -> Self {
        Self {
            pauli_probs: [px, py, pz],
            ..Self::base(NoiseKind::Pauli, px + py + pz)
        }
    }

    /// Pauli noise acting along one axis with probability `p`.
    pub fn pauli_axis(axis: Axis, p: f64) -> Self {
        let mut probs = [0.0; 3];
        probs[axis.digit() as usize - 1] = p;
        Self::pauli(probs[0], probs[1], probs[2])
    }

    pub fn coherent(axis: Axis, angle: f64) -> Self {
        Self {
            coherent_axis: axis,
            ..Self::base(NoiseKind::Coherent, angle)
        }
    }

    pub fn with_twirl(mut self, twirl: Twirl) -> Self {
        self.twirl = twirl;
        self
    }

    /// Same channel family at a different strength. For the Pauli kind the
    /// probability vector is rescaled so that its sum equals `strength`.
    pub fn with_strength(&self, strength: f64) -> Self {
        let mut out = self.clone();
        out.strength = strength;
        out.coherent_angle = None;
        if self.kind == NoiseKind::Pauli {
            let total: f64 = self.pauli_probs.iter().sum();
            out.pauli_probs = if total > 0.0 {
                self.pauli_probs.map(|p| p * strength / total)
            } else {
                [strength / 3.0; 3]
            };
        }
        out
    }

    pub fn angle(&self) -> f64 {
        self.coherent_angle.unwrap_or(self.strength)
    }

    /// Scalar used as the `strength` CSV column.
    pub fn effective_strength(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Pauli => self.pauli_probs.iter().sum(),
            NoiseKind::Coherent => self.angle(),
            _ => self.strength,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match self.kind {
            NoiseKind::None => true,
            NoiseKind::Pauli => self.pauli_probs.iter().all(|&p| p == 0.0),
            NoiseKind::Coherent => self.angle() == 0.0,
            _ => self.strength == 0.0,
        }
    }

    /// Twirled coherent errors are allowed but lie outside the studied protocol.
    pub fn outside_protocol(&self) -> bool {
        self.kind == NoiseKind::Coherent && self.twirl != Twirl::None
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::None | NoiseKind::Coherent => {}
            NoiseKind::Pauli => check_pauli_probs(self.pauli_probs)?,
            _ => check_unit(self.strength, "strength")?,
        }
        if !self.strength.is_finite() || !self.angle().is_finite() {
            return Err(Error::InvalidNoise("non-finite strength".into()));
        }
        Ok(())
    }

    /// Kraus operators built at the operator level, twirl included, with no
    /// reference to the PTM constructors.
    pub fn kraus(&self) -> Result<Vec<ComplexMatrix>> {
        self.validate()?;
        let base = match self.kind {
            NoiseKind::None => vec![ComplexMatrix::identity(2)],
            NoiseKind::AmplitudeDamping => {
                let g = self.strength;
                vec![
                    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]),
                    ComplexMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]),
                ]
            }
            NoiseKind::ReversedAmplitudeDamping => {
                let g = self.strength;
                vec![
                    ComplexMatrix::from_real_rows(&[&[(1.0 - g).sqrt(), 0.0], &[0.0, 1.0]]),
                    ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[g.sqrt(), 0.0]]),
                ]
            }
            NoiseKind::Pauli => pauli_kraus(self.pauli_probs),
            NoiseKind::Depolarizing => pauli_kraus([self.strength / 4.0; 3]),
            NoiseKind::Coherent => vec![rotation(self.coherent_axis, self.angle())],
        };
        Ok(match self.twirl {
            Twirl::None => base,
            Twirl::Pauli => (0..4u8)
                .flat_map(|a| {
                    let p = pauli_matrix(a);
                    base.iter()
                        .map(|k| p.matmul(k).matmul(&p).scale(0.5.into()))
                        .collect::<Vec<_>>()
                })
                .collect(),
            Twirl::Clifford => {
                let w = (1.0 / 24f64).sqrt();
                clifford_group()
                    .iter()
                    .flat_map(|(c, _)| {
                        base.iter()
                            .map(|k| c.adjoint().matmul(k).matmul(c).scale(w.into()))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            }
        })
    }

    /// Short human-readable label, e.g. `amplitude_damping/pauli@0.2`.
    pub fn label(&self) -> String {
        format!(
            "{}/{}@{}",
            self.kind.as_str(),
            self.twirl.as_str(),
            self.effective_strength()
        )
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn pauli_kraus(probs: [f64; 3]) -> Vec<ComplexMatrix> {
    let pi = 1.0 - probs.iter().sum::<f64>();
    std::iter::once((0u8, pi))
        .chain((1..=3u8).zip(probs))
        .filter(|&(_, p)| p > 0.0)
        .map(|(d, p)| pauli_matrix(d).scale(p.sqrt().into()))
        .collect()
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("{what} = {x} not in [0, 1]")));
    }
    Ok(())
}

fn check_pauli_probs(p: [f64; 3]) -> Result<()> {
    if p.iter().any(|&x| !(x >= 0.0)) || p.iter().sum::<f64>() > 1.0 + 1e-15 {
        return Err(Error::OutOfRange(format!(
            "Pauli probabilities {p:?} must be nonnegative with sum ≤ 1"
        )));
    }
    Ok(())
}

pub fn amplitude_damping_ptm(gamma: f64) -> Result<Ptm> {
    check_unit(gamma, "gamma")?;
    let s = (1.0 - gamma).sqrt();
    Ok(Ptm::from_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, s, 0.0, 0.0],
        [0.0, 0.0, s, 0.0],
        [gamma, 0.0, 0.0, 1.0 - gamma],
    ]))
}

/// Amplitude damping that pumps `|0⟩` into `|1⟩`.
pub fn reversed_amplitude_damping_ptm(gamma: f64) -> Result<Ptm> {
    let mut r = amplitude_damping_ptm(gamma)?;
    r.set(3, 0, -gamma);
    Ok(r)
}

pub fn pauli_channel_ptm(px: f64, py: f64, pz: f64) -> Result<Ptm> {
    check_pauli_probs([px, py, pz])?;
    Ptm::diagonal(
        1,
        &[
            1.0,
            1.0 - 2.0 * py - 2.0 * pz,
            1.0 - 2.0 * px - 2.0 * pz,
            1.0 - 2.0 * px - 2.0 * py,
        ],
    )
}

/// Depolarizing channel with `p ∈ [0, 1]`.
pub fn depolarizing_ptm(p: f64) -> Result<Ptm> {
    check_unit(p, "p_depol")?;
    depolarizing_ptm_unchecked(p)
}

/// Depolarizing channel over its full CPTP range `p ∈ [0, 4/3]`.
pub fn depolarizing_ptm_extended(p: f64) -> Result<Ptm> {
    if !(0.0..=4.0 / 3.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p_depol = {p} not in [0, 4/3]")));
    }
    depolarizing_ptm_unchecked(p)
}

fn depolarizing_ptm_unchecked(p: f64) -> Result<Ptm> {
    let l = 1.0 - p;
    Ptm::diagonal(1, &[1.0, l, l, l])
}

pub fn coherent_error_ptm(axis: Axis, angle: f64) -> Ptm {
    rotation_ptm(axis, angle)
}

fn require_single_qubit(r: &Ptm) -> Result<()> {
    if r.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: r.dim(),
        });
    }
    Ok(())
}

/// Pauli twirl: keeps the diagonal, zeroes everything else.
pub fn pauli_twirl(r: &Ptm) -> Result<Ptm> {
    require_single_qubit(r)?;
    Ptm::diagonal(1, &r.diag())
}

/// Pauli twirl as the explicit group average `(1/4) Σ P̂ R P̂`.
pub fn pauli_twirl_by_average(r: &Ptm) -> Result<Ptm> {
    require_single_qubit(r)?;
    let mut acc = vec![0.0; 16];
    for d in 0..4u8 {
        let p = ptm_from_unitary(&pauli_matrix(d))?;
        let term = p.transpose().matmul(r).matmul(&p);
        for (a, t) in acc.iter_mut().zip(term.as_slice()) {
            *a += t / 4.0;
        }
    }
    Ptm::from_vec(1, acc)
}

/// Clifford twirl: `diag(R_II, λ̄, λ̄, λ̄)` with `λ̄` the mean of the
/// non-identity diagonal.
pub fn clifford_twirl(r: &Ptm) -> Result<Ptm> {
    require_single_qubit(r)?;
    let lam = (r.get(1, 1) + r.get(2, 2) + r.get(3, 3)) / 3.0;
    Ptm::diagonal(1, &[r.get(0, 0), lam, lam, lam])
}

/// Clifford twirl as the explicit average over the 24 single-qubit Cliffords.
pub fn clifford_twirl_by_average(r: &Ptm) -> Result<Ptm> {
    require_single_qubit(r)?;
    let group = clifford_group();
    let mut acc = vec![0.0; 16];
    for (_, c) in group {
        let term = c.transpose().matmul(r).matmul(c);
        for (a, t) in acc.iter_mut().zip(term.as_slice()) {
            *a += t / group.len() as f64;
        }
    }
    Ptm::from_vec(1, acc)
}

/// The single-qubit Clifford group modulo phase, generated by closing
/// `{H, S}` under multiplication. Each entry pairs a unitary with its PTM.
pub fn clifford_group() -> &'static [(ComplexMatrix, Ptm)] {
    static GROUP: OnceLock<Vec<(ComplexMatrix, Ptm)>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let generators = [hadamard(), phase_s()];
        let id = ComplexMatrix::identity(2);
        let mut group = vec![(id.clone(), Ptm::identity(1))];
        let mut frontier = vec![id];
        while let Some(u) = frontier.pop() {
            for g in &generators {
                let v = g.matmul(&u);
                let r = ptm_from_unitary(&v).expect("Clifford products are unitary");
                if group.iter().all(|(_, q)| q.max_abs_diff(&r) > 1e-9) {
                    group.push((v.clone(), r));
                    frontier.push(v);
                }
            }
        }
        group
    })
}

/// `(p_X, p_Y, p_Z)` of the Pauli channel equal to Pauli-twirled damping.
pub fn ad_pauli_twirl_probs(gamma: f64) -> Result<[f64; 3]> {
    check_unit(gamma, "gamma")?;
    let pxy = gamma / 4.0;
    let pz = (2.0 - gamma - 2.0 * (1.0 - gamma).sqrt()) / 4.0;
    Ok([pxy, pxy, pz.max(0.0)])
}

/// Depolarizing rate equal to Clifford-twirled damping.
pub fn ad_clifford_twirl_rate(gamma: f64) -> Result<f64> {
    check_unit(gamma, "gamma")?;
    Ok((gamma + 2.0 - 2.0 * (1.0 - gamma).sqrt()) / 3.0)
}

/// Pauli error probabilities of a diagonal single-qubit PTM.
pub fn pauli_probs_from_diagonal(diag: [f64; 4]) -> [f64; 4] {
    let [_, lx, ly, lz] = diag;
    [
        (1.0 + lx + ly + lz) / 4.0,
        (1.0 + lx - ly - lz) / 4.0,
        (1.0 - lx + ly - lz) / 4.0,
        (1.0 - lx - ly + lz) / 4.0,
    ]
}

/// Base channel of `spec` followed by the requested twirl.
pub fn realize(spec: &NoiseSpec) -> Result<Ptm> {
    spec.validate()?;
    let base = match spec.kind {
        NoiseKind::None => Ptm::identity(1),
        NoiseKind::AmplitudeDamping => amplitude_damping_ptm(spec.strength)?,
        NoiseKind::ReversedAmplitudeDamping => reversed_amplitude_damping_ptm(spec.strength)?,
        NoiseKind::Pauli => {
            let [px, py, pz] = spec.pauli_probs;
            pauli_channel_ptm(px, py, pz)?
        }
        NoiseKind::Depolarizing => depolarizing_ptm(spec.strength)?,
        NoiseKind::Coherent => coherent_error_ptm(spec.coherent_axis, spec.angle()),
    };
    match spec.twirl {
        Twirl::None => Ok(base),
        Twirl::Pauli => pauli_twirl(&base),
        Twirl::Clifford => clifford_twirl(&base),
    }
}
