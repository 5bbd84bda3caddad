//! Transverse-field Ising VQE on a small qubit ring.
//!
//! The ansatz starts with `Ry` on every qubit, then repeats `T` Trotter
//! blocks. Each block applies `CNOT · Rz(θ) · CNOT` on every bond (noise
//! after each CNOT), then `Rx` on every qubit. Single-qubit gates are noiseless.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{realize, NoiseKind, NoiseSpec, Twirl};
use crate::error::{Error, Result};
use crate::gates::{cnot, cnot_ptm, controlled_ry, controlled_ry_ptm, rotation, rotation_ptm};
use crate::linalg::{symmetric_eigen, ComplexMatrix};
use crate::optimizer::{AdamConfig, AdamState};
use crate::oracle::{basis_density, dense_expectation, embed_kraus, embed_operator, evolve_density, kron_kraus};
use crate::pauli::{Axis, PauliIndex};
use crate::ptm::{apply_local_slice, tensor, vectorize, PauliVector, Ptm};
use crate::rng::{trial_rng, uniform_angles};

pub const MAX_QUBITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfimSpec {
    #[serde(default = "default_n")]
    pub n_qubits: usize,
    #[serde(default = "default_j")]
    pub j: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_periodic")]
    pub periodic: bool,
}

fn default_n() -> usize {
    3
}
fn default_j() -> f64 {
    1.0
}
fn default_h() -> f64 {
    0.5
}
fn default_periodic() -> bool {
    true
}

impl Default for TfimSpec {
    fn default() -> Self {
        Self {
            n_qubits: 3,
            j: 1.0,
            h: 0.5,
            periodic: true,
        }
    }
}

impl TfimSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::InvalidModel(format!(
                "n_qubits = {} outside 2..={MAX_QUBITS}",
                self.n_qubits
            )));
        }
        if !self.j.is_finite() || !self.h.is_finite() {
            return Err(Error::NonFinite("Ising couplings".into()));
        }
        Ok(())
    }

    /// Nearest-neighbour bonds; the ring closes with `(n−1, 0)` for `n > 2`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let mut b: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if self.periodic && n > 2 {
            b.push((n - 1, 0));
        }
        b
    }
}

fn string_with(n: usize, sites: &[(usize, u8)]) -> PauliIndex {
    let mut d = vec![0u8; n];
    for &(q, p) in sites {
        d[q] = p;
    }
    PauliIndex::new(d).expect("valid digits")
}

/// `H = −J Σ Z_i Z_j − h Σ X_i` as a Pauli vector (coefficients `tr(P H)/d`)
/// and as a dense matrix.
pub fn build_hamiltonian(spec: &TfimSpec) -> Result<(PauliVector, ComplexMatrix)> {
    spec.validate()?;
    let n = spec.n_qubits;
    let d = 1usize << n;
    let mut coeffs = vec![0.0; 1 << (2 * n)];
    let mut dense = ComplexMatrix::zeros(d, d);
    let mut add = |label: PauliIndex, w: f64| {
        coeffs[label.flat()] += w;
        dense = &dense + &label.matrix().scale(w.into());
    };
    for (a, b) in spec.bonds() {
        add(string_with(n, &[(a, 3), (b, 3)]), -spec.j);
    }
    for q in 0..n {
        add(string_with(n, &[(q, 1)]), -spec.h);
    }
    Ok((PauliVector::new(n, coeffs)?, dense))
}

/// Lowest eigenvalue of the dense Hamiltonian (cyclic Jacobi).
pub fn exact_ground_energy(spec: &TfimSpec) -> Result<f64> {
    let (_, dense) = build_hamiltonian(spec)?;
    let d = dense.rows();
    let real: Vec<f64> = dense.as_slice().iter().map(|z| z.re).collect();
    let (vals, _) = symmetric_eigen(&real, d);
    Ok(vals[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// `N ⊗ N` on control and target.
    #[default]
    Both,
    TargetOnly,
}

impl NoisePlacement {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "both" => Ok(NoisePlacement::Both),
            "target_only" => Ok(NoisePlacement::TargetOnly),
            other => Err(Error::InvalidModel(format!("unknown placement `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NoisePlacement::Both => "both",
            NoisePlacement::TargetOnly => "target_only",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeAnsatz {
    #[serde(default = "default_trotter")]
    pub trotter_steps: usize,
    #[serde(default)]
    pub placement: NoisePlacement,
}

fn default_trotter() -> usize {
    4
}

impl Default for VqeAnsatz {
    fn default() -> Self {
        Self {
            trotter_steps: 4,
            placement: NoisePlacement::Both,
        }
    }
}

impl VqeAnsatz {
    /// `n + T·(bonds + n)`.
    pub fn param_count(&self, spec: &TfimSpec) -> usize {
        let n = spec.n_qubits;
        n + self.trotter_steps * (spec.bonds().len() + n)
    }
}

#[derive(Clone, Debug)]
enum Op {
    Param { axis: Axis, qubit: usize, index: usize },
    Fixed { ptm: Ptm, transposed: Ptm, qubits: Vec<usize> },
}

/// Reference gate list for the dense oracle.
#[derive(Clone, Debug)]
enum DenseOp {
    Param { axis: Axis, qubit: usize, index: usize },
    Unitary(ComplexMatrix, Vec<usize>),
    Kraus(Vec<ComplexMatrix>),
}

/// A compiled `(Hamiltonian, ansatz, noise)` triple.
#[derive(Clone, Debug)]
pub struct VqeProblem {
    spec: TfimSpec,
    ansatz: VqeAnsatz,
    noise: NoiseSpec,
    hamiltonian: PauliVector,
    e0: f64,
    ops: Vec<Op>,
    dense_ops: Vec<DenseOp>,
}

fn fixed(ptm: Ptm, qubits: Vec<usize>) -> Op {
    Op::Fixed {
        transposed: ptm.transpose(),
        ptm,
        qubits,
    }
}

impl VqeProblem {
    pub fn new(spec: TfimSpec, ansatz: VqeAnsatz, noise: NoiseSpec) -> Result<Self> {
        spec.validate()?;
        noise.validate()?;
        if noise.outside_protocol() {
            return Err(Error::InvalidNoise(
                "twirled coherent noise is not defined for the VQE ansatz".into(),
            ));
        }
        let (hamiltonian, _) = build_hamiltonian(&spec)?;
        let e0 = exact_ground_energy(&spec)?;
        let n = spec.n_qubits;
        let bonds = spec.bonds();

        // Channel applied after every CNOT, in both representations.
        let after_cnot: Option<(Op, DenseOp)> = if noise.is_noiseless() {
            None
        } else if noise.kind == NoiseKind::Coherent {
            // Coherent over-rotation of the entangler: CRY on the same pair.
            Some((
                fixed(controlled_ry_ptm(noise.angle()), vec![]),
                DenseOp::Unitary(controlled_ry(noise.angle()), vec![]),
            ))
        } else {
            let r = realize(&noise)?;
            let k = noise.kraus()?;
            Some(match ansatz.placement {
                NoisePlacement::Both => (fixed(tensor(&r, &r), vec![]), DenseOp::Kraus(kron_kraus(&k, &k))),
                NoisePlacement::TargetOnly => (fixed(r, vec![]), DenseOp::Kraus(k)),
            })
        };
        let noise_qubits = |c: usize, t: usize| -> Vec<usize> {
            if noise.kind != NoiseKind::Coherent && ansatz.placement == NoisePlacement::TargetOnly {
                vec![t]
            } else {
                vec![c, t]
            }
        };

        let mut ops = Vec::new();
        let mut dense_ops = Vec::new();
        let push_param = |ops: &mut Vec<Op>, dense: &mut Vec<DenseOp>, axis, qubit, index| {
            ops.push(Op::Param { axis, qubit, index });
            dense.push(DenseOp::Param { axis, qubit, index });
        };
        let mut index = 0;
        for q in 0..n {
            push_param(&mut ops, &mut dense_ops, Axis::Y, q, index);
            index += 1;
        }
        for _ in 0..ansatz.trotter_steps {
            for &(c, t) in &bonds {
                let rz_index = index;
                index += 1;
                for half in 0..2 {
                    ops.push(fixed(cnot_ptm(), vec![c, t]));
                    dense_ops.push(DenseOp::Unitary(cnot(), vec![c, t]));
                    if let Some((op, dop)) = &after_cnot {
                        let qs = noise_qubits(c, t);
                        if let Op::Fixed { ptm, transposed, .. } = op {
                            ops.push(Op::Fixed {
                                ptm: ptm.clone(),
                                transposed: transposed.clone(),
                                qubits: qs.clone(),
                            });
                        }
                        dense_ops.push(match dop {
                            DenseOp::Unitary(u, _) => DenseOp::Unitary(u.clone(), qs.clone()),
                            DenseOp::Kraus(k) => DenseOp::Kraus(embed_kraus(k, &qs, n)),
                            DenseOp::Param { .. } => unreachable!(),
                        });
                    }
                    if half == 0 {
                        push_param(&mut ops, &mut dense_ops, Axis::Z, t, rz_index);
                    }
                }
            }
            for q in 0..n {
                push_param(&mut ops, &mut dense_ops, Axis::X, q, index);
                index += 1;
            }
        }
        debug_assert_eq!(index, ansatz.param_count(&spec));
        Ok(Self {
            spec,
            ansatz,
            noise,
            hamiltonian,
            e0,
            ops,
            dense_ops,
        })
    }

    pub fn spec(&self) -> &TfimSpec {
        &self.spec
    }

    pub fn ansatz(&self) -> &VqeAnsatz {
        &self.ansatz
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn hamiltonian(&self) -> &PauliVector {
        &self.hamiltonian
    }

    pub fn param_count(&self) -> usize {
        self.ansatz.param_count(&self.spec)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("ansatz angles".into()));
        }
        Ok(())
    }

    fn apply_op(&self, op: &Op, theta: &[f64], state: &mut [f64], transpose: bool) {
        let n = self.spec.n_qubits;
        match op {
            Op::Param { axis, qubit, index } => {
                let a = if transpose { -theta[*index] } else { theta[*index] };
                apply_local_slice(state, n, &rotation_ptm(*axis, a), &[*qubit]);
            }
            Op::Fixed {
                ptm,
                transposed,
                qubits,
            } => apply_local_slice(state, n, if transpose { transposed } else { ptm }, qubits),
        }
    }

    fn output_state(&self, theta: &[f64]) -> Vec<f64> {
        let mut s = PauliVector::ground_state(self.spec.n_qubits).coeffs().to_vec();
        for op in &self.ops {
            self.apply_op(op, theta, &mut s, false);
        }
        s
    }

    fn energy_of(&self, state: &[f64]) -> f64 {
        let d = (1usize << self.spec.n_qubits) as f64;
        d * self
            .hamiltonian
            .coeffs()
            .iter()
            .zip(state)
            .map(|(h, r)| h * r)
            .sum::<f64>()
    }

    /// `tr(H ρ(θ))` for the noisy ansatz state.
    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let e = self.energy_of(&self.output_state(theta));
        if !e.is_finite() {
            return Err(Error::NonFinite("energy".into()));
        }
        Ok(e)
    }

    /// Energy and its parameter-shift gradient, reusing prefix states and
    /// back-propagated observable rows.
    pub fn energy_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_theta(theta)?;
        let n = self.spec.n_qubits;
        let mut prefix = Vec::with_capacity(self.ops.len() + 1);
        let mut s = PauliVector::ground_state(n).coeffs().to_vec();
        prefix.push(s.clone());
        for op in &self.ops {
            self.apply_op(op, theta, &mut s, false);
            prefix.push(s.clone());
        }
        let energy = self.energy_of(&s);
        let d = (1usize << n) as f64;
        let mut row: Vec<f64> = self.hamiltonian.coeffs().iter().map(|h| d * h).collect();
        let mut grad = vec![0.0; theta.len()];
        let mut tmp = vec![0.0; row.len()];
        for (k, op) in self.ops.iter().enumerate().rev() {
            if let Op::Param { axis, qubit, index } = op {
                let mut shifted = |delta: f64| {
                    tmp.copy_from_slice(&prefix[k]);
                    apply_local_slice(&mut tmp, n, &rotation_ptm(*axis, theta[*index] + delta), &[*qubit]);
                    tmp.iter().zip(&row).map(|(a, b)| a * b).sum::<f64>()
                };
                grad[*index] += 0.5 * (shifted(FRAC_PI_2) - shifted(-FRAC_PI_2));
            }
            self.apply_op(op, theta, &mut row, true);
        }
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("energy or gradient".into()));
        }
        Ok((energy, grad))
    }

    /// Full `4ⁿ×4ⁿ` PTM of the ansatz.
    pub fn ansatz_ptm(&self, theta: &[f64]) -> Result<Ptm> {
        self.check_theta(theta)?;
        let dim = 1usize << (2 * self.spec.n_qubits);
        let mut data = vec![0.0; dim * dim];
        for j in 0..dim {
            let mut v = vec![0.0; dim];
            v[j] = 1.0;
            for op in &self.ops {
                self.apply_op(op, theta, &mut v, false);
            }
            for i in 0..dim {
                data[i * dim + j] = v[i];
            }
        }
        Ptm::from_vec(self.spec.n_qubits, data)
    }

    /// Energy from the dense density matrix and Kraus operators.
    pub fn energy_dense(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let n = self.spec.n_qubits;
        let mut rho = basis_density(n, 0);
        for op in &self.dense_ops {
            rho = match op {
                DenseOp::Param { axis, qubit, index } => {
                    let u = embed_operator(&rotation(*axis, theta[*index]), &[*qubit], n);
                    evolve_density(&rho, &[u])
                }
                DenseOp::Unitary(u, qs) => evolve_density(&rho, &[embed_operator(u, qs, n)]),
                DenseOp::Kraus(k) => evolve_density(&rho, k),
            };
        }
        let (_, h) = build_hamiltonian(&self.spec)?;
        Ok(dense_expectation(&h, &rho))
    }

    /// Ansatz output state as a Pauli vector.
    pub fn state(&self, theta: &[f64]) -> Result<PauliVector> {
        self.check_theta(theta)?;
        PauliVector::new(self.spec.n_qubits, self.output_state(theta))
    }

    /// Pauli vector of the dense-oracle output state.
    pub fn state_dense(&self, theta: &[f64]) -> Result<PauliVector> {
        self.check_theta(theta)?;
        let n = self.spec.n_qubits;
        let mut rho = basis_density(n, 0);
        for op in &self.dense_ops {
            rho = match op {
                DenseOp::Param { axis, qubit, index } => {
                    evolve_density(&rho, &[embed_operator(&rotation(*axis, theta[*index]), &[*qubit], n)])
                }
                DenseOp::Unitary(u, qs) => evolve_density(&rho, &[embed_operator(u, qs, n)]),
                DenseOp::Kraus(k) => evolve_density(&rho, k),
            };
        }
        vectorize(&rho, n)
    }
}

pub fn percentage_error(energy: f64, e0: f64) -> f64 {
    (energy - e0).abs() / e0.abs() * 100.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub restart: usize,
    pub initial_theta: Vec<f64>,
    pub final_theta: Vec<f64>,
    pub final_energy: f64,
    pub e0: f64,
    pub percentage_error: f64,
    /// Energy before each update.
    pub loss_history: Vec<f64>,
    /// Gradient norm below `1e-3` at the end.
    pub converged_locally: bool,
    pub steps: usize,
}

impl VqeResult {
    /// Lowest energy seen anywhere along the run.
    pub fn min_energy(&self) -> f64 {
        self.loss_history
            .iter()
            .copied()
            .fold(self.final_energy, f64::min)
    }
}

/// Angles for one restart; shared across noise settings.
pub fn restart_theta(master_seed: u64, restart: usize, n_params: usize) -> Vec<f64> {
    let mut rng = trial_rng(master_seed, "vqe-init", restart as u64);
    uniform_angles(&mut rng, n_params)
}

/// One ADAM minimisation from the given start.
pub fn run_vqe(problem: &VqeProblem, adam: &AdamConfig, theta0: Vec<f64>, restart: usize) -> Result<VqeResult> {
    adam.validate()?;
    let mut theta = theta0.clone();
    let mut state = AdamState::new(theta.len());
    let mut history = Vec::with_capacity(adam.max_steps);
    for _ in 0..adam.max_steps {
        let (e, g) = problem.energy_and_gradient(&theta)?;
        history.push(e);
        state.step(adam, &mut theta, &g)?;
    }
    let (final_energy, g) = problem.energy_and_gradient(&theta)?;
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(VqeResult {
        restart,
        initial_theta: theta0,
        final_theta: theta,
        final_energy,
        e0: problem.e0(),
        percentage_error: percentage_error(final_energy, problem.e0()),
        loss_history: history,
        converged_locally: gnorm < 1e-3,
        steps: adam.max_steps,
    })
}

/// Independent restarts from `U[0, 2π)` starts, returned in restart order.
pub fn train_vqe(problem: &VqeProblem, adam: &AdamConfig, restarts: usize, master_seed: u64) -> Result<Vec<VqeResult>> {
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let theta0 = restart_theta(master_seed, r, problem.param_count());
            run_vqe(problem, adam, theta0, r)
        })
        .collect()
}

/// Median of the percentage errors.
pub fn median_error(results: &[VqeResult]) -> f64 {
    let e: Vec<f64> = results.iter().map(|r| r.percentage_error).collect();
    crate::metrics::median(&e)
}

pub fn mean_error(results: &[VqeResult]) -> f64 {
    results.iter().map(|r| r.percentage_error).sum::<f64>() / results.len() as f64
}

/// Twirled coherent noise is rejected by [`VqeProblem::new`].
pub fn supports_noise(noise: &NoiseSpec) -> bool {
    !(noise.kind == NoiseKind::Coherent && noise.twirl != Twirl::None)
}
