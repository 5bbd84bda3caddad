//! Pauli-transfer-matrix simulation of noisy variational circuits.
//!
//! Channels are 4^n x 4^n real PTMs ([`ptm`], [`channels`]) acting on Pauli
//! vectors; dense density matrices ([`oracle`]) exist only to cross-check.
//! On top of that sit a single-qubit data re-uploading model
//! ([`reuploading`]), an ADAM trainer ([`optimizer`]), expressivity and
//! gradient statistics ([`metrics`]) and a 3-qubit Ising VQE ([`vqe`]).
//!
//! The examples are the main way in:
//!
//! | example | what it shows |
//! |---|---|
//! | `channel_zoo` | PTMs and Choi spectra of every channel |
//! | `twirl_equivalence` | damping twirled to Pauli / depolarizing channels |
//! | `fourier_spectrum` | band limit and attenuation of the model spectrum |
//! | `fit_target` | one training run on a seeded target |
//! | `expressivity` | output-range search under damping and twirls |
//! | `output_bounds` | reachable output interval against damping rate |
//! | `gradient_distribution` | gradient magnitude quartiles |
//! | `depth_sweep` | range against depth under depolarizing noise |
//! | `tfim_vqe` | Ising VQE error under damping and twirls |
//! | `coherent_absorption` | coherent over-rotation folded into the angles |
//!
//! Run one with `cargo run --release --example <name>`. The `noisy-vqa`
//! binary wraps [`cli`] and writes CSV plus a re-runnable manifest.

pub mod channels;
pub mod cli;
pub mod config;
pub mod error;
pub mod fourier;
pub mod gates;
pub mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod oracle;
pub mod pauli;
pub mod ptm;
pub mod reuploading;
pub mod rng;
pub mod vqe;

pub use error::{Error, Result};
