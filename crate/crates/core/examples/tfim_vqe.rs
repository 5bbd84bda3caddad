//! Ising VQE under amplitude damping and its twirls.
//!
//! `cargo run --release --example tfim_vqe -- <gamma> <restarts>`

use noisy_vqa::channels::{NoiseSpec, Twirl};
use noisy_vqa::optimizer::AdamConfig;
use noisy_vqa::vqe::{median_error, train_vqe, TfimSpec, VqeAnsatz, VqeProblem};

fn main() -> noisy_vqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let gamma: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let restarts: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let ad = NoiseSpec::amplitude_damping(gamma);
    let adam = AdamConfig::vqe_default();
    for noise in [
        NoiseSpec::none(),
        ad.clone(),
        NoiseSpec::reversed_amplitude_damping(gamma),
        ad.clone().with_twirl(Twirl::Pauli),
        ad.with_twirl(Twirl::Clifford),
    ] {
        let p = VqeProblem::new(TfimSpec::default(), VqeAnsatz::default(), noise.clone())?;
        let r = train_vqe(&p, &adam, restarts, 0)?;
        let best = r.iter().map(|x| x.final_energy).fold(f64::INFINITY, f64::min);
        println!(
            "{:<40} E0 {:.4}  best {:.4}  median error {:.3}%",
            noise.to_string(),
            p.e0(),
            best,
            median_error(&r)
        );
    }
    Ok(())
}
