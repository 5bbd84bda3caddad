//! Trains one model on one seeded Fourier target and prints the loss curve.
//!
//! `cargo run --release --example fit_target -- <L> <amplitude> <gamma>`

use noisy_vqa::channels::NoiseSpec;
use noisy_vqa::fourier::random_target;
use noisy_vqa::metrics::initial_theta;
use noisy_vqa::optimizer::{train, TrainConfig};
use noisy_vqa::reuploading::{BasisVariant, ReuploadModel};
use noisy_vqa::rng::trial_rng;

fn main() -> noisy_vqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let layers: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let a: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1.5);
    let gamma: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.0);
    let seed = 0;
    let (g, data) = random_target(layers, seed, a, None)?;
    let model = ReuploadModel::new(
        layers,
        initial_theta(seed, layers),
        NoiseSpec::amplitude_damping(gamma),
        BasisVariant::Standard,
    )?;
    let cfg = TrainConfig {
        fit_offset: true,
        ..TrainConfig::for_layers(layers)?
    };
    let res = train(&model, &data, &cfg, &mut trial_rng(seed, "shuffle", layers as u64))?;
    println!("target degree {} amplitude {a}, damping {gamma}", g.degree());
    for (i, l) in res.loss_history.iter().enumerate().step_by(10) {
        println!("epoch {i:>5}  loss {l:.3e}");
    }
    println!(
        "converged {} after {} epochs / {} updates, loss {:.3e}, offset {:.4}",
        res.converged, res.steps_used, res.updates, res.final_loss, res.offset
    );
    Ok(())
}
