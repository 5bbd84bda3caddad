//! A coherent block-axis over-rotation is a reparameterisation: the noisy
//! model at θ equals the noiseless model at h(θ).

use noisy_vqa::channels::NoiseSpec;
use noisy_vqa::pauli::Axis;
use noisy_vqa::reuploading::{coherent_shift, BasisVariant, ReuploadModel};
use noisy_vqa::rng::{trial_rng, uniform_angles};

fn main() -> noisy_vqa::Result<()> {
    let layers = 3;
    let mut rng = trial_rng(0, "example", 0);
    let mut worst: f64 = 0.0;
    for delta in [0.05, 0.3, 1.0] {
        let theta = uniform_angles(&mut rng, ReuploadModel::param_count(layers));
        let noisy = ReuploadModel::new(layers, theta.clone(), NoiseSpec::coherent(Axis::Z, delta), BasisVariant::Standard)?;
        let clean = ReuploadModel::new(layers, coherent_shift(&theta, layers, delta), NoiseSpec::none(), BasisVariant::Standard)?;
        for k in 0..64 {
            let x = -6.0 + 12.0 * k as f64 / 63.0;
            worst = worst.max((noisy.forward(x) - clean.forward(x)).abs());
        }
        println!("delta {delta}: f~(0.7) = {:.12}, f(h, 0.7) = {:.12}", noisy.forward(0.7), clean.forward(0.7));
    }
    println!("max |f~(x, θ) - f(x, h(θ))| = {worst:.2e}");
    Ok(())
}
