//! Fourier spectrum of a random re-uploading model, from the DFT and from
//! the eigen-operator path sum, with and without depolarizing noise.
//!
//! `cargo run --example fourier_spectrum -- 2 0.1`

use noisy_vqa::channels::NoiseSpec;
use noisy_vqa::fourier::{dft_spectrum, pathsum_coefficients};
use noisy_vqa::metrics::initial_theta;
use noisy_vqa::reuploading::{BasisVariant, ReuploadModel};

fn main() -> noisy_vqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let layers: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let p: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let model = ReuploadModel::new(
        layers,
        initial_theta(1, layers),
        NoiseSpec::depolarizing(p),
        BasisVariant::Standard,
    )?;
    let (dft, leak) = dft_spectrum(&model, 4)?;
    let ps = pathsum_coefficients(&model)?;
    println!("L = {layers}, depolarizing p = {p}, out-of-band weight {leak:.2e}");
    println!("{:>3} {:>24} {:>24} {:>10}", "w", "DFT", "path sum", "n_w");
    for (k, w) in dft.frequencies().enumerate() {
        let a = dft.coeff(w);
        let b = ps.noisy.coeff(w);
        let n = ps.attenuation[k].map(|z| format!("{:.5}", z.re)).unwrap_or_else(|| "-".into());
        println!("{w:>3} {:>11.7}{:+.7}i {:>11.7}{:+.7}i {n:>10}", a.re, a.im, b.re, b.im);
    }
    Ok(())
}
