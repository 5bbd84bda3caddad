//! Gradient-magnitude box plots over a shared sample stream.
//!
//! `cargo run --release --example gradient_distribution -- <samples>`

use noisy_vqa::channels::{NoiseSpec, Twirl};
use noisy_vqa::metrics::gradient_distribution;
use noisy_vqa::pauli::Axis;
use noisy_vqa::reuploading::BasisVariant;

fn main() -> noisy_vqa::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let ad = NoiseSpec::amplitude_damping(0.2);
    let noises = [
        NoiseSpec::none(),
        NoiseSpec::coherent(Axis::Z, 0.3),
        ad.clone(),
        ad.clone().with_twirl(Twirl::Pauli),
        ad.with_twirl(Twirl::Clifford),
    ];
    println!("{:<32} {:>9} {:>9} {:>9} {:>9} {:>9}", "noise", "wlo", "q1", "median", "q3", "whi");
    for (s, _) in gradient_distribution(2, &noises, BasisVariant::Standard, n, 0)? {
        println!(
            "{:<32} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            s.noise.to_string(),
            s.whisker_lo,
            s.q1,
            s.median,
            s.q3,
            s.whisker_hi
        );
    }
    Ok(())
}
