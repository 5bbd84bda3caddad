//! Output-range search at L = 2 for damping and its twirls.
//!
//! `cargo run --release --example expressivity -- <gamma> <n_seeds>`

use noisy_vqa::channels::{NoiseSpec, Twirl};
use noisy_vqa::metrics::{expressivity_range, mean_range, RangeSearch};
use noisy_vqa::reuploading::BasisVariant;

fn main() -> noisy_vqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let gamma: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.2);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let seeds: Vec<u64> = (0..n).collect();
    let ad = NoiseSpec::amplitude_damping(gamma);
    for noise in [
        NoiseSpec::none(),
        ad.clone(),
        ad.clone().with_twirl(Twirl::Clifford),
        ad.clone().with_twirl(Twirl::Pauli),
    ] {
        let r = expressivity_range(2, &noise, BasisVariant::Standard, &seeds, RangeSearch::default())?;
        let ranges: Vec<String> = r.iter().map(|x| format!("{:.2}", x.max_range)).collect();
        println!("{:<32} mean {:.4}  [{}]", noise.to_string(), mean_range(&r), ranges.join(" "));
    }
    Ok(())
}
