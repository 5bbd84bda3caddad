//! Mean output range against circuit depth under depolarizing noise.
//!
//! `cargo run --release --example depth_sweep -- <max_L> <n_seeds>`

use noisy_vqa::channels::NoiseSpec;
use noisy_vqa::metrics::{depth_sweep, mean_range, RangeSearch};
use noisy_vqa::reuploading::BasisVariant;

fn main() -> noisy_vqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_l: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let depths: Vec<usize> = (1..=max_l).collect();
    let seeds: Vec<u64> = (0..n).collect();
    let noises = [NoiseSpec::none(), NoiseSpec::depolarizing(0.2)];
    let rows = depth_sweep(&depths, &noises, BasisVariant::Standard, &seeds, RangeSearch::default())?;
    for chunk in rows.chunks(seeds.len()) {
        println!("L={} {:<28} mean range {:.4}", chunk[0].layers, chunk[0].noise.to_string(), mean_range(chunk));
    }
    Ok(())
}
