//! Largest and smallest reachable mean outputs as damping grows.

use noisy_vqa::channels::{NoiseSpec, Twirl};
use noisy_vqa::metrics::output_bounds;
use noisy_vqa::reuploading::BasisVariant;

fn main() -> noisy_vqa::Result<()> {
    println!("{:>6} {:>18} {:>18} {:>18}", "gamma", "AD", "Pauli-twirled", "Clifford-twirled");
    for k in 0..=5 {
        let g = 0.2 * k as f64;
        let ad = NoiseSpec::amplitude_damping(g);
        let mut line = format!("{g:>6.1}");
        for n in [ad.clone(), ad.clone().with_twirl(Twirl::Pauli), ad.with_twirl(Twirl::Clifford)] {
            let (lo, hi) = output_bounds(2, &n, BasisVariant::Standard, 0)?;
            line.push_str(&format!(" [{lo:>7.4},{hi:>7.4}]"));
        }
        println!("{line}");
    }
    Ok(())
}
