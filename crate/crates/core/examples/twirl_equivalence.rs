//! Twirled amplitude damping against its closed-form Pauli and
//! depolarizing equivalents, over a grid of damping rates.

use noisy_vqa::channels::{
    ad_clifford_twirl_rate, ad_pauli_twirl_probs, amplitude_damping_ptm, clifford_twirl, depolarizing_ptm,
    pauli_channel_ptm, pauli_twirl,
};

fn main() -> noisy_vqa::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "gamma", "pX=pY", "pZ", "p_depol", "err_P", "err_C", "");
    for k in 0..=10 {
        let g = 0.05 * k as f64;
        let ad = amplitude_damping_ptm(g)?;
        let [px, py, pz] = ad_pauli_twirl_probs(g)?;
        let p = ad_clifford_twirl_rate(g)?;
        let ep = pauli_twirl(&ad)?.max_abs_diff(&pauli_channel_ptm(px, py, pz)?);
        let ec = clifford_twirl(&ad)?.max_abs_diff(&depolarizing_ptm(p)?);
        println!("{g:>6.2} {px:>10.6} {pz:>10.6} {p:>10.6} {ep:>10.1e} {ec:>10.1e}");
        debug_assert_eq!(px, py);
    }
    Ok(())
}
