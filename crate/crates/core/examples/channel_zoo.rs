//! Prints the PTM of every built-in single-qubit channel and checks CPTP.
//!
//! `cargo run --example channel_zoo -- 0.2`

use noisy_vqa::channels::{realize, NoiseSpec, Twirl};
use noisy_vqa::pauli::Axis;

fn main() -> noisy_vqa::Result<()> {
    let s: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.2);
    let zoo = [
        NoiseSpec::amplitude_damping(s),
        NoiseSpec::reversed_amplitude_damping(s),
        NoiseSpec::depolarizing(s),
        NoiseSpec::pauli_axis(Axis::Z, s / 2.0),
        NoiseSpec::pauli(s / 4.0, s / 4.0, s / 8.0),
        NoiseSpec::coherent(Axis::Z, s),
        NoiseSpec::amplitude_damping(s).with_twirl(Twirl::Pauli),
        NoiseSpec::amplitude_damping(s).with_twirl(Twirl::Clifford),
    ];
    for n in &zoo {
        let r = realize(n)?;
        r.check_cptp(1e-9, 1e-12)?;
        println!("{n}\n{r}min Choi eigenvalue {:.3e}\n", r.min_choi_eigenvalue());
    }
    Ok(())
}
