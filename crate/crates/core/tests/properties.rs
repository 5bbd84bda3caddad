//! Property tests for invariants that hold over random inputs.

use noisy_vqa::channels::{
    amplitude_damping_ptm, clifford_twirl, pauli_twirl, realize, reversed_amplitude_damping_ptm, NoiseSpec, Twirl,
};
use noisy_vqa::fourier::{random_target, Dataset};
use noisy_vqa::metrics::{expressivity_range_seed, fits_amplitude, initial_theta, RangeSearch};
use noisy_vqa::optimizer::{train, AdamConfig, AdamState, TrainConfig};
use noisy_vqa::oracle::{dense_expectation, random_hermitian};
use noisy_vqa::pauli::Axis;
use noisy_vqa::ptm::{devectorize, expectation, vectorize, PauliVector};
use noisy_vqa::reuploading::{BasisVariant, ReuploadModel};
use noisy_vqa::rng::trial_rng;
use noisy_vqa::vqe::{TfimSpec, VqeAnsatz, VqeProblem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn any_noise() -> impl Strategy<Value = NoiseSpec> {
    let twirl = prop_oneof![Just(Twirl::None), Just(Twirl::Pauli), Just(Twirl::Clifford)];
    (0usize..6, 0.0f64..1.0, twirl).prop_map(|(k, s, t)| {
        let n = match k {
            0 => NoiseSpec::none(),
            1 => NoiseSpec::amplitude_damping(s),
            2 => NoiseSpec::reversed_amplitude_damping(s),
            3 => NoiseSpec::depolarizing(s),
            4 => NoiseSpec::pauli(s / 2.0, s / 5.0, s / 4.0),
            _ => NoiseSpec::coherent(Axis::Z, 2.0 * s),
        };
        n.with_twirl(t)
    })
}

/// Textbook ADAM, written independently of the library.
fn reference_adam(cfg: &AdamConfig, theta: &mut [f64], m: &mut [f64], v: &mut [f64], t: i32, g: &[f64]) {
    for i in 0..theta.len() {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        let mh = m[i] / (1.0 - cfg.beta1.powi(t));
        let vh = v[i] / (1.0 - cfg.beta2.powi(t));
        theta[i] -= cfg.learning_rate * mh / (vh.sqrt() + cfg.epsilon);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adam_matches_reference(seed in any::<u64>(), lr in 0.001f64..0.5, b1 in 0.0f64..0.99, b2 in 0.5f64..0.999) {
        let cfg = AdamConfig::new(lr, b1, b2, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 5;
        let mut theta: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -3.0..3.0)).collect();
        let mut reference = theta.clone();
        let (mut m, mut v) = (vec![0.0; n], vec![0.0; n]);
        let mut state = AdamState::new(n);
        for t in 1..=100 {
            let g: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
            state.step(&cfg, &mut theta, &g).unwrap();
            reference_adam(&cfg, &mut reference, &mut m, &mut v, t, &g);
        }
        for (a, b) in theta.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn realized_channels_are_cptp(noise in any_noise()) {
        let r = realize(&noise).unwrap();
        prop_assert!(r.check_cptp(1e-9, 1e-12).is_ok(), "{}", noise);
    }

    #[test]
    fn twirls_are_idempotent_and_keep_the_diagonal(gamma in 0.0f64..1.0) {
        let ad = amplitude_damping_ptm(gamma).unwrap();
        let p = pauli_twirl(&ad).unwrap();
        let c = clifford_twirl(&ad).unwrap();
        prop_assert!(pauli_twirl(&p).unwrap().max_abs_diff(&p) < 1e-14);
        prop_assert!(clifford_twirl(&c).unwrap().max_abs_diff(&c) < 1e-14);
        prop_assert_eq!(p.diag(), ad.diag());
        let rad = reversed_amplitude_damping_ptm(gamma).unwrap();
        prop_assert!(pauli_twirl(&rad).unwrap().max_abs_diff(&p) < 1e-12);
        prop_assert!(clifford_twirl(&rad).unwrap().max_abs_diff(&c) < 1e-12);
    }

    #[test]
    fn vectorize_round_trip_and_expectation(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << n;
        let h = random_hermitian(d, &mut rng);
        let rho_op = random_hermitian(d, &mut rng);
        let v = vectorize(&h, n).unwrap();
        prop_assert!(devectorize(&v).max_abs_diff(&h) < 1e-12);
        let r = vectorize(&rho_op, n).unwrap();
        let dense = dense_expectation(&h, &rho_op);
        prop_assert!((expectation(&v, &r).unwrap() - dense).abs() < 1e-12);
    }

    #[test]
    fn model_output_is_bounded_and_matches_oracle(
        noise in any_noise(),
        layers in 1usize..=4,
        seed in any::<u64>(),
        x in -7.0f64..7.0,
    ) {
        let m = ReuploadModel::new(layers, initial_theta(seed, layers), noise, BasisVariant::Standard).unwrap();
        let f = m.forward(x);
        prop_assert!(f.abs() <= 1.0 + 1e-12);
        prop_assert!((f - m.forward_dense(x).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn full_damping_pins_the_output(layers in 1usize..=6, seed in any::<u64>(), x in -7.0f64..7.0) {
        let m = ReuploadModel::new(layers, initial_theta(seed, layers), NoiseSpec::amplitude_damping(1.0), BasisVariant::Standard).unwrap();
        prop_assert!((m.forward(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_vqe_respects_the_variational_bound(seed in any::<u64>()) {
        let p = VqeProblem::new(TfimSpec::default(), VqeAnsatz::default(), NoiseSpec::none()).unwrap();
        let th = noisy_vqa::rng::uniform_angles(&mut trial_rng(seed, "prop", 0), p.param_count());
        prop_assert!(p.energy(&th).unwrap() >= p.e0() - 1e-9);
    }

    #[test]
    fn vqe_energy_matches_dense_oracle(seed in any::<u64>(), noise in any_noise()) {
        prop_assume!(noisy_vqa::vqe::supports_noise(&noise));
        let p = VqeProblem::new(TfimSpec::default(), VqeAnsatz::default(), noise).unwrap();
        let th = noisy_vqa::rng::uniform_angles(&mut trial_rng(seed, "prop", 1), p.param_count());
        prop_assert!((p.energy(&th).unwrap() - p.energy_dense(&th).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn seeded_targets_have_unit_range(seed in any::<u64>(), degree in 1usize..=6, a in 0.0f64..4.0) {
        let (g, data) = random_target(degree, seed, a, None).unwrap();
        let (lo, hi) = g.extrema(4096);
        prop_assert!((hi - lo - a).abs() < 1e-9);
        prop_assert!((hi + lo).abs() < 1e-9);
        prop_assert_eq!(data.len(), 250);
        prop_assert!(g.symmetry_error() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Noiseless L = 1 with the tabulated hyperparameters: the full loss never
    /// rises across a 20-epoch window.
    #[test]
    fn loss_decreases_over_windows(seed in 0u64..1000, a in 0.5f64..1.9) {
        let (_, data) = random_target(1, seed, a, None).unwrap();
        let m = ReuploadModel::new(1, initial_theta(seed, 1), NoiseSpec::none(), BasisVariant::Standard).unwrap();
        let cfg = TrainConfig::for_layers(1).unwrap();
        let r = train(&m, &data, &cfg, &mut trial_rng(seed, "shuffle", 1)).unwrap();
        for w in r.loss_history.windows(21) {
            prop_assert!(w[20] <= w[0], "{} -> {}", w[0], w[20]);
        }
    }

    #[test]
    fn training_is_deterministic(seed in 0u64..1000) {
        let (_, data) = random_target(2, seed, 1.0, None).unwrap();
        let m = ReuploadModel::new(2, initial_theta(seed, 2), NoiseSpec::amplitude_damping(0.1), BasisVariant::Standard).unwrap();
        let cfg = TrainConfig::for_layers(2).unwrap();
        let a = train(&m, &data, &cfg, &mut trial_rng(seed, "shuffle", 2)).unwrap();
        let b = train(&m, &data, &cfg, &mut trial_rng(seed, "shuffle", 2)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn own_output_converges_immediately() {
    let m = ReuploadModel::new(2, initial_theta(4, 2), NoiseSpec::none(), BasisVariant::Standard).unwrap();
    let xs = noisy_vqa::fourier::linspace(-6.0, 6.0, 250);
    let ys = xs.iter().map(|&x| m.forward(x)).collect();
    let data = Dataset::new(xs, ys).unwrap();
    let r = train(&m, &data, &TrainConfig::for_layers(2).unwrap(), &mut trial_rng(0, "shuffle", 2)).unwrap();
    assert!(r.converged);
    assert_eq!(r.steps_used, 0);
}

#[test]
fn noiseless_fit_rate_at_unit_amplitude() {
    let ok = (0..20u64)
        .filter(|&s| fits_amplitude(2, &NoiseSpec::none(), BasisVariant::Standard, s, 1.0, Default::default()).unwrap())
        .count();
    assert!(ok >= 18, "{ok}/20 seeds converged");
}

#[test]
fn range_search_brackets_its_result() {
    let search = RangeSearch::default();
    for seed in 0..3 {
        let r = expressivity_range_seed(2, &NoiseSpec::amplitude_damping(0.2), BasisVariant::Standard, seed, search).unwrap();
        let fits = |a: f64| fits_amplitude(2, &r.noise, r.variant, seed, a, search.offset).unwrap();
        assert!(r.max_range <= 2.0 + search.tol);
        assert!(fits(r.max_range - search.tol), "seed {seed}: {} - tol failed", r.max_range);
        assert!(!fits(r.max_range + search.tol), "seed {seed}: {} + tol converged", r.max_range);
    }
}

#[test]
fn pauli_vector_states_are_physical() {
    let g = PauliVector::ground_state(3);
    assert_eq!(g.coeffs()[0], 0.125);
    let p = PauliVector::plus_state(1);
    assert_eq!(p.coeffs(), &[0.5, 0.5, 0.0, 0.0]);
}
