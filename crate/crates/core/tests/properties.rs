use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snwit_core::optim::maximize_f;
use snwit_core::qstate::{self, haar_unitary, random_hermitian, random_mixed, random_sn_bounded};
use snwit_core::specbounds::{all_bounds, spectral_radius};
use snwit_core::witness::{self, coefficients_from_spectrum, CHAIN_SLACK};
use snwit_core::{
    build_witness, evaluate_witness, osc, BipartiteState, CoefficientOptions, NonnegativeMatrix, OscSpectrum,
    WitnessMethod,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn osc_is_local_unitary_invariant(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let rho = random_mixed(d, 3, &mut r).unwrap();
        let (u, v) = (haar_unitary(d, &mut r), haar_unitary(d, &mut r));
        let rotated = rho.local_unitary(&u, &v).unwrap();
        let (a, b) = (osc(&rho), osc(&rotated));
        for i in 1..=d * d {
            prop_assert!((a.mu(i) - b.mu(i)).abs() < 1e-10);
        }
    }

    #[test]
    fn osc_squares_sum_to_purity(seed in any::<u64>(), d in 2usize..5, n in 1usize..8) {
        let rho = random_mixed(d, n, &mut rng(seed)).unwrap();
        let mu = osc(&rho);
        let sq: f64 = mu.values().iter().map(|x| x * x).sum();
        prop_assert!((sq - qstate::purity(&rho)).abs() < 1e-12);
    }

    #[test]
    fn coefficient_chain(seed in any::<u64>(), k in 2usize..6) {
        let mut r = rng(seed);
        let rho = random_mixed(k + 1, 50, &mut r).unwrap();
        let opts = CoefficientOptions { with_numeric: true, restarts: 8 };
        let c = coefficients_from_spectrum(&osc(&rho), k, &opts, &mut r).unwrap();
        prop_assert!(c.check_chain(CHAIN_SLACK).is_ok(), "{:?}", c);
    }

    #[test]
    fn coefficients_scale_with_target(seed in any::<u64>(), k in 2usize..5, c in 0.01f64..50.0) {
        let mut r = rng(seed);
        let x = random_hermitian(k, k, &mut r).unwrap();
        let sigma = random_sn_bounded(k, k - 1, 4, &mut r).unwrap();
        let scaled = x.scaled(c);
        for method in [WitnessMethod::Lambda, WitnessMethod::Theta, WitnessMethod::Zeta, WitnessMethod::Eta, WitnessMethod::BigP] {
            let w = build_witness(&x, k, method).unwrap();
            let ws = build_witness(&scaled, k, method).unwrap();
            prop_assert!((ws.coefficient - c * w.coefficient).abs() <= 1e-10 * c.max(1.0));
            let (v, vs) = (evaluate_witness(&w, &sigma).unwrap(), evaluate_witness(&ws, &sigma).unwrap());
            prop_assert!((vs - c * v).abs() <= 1e-10 * c.max(1.0));
        }
    }

    #[test]
    fn theta_witness_is_sound(seed in any::<u64>(), k in 2usize..5) {
        let mut r = rng(seed);
        let d = k + 1;
        let x = random_hermitian(d, d, &mut r).unwrap();
        let w = build_witness(&x, k, WitnessMethod::Theta).unwrap();
        for _ in 0..10 {
            let sigma = random_sn_bounded(d, k, 3, &mut r).unwrap();
            prop_assert!(evaluate_witness(&w, &sigma).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn numeric_maximum_below_exact(seed in any::<u64>(), k in 2usize..5) {
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..k * k).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        let mu = OscSpectrum::from_values(raw).unwrap();
        let best = maximize_f(&mu, k, 8, &mut r).unwrap().best_value;
        prop_assert!(best <= witness::lambda_exact(&mu, k).unwrap() + 1e-9);
    }

    #[test]
    fn bounds_sandwich_perron_root(entries in prop::collection::vec(0.0f64..10.0, 25)) {
        let m = NonnegativeMatrix::new(DMatrix::from_row_slice(5, 5, &entries)).unwrap();
        let rho = spectral_radius(&m);
        for pair in all_bounds(&m) {
            prop_assert!(pair.lower <= pair.upper + 1e-9);
            prop_assert!(pair.contains(rho, 1e-9 * rho.max(1.0)), "{:?} vs {}", pair, rho);
        }
    }
}

#[test]
fn chain_with_zero_padding() {
    // Two-qubit targets have only four coefficients; k = 4 needs sixteen.
    let mut r = rng(12);
    let x = random_mixed(2, 2, &mut r).unwrap();
    let mu = osc(&x);
    let c = coefficients_from_spectrum(&mu, 4, &CoefficientOptions::default(), &mut r).unwrap();
    c.check_chain(CHAIN_SLACK).unwrap();
    assert_eq!(c.theta, c.big_p);
}

#[test]
fn witness_on_maximally_mixed_state() {
    let x = qstate::rho0();
    let w = build_witness(&x, 4, WitnessMethod::Theta).unwrap();
    let mixed = BipartiteState::maximally_mixed(4, 4).unwrap();
    assert_abs_diff_eq!(evaluate_witness(&w, &mixed).unwrap(), w.coefficient - 1.0 / 16.0, epsilon = 1e-12);
}
