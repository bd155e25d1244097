use std::f64::consts::PI;

use absphase::classical_limit::{coherent_expectation, Quantity};
use absphase::numerics::gauss_legendre_grid;
use absphase::operators::{abs_phase_operator, cos_phase, phase_function_operator, sin2_phase};
use absphase::states::{coherent_dimension, coherent_state, expectation, CoherentParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_agree_with_quadrature(d in 3usize..=64) {
        let grid = gauss_legendre_grid(8 * d).unwrap();
        let phi = abs_phase_operator(d).unwrap();
        let quad = phase_function_operator(|x| x, d, &grid).unwrap();
        prop_assert!(phi.matrix().max_abs_diff(quad.matrix()).unwrap() <= 1e-10);

        let cos = phase_function_operator(f64::cos, d, &grid).unwrap();
        prop_assert!(cos_phase(d).unwrap().matrix().max_abs_diff(cos.matrix()).unwrap() <= 1e-10);

        let s2 = sin2_phase(d).unwrap();
        let quad = phase_function_operator(|x| x.sin().powi(2), d, &grid).unwrap();
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                prop_assert!((s2.get(i, j) - quad.get(i, j)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn phi_spectrum_stays_in_range(d in 1usize..=48) {
        let ev = abs_phase_operator(d).unwrap().hermitian_eigenvalues();
        prop_assert!(ev.iter().all(|&e| (0.0..=PI).contains(&e)));
    }

    #[test]
    fn abs_phase_expectation_between_zero_and_pi(n_mean in 0.0..200.0f64, theta in -PI..PI) {
        let d = coherent_dimension(n_mean);
        let state = coherent_state(CoherentParams::new(n_mean, theta).unwrap(), d).unwrap();
        let v = expectation(&abs_phase_operator(d).unwrap(), &state).unwrap();
        prop_assert!(v.re > 0.0 && v.re < PI);
        prop_assert!(v.im.abs() <= 1e-12);
    }

    #[test]
    fn reflected_phase_gives_same_expectations(n_mean in 0.5..80.0f64, theta in 0.0..PI) {
        let grid = gauss_legendre_grid(16).unwrap();
        for q in Quantity::ALL {
            let a = coherent_expectation(q, theta, n_mean, &grid).unwrap();
            let b = coherent_expectation(q, -theta, n_mean, &grid).unwrap();
            prop_assert!((a - b).abs() <= 1e-12, "{} {} vs {}", q, a, b);
        }
    }
}
