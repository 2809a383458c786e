//! Cross-module properties through the public API.

use proptest::prelude::*;

use qpartial::linalg::{hermitian_eig, Matrix};
use qpartial::logic::{gleason_measure, state_leq};
use qpartial::observable::expected_interval_op;
use qpartial::random::{self, SeededRng};
use qpartial::verify::{random_pair, PairKind};
use qpartial::{BoundedObservable, PartialDensityOperator, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rng(seed: u64) -> SeededRng {
    random::rng(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigensolver_reconstructs(seed in any::<u64>(), n in 1usize..=16) {
        let a = random::random_hermitian::<f64>(&mut rng(seed), n);
        let eig = hermitian_eig(&a, &tol()).unwrap();
        prop_assert!(eig.reconstruct().distance(&a).unwrap() < 1e-9);
        prop_assert!(eig.orthonormality_error() < 1e-10);
        let sum: f64 = eig.eigenvalues.iter().sum();
        let squares: f64 = eig.eigenvalues.iter().map(|l| l * l).sum();
        prop_assert!((sum - a.trace().re).abs() < 1e-9);
        prop_assert!((squares - a.trace_product(&a).unwrap().re).abs() < 1e-9);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn order_test_matches_construction(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let (f, g, kind) = random_pair(&mut r, n, &tol()).unwrap();
        let order = state_leq(&f, &g, &tol()).unwrap();
        prop_assert_eq!(order.leq, kind == PairKind::Comparable);
        if let Some(w) = order.witness {
            let gap = gleason_measure(&f, &w, &tol()).unwrap() - gleason_measure(&g, &w, &tol()).unwrap();
            prop_assert!(gap > 1e-9);
        }
    }

    #[test]
    fn measure_is_monotone_in_the_state(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let f = random::partial_density::<f64>(&mut r, n);
        let room = 1.0 - f.trace();
        let g = PartialDensityOperator::repaired(f.matrix() + &random::psd_with_trace(&mut r, n, room), &tol()).unwrap();
        for _ in 0..20 {
            let k = random::any_subspace::<f64>(&mut r, n);
            prop_assert!(gleason_measure(&f, &k, &tol()).unwrap() <= gleason_measure(&g, &k, &tol()).unwrap() + 1e-12);
        }
    }

    #[test]
    fn expectation_contains_every_completion(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let a = random::random_hermitian::<f64>(&mut r, n);
        let f = random::partial_density::<f64>(&mut r, n);
        let interval = expected_interval_op(&a, &f, &tol()).unwrap();
        for _ in 0..10 {
            let g = f.matrix() + &random::psd_with_trace(&mut r, n, 1.0 - f.trace());
            let value = a.trace_product(&g).unwrap().re;
            prop_assert!(interval.contains_within(value, 1e-9));
        }
        // the endpoints are attained by putting the missing mass on an extreme eigenvector
        let eig = hermitian_eig(&a, &tol()).unwrap();
        let low = f.matrix() + &Matrix::projector(&eig.eigenvector(0)).scale(1.0 - f.trace());
        prop_assert!((a.trace_product(&low).unwrap().re - interval.lo()).abs() < 1e-9);
    }

    #[test]
    fn expectation_is_antitone_along_the_order(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let obs = BoundedObservable::from_hermitian(random::random_hermitian(&mut r, n), &tol()).unwrap();
        let f = random::partial_density::<f64>(&mut r, n);
        let g = PartialDensityOperator::repaired(
            f.matrix() + &random::psd_with_trace(&mut r, n, (1.0 - f.trace()) / 2.0),
            &tol(),
        )
        .unwrap();
        let ef = obs.expected_interval(&f, &tol()).unwrap();
        let eg = obs.expected_interval(&g, &tol()).unwrap();
        prop_assert!(ef.below_within(&eg, 1e-9));
    }
}
