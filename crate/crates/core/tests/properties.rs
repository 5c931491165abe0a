//! Property tests for the structural invariants.

use exmc::diagnostics::{batch_means_variance, non_negligibility, tv_distance};
use exmc::exact::{
    build_mh_matrix, discretize_proposal, lazy_matrix, spectrum, ParamGrid,
};
use exmc::experiments::ExperimentConfig;
use exmc::kernels::{exchange_acceptance, Proposal};
use exmc::models::{self, PosteriorSpec, SamplePoint};
use proptest::prelude::*;

fn ising_model() -> models::UnnormalizedModel {
    models::ising(&[(0, 1, 1.0), (1, 2, 0.5)], 0.2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tv_symmetry_and_range(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let model = ising_model();
        let ab = tv_distance(&model, a, b).unwrap();
        let ba = tv_distance(&model, b, a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn tv_triangle_inequality(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let model = ising_model();
        let ab = tv_distance(&model, a, b).unwrap();
        let ac = tv_distance(&model, a, c).unwrap();
        let cb = tv_distance(&model, c, b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-10);
    }

    #[test]
    fn non_negligibility_monotone_in_delta(
        a in 0.25f64..0.75,
        b in 0.25f64..0.75,
        d1 in 0.05f64..0.9,
        d2 in 0.05f64..0.9,
    ) {
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        prop_assume!(lo < hi);
        let (model, _) = models::beta_binomial(10, 0.2, 0.8, 1.0, 1.0).unwrap();
        let p_lo = non_negligibility(&model, lo, &[(a, b)]).unwrap().probabilities[0];
        let p_hi = non_negligibility(&model, hi, &[(a, b)]).unwrap().probabilities[0];
        prop_assert!(p_hi <= p_lo + 1e-12);
    }

    #[test]
    fn random_walk_proposals_are_symmetric_and_translation_invariant(
        scale in 0.1f64..3.0,
        a in -5.0f64..5.0,
        d in -3.0f64..3.0,
        shift in -4.0f64..4.0,
    ) {
        for q in [
            Proposal::random_walk_gaussian(scale).unwrap(),
            Proposal::random_walk_uniform(scale).unwrap(),
        ] {
            let b = a + d;
            let fwd = q.log_q(a, b);
            let rev = q.log_q(b, a);
            if fwd.is_finite() || rev.is_finite() {
                prop_assert!((fwd - rev).abs() < 1e-12);
            } else {
                prop_assert_eq!(fwd, rev); // both off-support
            }
            let moved = q.log_q(a + shift, b + shift);
            if fwd.is_finite() || moved.is_finite() {
                prop_assert!((fwd - moved).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exchange_acceptance_stays_in_unit_interval(
        a in 0.25f64..0.75,
        b in 0.25f64..0.75,
        w in 0u64..11,
    ) {
        let (model, prior) = models::beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap();
        let post = PosteriorSpec::new(model, prior, SamplePoint::Discrete(7)).unwrap();
        let q = Proposal::independence_uniform(0.2, 0.8).unwrap();
        let acc = exchange_acceptance(a, b, &SamplePoint::Discrete(w), &post, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
    }

    #[test]
    fn lazy_spectral_map_for_random_laziness(lambda in 0.02f64..0.98) {
        let (model, prior) = models::beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap();
        let post = PosteriorSpec::new(model, prior, SamplePoint::Discrete(7)).unwrap();
        let grid = ParamGrid::uniform(0.2, 0.8, 15).unwrap();
        let q = discretize_proposal(&Proposal::independence_uniform(0.2, 0.8).unwrap(), &grid)
            .unwrap();
        let mh = build_mh_matrix(&post, &grid, &q).unwrap();
        let base = spectrum(&mh).unwrap().eigenvalues;
        let lazy = lazy_matrix(&mh, lambda).unwrap();
        let got = spectrum(&lazy).unwrap().eigenvalues;
        let mut want: Vec<f64> = base.iter().map(|v| lambda * v + (1.0 - lambda)).collect();
        want.sort_by(|x, y| x.total_cmp(y));
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn batch_means_is_nonnegative(values in proptest::collection::vec(-10.0f64..10.0, 100..400)) {
        let estimate = batch_means_variance(&values, 10).unwrap();
        prop_assert!(estimate >= 0.0);
    }

    #[test]
    fn config_roundtrip_with_varied_fields(
        steps in 1u64..1_000_000,
        seed in proptest::num::u64::ANY,
        laziness in 0.01f64..1.0,
        reps in 0u64..5_000,
    ) {
        let mut config = exmc::experiments::builtin("two-point").unwrap();
        config.steps = steps;
        config.seed = seed;
        config.laziness = laziness;
        config.replications = reps;
        let parsed = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
        prop_assert_eq!(parsed, config);
    }
}
