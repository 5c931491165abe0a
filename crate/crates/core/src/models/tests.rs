use super::*;
use crate::rngs;
use crate::special::chi_square_gof_pvalue;

fn chi_square_sampler_check(model: &UnnormalizedModel, theta: f64, n: usize, seed: u64) -> f64 {
    let pmf = model.enumerate(theta).unwrap();
    let mut rng = rngs::seeded(seed);
    let mut counts = vec![0u64; pmf.len() + 1]; // final cell catches tail overflow
    'draws: for _ in 0..n {
        let x = model.draw(theta, &mut rng).unwrap();
        for (idx, (pt, _)) in pmf.iter().enumerate() {
            if *pt == x {
                counts[idx] += 1;
                continue 'draws;
            }
        }
        counts[pmf.len()] += 1;
    }
    let mut expected: Vec<f64> = pmf.iter().map(|(_, p)| p * n as f64).collect();
    expected.push((1.0 - pmf.iter().map(|(_, p)| p).sum::<f64>()).max(0.0) * n as f64);
    chi_square_gof_pvalue(&counts, &expected, 5.0)
}

#[test]
fn two_point_posterior_is_uniform() {
    let (model, prior, data) = two_point_bernoulli();
    let spec = PosteriorSpec::new(model, prior, data).unwrap();
    let w1 = spec.log_unnorm(0.25).exp();
    let w2 = spec.log_unnorm(0.75).exp();
    let total = w1 + w2;
    assert!((w1 / total - 0.5).abs() < 1e-14);
    assert!((w2 / total - 0.5).abs() < 1e-14);
}

#[test]
fn two_point_bernoulli_mass() {
    let (model, _, _) = two_point_bernoulli();
    let p = model.log_p(0.75, &SamplePoint::Discrete(1)).exp();
    assert!((p - 0.75).abs() < 1e-15);
}

#[test]
fn two_point_sampler_mean() {
    let (model, _, _) = two_point_bernoulli();
    let mut rng = rngs::seeded(2024);
    let n = 100_000;
    let mut sum = 0u64;
    for _ in 0..n {
        sum += model.draw(0.75, &mut rng).unwrap().as_discrete();
    }
    let mean = sum as f64 / n as f64;
    assert!((mean - 0.75).abs() < 0.005, "empirical mean {mean}");
}

#[test]
fn beta_binomial_normalizes_and_matches_pmf() {
    let (model, _) = beta_binomial(10, 0.2, 0.8, 2.0, 3.0).unwrap();
    assert!((model.normalization(0.5).unwrap() - 1.0).abs() < 1e-12);
    let (small, _) = beta_binomial(2, 0.2, 0.8, 1.0, 1.0).unwrap();
    let p1 = small.log_p(0.5, &SamplePoint::Discrete(1)).exp();
    assert!((p1 - 0.5).abs() < 1e-14);
}

#[test]
fn beta_binomial_posterior_shape() {
    // posterior ∝ θ^{a+x−1} (1−θ)^{n+b−x−1} on [lo, hi]
    let (n, a, b, x) = (10u64, 2.0, 3.0, 7u64);
    let (model, prior) = beta_binomial(n, 0.2, 0.8, a, b).unwrap();
    let spec = PosteriorSpec::new(model, prior, SamplePoint::Discrete(x)).unwrap();
    let shape = |t: f64| {
        (a + x as f64 - 1.0) * t.ln() + (n as f64 + b - x as f64 - 1.0) * (1.0 - t).ln()
    };
    let t0 = 0.35;
    for i in 0..10 {
        let t = 0.25 + 0.05 * i as f64;
        let lhs = spec.log_unnorm(t) - spec.log_unnorm(t0);
        let rhs = shape(t) - shape(t0);
        assert!((lhs - rhs).abs() < 1e-10, "t = {t}: {lhs} vs {rhs}");
    }
}

#[test]
fn beta_binomial_rejects_bad_bounds() {
    assert!(beta_binomial(10, 0.8, 0.2, 1.0, 1.0).is_err());
    assert!(beta_binomial(10, 0.0, 0.8, 1.0, 1.0).is_err());
    assert!(beta_binomial(10, 0.2, 1.0, 1.0, 1.0).is_err());
    assert!(beta_binomial(10, 0.2, 0.8, -1.0, 1.0).is_err());
}

#[test]
fn exponential_gamma_posterior_is_gamma() {
    let (model, prior) = exponential_gamma();
    assert_eq!(model.log_normalizer(3.7), 0.0);
    let x = 1.0;
    let spec = PosteriorSpec::new(model, prior, SamplePoint::Real(x)).unwrap();
    // log posterior differences match log(θ e^{−θ(x+1)}) differences
    let shape = |t: f64| t.ln() - t * (x + 1.0);
    for &t in &[0.2, 0.7, 1.3, 2.9, 6.0] {
        let lhs = spec.log_unnorm(t) - spec.log_unnorm(1.0);
        let rhs = shape(t) - shape(1.0);
        assert!((lhs - rhs).abs() < 1e-12);
    }
    // quadrature normalization of the Gamma(2, x+1) posterior
    let total = crate::quad::integrate_domain(
        |t| spec.log_unnorm(t).exp(),
        crate::quad::QuadDomain::PositiveHalfLine,
        1e-12,
    )
    .unwrap();
    // unnormalized posterior is e^{−θ}·θe^{−θx}; its integral is Γ(2)/(x+1)² = 1/4
    assert!((total - 0.25).abs() < 1e-8, "total {total}");
}

#[test]
fn poisson_pmf_and_truncation() {
    let prior = Prior::gamma(2.0, 1.0).unwrap();
    let model = poisson(&prior).unwrap();
    let p0 = model.log_p(2.0, &SamplePoint::Discrete(0)).exp();
    assert!((p0 - (-2.0f64).exp()).abs() < 1e-14);
    for &theta in &[0.3, 2.0, 17.5] {
        let mass: f64 = model
            .enumerate(theta)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        assert!(mass >= 1.0 - 1e-12, "theta = {theta}: mass {mass}");
    }
}

#[test]
fn poisson_rejects_unsupported_prior() {
    let prior = Prior::gaussian(0.0, 1.0).unwrap();
    assert!(poisson(&prior).is_err());
    let ok = Prior::truncated_gaussian(1.0, 2.0, 0.0).unwrap();
    assert!(poisson(&ok).is_ok());
}

#[test]
fn gaussian_location_conjugate_posterior() {
    let sigma = 2.0;
    let x = 0.8;
    let (model, prior) = gaussian_location(sigma).unwrap();
    let spec = PosteriorSpec::new(model, prior, SamplePoint::Real(x)).unwrap();
    // closed-form Normal-Normal posterior: N(x σ²/(1+σ²), σ²/(1+σ²))
    let post_var = sigma * sigma / (1.0 + sigma * sigma);
    let post_mean = x * sigma * sigma / (1.0 + sigma * sigma);
    let closed = |t: f64| -0.5 * (t - post_mean) * (t - post_mean) / post_var;
    for i in 0..10 {
        let t = -2.0 + 0.45 * i as f64;
        let lhs = spec.log_unnorm(t) - spec.log_unnorm(0.0);
        let rhs = closed(t) - closed(0.0);
        assert!((lhs - rhs).abs() < 1e-10, "t = {t}");
    }
    // mode value of the standardized density
    let mode = spec.model().log_p(0.3, &SamplePoint::Real(0.3)).exp();
    assert!((mode - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
}

#[test]
fn ising_single_edge_exactness() {
    let model = ising(&[(0, 1, 1.0)], 0.0).unwrap();
    // θ = 0: all four configurations equiprobable
    for mask in 0..4u64 {
        let p = model.log_p(0.0, &SamplePoint::Discrete(mask)).exp();
        assert!((p - 0.25).abs() < 1e-14);
    }
    // Z(θ) = 2e^θ + 2e^{−θ} (hand enumeration over the four states)
    for &theta in &[-1.3, 0.0, 0.4, 2.0] {
        let z = model.log_normalizer(theta).exp();
        let expect = 2.0 * theta.exp() + 2.0 * (-theta).exp();
        assert!((z - expect).abs() < 1e-10 * expect);
    }
}

#[test]
fn ising_stat_bound_is_exact_and_triangle_bounded() {
    // frustrated triangle with a field: the triangle-inequality bound is not tight
    let edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)];
    let field = 1.0;
    let model = ising(&edges, field).unwrap();
    let bound = model.stat_bound().unwrap();
    let max_t = match model.sample_space() {
        SampleSpace::Finite(points) => points
            .iter()
            .map(|x| model.sufficient_stat(x).unwrap().abs())
            .fold(0.0f64, f64::max),
        _ => unreachable!(),
    };
    assert_eq!(bound, max_t);
    let triangle: f64 = edges.iter().map(|e| e.2.abs()).sum::<f64>() + field.abs() * 3.0;
    assert!(bound <= triangle + 1e-12);
    assert!(bound < triangle, "this instance is strictly frustrated");
}

#[test]
fn ising_budget_and_validation() {
    assert!(matches!(
        ising(&[(0, 21, 1.0)], 0.0),
        Err(crate::Error::EnumerationBudget(_))
    ));
    assert!(ising(&[(0, 0, 1.0)], 0.0).is_err());
    assert!(ising(&[(0, 1, 1.0), (1, 0, 2.0)], 0.0).is_err());
}

#[test]
fn ising_and_ergm_at_the_budget_boundary() {
    // a 20-vertex path graph sits exactly at the enumeration cap
    let edges: Vec<(usize, usize, f64)> = (0..19).map(|i| (i, i + 1, 1.0)).collect();
    let model = ising(&edges, 0.0).unwrap();
    // Z(0) counts the 2^20 configurations
    assert!((model.log_normalizer(0.0) - 20.0 * 2.0f64.ln()).abs() < 1e-9);
    // 5 vertices is the random-graph cap: 2^10 graphs
    let rg = ergm(5, ErgmStat::EdgeCount).unwrap();
    assert!((rg.log_normalizer(0.0) - 10.0 * 2.0f64.ln()).abs() < 1e-10);
    assert_eq!(rg.stat_bound().unwrap(), 10.0);
}

#[test]
fn ergm_exactness() {
    let model = ergm(3, ErgmStat::EdgeCount).unwrap();
    for mask in 0..8u64 {
        let p = model.log_p(0.0, &SamplePoint::Discrete(mask)).exp();
        assert!((p - 0.125).abs() < 1e-14);
    }
    // independent edges: Z(θ) = (1 + e^θ)^3
    for &theta in &[-2.0, 0.0, 0.7, 1.9] {
        let z = model.log_normalizer(theta).exp();
        let expect = (1.0 + theta.exp()).powi(3);
        assert!((z - expect).abs() < 1e-10 * expect);
    }
    let n4 = ergm(4, ErgmStat::EdgeCount).unwrap();
    assert_eq!(n4.stat_bound().unwrap(), 6.0);
    assert!(matches!(
        ergm(6, ErgmStat::EdgeCount),
        Err(crate::Error::EnumerationBudget(_))
    ));
}

#[test]
fn ergm_triangle_count() {
    let model = ergm(4, ErgmStat::TriangleCount).unwrap();
    // complete graph on 4 vertices has C(4,3) = 4 triangles
    assert_eq!(model.stat_bound().unwrap(), 4.0);
    let empty = model.sufficient_stat(&SamplePoint::Discrete(0)).unwrap();
    assert_eq!(empty, 0.0);
}

#[test]
fn conjugate_prior_symmetry_and_concentration() {
    let model = ising(&[(0, 1, 1.0)], 0.0).unwrap();
    let prior = conjugate_prior(&model, 1.0, 0.0).unwrap();
    // t = 0 with a field-free coupling gives a prior symmetric about θ = 0
    for i in 0..50 {
        let t = 0.05 * (i as f64 + 1.0);
        assert!((prior.log_density(t) - prior.log_density(-t)).abs() < 1e-10);
    }
    // finite on a grid for t at the midpoint of the statistic range
    let (m1, big_m1) = model.stat_range().unwrap();
    let mid = 0.5 * (m1 + big_m1);
    let prior_mid = conjugate_prior(&model, 1.0, mid).unwrap();
    for i in 0..100 {
        let t = -3.0 + 6.0 * i as f64 / 99.0;
        assert!(prior_mid.log_density(t).is_finite());
    }
    // larger n0 concentrates the prior (grid moments)
    let tight = conjugate_prior(&model, 10.0, 0.0).unwrap();
    let grid_variance = |p: &Prior| {
        let grid: Vec<f64> = (0..400).map(|i| -4.0 + 8.0 * i as f64 / 399.0).collect();
        let weights: Vec<f64> = grid.iter().map(|t| p.log_density(*t).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mean: f64 = grid.iter().zip(&weights).map(|(t, w)| t * w).sum::<f64>() / total;
        grid.iter()
            .zip(&weights)
            .map(|(t, w)| (t - mean) * (t - mean) * w)
            .sum::<f64>()
            / total
    };
    assert!(grid_variance(&tight) < grid_variance(&prior));
    // t outside the statistic range is rejected
    assert!(conjugate_prior(&model, 1.0, 1.5).is_err());
    assert!(conjugate_prior(&model, 1.0, -1.0).is_err());
}

#[test]
fn normalization_across_models_and_parameters() {
    let mut cases: Vec<(UnnormalizedModel, Vec<f64>, f64)> = Vec::new();
    let (two_point, _, _) = two_point_bernoulli();
    cases.push((two_point, vec![0.25, 0.75], 1e-10));
    let (bb, _) = beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap();
    cases.push((bb, (0..20).map(|i| 0.21 + 0.029 * i as f64).collect(), 1e-10));
    let poi = poisson(&Prior::gamma(2.0, 1.0).unwrap()).unwrap();
    cases.push((poi, (0..20).map(|i| 0.2 + 0.7 * i as f64).collect(), 1e-10));
    let isg = ising(&[(0, 1, 1.0), (1, 2, 0.5)], 0.3).unwrap();
    cases.push((isg, (0..20).map(|i| -2.0 + 0.21 * i as f64).collect(), 1e-10));
    let rg = ergm(4, ErgmStat::TriangleCount).unwrap();
    cases.push((rg, (0..20).map(|i| -2.0 + 0.21 * i as f64).collect(), 1e-10));
    let (expo, _) = exponential_gamma();
    cases.push((expo, (0..20).map(|i| 0.1 + 0.5 * i as f64).collect(), 1e-6));
    let (gauss, _) = gaussian_location(1.5).unwrap();
    cases.push((gauss, (0..20).map(|i| -3.0 + 0.3 * i as f64).collect(), 1e-6));
    for (model, thetas, tol) in cases {
        for theta in thetas {
            let norm = model.normalization(theta).unwrap();
            assert!(
                (norm - 1.0).abs() < tol,
                "{:?} at theta {theta}: {norm}",
                model.family()
            );
        }
    }
}

#[test]
fn samplers_pass_chi_square() {
    let n = 100_000;
    let (two_point, _, _) = two_point_bernoulli();
    assert!(chi_square_sampler_check(&two_point, 0.75, n, 11) > 0.001);
    let (bb, _) = beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap();
    assert!(chi_square_sampler_check(&bb, 0.63, n, 12) > 0.001);
    let poi = poisson(&Prior::gamma(2.0, 1.0).unwrap()).unwrap();
    assert!(chi_square_sampler_check(&poi, 3.4, n, 13) > 0.001);
    let isg = ising(&[(0, 1, 1.0), (1, 2, 0.5), (0, 2, -0.25)], 0.1).unwrap();
    assert!(chi_square_sampler_check(&isg, 0.8, n, 14) > 0.001);
    let rg = ergm(3, ErgmStat::EdgeCount).unwrap();
    assert!(chi_square_sampler_check(&rg, -0.4, n, 15) > 0.001);
}

#[test]
fn exponential_family_identity() {
    // dη/dθ (central difference) = E_θ[T] for canonical families
    let h = 1e-5;
    let cases: Vec<(UnnormalizedModel, Vec<f64>)> = vec![
        (
            ising(&[(0, 1, 1.0), (1, 2, 0.5)], 0.3).unwrap(),
            vec![-1.0, -0.2, 0.0, 0.6, 1.4],
        ),
        (
            ergm(4, ErgmStat::EdgeCount).unwrap(),
            vec![-1.5, -0.5, 0.0, 0.5, 1.5],
        ),
        (
            gaussian_location(1.0).unwrap().0,
            vec![-2.0, 0.0, 0.7, 3.0],
        ),
    ];
    for (model, thetas) in cases {
        for theta in thetas {
            let deriv = (model.log_normalizer(theta + h) - model.log_normalizer(theta - h))
                / (2.0 * h);
            let expect = model.expect_stat(theta).unwrap();
            assert!(
                (deriv - expect).abs() < 1e-6,
                "{:?} at theta {theta}: {deriv} vs {expect}",
                model.family()
            );
        }
    }
}

#[test]
fn priors_are_finite_on_support_only() {
    let cases = vec![
        Prior::gamma(2.0, 1.0).unwrap(),
        Prior::truncated_beta(2.0, 3.0, 0.2, 0.8).unwrap(),
        Prior::gaussian(0.0, 1.0).unwrap(),
        Prior::truncated_gaussian(1.0, 2.0, 0.0).unwrap(),
        Prior::discrete(vec![0.25, 0.75], vec![0.75, 0.25]).unwrap(),
        Prior::mixture(vec![
            (0.5, Prior::gamma(2.0, 1.0).unwrap()),
            (0.5, Prior::gamma(5.0, 2.0).unwrap()),
        ])
        .unwrap(),
    ];
    for prior in &cases {
        for theta in prior.support().probe_points() {
            assert!(
                prior.log_density(theta).is_finite(),
                "{:?} at {theta}",
                prior.family()
            );
        }
    }
    assert_eq!(
        Prior::gamma(2.0, 1.0).unwrap().log_density(-1.0),
        f64::NEG_INFINITY
    );
    assert_eq!(
        Prior::truncated_beta(1.0, 1.0, 0.2, 0.8)
            .unwrap()
            .log_density(0.9),
        f64::NEG_INFINITY
    );
    assert_eq!(
        Prior::discrete(vec![0.25], vec![1.0]).unwrap().log_density(0.3),
        f64::NEG_INFINITY
    );
}

#[test]
fn edge_list_json_roundtrip() {
    let edges = parse_edge_list_json("[[0,1,1.0],[1,2,0.5]]").unwrap();
    assert_eq!(edges, vec![(0, 1, 1.0), (1, 2, 0.5)]);
    assert!(parse_edge_list_json("[[0,1]]").is_err());
    let spins = parse_spin_config_json("[1,-1,1]", 3).unwrap();
    assert_eq!(spins, SamplePoint::Discrete(0b101));
    assert!(parse_spin_config_json("[1,2]", 2).is_err());
    let graph = parse_graph_edges_json("[[0,1],[1,2]]", 3).unwrap();
    // slots on 3 vertices: (0,1), (0,2), (1,2)
    assert_eq!(graph, SamplePoint::Discrete(0b101));
    assert!(parse_graph_edges_json("[[0,5]]", 3).is_err());
}

#[test]
fn enumerable_normalization_is_tight() {
    // enumerable sample spaces normalize to 1e-12, tighter than the generic bound
    let cases: Vec<(UnnormalizedModel, f64)> = vec![
        (two_point_bernoulli().0, 0.75),
        (beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap().0, 0.44),
        (poisson(&Prior::gamma(2.0, 1.0).unwrap()).unwrap(), 3.3),
        (ising(&[(0, 1, 1.0), (1, 2, -0.5)], 0.2).unwrap(), 1.1),
        (ergm(4, ErgmStat::EdgeCount).unwrap(), -0.7),
    ];
    for (model, theta) in cases {
        let mass: f64 = model
            .enumerate(theta)
            .unwrap()
            .iter()
            .map(|(_, p)| p)
            .sum();
        assert!(
            (mass - 1.0).abs() <= 1e-12,
            "{:?}: |mass - 1| = {:e}",
            model.family(),
            (mass - 1.0).abs()
        );
    }
}

#[test]
fn models_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<UnnormalizedModel>();
    assert_send_sync::<Prior>();
    assert_send_sync::<PosteriorSpec>();
    assert_send_sync::<crate::kernels::Proposal>();
    assert_send_sync::<crate::exact::FiniteChain>();
}

#[test]
fn posterior_spec_validation() {
    let (model, prior, _) = two_point_bernoulli();
    // observation outside the sample space
    assert!(PosteriorSpec::new(model.clone(), prior.clone(), SamplePoint::Discrete(7)).is_err());
    assert!(PosteriorSpec::new(model, prior, SamplePoint::Real(0.3)).is_err());
}
