//! The model zoo: concrete likelihood families with exact samplers and
//! desk-scale exact normalizers.

use super::{
    ModelFamily, ParamSpace, Prior, PriorFamily, PosteriorSpec, SamplePoint, SampleSpace,
    UnnormalizedModel,
};
use crate::error::{Error, Result};
use crate::quad::QuadDomain;
use crate::rngs::{standard_normal, ChainRng};
use crate::special::ln_gamma;
use rand::Rng;
use std::sync::Arc;

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// The two-point Bernoulli posterior: Θ = {1/4, 3/4}, one observation x = 1,
/// prior (3/4, 1/4). The posterior is uniform on Θ, which makes every
/// transition quantity computable by hand.
pub fn two_point_bernoulli() -> (UnnormalizedModel, Prior, SamplePoint) {
    let model = UnnormalizedModel::new(
        ModelFamily::Bernoulli,
        ParamSpace::FiniteSet(vec![0.25, 0.75]),
        SampleSpace::Finite(vec![SamplePoint::Discrete(0), SamplePoint::Discrete(1)]),
        Arc::new(|theta, x| match x.as_discrete() {
            0 => (1.0 - theta).ln(),
            1 => theta.ln(),
            _ => f64::NEG_INFINITY,
        }),
        Arc::new(|_| 0.0),
        Some(Arc::new(|theta, rng: &mut ChainRng| {
            SamplePoint::Discrete(if rng.gen::<f64>() < theta { 1 } else { 0 })
        })),
        None,
        false,
    );
    let prior = Prior::discrete(vec![0.25, 0.75], vec![0.75, 0.25]).expect("valid masses");
    (model, prior, SamplePoint::Discrete(1))
}

/// Binomial(n, θ) likelihood on {0..n} with a truncated Beta(a, b) prior on
/// `[lo, hi] ⊂ (0, 1)`.
pub fn beta_binomial(n: u64, lo: f64, hi: f64, a: f64, b: f64) -> Result<(UnnormalizedModel, Prior)> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidParameter(
            "beta-binomial needs 0 < lo < hi < 1".into(),
        ));
    }
    if a <= 0.0 || b <= 0.0 || n < 1 {
        return Err(Error::InvalidParameter(
            "beta-binomial needs a, b > 0 and n >= 1".into(),
        ));
    }
    let points = (0..=n).map(SamplePoint::Discrete).collect();
    let model = UnnormalizedModel::new(
        ModelFamily::Binomial,
        ParamSpace::Interval(lo, hi),
        SampleSpace::Finite(points),
        Arc::new(move |theta, x| {
            let k = x.as_discrete();
            if k > n {
                return f64::NEG_INFINITY;
            }
            ln_choose(n, k) + k as f64 * theta.ln() + (n - k) as f64 * (1.0 - theta).ln()
        }),
        Arc::new(|_| 0.0),
        Some(Arc::new(move |theta, rng: &mut ChainRng| {
            // inverse-CDF walk with the recursive pmf
            let u: f64 = rng.gen();
            let mut p = (1.0 - theta).powi(n as i32);
            let mut cum = p;
            let mut k = 0u64;
            while u >= cum && k < n {
                p *= (n - k) as f64 / (k + 1) as f64 * theta / (1.0 - theta);
                k += 1;
                cum += p;
            }
            SamplePoint::Discrete(k)
        })),
        None,
        false,
    );
    let prior = Prior::truncated_beta(a, b, lo, hi)?;
    Ok((model, prior))
}

/// Exponential(θ) likelihood on (0, ∞) with an Exp(1) prior. The posterior
/// given x is Gamma(2, x + 1).
pub fn exponential_gamma() -> (UnnormalizedModel, Prior) {
    let model = UnnormalizedModel::new(
        ModelFamily::Exponential,
        ParamSpace::HalfLine(0.0),
        SampleSpace::Continuum {
            domain: QuadDomain::PositiveHalfLine,
            abs_tol: 1e-10,
        },
        Arc::new(|theta, x| {
            let w = x.as_real();
            if w <= 0.0 {
                f64::NEG_INFINITY
            } else {
                theta.ln() - theta * w
            }
        }),
        Arc::new(|_| 0.0),
        Some(Arc::new(|theta, rng: &mut ChainRng| {
            let u: f64 = rng.gen();
            SamplePoint::Real(-(1.0 - u).ln() / theta)
        })),
        None,
        false,
    );
    let prior = Prior::gamma(1.0, 1.0).expect("valid gamma");
    (model, prior)
}

/// Poisson(θ) likelihood with a caller-supplied prior supported on `[0, ∞)`.
/// The countable sample space is enumerated per θ until cumulative mass
/// reaches `1 − 1e-12`.
pub fn poisson(prior: &Prior) -> Result<UnnormalizedModel> {
    let support_ok = match prior.support() {
        ParamSpace::HalfLine(lo) => *lo >= 0.0,
        ParamSpace::Interval(lo, _) => *lo >= 0.0,
        ParamSpace::FiniteSet(pts) => pts.iter().all(|p| *p >= 0.0),
        ParamSpace::Line => false,
    };
    if !support_ok {
        return Err(Error::InvalidParameter(
            "poisson model needs a prior supported on [0, inf)".into(),
        ));
    }
    Ok(UnnormalizedModel::new(
        ModelFamily::Poisson,
        ParamSpace::HalfLine(0.0),
        SampleSpace::Countable { mass_tol: 1e-12 },
        Arc::new(|theta, x| {
            let k = x.as_discrete();
            -theta + k as f64 * theta.ln() - ln_gamma(k as f64 + 1.0)
        }),
        Arc::new(|_| 0.0),
        Some(Arc::new(|theta, rng: &mut ChainRng| {
            // sequential-search inversion
            let u: f64 = rng.gen();
            let mut p = (-theta).exp();
            let mut cum = p;
            let mut k = 0u64;
            while u >= cum && k < 10_000_000 {
                k += 1;
                p *= theta / k as f64;
                cum += p;
            }
            SamplePoint::Discrete(k)
        })),
        None,
        false,
    ))
}

/// Normal(θ, 1) location family on ℝ with a Normal(0, σ²) prior. Written in
/// canonical form `f_θ(x) = h(x) e^{θx}` with normalizer `e^{θ²/2}`, so the
/// exchange kernel genuinely never sees a normalized density.
pub fn gaussian_location(sigma_prior: f64) -> Result<(UnnormalizedModel, Prior)> {
    if sigma_prior <= 0.0 {
        return Err(Error::InvalidParameter(
            "gaussian location needs sigma_prior > 0".into(),
        ));
    }
    let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let model = UnnormalizedModel::new(
        ModelFamily::GaussianLocation,
        ParamSpace::Line,
        SampleSpace::Continuum {
            domain: QuadDomain::RealLine,
            abs_tol: 1e-10,
        },
        Arc::new(move |theta, x| {
            let v = x.as_real();
            theta * v - 0.5 * v * v - half_log_2pi
        }),
        Arc::new(|theta| 0.5 * theta * theta),
        Some(Arc::new(|theta, rng: &mut ChainRng| {
            SamplePoint::Real(theta + standard_normal(rng))
        })),
        Some(Arc::new(|x| x.as_real())),
        true,
    );
    let prior = Prior::gaussian(0.0, sigma_prior)?;
    Ok((model, prior))
}

/// Parse an edge list given as JSON `[[i, j, J_ij], ...]`.
pub fn parse_edge_list_json(s: &str) -> Result<Vec<(usize, usize, f64)>> {
    serde_json::from_str::<Vec<(usize, usize, f64)>>(s)
        .map_err(|e| Error::InvalidParameter(format!("bad edge-list JSON: {e}")))
}

/// Parse a spin configuration given as JSON `[1, -1, ...]` into the bitmask
/// encoding (bit i set means spin +1 at vertex i).
pub fn parse_spin_config_json(s: &str, n: usize) -> Result<SamplePoint> {
    let spins: Vec<i8> = serde_json::from_str(s)
        .map_err(|e| Error::InvalidParameter(format!("bad spin-config JSON: {e}")))?;
    if spins.len() != n || spins.iter().any(|v| *v != 1 && *v != -1) {
        return Err(Error::InvalidParameter(format!(
            "spin config must hold exactly {n} entries of +/-1"
        )));
    }
    let mut mask = 0u64;
    for (i, v) in spins.iter().enumerate() {
        if *v == 1 {
            mask |= 1 << i;
        }
    }
    Ok(SamplePoint::Discrete(mask))
}

/// Parse a simple graph given as JSON `[[i, j], ...]` into the edge-slot
/// bitmask encoding used by the random-graph model on `n` vertices.
pub fn parse_graph_edges_json(s: &str, n: usize) -> Result<SamplePoint> {
    let edges: Vec<(usize, usize)> = serde_json::from_str(s)
        .map_err(|e| Error::InvalidParameter(format!("bad graph-edge JSON: {e}")))?;
    let slots = edge_slots(n);
    let mut mask = 0u64;
    for (i, j) in edges {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let slot = slots
            .iter()
            .position(|&(x, y)| (x, y) == (a, b))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("edge ({i}, {j}) is not valid on {n} vertices"))
            })?;
        mask |= 1 << slot;
    }
    Ok(SamplePoint::Discrete(mask))
}

fn spin(mask: u64, i: usize) -> f64 {
    if mask >> i & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Ising model on a general graph: `P_θ(σ) ∝ exp(θ·T(σ))` with
/// `T(σ) = Σ J_ij σ_i σ_j + field · Σ σ_i` (the negated Hamiltonian).
/// Exact sampling and the normalizer both enumerate all `2^n` configurations,
/// so the vertex count is capped at 20.
pub fn ising(edges: &[(usize, usize, f64)], field: f64) -> Result<UnnormalizedModel> {
    if edges.is_empty() {
        return Err(Error::InvalidParameter("ising needs at least one edge".into()));
    }
    let n = edges
        .iter()
        .map(|&(i, j, _)| i.max(j) + 1)
        .max()
        .unwrap_or(0);
    if n > 20 {
        return Err(Error::EnumerationBudget(format!(
            "ising on {n} vertices exceeds the 2^20-state enumeration budget"
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &(i, j, _) in edges {
        if i == j {
            return Err(Error::InvalidParameter(format!("self-loop at vertex {i}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge ({i}, {j})"
            )));
        }
    }
    let edges: Vec<(usize, usize, f64)> = edges.to_vec();
    let stat = {
        let edges = edges.clone();
        move |x: &SamplePoint| -> f64 {
            let mask = x.as_discrete();
            let mut t = 0.0;
            for &(i, j, coupling) in &edges {
                t += coupling * spin(mask, i) * spin(mask, j);
            }
            if field != 0.0 {
                for i in 0..n {
                    t += field * spin(mask, i);
                }
            }
            t
        }
    };
    let stat_for_f = Arc::new(stat);
    let stat_for_z = stat_for_f.clone();
    let stat_field = stat_for_f.clone();
    let states: u64 = 1 << n;
    let points = (0..states).map(SamplePoint::Discrete).collect();
    Ok(UnnormalizedModel::new(
        ModelFamily::Ising,
        ParamSpace::Line,
        SampleSpace::Finite(points),
        Arc::new(move |theta, x| theta * stat_for_f(x)),
        Arc::new(move |theta| {
            // log Σ_σ exp(θ T(σ)), streamed to avoid materializing 2^n terms
            let mut max = f64::NEG_INFINITY;
            for mask in 0..states {
                max = max.max(theta * stat_for_z(&SamplePoint::Discrete(mask)));
            }
            let mut sum = 0.0;
            for mask in 0..states {
                sum += (theta * stat_for_z(&SamplePoint::Discrete(mask)) - max).exp();
            }
            max + sum.ln()
        }),
        None, // exact draws via the enumerated inverse CDF
        Some(Arc::new(move |x| stat_field(x))),
        true,
    ))
}

/// Sufficient statistic choices for the random-graph model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErgmStat {
    EdgeCount,
    TriangleCount,
}

fn edge_slots(n: usize) -> Vec<(usize, usize)> {
    let mut slots = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            slots.push((i, j));
        }
    }
    slots
}

/// Exponential random graph model on simple undirected graphs with `n`
/// vertices: `P_θ(g) ∝ exp(θ·s(g))`. Enumeration over all `2^{n(n−1)/2}`
/// graphs caps the vertex count at 5.
pub fn ergm(n: usize, stat: ErgmStat) -> Result<UnnormalizedModel> {
    if n < 2 {
        return Err(Error::InvalidParameter("ergm needs at least 2 vertices".into()));
    }
    if n > 5 {
        return Err(Error::EnumerationBudget(format!(
            "ergm on {n} vertices exceeds the 2^10-graph enumeration budget"
        )));
    }
    let slots = edge_slots(n);
    let m = slots.len();
    let triples: Vec<(usize, usize, usize)> = {
        // slot indices of the three edges of each vertex triple
        let slot_of = |a: usize, b: usize| {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            slots.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap()
        };
        let mut out = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    out.push((slot_of(a, b), slot_of(b, c), slot_of(a, c)));
                }
            }
        }
        out
    };
    let stat_fn = move |x: &SamplePoint| -> f64 {
        let mask = x.as_discrete();
        match stat {
            ErgmStat::EdgeCount => mask.count_ones() as f64,
            ErgmStat::TriangleCount => triples
                .iter()
                .filter(|&&(e1, e2, e3)| {
                    mask >> e1 & 1 == 1 && mask >> e2 & 1 == 1 && mask >> e3 & 1 == 1
                })
                .count() as f64,
        }
    };
    let stat_for_f = Arc::new(stat_fn);
    let stat_for_z = stat_for_f.clone();
    let stat_field = stat_for_f.clone();
    let graphs: u64 = 1 << m;
    let points = (0..graphs).map(SamplePoint::Discrete).collect();
    Ok(UnnormalizedModel::new(
        ModelFamily::Ergm,
        ParamSpace::Line,
        SampleSpace::Finite(points),
        Arc::new(move |theta, x| theta * stat_for_f(x)),
        Arc::new(move |theta| {
            let mut max = f64::NEG_INFINITY;
            for mask in 0..graphs {
                max = max.max(theta * stat_for_z(&SamplePoint::Discrete(mask)));
            }
            let mut sum = 0.0;
            for mask in 0..graphs {
                sum += (theta * stat_for_z(&SamplePoint::Discrete(mask)) - max).exp();
            }
            max + sum.ln()
        }),
        None,
        Some(Arc::new(move |x| stat_field(x))),
        true,
    ))
}

/// Conjugate prior `π(θ) ∝ exp(n0 (θt − η(θ)))` for a canonical exponential
/// family, where η is the model's log normalizer. `t` must lie strictly
/// inside the range of the sufficient statistic.
pub fn conjugate_prior(model: &UnnormalizedModel, n0: f64, t: f64) -> Result<Prior> {
    if !model.is_canonical_expfam() {
        return Err(Error::NotApplicable(
            "conjugate prior needs a canonical exponential-family model".into(),
        ));
    }
    if n0 <= 0.0 {
        return Err(Error::InvalidParameter("conjugate prior needs n0 > 0".into()));
    }
    let (m1, big_m1) = model
        .stat_range()
        .ok_or_else(|| Error::NotApplicable("model has no sufficient statistic".into()))?;
    if !(t > m1 && t < big_m1) {
        return Err(Error::InvalidParameter(format!(
            "conjugate prior mean parameter t = {t} must lie strictly inside ({m1}, {big_m1})"
        )));
    }
    let inner = model.clone();
    Ok(Prior::new(
        PriorFamily::ConjugateExponentialFamily,
        model.param_space().clone(),
        Arc::new(move |theta| n0 * (theta * t - inner.log_normalizer(theta))),
    ))
}

/// Convenience: assemble the two-point posterior spec directly.
pub fn two_point_posterior() -> PosteriorSpec {
    let (model, prior, data) = two_point_bernoulli();
    PosteriorSpec::new(model, prior, data).expect("two-point posterior is well-formed")
}
