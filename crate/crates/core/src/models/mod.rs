//! Model abstractions: unnormalized likelihood families, priors, posteriors.
//!
//! An [`UnnormalizedModel`] is a family `f_θ(x)` together with an exact
//! normalizer `Z(θ)` (computable at desk scale) and an exact sampler for
//! `p_θ = f_θ / Z(θ)`. Kernels must never touch the normalizer — they receive
//! the model through [`IntractableView`], which only exposes `f` and the
//! sampler. Analysis and diagnostics code may read `log_normalizer` freely.

mod zoo;

pub use zoo::{
    beta_binomial, conjugate_prior, ergm, exponential_gamma, gaussian_location, ising,
    parse_edge_list_json, parse_graph_edges_json, parse_spin_config_json, poisson,
    two_point_bernoulli, two_point_posterior, ErgmStat,
};

use crate::error::{Error, Result};
use crate::quad::{self, QuadDomain};
use crate::rngs::ChainRng;
use rand::Rng;
use std::sync::Arc;

/// A point of a model's sample space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplePoint {
    /// Model-specific encoding: a count, a spin configuration bitmask, an
    /// edge-set bitmask.
    Discrete(u64),
    /// A point of a 1-D continuum.
    Real(f64),
}

impl SamplePoint {
    pub fn as_discrete(&self) -> u64 {
        match self {
            SamplePoint::Discrete(k) => *k,
            SamplePoint::Real(_) => panic!("expected a discrete sample point"),
        }
    }

    pub fn as_real(&self) -> f64 {
        match self {
            SamplePoint::Real(x) => *x,
            SamplePoint::Discrete(_) => panic!("expected a continuous sample point"),
        }
    }
}

/// Parameter-space descriptor. Canonical parameters are one-dimensional
/// throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSpace {
    /// An explicit finite set of parameter values.
    FiniteSet(Vec<f64>),
    /// A bounded interval `[lo, hi]`.
    Interval(f64, f64),
    /// The open half-line `(lo, ∞)`.
    HalfLine(f64),
    /// The whole real line.
    Line,
}

impl ParamSpace {
    pub fn contains(&self, theta: f64) -> bool {
        match self {
            ParamSpace::FiniteSet(pts) => pts.iter().any(|p| (p - theta).abs() < 1e-12),
            ParamSpace::Interval(lo, hi) => theta >= *lo && theta <= *hi,
            ParamSpace::HalfLine(lo) => theta > *lo,
            ParamSpace::Line => theta.is_finite(),
        }
    }

    /// A few representative points, used to validate that a posterior has
    /// positive mass somewhere.
    pub fn probe_points(&self) -> Vec<f64> {
        match self {
            ParamSpace::FiniteSet(pts) => pts.clone(),
            ParamSpace::Interval(lo, hi) => (0..5)
                .map(|i| lo + (hi - lo) * (0.1 + 0.2 * i as f64))
                .collect(),
            ParamSpace::HalfLine(lo) => vec![lo + 0.1, lo + 0.5, lo + 1.0, lo + 5.0, lo + 20.0],
            ParamSpace::Line => vec![-5.0, -1.0, 0.0, 1.0, 5.0],
        }
    }

    pub fn finite_points(&self) -> Option<&[f64]> {
        match self {
            ParamSpace::FiniteSet(pts) => Some(pts),
            _ => None,
        }
    }

    /// Quadrature domain matching the parameter space, for posterior
    /// integrals over a continuum Θ.
    pub fn quad_domain(&self) -> Option<QuadDomain> {
        match self {
            ParamSpace::FiniteSet(_) => None,
            ParamSpace::Interval(lo, hi) => Some(QuadDomain::Interval(*lo, *hi)),
            ParamSpace::HalfLine(lo) if *lo == 0.0 => Some(QuadDomain::PositiveHalfLine),
            ParamSpace::HalfLine(_) => None,
            ParamSpace::Line => Some(QuadDomain::RealLine),
        }
    }
}

/// Sample-space descriptor.
#[derive(Debug, Clone)]
pub enum SampleSpace {
    /// An explicit, fully enumerable point list.
    Finite(Vec<SamplePoint>),
    /// Counts 0, 1, 2, … enumerated per θ until the cumulative mass reaches
    /// `1 − mass_tol`. Requires the stored `f` to be normalized (Z ≡ 1).
    Countable { mass_tol: f64 },
    /// A 1-D continuum with a declared quadrature rule.
    Continuum { domain: QuadDomain, abs_tol: f64 },
}

/// Model family tag; lets diagnostics pick closed forms where they exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    Bernoulli,
    Binomial,
    Exponential,
    Poisson,
    GaussianLocation,
    Ising,
    Ergm,
}

type LogF = Arc<dyn Fn(f64, &SamplePoint) -> f64 + Send + Sync>;
type LogZ = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Sampler = Arc<dyn Fn(f64, &mut ChainRng) -> SamplePoint + Send + Sync>;
type Stat = Arc<dyn Fn(&SamplePoint) -> f64 + Send + Sync>;

/// An unnormalized likelihood family `f_θ(x)` with exact normalizer and exact
/// sampler. Immutable after construction; safe to share across chain runners.
#[derive(Clone)]
pub struct UnnormalizedModel {
    family: ModelFamily,
    param_space: ParamSpace,
    sample_space: SampleSpace,
    log_f: LogF,
    log_z: LogZ,
    sampler: Option<Sampler>,
    sufficient_stat: Option<Stat>,
    /// Exact max of |T(x)| over the enumerated sample space, when T exists
    /// and the space is enumerable.
    stat_bound: Option<f64>,
    /// True when `f_θ(x) = h(x) exp(θ·T(x))`, so `log_Z` is the cumulant
    /// function η of the canonical exponential family.
    canonical: bool,
}

impl std::fmt::Debug for UnnormalizedModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnnormalizedModel")
            .field("family", &self.family)
            .field("param_space", &self.param_space)
            .finish_non_exhaustive()
    }
}

impl UnnormalizedModel {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        family: ModelFamily,
        param_space: ParamSpace,
        sample_space: SampleSpace,
        log_f: LogF,
        log_z: LogZ,
        sampler: Option<Sampler>,
        sufficient_stat: Option<Stat>,
        canonical: bool,
    ) -> Self {
        let mut model = UnnormalizedModel {
            family,
            param_space,
            sample_space,
            log_f,
            log_z,
            sampler,
            sufficient_stat,
            stat_bound: None,
            canonical,
        };
        if let (Some(stat), SampleSpace::Finite(points)) =
            (&model.sufficient_stat, &model.sample_space)
        {
            let bound = points
                .iter()
                .map(|x| stat(x).abs())
                .fold(0.0_f64, f64::max);
            model.stat_bound = Some(bound);
        }
        model
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn param_space(&self) -> &ParamSpace {
        &self.param_space
    }

    pub fn sample_space(&self) -> &SampleSpace {
        &self.sample_space
    }

    /// Unnormalized log density `log f_θ(x)`.
    pub fn log_f(&self, theta: f64, x: &SamplePoint) -> f64 {
        (self.log_f)(theta, x)
    }

    /// Exact log normalizer. Analysis code only: kernels see the model through
    /// [`IntractableView`], which does not have this method.
    pub fn log_normalizer(&self, theta: f64) -> f64 {
        (self.log_z)(theta)
    }

    /// Normalized log density `log p_θ(x)`.
    pub fn log_p(&self, theta: f64, x: &SamplePoint) -> f64 {
        self.log_f(theta, x) - self.log_normalizer(theta)
    }

    /// One exact draw from `p_θ`.
    pub fn draw(&self, theta: f64, rng: &mut ChainRng) -> Result<SamplePoint> {
        if let Some(sampler) = &self.sampler {
            return Ok(sampler(theta, rng));
        }
        // inverse-CDF walk over the enumerated pmf, in enumeration order
        let pmf = self.enumerate(theta)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (x, p) in &pmf {
            acc += p;
            if u < acc {
                return Ok(*x);
            }
        }
        Ok(pmf.last().expect("non-empty sample space").0)
    }

    pub fn sufficient_stat(&self, x: &SamplePoint) -> Option<f64> {
        self.sufficient_stat.as_ref().map(|t| t(x))
    }

    pub fn has_sufficient_stat(&self) -> bool {
        self.sufficient_stat.is_some()
    }

    /// Exact max |T(x)| over the enumerated sample space, if available.
    pub fn stat_bound(&self) -> Option<f64> {
        self.stat_bound
    }

    pub fn is_canonical_expfam(&self) -> bool {
        self.canonical
    }

    /// Range (min, max) of the sufficient statistic over the sample space.
    pub fn stat_range(&self) -> Option<(f64, f64)> {
        let stat = self.sufficient_stat.as_ref()?;
        match &self.sample_space {
            SampleSpace::Finite(points) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for x in points {
                    let t = stat(x);
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
                Some((lo, hi))
            }
            SampleSpace::Countable { .. } => Some((0.0, f64::INFINITY)),
            SampleSpace::Continuum { domain, .. } => match domain {
                QuadDomain::Interval(lo, hi) => Some((*lo, *hi)),
                QuadDomain::PositiveHalfLine => Some((0.0, f64::INFINITY)),
                QuadDomain::RealLine => Some((f64::NEG_INFINITY, f64::INFINITY)),
            },
        }
    }

    /// Enumerate the pmf at θ: pairs `(x, p_θ(x))`. For countable spaces the
    /// walk stops once cumulative mass reaches `1 − mass_tol`.
    pub fn enumerate(&self, theta: f64) -> Result<Vec<(SamplePoint, f64)>> {
        match &self.sample_space {
            SampleSpace::Finite(points) => {
                let log_z = self.log_normalizer(theta);
                Ok(points
                    .iter()
                    .map(|x| (*x, (self.log_f(theta, x) - log_z).exp()))
                    .collect())
            }
            SampleSpace::Countable { mass_tol } => {
                let log_z = self.log_normalizer(theta);
                let mut out = Vec::new();
                let mut cum = 0.0;
                for k in 0..10_000_000u64 {
                    let x = SamplePoint::Discrete(k);
                    let p = (self.log_f(theta, &x) - log_z).exp();
                    out.push((x, p));
                    cum += p;
                    if cum >= 1.0 - mass_tol {
                        return Ok(out);
                    }
                }
                Err(Error::EnumerationBudget(format!(
                    "countable enumeration at theta = {theta} did not reach mass 1 - {mass_tol:e}"
                )))
            }
            SampleSpace::Continuum { .. } => Err(Error::NotApplicable(
                "continuum sample space is not enumerable".into(),
            )),
        }
    }

    /// Exact expectation `E_θ[g(X)]` by enumeration or quadrature.
    pub fn expect<G: Fn(&SamplePoint) -> f64>(&self, theta: f64, g: G) -> Result<f64> {
        match &self.sample_space {
            SampleSpace::Continuum { domain, abs_tol } => {
                let log_z = self.log_normalizer(theta);
                quad::integrate_domain(
                    |x| {
                        let pt = SamplePoint::Real(x);
                        let p = (self.log_f(theta, &pt) - log_z).exp();
                        if p == 0.0 {
                            0.0
                        } else {
                            p * g(&pt)
                        }
                    },
                    *domain,
                    *abs_tol,
                )
            }
            _ => Ok(self
                .enumerate(theta)?
                .iter()
                .map(|(x, p)| p * g(x))
                .sum()),
        }
    }

    /// Exact `E_θ[T(X)]` for models with a sufficient statistic.
    pub fn expect_stat(&self, theta: f64) -> Result<f64> {
        let stat = self
            .sufficient_stat
            .clone()
            .ok_or_else(|| Error::NotApplicable("model has no sufficient statistic".into()))?;
        self.expect(theta, |x| stat(x))
    }

    /// Total normalized mass Σ/∫ p_θ — should be 1; used by validation tests.
    pub fn normalization(&self, theta: f64) -> Result<f64> {
        self.expect(theta, |_| 1.0)
    }

    /// The restricted view handed to exchange kernels: no normalizer access.
    pub fn intractable_view(&self) -> IntractableView<'_> {
        IntractableView { model: self }
    }
}

/// The model as the exchange algorithm is allowed to see it: unnormalized
/// density evaluations and exact auxiliary draws. There is deliberately no
/// way to reach `log_normalizer` through this type, which makes the
/// doubly-intractable discipline structural rather than conventional.
#[derive(Clone, Copy)]
pub struct IntractableView<'a> {
    model: &'a UnnormalizedModel,
}

impl<'a> IntractableView<'a> {
    pub fn log_f(&self, theta: f64, x: &SamplePoint) -> f64 {
        self.model.log_f(theta, x)
    }

    pub fn draw(&self, theta: f64, rng: &mut ChainRng) -> Result<SamplePoint> {
        self.model.draw(theta, rng)
    }

    pub fn family(&self) -> ModelFamily {
        self.model.family()
    }
}

/// Prior family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorFamily {
    Gamma,
    TruncatedBeta,
    Gaussian,
    TruncatedGaussian,
    Mixture,
    ConjugateExponentialFamily,
    Discrete,
}

type LogDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A prior density on Θ, possibly unnormalized. `log_density` is finite on
/// the support and −∞ off it.
#[derive(Clone)]
pub struct Prior {
    family: PriorFamily,
    support: ParamSpace,
    log_density: LogDensity,
}

impl std::fmt::Debug for Prior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Prior")
            .field("family", &self.family)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl Prior {
    pub(crate) fn new(family: PriorFamily, support: ParamSpace, log_density: LogDensity) -> Self {
        Prior {
            family,
            support,
            log_density,
        }
    }

    pub fn family(&self) -> PriorFamily {
        self.family
    }

    pub fn support(&self) -> &ParamSpace {
        &self.support
    }

    pub fn log_density(&self, theta: f64) -> f64 {
        if self.support.contains(theta) {
            (self.log_density)(theta)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Gamma(shape, rate) on (0, ∞).
    pub fn gamma(shape: f64, rate: f64) -> Result<Prior> {
        if shape <= 0.0 || rate <= 0.0 {
            return Err(Error::InvalidParameter(
                "gamma prior needs shape > 0 and rate > 0".into(),
            ));
        }
        Ok(Prior::new(
            PriorFamily::Gamma,
            ParamSpace::HalfLine(0.0),
            Arc::new(move |t| (shape - 1.0) * t.ln() - rate * t),
        ))
    }

    /// Beta(a, b) truncated to `[lo, hi] ⊂ (0, 1)`.
    pub fn truncated_beta(a: f64, b: f64, lo: f64, hi: f64) -> Result<Prior> {
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::InvalidParameter(
                "truncated beta needs 0 < lo < hi < 1".into(),
            ));
        }
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidParameter(
                "truncated beta needs a > 0 and b > 0".into(),
            ));
        }
        Ok(Prior::new(
            PriorFamily::TruncatedBeta,
            ParamSpace::Interval(lo, hi),
            Arc::new(move |t| (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln()),
        ))
    }

    /// Gaussian(mean, sd²) on the whole line.
    pub fn gaussian(mean: f64, sd: f64) -> Result<Prior> {
        if sd <= 0.0 {
            return Err(Error::InvalidParameter("gaussian prior needs sd > 0".into()));
        }
        Ok(Prior::new(
            PriorFamily::Gaussian,
            ParamSpace::Line,
            Arc::new(move |t| -0.5 * (t - mean) * (t - mean) / (sd * sd)),
        ))
    }

    /// Gaussian(mean, sd²) truncated to `(lo, ∞)`.
    pub fn truncated_gaussian(mean: f64, sd: f64, lo: f64) -> Result<Prior> {
        if sd <= 0.0 {
            return Err(Error::InvalidParameter(
                "truncated gaussian prior needs sd > 0".into(),
            ));
        }
        Ok(Prior::new(
            PriorFamily::TruncatedGaussian,
            ParamSpace::HalfLine(lo),
            Arc::new(move |t| -0.5 * (t - mean) * (t - mean) / (sd * sd)),
        ))
    }

    /// Point masses on a finite parameter set.
    pub fn discrete(points: Vec<f64>, masses: Vec<f64>) -> Result<Prior> {
        if points.len() != masses.len() || points.is_empty() {
            return Err(Error::InvalidParameter(
                "discrete prior needs matching nonempty points and masses".into(),
            ));
        }
        if masses.iter().any(|m| *m <= 0.0) {
            return Err(Error::InvalidParameter(
                "discrete prior masses must be positive".into(),
            ));
        }
        let pts = points.clone();
        let log_masses: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
        Ok(Prior::new(
            PriorFamily::Discrete,
            ParamSpace::FiniteSet(points),
            Arc::new(move |t| {
                for (p, lm) in pts.iter().zip(&log_masses) {
                    if (p - t).abs() < 1e-12 {
                        return *lm;
                    }
                }
                f64::NEG_INFINITY
            }),
        ))
    }

    /// Finite mixture Σ λ_i π_i. Components must share a common support.
    pub fn mixture(components: Vec<(f64, Prior)>) -> Result<Prior> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        let support = components[0].1.support.clone();
        if components.iter().any(|(w, p)| *w <= 0.0 || p.support != support) {
            return Err(Error::InvalidParameter(
                "mixture needs positive weights and a common support".into(),
            ));
        }
        Ok(Prior::new(
            PriorFamily::Mixture,
            support,
            Arc::new(move |t| {
                let terms: Vec<f64> = components
                    .iter()
                    .map(|(w, p)| w.ln() + p.log_density(t))
                    .collect();
                log_sum_exp(&terms)
            }),
        ))
    }
}

/// Numerically stable log(Σ exp(x_i)).
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// A prior, a model, and one observation: everything that defines the target
/// posterior `π(θ|x) ∝ π(θ) f_θ(x) / Z(θ)`.
#[derive(Clone)]
pub struct PosteriorSpec {
    model: UnnormalizedModel,
    prior: Prior,
    data: SamplePoint,
}

impl std::fmt::Debug for PosteriorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PosteriorSpec")
            .field("model", &self.model)
            .field("prior", &self.prior)
            .field("data", &self.data)
            .finish()
    }
}

impl PosteriorSpec {
    pub fn new(model: UnnormalizedModel, prior: Prior, data: SamplePoint) -> Result<Self> {
        match (&model.sample_space, &data) {
            (SampleSpace::Finite(points), x) => {
                if !points.contains(x) {
                    return Err(Error::InvalidParameter(
                        "observation is not in the model's sample space".into(),
                    ));
                }
            }
            (SampleSpace::Countable { .. }, SamplePoint::Discrete(_)) => {}
            (SampleSpace::Continuum { .. }, SamplePoint::Real(x)) if x.is_finite() => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "observation does not match the sample-space kind".into(),
                ))
            }
        }
        let spec = PosteriorSpec { model, prior, data };
        let positive_somewhere = spec
            .model
            .param_space
            .probe_points()
            .iter()
            .any(|t| spec.log_unnorm(*t).is_finite());
        if !positive_somewhere {
            return Err(Error::UndefinedDensity(
                "posterior has zero mass at every probe point".into(),
            ));
        }
        Ok(spec)
    }

    pub fn model(&self) -> &UnnormalizedModel {
        &self.model
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn data(&self) -> &SamplePoint {
        &self.data
    }

    /// Log of the unnormalized posterior `π(θ) f_θ(x) / Z(θ)`. Uses the exact
    /// normalizer; this is the idealized target the comparison baseline sees.
    pub fn log_unnorm(&self, theta: f64) -> f64 {
        let lp = self.prior.log_density(theta);
        if !self.model.param_space.contains(theta) || lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + self.model.log_p(theta, &self.data)
    }

    /// Log of `π(θ) f_θ(x)` — the normalizer-free part, the only posterior
    /// quantity the exchange kernel may evaluate.
    pub fn log_unnorm_zfree(&self, theta: f64) -> f64 {
        let lp = self.prior.log_density(theta);
        if !self.model.param_space.contains(theta) || lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + self.model.log_f(theta, &self.data)
    }
}

#[cfg(test)]
mod tests;
