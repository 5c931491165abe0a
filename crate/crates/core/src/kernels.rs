//! Markov transition rules: Metropolis–Hastings, exchange, lazy mixing.
//!
//! The idealized Metropolis–Hastings acceptance reads the exact normalizer
//! and exists as the comparison baseline. The exchange acceptance replaces the
//! normalizer ratio with `f_θ(w)/f_θ'(w)` for an auxiliary draw `w ~ p_θ'`;
//! its code path receives the model through [`IntractableView`] and therefore
//! cannot evaluate `log_Z` at all.
//!
//! All acceptance ratios are computed in log space: Ising and random-graph
//! unnormalized densities span hundreds of e-folds.

use crate::error::{Error, Result};
use crate::models::{IntractableView, PosteriorSpec, SamplePoint};
use crate::rngs::{seeded, standard_normal, ChainRng};
use rand::Rng;
use std::sync::Arc;

/// Proposal family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalFamily {
    RandomWalkGaussian,
    RandomWalkUniform,
    Independence,
    DiscreteUniform,
}

type LogQ = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ProposalSampler = Arc<dyn Fn(f64, &mut ChainRng) -> f64 + Send + Sync>;

/// A proposal kernel `q(θ, ·)` with density evaluation and exact sampling.
#[derive(Clone)]
pub struct Proposal {
    family: ProposalFamily,
    symmetric: bool,
    log_q: LogQ,
    sampler: ProposalSampler,
}

impl std::fmt::Debug for Proposal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Proposal")
            .field("family", &self.family)
            .field("symmetric", &self.symmetric)
            .finish_non_exhaustive()
    }
}

impl Proposal {
    pub fn family(&self) -> ProposalFamily {
        self.family
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn log_q(&self, from: f64, to: f64) -> f64 {
        (self.log_q)(from, to)
    }

    pub fn sample(&self, from: f64, rng: &mut ChainRng) -> f64 {
        (self.sampler)(from, rng)
    }

    /// Gaussian random walk with the given step scale.
    pub fn random_walk_gaussian(scale: f64) -> Result<Proposal> {
        if scale <= 0.0 {
            return Err(Error::InvalidParameter("random-walk scale must be > 0".into()));
        }
        let log_norm = (scale * (2.0 * std::f64::consts::PI).sqrt()).ln();
        Ok(Proposal {
            family: ProposalFamily::RandomWalkGaussian,
            symmetric: true,
            log_q: Arc::new(move |from, to| {
                let d = to - from;
                -0.5 * d * d / (scale * scale) - log_norm
            }),
            sampler: Arc::new(move |from, rng| from + scale * standard_normal(rng)),
        })
    }

    /// Uniform random walk on `[θ − h, θ + h]`.
    pub fn random_walk_uniform(half_width: f64) -> Result<Proposal> {
        if half_width <= 0.0 {
            return Err(Error::InvalidParameter(
                "random-walk half-width must be > 0".into(),
            ));
        }
        Ok(Proposal {
            family: ProposalFamily::RandomWalkUniform,
            symmetric: true,
            log_q: Arc::new(move |from, to| {
                if (to - from).abs() <= half_width {
                    -(2.0 * half_width).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }),
            sampler: Arc::new(move |from, rng| from + half_width * (2.0 * rng.gen::<f64>() - 1.0)),
        })
    }

    /// Independence proposal drawing uniformly from `[lo, hi]`.
    pub fn independence_uniform(lo: f64, hi: f64) -> Result<Proposal> {
        let ordered = lo < hi;
        if !ordered {
            return Err(Error::InvalidParameter("need lo < hi".into()));
        }
        Ok(Proposal {
            family: ProposalFamily::Independence,
            symmetric: false,
            log_q: Arc::new(move |_, to| {
                if to >= lo && to <= hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }),
            sampler: Arc::new(move |_, rng| lo + (hi - lo) * rng.gen::<f64>()),
        })
    }

    /// Independence proposal drawing from Gamma(shape, rate) with integer
    /// shape (sampled as a sum of exponentials; fully deterministic given the
    /// stream).
    pub fn independence_gamma(shape: u32, rate: f64) -> Result<Proposal> {
        if shape == 0 || rate <= 0.0 {
            return Err(Error::InvalidParameter(
                "gamma proposal needs shape >= 1 and rate > 0".into(),
            ));
        }
        let log_norm = shape as f64 * rate.ln() - crate::special::ln_gamma(shape as f64);
        Ok(Proposal {
            family: ProposalFamily::Independence,
            symmetric: false,
            log_q: Arc::new(move |_, to| {
                if to > 0.0 {
                    log_norm + (shape as f64 - 1.0) * to.ln() - rate * to
                } else {
                    f64::NEG_INFINITY
                }
            }),
            sampler: Arc::new(move |_, rng| {
                let mut acc = 0.0;
                for _ in 0..shape {
                    let u: f64 = rng.gen();
                    acc -= (1.0 - u).ln();
                }
                acc / rate
            }),
        })
    }

    /// Uniform proposal over the *other* points of a finite parameter set.
    pub fn discrete_uniform(points: Vec<f64>) -> Result<Proposal> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "discrete-uniform proposal needs at least two points".into(),
            ));
        }
        let k = points.len();
        let pts = points.clone();
        let pts_sample = points;
        Ok(Proposal {
            family: ProposalFamily::DiscreteUniform,
            symmetric: true,
            log_q: Arc::new(move |from, to| {
                let from_in = pts.iter().any(|p| (p - from).abs() < 1e-12);
                let to_in = pts.iter().any(|p| (p - to).abs() < 1e-12);
                if from_in && to_in && (from - to).abs() > 1e-12 {
                    -((k - 1) as f64).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }),
            sampler: Arc::new(move |from, rng| {
                let others: Vec<f64> = pts_sample
                    .iter()
                    .copied()
                    .filter(|p| (p - from).abs() > 1e-12)
                    .collect();
                others[rng.gen_range(0..others.len())]
            }),
        })
    }
}

/// Which transition rule a kernel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Mh,
    Exchange,
}

/// One Markov transition rule: algorithm, proposal, target, and laziness
/// λ ∈ (0, 1] (the kernel λP + (1−λ)I; λ = 1 means no lazy mixing).
#[derive(Clone, Copy)]
pub struct KernelSpec<'a> {
    pub algorithm: Algorithm,
    pub proposal: &'a Proposal,
    pub posterior: &'a PosteriorSpec,
    pub laziness: f64,
}

impl<'a> KernelSpec<'a> {
    pub fn new(
        algorithm: Algorithm,
        proposal: &'a Proposal,
        posterior: &'a PosteriorSpec,
        laziness: f64,
    ) -> Result<Self> {
        let in_range = laziness > 0.0 && laziness <= 1.0;
        if !in_range {
            return Err(Error::InvalidParameter(format!(
                "laziness must lie in (0, 1], got {laziness}"
            )));
        }
        Ok(KernelSpec {
            algorithm,
            proposal,
            posterior,
            laziness,
        })
    }
}

/// Idealized Metropolis–Hastings acceptance probability
/// `min(1, q(θ',θ) π(θ'|x) / (q(θ,θ') π(θ|x)))`, evaluated with the exact
/// normalizer. This is the comparison baseline, not an implementable sampler
/// in the doubly-intractable setting.
pub fn mh_acceptance(
    theta: f64,
    theta_new: f64,
    posterior: &PosteriorSpec,
    proposal: &Proposal,
) -> Result<f64> {
    let cur = posterior.log_unnorm(theta);
    if cur == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(format!(
            "posterior density is zero at the current state {theta}"
        )));
    }
    if theta_new == theta {
        return Ok(1.0);
    }
    let prop = posterior.log_unnorm(theta_new);
    if prop == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let fwd = proposal.log_q(theta, theta_new);
    let rev = proposal.log_q(theta_new, theta);
    if fwd == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(format!(
            "proposal density q({theta} -> {theta_new}) is zero"
        )));
    }
    let log_ratio = rev + prop - fwd - cur;
    Ok(log_ratio.exp().min(1.0))
}

/// Exchange acceptance probability
/// `min(1, [π(θ') q(θ',θ) f_θ'(x) f_θ(w)] / [π(θ) q(θ,θ') f_θ(x) f_θ'(w)])`.
/// Never evaluates the normalizer: the model enters only through its
/// [`IntractableView`].
pub fn exchange_acceptance(
    theta: f64,
    theta_new: f64,
    aux: &SamplePoint,
    posterior: &PosteriorSpec,
    proposal: &Proposal,
) -> Result<f64> {
    let view = posterior.model().intractable_view();
    exchange_acceptance_blind(theta, theta_new, aux, posterior, proposal, &view)
}

/// Inner exchange ratio; the signature admits only the normalizer-free parts
/// of the target, which is what makes the discipline structural.
fn exchange_acceptance_blind(
    theta: f64,
    theta_new: f64,
    aux: &SamplePoint,
    posterior: &PosteriorSpec,
    proposal: &Proposal,
    view: &IntractableView<'_>,
) -> Result<f64> {
    let cur = posterior.log_unnorm_zfree(theta);
    if cur == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(format!(
            "prior times f_theta(x) is zero at the current state {theta}"
        )));
    }
    if theta_new == theta {
        return Ok(1.0);
    }
    let aux_under_new = view.log_f(theta_new, aux);
    if aux_under_new == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(
            "auxiliary draw has zero density under the proposed parameter".into(),
        ));
    }
    let prop = posterior.log_unnorm_zfree(theta_new);
    if prop == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let fwd = proposal.log_q(theta, theta_new);
    let rev = proposal.log_q(theta_new, theta);
    if fwd == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(format!(
            "proposal density q({theta} -> {theta_new}) is zero"
        )));
    }
    let aux_under_cur = view.log_f(theta, aux);
    let log_ratio = prop + rev + aux_under_cur - cur - fwd - aux_under_new;
    Ok(log_ratio.exp().min(1.0))
}

/// What a single transition did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Lazy hold: the kernel did not even propose. Recorded distinctly from a
    /// rejection so diagnostics can separate the sources of `P(θ, {θ})` mass.
    Held,
    Rejected,
    Accepted,
}

#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub next: f64,
    pub outcome: StepOutcome,
    pub aux: Option<SamplePoint>,
}

/// One transition of the kernel. With probability 1 − λ the state is held;
/// otherwise a proposal is drawn, the exchange algorithm draws its auxiliary
/// variable `w ~ p_θ'` exactly, and the move is accepted iff `r ≤ a`
/// (ties accepted; fixed for determinism).
pub fn step(spec: &KernelSpec<'_>, theta: f64, rng: &mut ChainRng) -> Result<Step> {
    if spec.laziness < 1.0 {
        let coin: f64 = rng.gen();
        if coin >= spec.laziness {
            return Ok(Step {
                next: theta,
                outcome: StepOutcome::Held,
                aux: None,
            });
        }
    }
    let theta_new = spec.proposal.sample(theta, rng);
    let (acceptance, aux) = match spec.algorithm {
        Algorithm::Mh => (mh_acceptance(theta, theta_new, spec.posterior, spec.proposal)?, None),
        Algorithm::Exchange => {
            // proposals with zero target mass are rejected without drawing w:
            // p_θ' does not exist outside the parameter space
            if spec.posterior.log_unnorm_zfree(theta_new) == f64::NEG_INFINITY {
                (0.0, None)
            } else {
                let view = spec.posterior.model().intractable_view();
                let w = view.draw(theta_new, rng)?;
                let a = exchange_acceptance_blind(
                    theta,
                    theta_new,
                    &w,
                    spec.posterior,
                    spec.proposal,
                    &view,
                )?;
                (a, Some(w))
            }
        }
    };
    let r: f64 = rng.gen();
    if acceptance > 0.0 && r <= acceptance {
        Ok(Step {
            next: theta_new,
            outcome: StepOutcome::Accepted,
            aux,
        })
    } else {
        Ok(Step {
            next: theta,
            outcome: StepOutcome::Rejected,
            aux,
        })
    }
}

/// A realized chain: `steps + 1` states plus per-step accept/hold flags and,
/// for exchange kernels, the auxiliary draws.
#[derive(Debug, Clone)]
pub struct Trace {
    pub states: Vec<f64>,
    pub accepted: Vec<bool>,
    pub held: Vec<bool>,
    pub aux: Option<Vec<Option<SamplePoint>>>,
    pub seed: u64,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.accepted.len()
    }

    /// Fraction of steps that moved.
    pub fn move_fraction(&self) -> f64 {
        self.accepted.iter().filter(|a| **a).count() as f64 / self.steps() as f64
    }

    /// Fraction of steps spent in a lazy hold.
    pub fn hold_fraction(&self) -> f64 {
        self.held.iter().filter(|h| **h).count() as f64 / self.steps() as f64
    }

    /// Apply `h` to the post-initial states.
    pub fn map_states<F: Fn(f64) -> f64>(&self, h: F) -> Vec<f64> {
        self.states[1..].iter().map(|t| h(*t)).collect()
    }

    /// Write `step,theta,accepted,held` rows. Step 0 is the initial state and
    /// carries zero flags.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,theta,accepted,held")?;
        writeln!(out, "0,{},0,0", self.states[0])?;
        for i in 0..self.steps() {
            writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                self.states[i + 1],
                self.accepted[i] as u8,
                self.held[i] as u8
            )?;
        }
        Ok(())
    }

    /// JSON sidecar recording the seed and the config hash of the run.
    pub fn sidecar_json(&self, config_hash: &str) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "config_hash": config_hash,
            "steps": self.steps(),
            "initial_state": self.states[0],
            "final_state": *self.states.last().unwrap(),
            "move_fraction": self.move_fraction(),
            "hold_fraction": self.hold_fraction(),
        })
    }
}

/// Run a chain for `steps` transitions from `theta0`. Deterministic given the
/// seed: the same seed reproduces the trace bit for bit.
pub fn run_chain(spec: &KernelSpec<'_>, theta0: f64, steps: usize, seed: u64) -> Result<Trace> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let target0 = match spec.algorithm {
        Algorithm::Mh => spec.posterior.log_unnorm(theta0),
        Algorithm::Exchange => spec.posterior.log_unnorm_zfree(theta0),
    };
    if target0 == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(format!(
            "initial state {theta0} has zero posterior mass"
        )));
    }
    let mut rng = seeded(seed);
    let mut states = Vec::with_capacity(steps + 1);
    let mut accepted = Vec::with_capacity(steps);
    let mut held = Vec::with_capacity(steps);
    let mut aux_draws = match spec.algorithm {
        Algorithm::Exchange => Some(Vec::with_capacity(steps)),
        Algorithm::Mh => None,
    };
    let mut theta = theta0;
    states.push(theta);
    for _ in 0..steps {
        let s = step(spec, theta, &mut rng)?;
        theta = s.next;
        states.push(theta);
        accepted.push(s.outcome == StepOutcome::Accepted);
        held.push(s.outcome == StepOutcome::Held);
        if let Some(aux) = aux_draws.as_mut() {
            aux.push(s.aux);
        }
    }
    Ok(Trace {
        states,
        accepted,
        held,
        aux: aux_draws,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, two_point_posterior};
    use crate::rngs;

    fn two_point_proposal() -> Proposal {
        Proposal::discrete_uniform(vec![0.25, 0.75]).unwrap()
    }

    #[test]
    fn mh_acceptance_two_point() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let a = mh_acceptance(0.25, 0.75, &post, &q).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
        let a = mh_acceptance(0.75, 0.25, &post, &q).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
        // θ' = θ is a unit ratio
        assert_eq!(mh_acceptance(0.25, 0.25, &post, &q).unwrap(), 1.0);
    }

    #[test]
    fn mh_acceptance_posterior_proposal_is_unit() {
        // independence proposal equal to the posterior accepts everything
        let (model, prior) = models::exponential_gamma();
        let x = 1.0;
        let post = crate::models::PosteriorSpec::new(
            model,
            prior,
            crate::models::SamplePoint::Real(x),
        )
        .unwrap();
        let q = Proposal::independence_gamma(2, x + 1.0).unwrap();
        let mut rng = rngs::seeded(5);
        for _ in 0..50 {
            let a = q.sample(0.0, &mut rng);
            let b = q.sample(0.0, &mut rng);
            let acc = mh_acceptance(a, b, &post, &q).unwrap();
            assert!((acc - 1.0).abs() < 1e-12, "({a}, {b}): {acc}");
        }
    }

    #[test]
    fn exchange_acceptance_two_point_hand_values() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        // prefactor is 1; the ratio is f_θ1(w)/f_θ2(w)
        let a = exchange_acceptance(
            0.25,
            0.75,
            &crate::models::SamplePoint::Discrete(1),
            &post,
            &q,
        )
        .unwrap();
        assert!((a - 1.0 / 3.0).abs() < 1e-14);
        let a = exchange_acceptance(
            0.25,
            0.75,
            &crate::models::SamplePoint::Discrete(0),
            &post,
            &q,
        )
        .unwrap();
        assert!((a - 1.0).abs() < 1e-14, "ratio 3 capped at 1");
        let a = exchange_acceptance(
            0.25,
            0.25,
            &crate::models::SamplePoint::Discrete(0),
            &post,
            &q,
        )
        .unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn exchange_move_frequency_is_half() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let spec = KernelSpec::new(Algorithm::Exchange, &q, &post, 1.0).unwrap();
        let trace = run_chain(&spec, 0.25, 100_000, 99).unwrap();
        let freq = trace.move_fraction();
        assert!((freq - 0.5).abs() < 0.01, "move frequency {freq}");
    }

    #[test]
    fn mh_two_point_alternates_deterministically() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let spec = KernelSpec::new(Algorithm::Mh, &q, &post, 1.0).unwrap();
        let trace = run_chain(&spec, 0.25, 64, 7).unwrap();
        for (i, s) in trace.states.iter().enumerate() {
            let expect = if i % 2 == 0 { 0.25 } else { 0.75 };
            assert_eq!(*s, expect);
        }
        assert!(trace.accepted.iter().all(|a| *a));
    }

    #[test]
    fn lazy_hold_frequency() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let spec = KernelSpec::new(Algorithm::Mh, &q, &post, 0.5).unwrap();
        let trace = run_chain(&spec, 0.25, 100_000, 21).unwrap();
        let hold = trace.hold_fraction();
        assert!((hold - 0.5).abs() < 0.01, "hold frequency {hold}");
        // holds are flagged distinctly from rejections: this kernel never rejects
        for i in 0..trace.steps() {
            assert!(trace.accepted[i] || trace.held[i]);
        }
    }

    #[test]
    fn lazy_step_replays_inner_dynamics() {
        // conditioned on not holding, a lazy step equals the λ = 1 step run on
        // the post-coin stream
        let post = two_point_posterior();
        let q = two_point_proposal();
        let lazy = KernelSpec::new(Algorithm::Exchange, &q, &post, 0.7).unwrap();
        let full = KernelSpec::new(Algorithm::Exchange, &q, &post, 1.0).unwrap();
        for seed in 0..200 {
            let mut rng_lazy = rngs::seeded(seed);
            let mut rng_ref = rngs::seeded(seed);
            let got = step(&lazy, 0.25, &mut rng_lazy).unwrap();
            let coin: f64 = rand::Rng::gen(&mut rng_ref);
            if coin >= 0.7 {
                assert_eq!(got.outcome, StepOutcome::Held);
                assert_eq!(got.next, 0.25);
            } else {
                let want = step(&full, 0.25, &mut rng_ref).unwrap();
                assert_eq!(got.next, want.next);
                assert_eq!(got.outcome, want.outcome);
                assert_eq!(got.aux, want.aux);
            }
        }
    }

    #[test]
    fn run_chain_is_deterministic() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let spec = KernelSpec::new(Algorithm::Exchange, &q, &post, 0.9).unwrap();
        let a = run_chain(&spec, 0.25, 5_000, 1234).unwrap();
        let b = run_chain(&spec, 0.25, 5_000, 1234).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(a.held, b.held);
        assert_eq!(a.states.len(), 5_001);
        assert_eq!(a.accepted.len(), 5_000);
    }

    #[test]
    fn detailed_balance_flows_two_point() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        for algorithm in [Algorithm::Mh, Algorithm::Exchange] {
            let spec = KernelSpec::new(algorithm, &q, &post, 1.0).unwrap();
            // stationary start: posterior is uniform on the two points
            let mut rng = rngs::seeded(31);
            let theta0 = if rand::Rng::gen::<f64>(&mut rng) < 0.5 { 0.25 } else { 0.75 };
            let trace = run_chain(&spec, theta0, 100_000, 32).unwrap();
            let mut n12 = 0i64;
            let mut n21 = 0i64;
            for w in trace.states.windows(2) {
                if w[0] == 0.25 && w[1] == 0.75 {
                    n12 += 1;
                } else if w[0] == 0.75 && w[1] == 0.25 {
                    n21 += 1;
                }
            }
            let se = ((n12 + n21) as f64).sqrt();
            assert!(
                ((n12 - n21) as f64).abs() <= 4.0 * se.max(1.0),
                "{algorithm:?}: flows {n12} vs {n21}"
            );
        }
    }

    #[test]
    fn beta_binomial_exchange_recovers_posterior_mean() {
        let (model, prior) = models::beta_binomial(10, 0.2, 0.8, 2.0, 2.0).unwrap();
        let post = crate::models::PosteriorSpec::new(
            model,
            prior,
            crate::models::SamplePoint::Discrete(7),
        )
        .unwrap();
        // quadrature posterior-mean oracle on [0.2, 0.8]
        let weight = |t: f64| post.log_unnorm(t).exp();
        let mass = crate::quad::integrate(weight, 0.2, 0.8, 1e-13).unwrap();
        let mean_oracle =
            crate::quad::integrate(|t| t * weight(t), 0.2, 0.8, 1e-13).unwrap() / mass;
        let q = Proposal::independence_uniform(0.2, 0.8).unwrap();
        let spec = KernelSpec::new(Algorithm::Exchange, &q, &post, 1.0).unwrap();
        let trace = run_chain(&spec, 0.5, 100_000, 606).unwrap();
        let n = trace.steps() as f64;
        let mean = trace.states[1..].iter().sum::<f64>() / n;
        let mcse = (crate::diagnostics::batch_means_variance_trace(&trace, |t| t, 300)
            .unwrap()
            / n)
            .sqrt();
        assert!(
            (mean - mean_oracle).abs() <= 3.0 * mcse,
            "mean {mean} vs oracle {mean_oracle} (mcse {mcse})"
        );
    }

    #[test]
    fn trace_csv_format() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        let spec = KernelSpec::new(Algorithm::Mh, &q, &post, 1.0).unwrap();
        let trace = run_chain(&spec, 0.25, 3, 77).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,theta,accepted,held");
        assert_eq!(lines[1], "0,0.25,0,0");
        assert_eq!(lines[2], "1,0.75,1,0");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn proposal_symmetry_checks() {
        let mut rng = rngs::seeded(8);
        let rw = [
            Proposal::random_walk_gaussian(1.3).unwrap(),
            Proposal::random_walk_uniform(0.8).unwrap(),
        ];
        for q in &rw {
            for _ in 0..100 {
                let a = 4.0 * (rand::Rng::gen::<f64>(&mut rng) - 0.5);
                let b = a + 0.7 * (rand::Rng::gen::<f64>(&mut rng) - 0.5);
                assert!((q.log_q(a, b) - q.log_q(b, a)).abs() < 1e-12);
                // translation invariance on random triples
                let shift = 3.0 * (rand::Rng::gen::<f64>(&mut rng) - 0.5);
                let lq = q.log_q(a, b);
                let lq_shifted = q.log_q(a + shift, b + shift);
                assert!((lq - lq_shifted).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_mass_proposals_are_rejected_not_fatal() {
        // random walk on the exponential-gamma posterior walks below 0 sometimes
        let (model, prior) = models::exponential_gamma();
        let post = crate::models::PosteriorSpec::new(
            model,
            prior,
            crate::models::SamplePoint::Real(1.0),
        )
        .unwrap();
        let q = Proposal::random_walk_gaussian(2.0).unwrap();
        for algorithm in [Algorithm::Mh, Algorithm::Exchange] {
            let spec = KernelSpec::new(algorithm, &q, &post, 1.0).unwrap();
            let trace = run_chain(&spec, 0.5, 2_000, 3).unwrap();
            assert!(trace.states.iter().all(|t| *t > 0.0));
        }
    }

    #[test]
    fn kernel_spec_validates_laziness() {
        let post = two_point_posterior();
        let q = two_point_proposal();
        assert!(KernelSpec::new(Algorithm::Mh, &q, &post, 0.0).is_err());
        assert!(KernelSpec::new(Algorithm::Mh, &q, &post, 1.2).is_err());
        assert!(KernelSpec::new(Algorithm::Mh, &q, &post, 1.0).is_ok());
    }
}
