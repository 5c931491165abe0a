//! Python bindings: posterior construction, kernels, chain execution, exact
//! finite-chain analysis and the headline diagnostics.

use exmc::diagnostics;
use exmc::exact;
use exmc::experiments;
use exmc::kernels;
use exmc::models;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: exmc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A prior, model and observation: the target posterior.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Posterior {
    inner: models::PosteriorSpec,
}

#[pymethods]
impl Posterior {
    /// Two-point Bernoulli posterior (uniform over {1/4, 3/4}).
    #[staticmethod]
    fn two_point() -> Posterior {
        Posterior {
            inner: models::two_point_posterior(),
        }
    }

    /// Binomial(n, θ) likelihood with a truncated Beta(a, b) prior on [lo, hi].
    #[staticmethod]
    fn beta_binomial(n: u64, lo: f64, hi: f64, a: f64, b: f64, data: u64) -> PyResult<Posterior> {
        let (model, prior) = models::beta_binomial(n, lo, hi, a, b).map_err(err)?;
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, models::SamplePoint::Discrete(data))
                .map_err(err)?,
        })
    }

    /// Exponential(θ) likelihood with an Exp(1) prior.
    #[staticmethod]
    fn exponential_gamma(data: f64) -> PyResult<Posterior> {
        let (model, prior) = models::exponential_gamma();
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, models::SamplePoint::Real(data))
                .map_err(err)?,
        })
    }

    /// Poisson(θ) likelihood with a Gamma(shape, rate) prior.
    #[staticmethod]
    fn poisson_gamma(shape: f64, rate: f64, data: u64) -> PyResult<Posterior> {
        let prior = models::Prior::gamma(shape, rate).map_err(err)?;
        let model = models::poisson(&prior).map_err(err)?;
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, models::SamplePoint::Discrete(data))
                .map_err(err)?,
        })
    }

    /// Normal(θ, 1) location likelihood with a Normal(0, σ²) prior.
    #[staticmethod]
    fn gaussian_location(sigma_prior: f64, data: f64) -> PyResult<Posterior> {
        let (model, prior) = models::gaussian_location(sigma_prior).map_err(err)?;
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, models::SamplePoint::Real(data))
                .map_err(err)?,
        })
    }

    /// Ising model from a JSON edge list `[[i, j, J], ...]` and a JSON spin
    /// configuration `[1, -1, ...]`, with a Gaussian prior on θ.
    #[staticmethod]
    fn ising(
        edges_json: &str,
        field: f64,
        data_json: &str,
        prior_mean: f64,
        prior_sd: f64,
    ) -> PyResult<Posterior> {
        let edges = models::parse_edge_list_json(edges_json).map_err(err)?;
        let model = models::ising(&edges, field).map_err(err)?;
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        let data = models::parse_spin_config_json(data_json, n).map_err(err)?;
        let prior = models::Prior::gaussian(prior_mean, prior_sd).map_err(err)?;
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, data).map_err(err)?,
        })
    }

    /// Random-graph model on `vertices` nodes with the named statistic
    /// ("edge-count" or "triangle-count"), observed graph as JSON edges.
    #[staticmethod]
    fn ergm(
        vertices: usize,
        stat: &str,
        data_json: &str,
        prior_mean: f64,
        prior_sd: f64,
    ) -> PyResult<Posterior> {
        let stat = match stat {
            "edge-count" => models::ErgmStat::EdgeCount,
            "triangle-count" => models::ErgmStat::TriangleCount,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown statistic `{other}`; use edge-count or triangle-count"
                )))
            }
        };
        let model = models::ergm(vertices, stat).map_err(err)?;
        let data = models::parse_graph_edges_json(data_json, vertices).map_err(err)?;
        let prior = models::Prior::gaussian(prior_mean, prior_sd).map_err(err)?;
        Ok(Posterior {
            inner: models::PosteriorSpec::new(model, prior, data).map_err(err)?,
        })
    }

    /// Log of the unnormalized posterior density at θ (uses the exact
    /// normalizer; analysis side).
    fn log_unnorm(&self, theta: f64) -> f64 {
        self.inner.log_unnorm(theta)
    }
}

/// A proposal kernel.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Proposal {
    inner: kernels::Proposal,
}

#[pymethods]
impl Proposal {
    #[staticmethod]
    fn random_walk_gaussian(scale: f64) -> PyResult<Proposal> {
        Ok(Proposal {
            inner: kernels::Proposal::random_walk_gaussian(scale).map_err(err)?,
        })
    }

    #[staticmethod]
    fn random_walk_uniform(half_width: f64) -> PyResult<Proposal> {
        Ok(Proposal {
            inner: kernels::Proposal::random_walk_uniform(half_width).map_err(err)?,
        })
    }

    #[staticmethod]
    fn independence_uniform(lo: f64, hi: f64) -> PyResult<Proposal> {
        Ok(Proposal {
            inner: kernels::Proposal::independence_uniform(lo, hi).map_err(err)?,
        })
    }

    #[staticmethod]
    fn independence_gamma(shape: u32, rate: f64) -> PyResult<Proposal> {
        Ok(Proposal {
            inner: kernels::Proposal::independence_gamma(shape, rate).map_err(err)?,
        })
    }

    #[staticmethod]
    fn discrete_uniform(points: Vec<f64>) -> PyResult<Proposal> {
        Ok(Proposal {
            inner: kernels::Proposal::discrete_uniform(points).map_err(err)?,
        })
    }

    fn log_q(&self, from: f64, to: f64) -> f64 {
        self.inner.log_q(from, to)
    }
}

/// A realized chain.
#[pyclass(skip_from_py_object)]
struct Trace {
    #[pyo3(get)]
    states: Vec<f64>,
    #[pyo3(get)]
    accepted: Vec<bool>,
    #[pyo3(get)]
    held: Vec<bool>,
    #[pyo3(get)]
    seed: u64,
}

#[pymethods]
impl Trace {
    fn move_fraction(&self) -> f64 {
        self.accepted.iter().filter(|a| **a).count() as f64 / self.accepted.len() as f64
    }
}

fn parse_algorithm(name: &str) -> PyResult<kernels::Algorithm> {
    match name {
        "mh" => Ok(kernels::Algorithm::Mh),
        "exchange" => Ok(kernels::Algorithm::Exchange),
        other => Err(PyValueError::new_err(format!(
            "unknown algorithm `{other}`; use mh or exchange"
        ))),
    }
}

/// Run a chain. `algorithm` is "mh" or "exchange"; laziness λ ∈ (0, 1].
#[pyfunction]
#[pyo3(signature = (posterior, proposal, algorithm, theta0, steps, seed, laziness = 1.0))]
fn run_chain(
    posterior: &Posterior,
    proposal: &Proposal,
    algorithm: &str,
    theta0: f64,
    steps: usize,
    seed: u64,
    laziness: f64,
) -> PyResult<Trace> {
    let spec = kernels::KernelSpec::new(
        parse_algorithm(algorithm)?,
        &proposal.inner,
        &posterior.inner,
        laziness,
    )
    .map_err(err)?;
    let trace = kernels::run_chain(&spec, theta0, steps, seed).map_err(err)?;
    Ok(Trace {
        states: trace.states,
        accepted: trace.accepted,
        held: trace.held,
        seed: trace.seed,
    })
}

/// An explicit finite-state chain (transition matrix plus stationary vector).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct FiniteChain {
    inner: exact::FiniteChain,
}

#[pymethods]
impl FiniteChain {
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    fn stationary(&self) -> Vec<f64> {
        self.inner.stationary().iter().copied().collect()
    }

    fn grid(&self) -> Vec<f64> {
        self.inner.grid().points.clone()
    }

    fn sample_path(&self, steps: usize, seed: u64) -> Vec<usize> {
        self.inner
            .sample_path(steps, seed, exact::PathStart::Stationary)
    }
}

fn make_grid(posterior: &Posterior, grid: Option<(f64, f64, usize)>) -> PyResult<exact::ParamGrid> {
    if let Some(points) = posterior.inner.model().param_space().finite_points() {
        return exact::ParamGrid::discrete(points.to_vec()).map_err(err);
    }
    match grid {
        Some((lo, hi, k)) => exact::ParamGrid::uniform(lo, hi, k).map_err(err),
        None => exact::ParamGrid::from_posterior_mass(&posterior.inner, 0.9999, 101).map_err(err),
    }
}

/// Build the idealized MH transition matrix on a grid. `grid` is `(lo, hi, k)`
/// or omitted for a posterior-mass grid; finite parameter spaces use their
/// native points.
#[pyfunction]
#[pyo3(signature = (posterior, proposal, grid = None))]
fn build_mh_matrix(
    posterior: &Posterior,
    proposal: &Proposal,
    grid: Option<(f64, f64, usize)>,
) -> PyResult<FiniteChain> {
    let grid = make_grid(posterior, grid)?;
    let q = exact::discretize_proposal(&proposal.inner, &grid).map_err(err)?;
    Ok(FiniteChain {
        inner: exact::build_mh_matrix(&posterior.inner, &grid, &q).map_err(err)?,
    })
}

/// Build the exchange transition matrix on a grid (see `build_mh_matrix`).
#[pyfunction]
#[pyo3(signature = (posterior, proposal, grid = None))]
fn build_exchange_matrix(
    posterior: &Posterior,
    proposal: &Proposal,
    grid: Option<(f64, f64, usize)>,
) -> PyResult<FiniteChain> {
    let grid = make_grid(posterior, grid)?;
    let q = exact::discretize_proposal(&proposal.inner, &grid).map_err(err)?;
    Ok(FiniteChain {
        inner: exact::build_exchange_matrix(&posterior.inner, &grid, &q).map_err(err)?,
    })
}

/// Lazy mixture λP + (1−λ)I.
#[pyfunction]
fn lazy_matrix(chain: &FiniteChain, laziness: f64) -> PyResult<FiniteChain> {
    Ok(FiniteChain {
        inner: exact::lazy_matrix(&chain.inner, laziness).map_err(err)?,
    })
}

/// Spectrum of a reversible finite chain: eigenvalues plus mean-zero bounds.
#[pyfunction]
fn spectrum(py: Python<'_>, chain: &FiniteChain) -> PyResult<Py<pyo3::types::PyDict>> {
    let report = exact::spectrum(&chain.inner).map_err(err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("eigenvalues", report.eigenvalues)?;
    dict.set_item("inf_mean_zero", report.inf_mean_zero)?;
    dict.set_item("sup_mean_zero", report.sup_mean_zero)?;
    dict.set_item("gap", report.gap)?;
    Ok(dict.into())
}

/// Exact asymptotic variance σ²(P, h); infinity signals divergence.
#[pyfunction]
fn asymptotic_variance(chain: &FiniteChain, h: Vec<f64>) -> PyResult<f64> {
    exact::asymptotic_variance_exact(&chain.inner, &h).map_err(err)
}

/// Peskun comparison: returns `(holds, worst_offdiag_margin, worst_diag_margin)`.
#[pyfunction]
fn peskun_compare(mh: &FiniteChain, ex: &FiniteChain) -> PyResult<(bool, f64, f64)> {
    let report = exact::peskun_compare(&mh.inner, &ex.inner).map_err(err)?;
    Ok((
        report.holds,
        report.worst_offdiag_margin,
        report.worst_diag_margin,
    ))
}

/// Exact total-variation distance between `p_θa` and `p_θb`.
#[pyfunction]
fn tv_distance(posterior: &Posterior, theta_a: f64, theta_b: f64) -> PyResult<f64> {
    diagnostics::tv_distance(posterior.inner.model(), theta_a, theta_b).map_err(err)
}

/// Exact Kullback–Leibler divergence KL(p_θa ‖ p_θb).
#[pyfunction]
fn kl_divergence(posterior: &Posterior, theta_a: f64, theta_b: f64) -> PyResult<f64> {
    diagnostics::kl_divergence(posterior.inner.model(), theta_a, theta_b).map_err(err)
}

/// Exchange-chain rejection probability at θ for 1-D continuum models.
#[pyfunction]
fn rejection_probability(posterior: &Posterior, proposal: &Proposal, theta: f64) -> PyResult<f64> {
    diagnostics::rejection_probability(&posterior.inner, &proposal.inner, theta).map_err(err)
}

/// Names and claims of the built-in experiments.
#[pyfunction]
fn list_experiments() -> Vec<(String, String)> {
    experiments::list_experiments()
        .into_iter()
        .map(|e| (e.name, e.claim))
        .collect()
}

/// Run an experiment from TOML text; returns True iff every check passed.
#[pyfunction]
fn run_experiment_toml(config_toml: &str, out_dir: &str) -> PyResult<bool> {
    let config = experiments::ExperimentConfig::from_toml(config_toml).map_err(err)?;
    let outcome = experiments::run_experiment(
        &config,
        &experiments::RunOptions {
            out_dir: Some(out_dir.into()),
            threads: None,
            seed_override: None,
        },
    )
    .map_err(err)?;
    Ok(outcome.passed)
}

#[pymodule]
fn exmc_py(_py: Python, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Posterior>()?;
    m.add_class::<Proposal>()?;
    m.add_class::<Trace>()?;
    m.add_class::<FiniteChain>()?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(build_mh_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(build_exchange_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(lazy_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_variance, m)?)?;
    m.add_function(wrap_pyfunction!(peskun_compare, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(rejection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment_toml, m)?)?;
    Ok(())
}
