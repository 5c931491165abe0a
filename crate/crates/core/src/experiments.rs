//! Experiment orchestration: declarative TOML configs naming a model, prior,
//! proposal, kernel and check suite; reproducible seeded runs; CSV/JSON
//! outputs; built-in experiments covering each model family.
//!
//! One file is one experiment, so a config can be archived next to the report
//! it produced. Reports isolate the timestamp in a single field; everything
//! else is a deterministic function of the config and seed.

use crate::diagnostics::{
    clt_check, clt_check_chain, non_negligibility, rejection_probability, tail_condition_check,
    tv_modulus_check, TvModulus,
};
use crate::error::{Error, Result};
use crate::exact::{
    build_exchange_matrix, build_mh_matrix, discretize_proposal, lazy_matrix, peskun_compare,
    spectrum, variance_sandwich_check, FiniteChain, ParamGrid, SpectrumReport,
};
use crate::kernels::{run_chain, Algorithm, KernelSpec, Proposal, Trace};
use crate::models::{
    self, ParamSpace, PosteriorSpec, Prior, SamplePoint,
};
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::{Path, PathBuf};

fn default_laziness() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

fn default_grid_k() -> usize {
    crate::exact::DEFAULT_GRID_SIZE
}

/// Which kernels an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmChoice {
    Mh,
    Exchange,
    Both,
}

impl AlgorithmChoice {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Mh => vec![Algorithm::Mh],
            AlgorithmChoice::Exchange => vec![Algorithm::Exchange],
            AlgorithmChoice::Both => vec![Algorithm::Mh, Algorithm::Exchange],
        }
    }
}

/// Check identifiers an experiment may enable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Peskun,
    VarianceSandwich,
    TvModulus,
    NonNegligibility,
    Tail,
    Clt,
    RejectionProb,
    Spectrum,
}

/// Model block of a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Two-point Bernoulli posterior (bundles its prior and observation).
    TwoPoint,
    BetaBinomial {
        n: u64,
        lo: f64,
        hi: f64,
        a: f64,
        b: f64,
        data: u64,
    },
    ExponentialGamma {
        data: f64,
    },
    Poisson {
        data: u64,
    },
    GaussianLocation {
        sigma_prior: f64,
        data: f64,
    },
    Ising {
        /// JSON edge list `[[i, j, J_ij], ...]`.
        edges: String,
        field: f64,
        /// JSON spin configuration `[1, -1, ...]`.
        data: String,
    },
    Ergm {
        vertices: usize,
        stat: models::ErgmStat,
        /// JSON edge list `[[i, j], ...]` of the observed graph.
        data: String,
    },
}

/// Prior block of a config (only for model kinds that do not bundle one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorConfig {
    Gamma { shape: f64, rate: f64 },
    TruncatedBeta { a: f64, b: f64, lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
    TruncatedGaussian { mean: f64, sd: f64, lo: f64 },
    /// Conjugate prior for canonical exponential-family models.
    Conjugate { n0: f64, t: f64 },
}

/// Proposal block of a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProposalConfig {
    RandomWalkGaussian {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    RandomWalkUniform {
        #[serde(default = "default_scale")]
        half_width: f64,
    },
    IndependenceUniform {
        lo: f64,
        hi: f64,
    },
    /// Independence proposal equal to the posterior (exponential-gamma only).
    IndependencePosterior,
    DiscreteUniform,
}

/// Discretization block for matrix-level checks on continuum parameter spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(default = "default_grid_k")]
    pub k: usize,
    /// Central posterior mass covered when `lo`/`hi` are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

/// One declarative experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: AlgorithmChoice,
    #[serde(default = "default_laziness")]
    pub laziness: f64,
    pub steps: u64,
    #[serde(default)]
    pub replications: u64,
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckId>,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorConfig>,
    pub proposal: ProposalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::config("<config>", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical serialized config.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.to_toml().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

struct Materialized {
    posterior: PosteriorSpec,
    proposal: Proposal,
    notes: Vec<String>,
}

fn build_prior(
    config: &ExperimentConfig,
    model: &models::UnnormalizedModel,
) -> Result<Prior> {
    let prior_cfg = config
        .prior
        .as_ref()
        .ok_or_else(|| Error::config("prior", "this model kind requires a prior block"))?;
    match prior_cfg {
        PriorConfig::Gamma { shape, rate } => Prior::gamma(*shape, *rate),
        PriorConfig::TruncatedBeta { a, b, lo, hi } => Prior::truncated_beta(*a, *b, *lo, *hi),
        PriorConfig::Gaussian { mean, sd } => Prior::gaussian(*mean, *sd),
        PriorConfig::TruncatedGaussian { mean, sd, lo } => {
            Prior::truncated_gaussian(*mean, *sd, *lo)
        }
        PriorConfig::Conjugate { n0, t } => models::conjugate_prior(model, *n0, *t),
    }
    .map_err(|e| Error::config("prior", e.to_string()))
}

fn reject_bundled_prior(config: &ExperimentConfig) -> Result<()> {
    if config.prior.is_some() {
        return Err(Error::config(
            "prior",
            "this model kind bundles its own prior; remove the prior block",
        ));
    }
    Ok(())
}

fn materialize(config: &ExperimentConfig) -> Result<Materialized> {
    let mut notes = Vec::new();
    let (posterior, independence_posterior_rate) = match &config.model {
        ModelConfig::TwoPoint => {
            reject_bundled_prior(config)?;
            (models::two_point_posterior(), None)
        }
        ModelConfig::BetaBinomial { n, lo, hi, a, b, data } => {
            reject_bundled_prior(config)?;
            let (model, prior) = models::beta_binomial(*n, *lo, *hi, *a, *b)
                .map_err(|e| Error::config("model", e.to_string()))?;
            if data > n {
                return Err(Error::config("model.data", "observation exceeds n"));
            }
            (
                PosteriorSpec::new(model, prior, SamplePoint::Discrete(*data))?,
                None,
            )
        }
        ModelConfig::ExponentialGamma { data } => {
            reject_bundled_prior(config)?;
            if *data <= 0.0 {
                return Err(Error::config("model.data", "observation must be positive"));
            }
            let (model, prior) = models::exponential_gamma();
            (
                PosteriorSpec::new(model, prior, SamplePoint::Real(*data))?,
                Some(*data + 1.0),
            )
        }
        ModelConfig::Poisson { data } => {
            let placeholder = Prior::gamma(1.0, 1.0).unwrap();
            let model = models::poisson(&placeholder).unwrap();
            let prior = build_prior(config, &model)?;
            let model = models::poisson(&prior).map_err(|e| Error::config("prior", e.to_string()))?;
            (
                PosteriorSpec::new(model, prior, SamplePoint::Discrete(*data))?,
                None,
            )
        }
        ModelConfig::GaussianLocation { sigma_prior, data } => {
            reject_bundled_prior(config)?;
            let (model, prior) = models::gaussian_location(*sigma_prior)
                .map_err(|e| Error::config("model.sigma_prior", e.to_string()))?;
            (
                PosteriorSpec::new(model, prior, SamplePoint::Real(*data))?,
                None,
            )
        }
        ModelConfig::Ising { edges, field, data } => {
            let edges = models::parse_edge_list_json(edges)
                .map_err(|e| Error::config("model.edges", e.to_string()))?;
            let model = models::ising(&edges, *field)
                .map_err(|e| Error::config("model.edges", e.to_string()))?;
            let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap();
            let data = models::parse_spin_config_json(data, n)
                .map_err(|e| Error::config("model.data", e.to_string()))?;
            let prior = build_prior(config, &model)?;
            (PosteriorSpec::new(model, prior, data)?, None)
        }
        ModelConfig::Ergm { vertices, stat, data } => {
            let model = models::ergm(*vertices, *stat)
                .map_err(|e| Error::config("model.vertices", e.to_string()))?;
            let data = models::parse_graph_edges_json(data, *vertices)
                .map_err(|e| Error::config("model.data", e.to_string()))?;
            let prior = build_prior(config, &model)?;
            notes.push(
                "prior on the unbounded random-graph parameter defaults to the configured \
                 Gaussian-type family"
                    .to_string(),
            );
            (PosteriorSpec::new(model, prior, data)?, None)
        }
    };
    let proposal = match &config.proposal {
        ProposalConfig::RandomWalkGaussian { scale } => Proposal::random_walk_gaussian(*scale),
        ProposalConfig::RandomWalkUniform { half_width } => {
            Proposal::random_walk_uniform(*half_width)
        }
        ProposalConfig::IndependenceUniform { lo, hi } => Proposal::independence_uniform(*lo, *hi),
        ProposalConfig::IndependencePosterior => {
            let rate = independence_posterior_rate.ok_or_else(|| {
                Error::config(
                    "proposal.kind",
                    "independence-posterior applies to the exponential-gamma model",
                )
            })?;
            Proposal::independence_gamma(2, rate)
        }
        ProposalConfig::DiscreteUniform => {
            let points = posterior
                .model()
                .param_space()
                .finite_points()
                .ok_or_else(|| {
                    Error::config(
                        "proposal.kind",
                        "discrete-uniform needs a finite parameter space",
                    )
                })?;
            Proposal::discrete_uniform(points.to_vec())
        }
    }
    .map_err(|e| Error::config("proposal", e.to_string()))?;
    Ok(Materialized {
        posterior,
        proposal,
        notes,
    })
}

fn build_grid(config: &ExperimentConfig, posterior: &PosteriorSpec) -> Result<ParamGrid> {
    if let Some(points) = posterior.model().param_space().finite_points() {
        return ParamGrid::discrete(points.to_vec());
    }
    let grid_cfg = config.grid.clone().unwrap_or(GridConfig {
        lo: None,
        hi: None,
        k: default_grid_k(),
        mass: None,
    });
    match (grid_cfg.lo, grid_cfg.hi) {
        (Some(lo), Some(hi)) => ParamGrid::uniform(lo, hi, grid_cfg.k),
        (None, None) => {
            let mass = grid_cfg.mass.unwrap_or(0.9999);
            ParamGrid::from_posterior_mass(posterior, mass, grid_cfg.k)
        }
        _ => Err(Error::config("grid", "set both lo and hi or neither")),
    }
    .map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::config("grid", other.to_string()),
    })
}

/// Outcome of one enabled check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub passed: bool,
    pub summary: String,
    pub detail: serde_json::Value,
}

/// Per-trace summary recorded in the report.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub algorithm: Algorithm,
    pub file: String,
    pub move_fraction: f64,
    pub hold_fraction: f64,
    pub mean: f64,
}

/// Everything a run produces, minus the raw traces (those go to CSV files).
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub config_hash: String,
    /// The only nondeterministic field; determinism tests exclude it.
    pub timestamp_unix: u64,
    pub notes: Vec<String>,
    pub grid_points: Option<Vec<f64>>,
    pub grid_is_surrogate: Option<bool>,
    pub stationary: Option<Vec<f64>>,
    /// Embedded only for small grids; the full CSV dump is always written.
    pub matrix_mh: Option<Vec<Vec<f64>>>,
    pub matrix_exchange: Option<Vec<Vec<f64>>>,
    pub spectra: Vec<(String, SpectrumReport)>,
    pub rejection_table: Option<Vec<(f64, f64)>>,
    pub checks: Vec<CheckOutcome>,
    pub traces: Vec<TraceSummary>,
}

/// Run options shared by the CLI.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed_override: Option<u64>,
}

/// Result handed back to the caller.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub passed: bool,
    pub out_dir: PathBuf,
}

/// Run one experiment: simulate the requested kernels, run every enabled
/// check, and write `trace_*.csv`, `report.json` and `summary.txt` under
/// `<out_dir>/<name>/`. `passed` is false iff any enabled check failed.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentOutcome> {
    let mut config = config.clone();
    if let Some(seed) = options.seed_override {
        config.seed = seed;
    }
    if let Some(threads) = options.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| run_inner(&config, options))
    } else {
        run_inner(&config, options)
    }
}

fn matrices_needed(checks: &[CheckId]) -> bool {
    checks.iter().any(|c| {
        matches!(
            c,
            CheckId::Peskun | CheckId::VarianceSandwich | CheckId::Spectrum | CheckId::Clt
        )
    })
}

fn run_inner(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentOutcome> {
    let laziness_ok = config.laziness > 0.0 && config.laziness <= 1.0;
    if !laziness_ok {
        return Err(Error::config("laziness", "must lie in (0, 1]"));
    }
    if config.steps == 0 {
        return Err(Error::config("steps", "must be at least 1"));
    }
    let materialized = materialize(config)?;
    let posterior = &materialized.posterior;
    let proposal = &materialized.proposal;
    let out_dir = options
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs"))
        .join(&config.name);
    std::fs::create_dir_all(&out_dir)?;

    // matrices when any enabled check needs them
    let (grid, mh_chain, ex_chain) = if matrices_needed(&config.checks) {
        let grid = build_grid(config, posterior)?;
        let q = discretize_proposal(proposal, &grid)?;
        let mh = build_mh_matrix(posterior, &grid, &q)?;
        let ex = build_exchange_matrix(posterior, &grid, &q)?;
        let (mh, ex) = if config.laziness < 1.0 {
            (
                lazy_matrix(&mh, config.laziness)?,
                lazy_matrix(&ex, config.laziness)?,
            )
        } else {
            (mh, ex)
        };
        (Some(grid), Some(mh), Some(ex))
    } else {
        (None, None, None)
    };

    // kernel-level traces
    let theta0 = initial_state(posterior, grid.as_ref());
    let mut traces: Vec<(Algorithm, Trace)> = Vec::new();
    for algorithm in config.algorithm.algorithms() {
        let spec = KernelSpec::new(algorithm, proposal, posterior, config.laziness)?;
        let trace = run_chain(&spec, theta0, config.steps as usize, config.seed)?;
        traces.push((algorithm, trace));
    }

    let mut checks = Vec::new();
    let mut rejection_table = None;
    for check in &config.checks {
        let outcome = run_check(
            *check,
            config,
            posterior,
            proposal,
            grid.as_ref(),
            mh_chain.as_ref(),
            ex_chain.as_ref(),
        )?;
        if *check == CheckId::RejectionProb {
            if let Some(table) = outcome.detail.get("table") {
                rejection_table = serde_json::from_value(table.clone()).ok();
            }
        }
        checks.push(outcome);
    }

    // spectra for the report whenever matrices exist
    let mut spectra = Vec::new();
    if let (Some(mh), Some(ex)) = (&mh_chain, &ex_chain) {
        spectra.push(("mh".to_string(), spectrum(mh)?));
        spectra.push(("exchange".to_string(), spectrum(ex)?));
    }

    // write traces and matrix dumps; `trace.csv` holds the run's primary
    // trace (the exchange trace when both algorithms run)
    let mut trace_summaries = Vec::new();
    let config_hash = config.hash();
    let primary = traces
        .iter()
        .rev()
        .map(|(a, _)| *a)
        .max_by_key(|a| matches!(a, Algorithm::Exchange) as u8)
        .unwrap_or(Algorithm::Exchange);
    for (algorithm, trace) in &traces {
        let tag = match algorithm {
            Algorithm::Mh => "mh",
            Algorithm::Exchange => "exchange",
        };
        let csv_path = out_dir.join(format!("trace_{tag}.csv"));
        let mut file = std::fs::File::create(&csv_path)?;
        trace.write_csv(&mut file)?;
        let sidecar = trace.sidecar_json(&config_hash);
        std::fs::write(
            out_dir.join(format!("trace_{tag}.json")),
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
        )?;
        if *algorithm == primary {
            let mut file = std::fs::File::create(out_dir.join("trace.csv"))?;
            trace.write_csv(&mut file)?;
            std::fs::write(
                out_dir.join("trace.json"),
                serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
            )?;
        }
        trace_summaries.push(TraceSummary {
            algorithm: *algorithm,
            file: format!("trace_{tag}.csv"),
            move_fraction: trace.move_fraction(),
            hold_fraction: trace.hold_fraction(),
            mean: trace.states[1..].iter().sum::<f64>() / (trace.states.len() - 1) as f64,
        });
    }
    if let (Some(mh), Some(ex)) = (&mh_chain, &ex_chain) {
        write_matrix_csv(&out_dir.join("matrix_mh.csv"), mh)?;
        write_matrix_csv(&out_dir.join("matrix_exchange.csv"), ex)?;
    }

    let embed = grid.as_ref().map(|g| g.len() <= 64).unwrap_or(false);
    let report = ExperimentReport {
        name: config.name.clone(),
        seed: config.seed,
        config_hash,
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        notes: materialized.notes.clone(),
        grid_points: grid.as_ref().map(|g| g.points.clone()),
        grid_is_surrogate: grid.as_ref().map(|g| g.continuum),
        stationary: mh_chain
            .as_ref()
            .map(|c| c.stationary().iter().copied().collect()),
        matrix_mh: if embed {
            mh_chain.as_ref().map(|c| c.rows())
        } else {
            None
        },
        matrix_exchange: if embed {
            ex_chain.as_ref().map(|c| c.rows())
        } else {
            None
        },
        spectra,
        rejection_table,
        checks,
        traces: trace_summaries,
    };

    std::fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let mut summary = std::fs::File::create(out_dir.join("summary.txt"))?;
    writeln!(summary, "experiment: {}", report.name)?;
    writeln!(summary, "seed: {} config: {}", report.seed, report.config_hash)?;
    for note in &report.notes {
        writeln!(summary, "note: {note}")?;
    }
    for t in &report.traces {
        writeln!(
            summary,
            "trace {:?}: move fraction {:.4}, hold fraction {:.4}, mean {:.6}",
            t.algorithm, t.move_fraction, t.hold_fraction, t.mean
        )?;
    }
    for c in &report.checks {
        writeln!(
            summary,
            "[{}] {:?}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.summary
        )?;
    }
    let passed = report.checks.iter().all(|c| c.passed);
    writeln!(summary, "overall: {}", if passed { "PASS" } else { "FAIL" })?;
    Ok(ExperimentOutcome {
        report,
        passed,
        out_dir,
    })
}

fn write_matrix_csv(path: &Path, chain: &FiniteChain) -> Result<()> {
    let mut out = String::new();
    for row in chain.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn initial_state(posterior: &PosteriorSpec, grid: Option<&ParamGrid>) -> f64 {
    let candidates: Vec<f64> = match grid {
        Some(g) => g.points.clone(),
        None => posterior.model().param_space().probe_points(),
    };
    candidates
        .iter()
        .copied()
        .max_by(|a, b| posterior.log_unnorm(*a).total_cmp(&posterior.log_unnorm(*b)))
        .unwrap_or(1.0)
}

fn grid_h_functions(grid: &ParamGrid) -> Vec<(&'static str, Vec<f64>)> {
    let median = grid.points[grid.len() / 2];
    vec![
        ("theta", grid.points.clone()),
        ("theta^2", grid.points.iter().map(|t| t * t).collect()),
        (
            "upper-half",
            grid.points
                .iter()
                .map(|t| if *t >= median { 1.0 } else { 0.0 })
                .collect(),
        ),
    ]
}

fn need_matrices(check: CheckId) -> Error {
    Error::config(
        "checks",
        format!("{check:?} needs matrices; enable a grid-compatible model"),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    check: CheckId,
    config: &ExperimentConfig,
    posterior: &PosteriorSpec,
    proposal: &Proposal,
    grid: Option<&ParamGrid>,
    mh: Option<&FiniteChain>,
    ex: Option<&FiniteChain>,
) -> Result<CheckOutcome> {
    match check {
        CheckId::Peskun => {
            let (mh, ex) = (
                mh.ok_or_else(|| need_matrices(check))?,
                ex.ok_or_else(|| need_matrices(check))?,
            );
            let report = peskun_compare(mh, ex)?;
            Ok(CheckOutcome {
                id: check,
                passed: report.holds,
                summary: format!(
                    "off-diagonal margin {:.3e}, diagonal margin {:.3e}",
                    report.worst_offdiag_margin, report.worst_diag_margin
                ),
                detail: serde_json::to_value(&report).unwrap(),
            })
        }
        CheckId::VarianceSandwich => {
            let (mh, ex, grid) = (
                mh.ok_or_else(|| need_matrices(check))?,
                ex.ok_or_else(|| need_matrices(check))?,
                grid.ok_or_else(|| need_matrices(check))?,
            );
            let mut all = true;
            let mut details = Vec::new();
            for (name, h) in grid_h_functions(grid) {
                let report = variance_sandwich_check(mh, ex, &h)?;
                let ok = report.lower_holds && report.upper_holds.unwrap_or(true);
                all &= ok;
                details.push(serde_json::json!({
                    "h": name,
                    "report": serde_json::to_value(&report).unwrap(),
                }));
            }
            Ok(CheckOutcome {
                id: check,
                passed: all,
                summary: format!("ordering and sandwich over {} test functions", details.len()),
                detail: serde_json::Value::Array(details),
            })
        }
        CheckId::TvModulus => {
            let model = posterior.model();
            let result = match model.family() {
                crate::models::ModelFamily::Poisson => tv_modulus_check(
                    model,
                    TvModulus::PoissonCoupling,
                    &[0.5, 1.0, 2.0, 5.0],
                    &[0.1, 0.5, 1.0, 2.0],
                )?,
                crate::models::ModelFamily::GaussianLocation => tv_modulus_check(
                    model,
                    TvModulus::LocationProfile,
                    &[-2.0, -0.5, 0.9, 3.0],
                    &[0.1, 0.7, 1.5],
                )?,
                crate::models::ModelFamily::Ising | crate::models::ModelFamily::Ergm => {
                    let thetas: Vec<f64> =
                        (0..20).map(|i| -2.0 + 4.0 * i as f64 / 19.0).collect();
                    tv_modulus_check(
                        model,
                        TvModulus::PinskerExpfam,
                        &thetas,
                        &[0.05, 0.25, 0.6, 1.0],
                    )?
                }
                other => {
                    return Err(Error::config(
                        "checks",
                        format!("no TV modulus family applies to {other:?}"),
                    ))
                }
            };
            Ok(CheckOutcome {
                id: check,
                passed: result.satisfied,
                summary: format!(
                    "{} points, worst margin {:.3e}",
                    result.lhs.len(),
                    result.worst_margin
                ),
                detail: serde_json::to_value(&result).unwrap(),
            })
        }
        CheckId::NonNegligibility => {
            let grid = grid_or_probe(posterior, grid);
            let step = (grid.len() / 20).max(1);
            let subset: Vec<f64> = grid.iter().step_by(step).copied().collect();
            let mut pairs = Vec::new();
            for &a in &subset {
                for &b in &subset {
                    pairs.push((a, b));
                }
            }
            let report = non_negligibility(posterior.model(), 0.5, &pairs)?;
            let compact = matches!(
                posterior.model().param_space(),
                ParamSpace::FiniteSet(_) | ParamSpace::Interval(_, _)
            );
            Ok(CheckOutcome {
                id: check,
                passed: report.infimum > 0.0,
                summary: format!(
                    "grid infimum {:.4e} over {} pairs{}",
                    report.infimum,
                    report.pairs.len(),
                    if compact { "" } else { " (unbounded parameter space: grid statement only)" },
                ),
                detail: serde_json::to_value(&report).unwrap(),
            })
        }
        CheckId::Tail => {
            let scale = grid
                .map(|g| g.points.last().copied().unwrap_or(1.0).abs().max(1.0))
                .unwrap_or(4.0);
            let cutoffs = [scale, 2.0 * scale, 4.0 * scale, 8.0 * scale];
            let report = tail_condition_check(posterior, &cutoffs, 200)?;
            Ok(CheckOutcome {
                id: check,
                passed: report.passed,
                summary: format!(
                    "alpha {:.4} at x1 {:.2}, decay ratio {:.3}",
                    report.alpha, report.x1, report.decay_ratio
                ),
                detail: serde_json::to_value(&report).unwrap(),
            })
        }
        CheckId::Clt => {
            let replications = config.replications.max(200) as usize;
            let steps = 10_000;
            let report = if posterior.model().param_space().finite_points().is_some() {
                let algorithm = match config.algorithm {
                    AlgorithmChoice::Mh => Algorithm::Mh,
                    _ => Algorithm::Exchange,
                };
                let spec = KernelSpec::new(algorithm, proposal, posterior, config.laziness)?;
                clt_check(&spec, |t| t, replications, steps, config.seed)?
            } else {
                let chain = match config.algorithm {
                    AlgorithmChoice::Mh => mh.ok_or_else(|| need_matrices(check))?,
                    _ => ex.ok_or_else(|| need_matrices(check))?,
                };
                let h = chain.grid().points.clone();
                clt_check_chain(chain, &h, replications, steps, config.seed)?
            };
            Ok(CheckOutcome {
                id: check,
                passed: report.passed,
                summary: if report.degenerate {
                    "degenerate chain: sums collapse as expected".to_string()
                } else {
                    format!(
                        "KS {:.4}, p-value {:.4} over {} replications",
                        report.ks_statistic, report.p_value, report.replications
                    )
                },
                detail: serde_json::to_value(&report).unwrap(),
            })
        }
        CheckId::RejectionProb => {
            let thetas = [1.0, 10.0, 100.0, 1000.0];
            let mut table = Vec::new();
            for &t in &thetas {
                table.push((t, rejection_probability(posterior, proposal, t)?));
            }
            let increasing = table.windows(2).all(|w| w[1].1 > w[0].1);
            let gap = table[3].1 - table[0].1;
            Ok(CheckOutcome {
                id: check,
                passed: increasing && gap >= 0.2,
                summary: format!(
                    "rejection probabilities {:.4} -> {:.4} (strictly increasing: {increasing})",
                    table[0].1, table[3].1
                ),
                detail: serde_json::json!({ "table": table, "gap": gap }),
            })
        }
        CheckId::Spectrum => {
            let (mh, ex) = (
                mh.ok_or_else(|| need_matrices(check))?,
                ex.ok_or_else(|| need_matrices(check))?,
            );
            let s_mh = spectrum(mh)?;
            let s_ex = spectrum(ex)?;
            let in_range = |s: &SpectrumReport| {
                s.eigenvalues.iter().all(|v| v.abs() <= 1.0 + 1e-10)
                    && s.eigenvalues
                        .iter()
                        .filter(|v| (**v - 1.0).abs() < 1e-10)
                        .count()
                        == 1
            };
            let passed = in_range(&s_mh) && in_range(&s_ex);
            Ok(CheckOutcome {
                id: check,
                passed,
                summary: format!(
                    "mh spectrum in [{:.4}, {:.4}], exchange in [{:.4}, {:.4}] (grid surrogate)",
                    s_mh.inf_mean_zero, s_mh.sup_mean_zero, s_ex.inf_mean_zero, s_ex.sup_mean_zero
                ),
                detail: serde_json::json!({ "mh": s_mh, "exchange": s_ex }),
            })
        }
    }
}

fn grid_or_probe(posterior: &PosteriorSpec, grid: Option<&ParamGrid>) -> Vec<f64> {
    match grid {
        Some(g) => g.points.clone(),
        None => posterior.model().param_space().probe_points(),
    }
}

/// A catalog entry: the experiment plus the claim it exercises.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub claim: String,
    pub checks: Vec<CheckId>,
}

/// Built-in experiments, each annotated with the claim it exercises.
pub fn builtin_experiments() -> Vec<(ExperimentConfig, &'static str)> {
    vec![
        (
            ExperimentConfig {
                name: "two-point".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 100_000,
                replications: 400,
                seed: 4121,
                checks: vec![CheckId::Peskun, CheckId::Spectrum, CheckId::Clt],
                model: ModelConfig::TwoPoint,
                prior: None,
                proposal: ProposalConfig::DiscreteUniform,
                grid: None,
            },
            "exact 2-state reproduction: the MH chain alternates forever while the exchange \
             chain mixes in one step; Peskun margins, spectra and the exchange CLT",
        ),
        (
            ExperimentConfig {
                name: "beta-binomial".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 100_000,
                replications: 400,
                seed: 4122,
                checks: vec![
                    CheckId::Peskun,
                    CheckId::VarianceSandwich,
                    CheckId::NonNegligibility,
                    CheckId::Clt,
                    CheckId::Spectrum,
                ],
                model: ModelConfig::BetaBinomial {
                    n: 10,
                    lo: 0.2,
                    hi: 0.8,
                    a: 2.0,
                    b: 2.0,
                    data: 7,
                },
                prior: None,
                proposal: ProposalConfig::IndependenceUniform { lo: 0.2, hi: 0.8 },
                grid: Some(GridConfig {
                    lo: Some(0.2),
                    hi: Some(0.8),
                    k: 50,
                    mass: None,
                }),
            },
            "compact parameter space: uniformly non-negligible likelihood ratio, Peskun \
             ordering, variance sandwich and CLT for the exchange chain",
        ),
        (
            ExperimentConfig {
                name: "exponential-gamma".into(),
                algorithm: AlgorithmChoice::Exchange,
                laziness: 1.0,
                steps: 50_000,
                replications: 0,
                seed: 4123,
                checks: vec![CheckId::RejectionProb, CheckId::Tail],
                model: ModelConfig::ExponentialGamma { data: 1.0 },
                prior: None,
                proposal: ProposalConfig::IndependencePosterior,
                grid: None,
            },
            "exchange rejection probability climbs toward 1 along theta even under a perfect \
             independence proposal, so geometric ergodicity fails on the unbounded space",
        ),
        (
            ExperimentConfig {
                name: "poisson-gamma".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 100_000,
                replications: 0,
                seed: 4124,
                checks: vec![
                    CheckId::Peskun,
                    CheckId::VarianceSandwich,
                    CheckId::TvModulus,
                    CheckId::Tail,
                    CheckId::Spectrum,
                ],
                model: ModelConfig::Poisson { data: 3 },
                prior: Some(PriorConfig::Gamma {
                    shape: 2.0,
                    rate: 1.0,
                }),
                proposal: ProposalConfig::RandomWalkGaussian { scale: 1.0 },
                grid: Some(GridConfig {
                    lo: None,
                    hi: None,
                    k: 60,
                    mass: Some(0.9999),
                }),
            },
            "Poisson family: coupling TV modulus (1 - e^{-s}) and the posterior \
             exponential-tail condition under a decaying prior",
        ),
        (
            ExperimentConfig {
                name: "gaussian-location".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 100_000,
                replications: 0,
                seed: 4125,
                checks: vec![CheckId::TvModulus, CheckId::Tail, CheckId::Spectrum],
                model: ModelConfig::GaussianLocation {
                    sigma_prior: 2.0,
                    data: 0.8,
                },
                prior: None,
                proposal: ProposalConfig::RandomWalkGaussian { scale: 1.0 },
                grid: Some(GridConfig {
                    lo: None,
                    hi: None,
                    k: 60,
                    mass: Some(0.9999),
                }),
            },
            "location family: the TV profile is translation invariant and the Gaussian \
             posterior has lighter-than-exponential tails",
        ),
        (
            ExperimentConfig {
                name: "ising-n2".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 100_000,
                replications: 0,
                seed: 4126,
                checks: vec![
                    CheckId::Peskun,
                    CheckId::VarianceSandwich,
                    CheckId::TvModulus,
                    CheckId::Spectrum,
                ],
                model: ModelConfig::Ising {
                    edges: "[[0,1,1.0]]".into(),
                    field: 0.0,
                    data: "[1,1]".into(),
                },
                prior: Some(PriorConfig::Gaussian { mean: 0.0, sd: 1.0 }),
                proposal: ProposalConfig::RandomWalkGaussian { scale: 1.0 },
                grid: Some(GridConfig {
                    lo: Some(-2.0),
                    hi: Some(2.0),
                    k: 20,
                    mass: None,
                }),
            },
            "single-edge Ising model: Pinsker-bound TV modulus for the bounded sufficient \
             statistic, Peskun ordering and variance sandwich on the theta grid",
        ),
        (
            ExperimentConfig {
                name: "ising-grid".into(),
                algorithm: AlgorithmChoice::Exchange,
                laziness: 1.0,
                steps: 20_000,
                replications: 0,
                seed: 4127,
                checks: vec![CheckId::Peskun, CheckId::Spectrum],
                model: ModelConfig::Ising {
                    edges: "[[0,1,1.0],[1,2,1.0],[3,4,1.0],[4,5,1.0],[6,7,1.0],[7,8,1.0],\
                            [0,3,1.0],[3,6,1.0],[1,4,1.0],[4,7,1.0],[2,5,1.0],[5,8,1.0]]"
                        .into(),
                    field: 0.0,
                    data: "[1,1,1,1,-1,1,1,1,1]".into(),
                },
                prior: Some(PriorConfig::Gaussian { mean: 0.0, sd: 1.0 }),
                proposal: ProposalConfig::RandomWalkGaussian { scale: 0.5 },
                grid: Some(GridConfig {
                    lo: Some(-1.0),
                    hi: Some(1.0),
                    k: 15,
                    mass: None,
                }),
            },
            "3x3 Ising lattice: exact enumeration of 512 spin configurations still supports \
             the full matrix analysis; Peskun ordering at a larger sample space",
        ),
        (
            ExperimentConfig {
                name: "ergm-n4".into(),
                algorithm: AlgorithmChoice::Both,
                laziness: 1.0,
                steps: 50_000,
                replications: 0,
                seed: 4128,
                checks: vec![CheckId::Peskun, CheckId::TvModulus, CheckId::Spectrum],
                model: ModelConfig::Ergm {
                    vertices: 4,
                    stat: models::ErgmStat::EdgeCount,
                    data: "[[0,1],[1,2],[2,3]]".into(),
                },
                prior: Some(PriorConfig::Gaussian { mean: 0.0, sd: 1.0 }),
                proposal: ProposalConfig::RandomWalkGaussian { scale: 1.0 },
                grid: Some(GridConfig {
                    lo: Some(-2.0),
                    hi: Some(2.0),
                    k: 20,
                    mass: None,
                }),
            },
            "random graph on 4 vertices: Pinsker-bound TV modulus for the edge-count \
             statistic and Peskun ordering over the theta grid",
        ),
    ]
}

/// The experiment catalog for `list`.
pub fn list_experiments() -> Vec<CatalogEntry> {
    builtin_experiments()
        .into_iter()
        .map(|(config, claim)| CatalogEntry {
            name: config.name.clone(),
            claim: claim.to_string(),
            checks: config.checks.clone(),
        })
        .collect()
}

/// Look up a built-in experiment by name.
pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    builtin_experiments()
        .into_iter()
        .find(|(c, _)| c.name == name)
        .map(|(c, _)| c)
}
