//! Exact finite-state analysis of MH and exchange kernels.
//!
//! For a finite (or discretized) parameter grid the transition kernels become
//! explicit row-stochastic matrices, so orderings, spectra and asymptotic
//! variances can be computed exactly and compared against theory. Grids over a
//! continuum Θ are analysis surrogates: reports label them as discretizations
//! and never claim continuum spectra.

use crate::error::{Error, Result};
use crate::kernels::Proposal;
use crate::models::PosteriorSpec;
use crate::quad;
use crate::rngs::{seeded, ChainRng};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Hard cap on grid size: matrix construction is O(K² · |sample space|).
pub const MAX_GRID_SIZE: usize = 2001;

/// Default grid size for continuum discretizations.
pub const DEFAULT_GRID_SIZE: usize = 101;

/// An ordered parameter grid with quadrature weights. Native finite parameter
/// spaces carry unit weights; discretized continua carry trapezoid weights and
/// are flagged as surrogates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// True when the grid discretizes a continuum (an analysis artifact
    /// rather than the chain's native state space).
    pub continuum: bool,
}

impl ParamGrid {
    /// Grid over a native finite parameter set.
    pub fn discrete(points: Vec<f64>) -> Result<ParamGrid> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least two states".into()));
        }
        if points.len() > MAX_GRID_SIZE {
            return Err(Error::EnumerationBudget(format!(
                "grid size {} exceeds the cap {MAX_GRID_SIZE}",
                points.len()
            )));
        }
        let k = points.len();
        Ok(ParamGrid {
            points,
            weights: vec![1.0; k],
            continuum: false,
        })
    }

    /// Uniform grid on `[lo, hi]` with trapezoid weights.
    pub fn uniform(lo: f64, hi: f64, k: usize) -> Result<ParamGrid> {
        let ordered = lo < hi;
        if !ordered || k < 2 {
            return Err(Error::InvalidParameter(
                "uniform grid needs lo < hi and k >= 2".into(),
            ));
        }
        if k > MAX_GRID_SIZE {
            return Err(Error::EnumerationBudget(format!(
                "grid size {k} exceeds the cap {MAX_GRID_SIZE}"
            )));
        }
        let h = (hi - lo) / (k - 1) as f64;
        let mut points: Vec<f64> = (0..k).map(|i| lo + h * i as f64).collect();
        points[k - 1] = hi; // rounding must not push the endpoint out of the support

        let mut weights = vec![h; k];
        weights[0] = h / 2.0;
        weights[k - 1] = h / 2.0;
        Ok(ParamGrid {
            points,
            weights,
            continuum: true,
        })
    }

    /// Uniform grid covering a central posterior-mass interval of a continuum
    /// parameter space.
    pub fn from_posterior_mass(posterior: &PosteriorSpec, mass: f64, k: usize) -> Result<ParamGrid> {
        let (lo, hi) = posterior_mass_interval(posterior, mass)?;
        ParamGrid::uniform(lo, hi, k)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Central interval `[q_{(1−mass)/2}, q_{1−(1−mass)/2}]` of the posterior on a
/// continuum parameter space, located by bisection on the quadrature CDF.
pub fn posterior_mass_interval(posterior: &PosteriorSpec, mass: f64) -> Result<(f64, f64)> {
    let in_range = 0.0 < mass && mass < 1.0;
    if !in_range {
        return Err(Error::InvalidParameter("mass must lie in (0, 1)".into()));
    }
    let domain = posterior
        .model()
        .param_space()
        .quad_domain()
        .ok_or_else(|| Error::NotApplicable("parameter space is not a continuum".into()))?;
    let dens = domain.transformed_integrand(|t| {
        let v = posterior.log_unnorm(t);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    });
    let (t_lo, t_hi) = domain.transformed_bounds();
    let total = quad::integrate(&dens, t_lo, t_hi, 1e-12)?;
    let has_mass = total > 0.0; // also rejects NaN totals
    if !has_mass {
        return Err(Error::UndefinedDensity("posterior has zero total mass".into()));
    }
    let tail = (1.0 - mass) / 2.0;
    let quantile = |target: f64| -> Result<f64> {
        let mut lo = t_lo;
        let mut hi = t_hi;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let cdf = quad::integrate(&dens, t_lo, mid, 1e-12)? / total;
            if cdf < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let a_t = quantile(tail)?;
    let b_t = quantile(1.0 - tail)?;
    // map transformed coordinates back to θ
    let back = |t: f64| -> f64 {
        match domain {
            quad::QuadDomain::Interval(_, _) => t,
            quad::QuadDomain::PositiveHalfLine => t / (1.0 - t),
            quad::QuadDomain::RealLine => t / (1.0 - t * t),
        }
    };
    Ok((back(a_t), back(b_t)))
}

/// Row-stochastic proposal matrix over the grid: `q_ij ∝ q(θ_i, θ_j) w_j` for
/// `i ≠ j`, zero diagonal. This is the discretization convention for
/// continuum proposals; on native finite spaces (unit weights) it reproduces
/// the discrete proposal exactly.
pub fn discretize_proposal(proposal: &Proposal, grid: &ParamGrid) -> Result<DMatrix<f64>> {
    let k = grid.len();
    let mut q = DMatrix::zeros(k, k);
    for i in 0..k {
        let mut row_sum = 0.0;
        for j in 0..k {
            if i == j {
                continue;
            }
            let lq = proposal.log_q(grid.points[i], grid.points[j]);
            let v = if lq == f64::NEG_INFINITY {
                0.0
            } else {
                lq.exp() * grid.weights[j]
            };
            q[(i, j)] = v;
            row_sum += v;
        }
        if row_sum <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "proposal assigns zero mass to every other grid state from θ = {}",
                grid.points[i]
            )));
        }
        for j in 0..k {
            q[(i, j)] /= row_sum;
        }
    }
    Ok(q)
}

/// Normalized posterior restricted to the grid: `π_i ∝ exp(log π(θ_i|x)) w_i`.
pub fn grid_posterior(posterior: &PosteriorSpec, grid: &ParamGrid) -> Result<DVector<f64>> {
    let logs: Vec<f64> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(t, w)| posterior.log_unnorm(*t) + w.ln())
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(
            "every grid state has zero posterior mass".into(),
        ));
    }
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    if unnorm.contains(&0.0) {
        return Err(Error::UndefinedDensity(
            "grid contains a zero-posterior-mass state".into(),
        ));
    }
    let total: f64 = unnorm.iter().sum();
    Ok(DVector::from_iterator(
        grid.len(),
        unnorm.iter().map(|p| p / total),
    ))
}

/// An explicit finite-state chain: grid, row-stochastic matrix, stationary
/// vector. Construction validates row sums, stationarity and reversibility.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    grid: ParamGrid,
    p: DMatrix<f64>,
    pi: DVector<f64>,
}

impl FiniteChain {
    pub fn new(grid: ParamGrid, p: DMatrix<f64>, pi: DVector<f64>) -> Result<FiniteChain> {
        let k = grid.len();
        if p.nrows() != k || p.ncols() != k || pi.len() != k {
            return Err(Error::GridMismatch(
                "matrix and stationary vector must match the grid size".into(),
            ));
        }
        for i in 0..k {
            let row: f64 = p.row(i).iter().sum();
            if (row - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "row {i} sums to {row}, not 1"
                )));
            }
        }
        let residual = {
            let left = &p.transpose() * &pi;
            (left - &pi).amax()
        };
        if residual > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "stationary vector residual {residual:e} exceeds 1e-10"
            )));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let flow = pi[i] * p[(i, j)] - pi[j] * p[(j, i)];
                if flow.abs() > 1e-10 {
                    return Err(Error::NotReversible(format!(
                        "detailed balance violated at ({i}, {j}) by {flow:e}"
                    )));
                }
            }
        }
        Ok(FiniteChain { grid, p, pi })
    }

    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Expectation of a grid function under the stationary vector.
    pub fn stationary_mean(&self, h: &[f64]) -> f64 {
        self.pi.iter().zip(h).map(|(p, v)| p * v).sum()
    }

    /// Simulate a path of state indices. Deterministic given the seed.
    pub fn sample_path(&self, steps: usize, seed: u64, start: PathStart) -> Vec<usize> {
        let k = self.len();
        let row_cdf: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut acc = 0.0;
                (0..k)
                    .map(|j| {
                        acc += self.p[(i, j)];
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut rng = seeded(seed);
        let mut state = match start {
            PathStart::State(s) => s.min(k - 1),
            PathStart::Stationary => self.stationary_draw(&mut rng),
        };
        let mut path = Vec::with_capacity(steps + 1);
        path.push(state);
        for _ in 0..steps {
            let u: f64 = rng.gen();
            let cdf = &row_cdf[state];
            state = cdf.partition_point(|c| *c <= u).min(k - 1);
            path.push(state);
        }
        path
    }

    /// One exact draw from the stationary vector.
    pub fn stationary_draw(&self, rng: &mut ChainRng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.pi.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.len() - 1
    }

    /// Matrix rows as plain vectors (JSON/CSV export).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| self.p.row(i).iter().copied().collect())
            .collect()
    }
}

/// Where a simulated path starts.
#[derive(Debug, Clone, Copy)]
pub enum PathStart {
    Stationary,
    State(usize),
}

/// Idealized MH transition matrix on the grid:
/// `P_ij = q_ij min(1, π_j q_ji / (π_i q_ij))` off the diagonal, diagonal
/// absorbing the residual.
pub fn build_mh_matrix(
    posterior: &PosteriorSpec,
    grid: &ParamGrid,
    q: &DMatrix<f64>,
) -> Result<FiniteChain> {
    let pi = grid_posterior(posterior, grid)?;
    let k = grid.len();
    let rows: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; k];
            let mut off = 0.0;
            for j in 0..k {
                if i == j || q[(i, j)] == 0.0 {
                    continue;
                }
                let ratio = (pi[j].ln() + q[(j, i)].ln() - pi[i].ln() - q[(i, j)].ln()).exp();
                let p = q[(i, j)] * ratio.min(1.0);
                row[j] = p;
                off += p;
            }
            row[i] = (1.0 - off).max(0.0);
            row
        })
        .collect();
    let p = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    FiniteChain::new(grid.clone(), p, pi)
}

/// Exchange transition matrix on the grid:
/// `P_ij = q_ij E_{w~p_θj}[min(1, a(θ_i, θ_j, w))]` off the diagonal, with the
/// expectation over the auxiliary variable computed exactly by enumeration or
/// quadrature over the sample space.
pub fn build_exchange_matrix(
    posterior: &PosteriorSpec,
    grid: &ParamGrid,
    q: &DMatrix<f64>,
) -> Result<FiniteChain> {
    let pi = grid_posterior(posterior, grid)?;
    let k = grid.len();
    let model = posterior.model();
    // normalizer-free grid weights: log(prior(θ_i) w_i f_θi(x))
    let zfree: Vec<f64> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(t, w)| posterior.log_unnorm_zfree(*t) + w.ln())
        .collect();
    let rows: Vec<Result<Vec<f64>>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; k];
            let mut off = 0.0;
            for j in 0..k {
                if i == j || q[(i, j)] == 0.0 {
                    continue;
                }
                let delta = zfree[j] + q[(j, i)].ln() - zfree[i] - q[(i, j)].ln();
                let ti = grid.points[i];
                let tj = grid.points[j];
                let mean_acc = model.expect(tj, |w| {
                    let log_a = delta + model.log_f(ti, w) - model.log_f(tj, w);
                    if log_a >= 0.0 {
                        1.0
                    } else {
                        log_a.exp()
                    }
                })?;
                let p = q[(i, j)] * mean_acc;
                row[j] = p;
                off += p;
            }
            row[i] = (1.0 - off).max(0.0);
            Ok(row)
        })
        .collect();
    let mut p = DMatrix::zeros(k, k);
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        for j in 0..k {
            p[(i, j)] = row[j];
        }
    }
    FiniteChain::new(grid.clone(), p, pi)
}

/// The lazy mixture `λP + (1−λ)I`; stationary vector unchanged. `λ = 1`
/// returns the chain as-is.
pub fn lazy_matrix(chain: &FiniteChain, laziness: f64) -> Result<FiniteChain> {
    let in_range = laziness > 0.0 && laziness <= 1.0;
    if !in_range {
        return Err(Error::InvalidParameter(format!(
            "laziness must lie in (0, 1], got {laziness}"
        )));
    }
    let k = chain.len();
    let mut p = chain.p.clone() * laziness;
    for i in 0..k {
        p[(i, i)] += 1.0 - laziness;
    }
    FiniteChain::new(chain.grid.clone(), p, chain.pi.clone())
}

/// Spectrum of a reversible chain on the mean-zero subspace.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// All eigenvalues, sorted ascending (reversibility makes them real).
    pub eigenvalues: Vec<f64>,
    /// Infimum of the spectrum excluding the stationary eigenvalue.
    pub inf_mean_zero: f64,
    /// Supremum of the spectrum excluding the stationary eigenvalue.
    pub sup_mean_zero: f64,
    /// 1 − max |λ| over the mean-zero subspace.
    pub gap: f64,
}

pub(crate) struct EigenDecomp {
    /// Eigenvalues by column index of `vectors`.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors of the symmetrized matrix (columns).
    pub vectors: DMatrix<f64>,
    /// Index of the stationary eigenvalue (largest).
    pub stationary: usize,
}

pub(crate) fn symmetrized_eigen(chain: &FiniteChain) -> EigenDecomp {
    let k = chain.len();
    let sqrt_pi: Vec<f64> = chain.pi.iter().map(|p| p.sqrt()).collect();
    let mut a = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = sqrt_pi[i] * chain.p[(i, j)] / sqrt_pi[j];
        }
    }
    // kill residual asymmetry from rounding before the symmetric eigensolve
    let a_sym = (&a + a.transpose()) * 0.5;
    let eig = a_sym.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let stationary = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .expect("non-empty spectrum");
    EigenDecomp {
        values,
        vectors: eig.eigenvectors,
        stationary,
    }
}

/// Eigen-decompose the chain (symmetrized via D^{1/2} P D^{−1/2}) and report
/// the mean-zero spectrum bounds and gap.
pub fn spectrum(chain: &FiniteChain) -> Result<SpectrumReport> {
    if chain.len() < 2 {
        return Err(Error::InvalidParameter("spectrum needs at least 2 states".into()));
    }
    let decomp = symmetrized_eigen(chain);
    let mut sorted = decomp.values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut radius: f64 = 0.0;
    for (i, v) in decomp.values.iter().enumerate() {
        if i == decomp.stationary {
            continue;
        }
        inf = inf.min(*v);
        sup = sup.max(*v);
        radius = radius.max(v.abs());
    }
    Ok(SpectrumReport {
        eigenvalues: sorted,
        inf_mean_zero: inf,
        sup_mean_zero: sup,
        gap: 1.0 - radius,
    })
}

/// Exact asymptotic variance `σ²(P, h)` of a reversible finite chain via the
/// spectral representation `Σ (1+λ)/(1−λ) |⟨h, v⟩_π|²` over the mean-zero
/// eigenbasis. `h` is centered internally. Returns `f64::INFINITY` as the
/// divergent-variance signal when the mean-zero spectrum reaches 1.
pub fn asymptotic_variance_exact(chain: &FiniteChain, h: &[f64]) -> Result<f64> {
    if h.len() != chain.len() {
        return Err(Error::GridMismatch(format!(
            "h has {} entries for a {}-state chain",
            h.len(),
            chain.len()
        )));
    }
    let mean = chain.stationary_mean(h);
    let centered: Vec<f64> = h.iter().map(|v| v - mean).collect();
    let decomp = symmetrized_eigen(chain);
    for (i, v) in decomp.values.iter().enumerate() {
        if i != decomp.stationary && *v >= 1.0 - 1e-12 {
            return Ok(f64::INFINITY);
        }
    }
    let k = chain.len();
    let g: Vec<f64> = (0..k)
        .map(|i| chain.pi[i].sqrt() * centered[i])
        .collect();
    let mut sigma2 = 0.0;
    for col in 0..k {
        if col == decomp.stationary {
            continue;
        }
        let lambda = decomp.values[col];
        let coeff: f64 = (0..k).map(|i| decomp.vectors[(i, col)] * g[i]).sum();
        sigma2 += (1.0 + lambda) / (1.0 - lambda) * coeff * coeff;
    }
    Ok(sigma2)
}

/// Result of an off-diagonal dominance comparison.
#[derive(Debug, Clone, Serialize)]
pub struct PeskunReport {
    pub holds: bool,
    /// min over i≠j of `mh_ij − ex_ij` (nonnegative when the ordering holds).
    pub worst_offdiag_margin: f64,
    /// min over i of `ex_ii − mh_ii`.
    pub worst_diag_margin: f64,
    pub tolerance: f64,
}

/// Verify the Peskun ordering between an MH chain and an exchange chain on
/// the same grid: every off-diagonal exchange entry is dominated by the MH
/// entry, every diagonal entry dominates it.
pub fn peskun_compare(mh: &FiniteChain, ex: &FiniteChain) -> Result<PeskunReport> {
    if mh.grid.points != ex.grid.points {
        return Err(Error::GridMismatch("chains live on different grids".into()));
    }
    if (&mh.pi - &ex.pi).amax() > 1e-9 {
        return Err(Error::GridMismatch(
            "chains have different stationary vectors".into(),
        ));
    }
    let k = mh.len();
    let mut worst_off = f64::INFINITY;
    let mut worst_diag = f64::INFINITY;
    for i in 0..k {
        worst_diag = worst_diag.min(ex.p[(i, i)] - mh.p[(i, i)]);
        for j in 0..k {
            if i != j {
                worst_off = worst_off.min(mh.p[(i, j)] - ex.p[(i, j)]);
            }
        }
    }
    let tolerance = 1e-12;
    Ok(PeskunReport {
        holds: worst_off >= -tolerance && worst_diag >= -tolerance,
        worst_offdiag_margin: worst_off,
        worst_diag_margin: worst_diag,
        tolerance,
    })
}

/// Result of the asymptotic-variance ordering and sandwich bound.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub sigma2_mh: f64,
    pub sigma2_ex: f64,
    /// σ²(MH) ≤ σ²(EX).
    pub lower_holds: bool,
    /// σ²(EX) ≤ [(1−m)/(1+m)]·[2/(1−M)]·σ²(MH); `None` when σ²(MH) = 0 and
    /// only the lower inequality is meaningful.
    pub upper_holds: Option<bool>,
    pub bound_factor: f64,
}

/// Check `σ²(MH,h) ≤ σ²(EX,h) ≤ (1−m(MH))/(1+m(MH)) · 2/(1−M(EX)) · σ²(MH,h)`
/// with exact spectral variances (relative tolerance 1e-10).
pub fn variance_sandwich_check(
    mh: &FiniteChain,
    ex: &FiniteChain,
    h: &[f64],
) -> Result<SandwichReport> {
    if mh.grid.points != ex.grid.points {
        return Err(Error::GridMismatch("chains live on different grids".into()));
    }
    let sigma2_mh = asymptotic_variance_exact(mh, h)?;
    let sigma2_ex = asymptotic_variance_exact(ex, h)?;
    let rel = 1e-10;
    let lower_holds = sigma2_mh <= sigma2_ex + rel * sigma2_ex.max(1.0);
    let m_mh = spectrum(mh)?.inf_mean_zero;
    let big_m_ex = spectrum(ex)?.sup_mean_zero;
    let degenerate = sigma2_mh <= 1e-14 || m_mh <= -1.0 + 1e-12 || big_m_ex >= 1.0 - 1e-12;
    let bound_factor = if degenerate {
        f64::INFINITY
    } else {
        (1.0 - m_mh) / (1.0 + m_mh) * 2.0 / (1.0 - big_m_ex)
    };
    let upper_holds = if degenerate {
        None
    } else {
        let bound = bound_factor * sigma2_mh;
        Some(sigma2_ex <= bound + rel * bound.max(1.0))
    };
    Ok(SandwichReport {
        sigma2_mh,
        sigma2_ex,
        lower_holds,
        upper_holds,
        bound_factor,
    })
}

/// Conditions under which the spectrum is bounded away from −1 (or positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivityCondition {
    /// Rejection probability uniformly bounded below: spectrum ≥ 2c − 1.
    MinDiagonal,
    /// Independence-proposal MH chains are positive operators.
    IndependenceProposal,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub condition: PositivityCondition,
    pub min_diagonal: Option<f64>,
    pub spectral_inf: f64,
    pub holds: bool,
}

/// Verify the spectral consequence of a positivity condition on the chain.
pub fn positivity_check(
    chain: &FiniteChain,
    condition: PositivityCondition,
) -> Result<PositivityReport> {
    let spec = spectrum(chain)?;
    match condition {
        PositivityCondition::MinDiagonal => {
            let c = (0..chain.len())
                .map(|i| chain.p[(i, i)])
                .fold(f64::INFINITY, f64::min);
            Ok(PositivityReport {
                condition,
                min_diagonal: Some(c),
                spectral_inf: spec.inf_mean_zero,
                holds: spec.inf_mean_zero >= 2.0 * c - 1.0 - 1e-10,
            })
        }
        PositivityCondition::IndependenceProposal => Ok(PositivityReport {
            condition,
            min_diagonal: None,
            spectral_inf: spec.inf_mean_zero,
            holds: spec.inf_mean_zero >= -1e-10,
        }),
    }
}
