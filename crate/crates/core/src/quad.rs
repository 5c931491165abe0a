//! Adaptive 1-D quadrature.
//!
//! Panels are integrated with a nested pair of Gauss–Legendre rules (10- and
//! 21-point); the difference between the two estimates drives bisection until
//! each panel meets its share of the absolute tolerance. Nodes and weights are
//! computed once at startup by Newton iteration on the Legendre recurrence, so
//! no tabulated constants enter the build. Semi-infinite and whole-line
//! domains are mapped to finite intervals with rational substitutions.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Integration domain for a 1-D continuum sample space.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum QuadDomain {
    /// Closed interval `[lo, hi]`.
    Interval(f64, f64),
    /// `(0, ∞)`, mapped through `x = t/(1−t)`.
    PositiveHalfLine,
    /// `(−∞, ∞)`, mapped through `x = t/(1−t²)`.
    RealLine,
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n(x) = 0 with the standard cosine initial guess.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

struct Rules {
    lo_nodes: Vec<f64>,
    lo_weights: Vec<f64>,
    hi_nodes: Vec<f64>,
    hi_weights: Vec<f64>,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| {
        let (lo_nodes, lo_weights) = legendre_nodes(10);
        let (hi_nodes, hi_weights) = legendre_nodes(21);
        Rules {
            lo_nodes,
            lo_weights,
            hi_nodes,
            hi_weights,
        }
    })
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let r = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut lo = 0.0;
    for (&x, &w) in r.lo_nodes.iter().zip(&r.lo_weights) {
        lo += w * f(mid + half * x);
    }
    let mut hi = 0.0;
    for (&x, &w) in r.hi_nodes.iter().zip(&r.hi_weights) {
        hi += w * f(mid + half * x);
    }
    (hi * half, (hi - lo).abs() * half.abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut stack = vec![(a, b, abs_tol, 0u32)];
    let mut evals: u64 = 0;
    while let Some((a, b, tol, depth)) = stack.pop() {
        let (val, err) = panel(&f, a, b);
        evals += 31;
        if !val.is_finite() {
            return Err(Error::QuadratureNonconvergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if err <= tol || depth >= 52 {
            if depth >= 52 && err > tol * 16.0 {
                return Err(Error::QuadratureNonconvergence(format!(
                    "panel [{a}, {b}] error {err:.3e} above tolerance {tol:.3e} at max depth"
                )));
            }
            total += val;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((a, mid, tol / 2.0, depth + 1));
            stack.push((mid, b, tol / 2.0, depth + 1));
        }
        if evals > 50_000_000 {
            return Err(Error::QuadratureNonconvergence(
                "evaluation budget exhausted".into(),
            ));
        }
    }
    Ok(total)
}

/// Integrate with forced panel boundaries at `cuts` (used to isolate kinks,
/// e.g. crossings of `|p − q|`). Cut points outside `(a, b)` are ignored.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cuts: &[f64],
    abs_tol: f64,
) -> Result<f64> {
    let mut edges: Vec<f64> = cuts.iter().copied().filter(|c| *c > a && *c < b).collect();
    edges.sort_by(|x, y| x.total_cmp(y));
    edges.dedup();
    let mut pieces = Vec::with_capacity(edges.len() + 1);
    let mut left = a;
    for c in edges {
        pieces.push((left, c));
        left = c;
    }
    pieces.push((left, b));
    let tol = abs_tol / pieces.len() as f64;
    let mut total = 0.0;
    for (lo, hi) in pieces {
        total += integrate(&f, lo, hi, tol)?;
    }
    Ok(total)
}

/// Integrate `f` over the declared domain to absolute tolerance `abs_tol`.
pub fn integrate_domain<F: Fn(f64) -> f64>(f: F, domain: QuadDomain, abs_tol: f64) -> Result<f64> {
    match domain {
        QuadDomain::Interval(lo, hi) => integrate(f, lo, hi, abs_tol),
        QuadDomain::PositiveHalfLine => integrate(
            move |t| {
                let u = 1.0 - t;
                let x = t / u;
                let jac = 1.0 / (u * u);
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v * jac
                }
            },
            0.0,
            1.0,
            abs_tol,
        ),
        QuadDomain::RealLine => integrate(
            move |t| {
                let u = 1.0 - t * t;
                let x = t / u;
                let jac = (1.0 + t * t) / (u * u);
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v * jac
                }
            },
            -1.0,
            1.0,
            abs_tol,
        ),
    }
}

impl QuadDomain {
    /// Map a point of the untransformed domain into `(lo, hi)` coordinates of
    /// the transformed interval; used to carry kink locations through the
    /// substitution.
    pub fn to_transformed(self, x: f64) -> f64 {
        match self {
            QuadDomain::Interval(_, _) => x,
            QuadDomain::PositiveHalfLine => x / (1.0 + x),
            QuadDomain::RealLine => {
                // invert x = t/(1−t²): t = (−1 + √(1+4x²)) / (2x)
                if x == 0.0 {
                    0.0
                } else {
                    (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
                }
            }
        }
    }

    /// Transformed integration bounds.
    pub fn transformed_bounds(self) -> (f64, f64) {
        match self {
            QuadDomain::Interval(lo, hi) => (lo, hi),
            QuadDomain::PositiveHalfLine => (0.0, 1.0),
            QuadDomain::RealLine => (-1.0, 1.0),
        }
    }

    /// Integrand wrapper including the Jacobian of the substitution.
    pub fn transformed_integrand<'a, F: Fn(f64) -> f64 + 'a>(
        self,
        f: F,
    ) -> Box<dyn Fn(f64) -> f64 + 'a> {
        match self {
            QuadDomain::Interval(_, _) => Box::new(f),
            QuadDomain::PositiveHalfLine => Box::new(move |t| {
                let u = 1.0 - t;
                let v = f(t / u);
                if v == 0.0 {
                    0.0
                } else {
                    v / (u * u)
                }
            }),
            QuadDomain::RealLine => Box::new(move |t| {
                let u = 1.0 - t * t;
                let v = f(t / u);
                if v == 0.0 {
                    0.0
                } else {
                    v * (1.0 + t * t) / (u * u)
                }
            }),
        }
    }
}
