//! Extending a local solution to larger discs with the functional equation.
//!
//! Rearranged at `w`, the equation gives the value of `f` at `qw`:
//!
//! ```text
//! f(qw) = (f'(w) - B f(w)^2 - C f(w) - D) / A
//! ```
//!
//! and differentiating `k` times gives `f^{(k)}(qw)` from the jet of `f` at
//! `w` up to order `k + 1`. [`continue_step`] applies this rule; it moves
//! outward when `|q| > 1`. When `|q| < 1` the outer values are instead tied
//! to inner ones through the differential equation
//!
//! ```text
//! f'(z) = B f(z)^2 + C f(z) + (A f(qz) + D)
//! ```
//!
//! whose forcing term is known from the previous disc, and
//! [`evaluate_continued`] integrates it along rays with a Taylor method.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{lift, lower, real, Extended, Precision, Real, SeriesError, TruncatedSeries};
use crate::solver::{EquationParams, SolutionSeries, SolverError};

/// Largest jet depth handled by the engine.
pub const MAX_JET_DEPTH: usize = 16;

/// Default pole-exclusion radius, relative to `|w|`.
pub const DEFAULT_EPS_POLE: f64 = 1e-6;

/// Order of the Taylor integrator.
const TAYLOR_ORDER: usize = 16;

/// Step length as a fraction of the local radius estimate.
const STEP_FRACTION: f64 = 0.1;

const MAX_STEPS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error("formal Laurent expansions are not continued")]
    Formal,
    #[error("jet depth {0} exceeds the maximum {MAX_JET_DEPTH}")]
    DepthTooLarge(usize),
    #[error("need initial depth {needed}, jet has {available}")]
    DepthExhausted { needed: usize, available: usize },
    #[error("point {z} lies outside the evaluation radius {radius}")]
    OutsideRadius { z: Complex64, radius: f64 },
    #[error("target {z} lies outside the reachable radius {reachable}")]
    DomainExceeded { z: Complex64, reachable: f64 },
    #[error("|q| = 1 gives no growing discs")]
    UnitModulusQ,
    #[error("continuation came within the pole-exclusion radius near {0}")]
    PoleProximity(Complex64),
    #[error("jet entry {0} is not finite")]
    NonFinite(usize),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Derivative values `d_k = f^{(k)}(z)`, `k = 0..=depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub z: Complex64,
    d: Vec<Complex64>,
}

impl Jet {
    pub fn new(z: Complex64, d: Vec<Complex64>) -> Result<Self, ContinuationError> {
        if d.is_empty() || d.len() > MAX_JET_DEPTH + 1 {
            return Err(ContinuationError::DepthTooLarge(d.len().saturating_sub(1)));
        }
        if let Some(k) = d.iter().position(|v| !v.is_finite()) {
            return Err(ContinuationError::NonFinite(k));
        }
        Ok(Self { z, d })
    }

    pub fn depth(&self) -> usize {
        self.d.len() - 1
    }

    pub fn derivatives(&self) -> &[Complex64] {
        &self.d
    }

    pub fn value(&self) -> Complex64 {
        self.d[0]
    }
}

fn binomials(m: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for k in 1..=m {
        let prev = &rows[k - 1];
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

/// One application of the rearranged equation in working precision.
fn step_in<T: Real>(p: &EquationParams, d: &[Complex<T>], binom: &[Vec<f64>]) -> Vec<Complex<T>> {
    let (a, b, c, dd, q) = (lift::<T>(p.a), lift::<T>(p.b), lift::<T>(p.c), lift::<T>(p.d), lift::<T>(p.q));
    let qinv = q.inv();
    let mut qk = Complex::<T>::one();
    (0..d.len() - 1)
        .map(|k| {
            let square = (0..=k).fold(Complex::<T>::zero(), |acc, j| acc + d[j] * d[k - j] * real::<T>(binom[k][j]));
            let mut v = d[k + 1] - b * square - c * d[k];
            if k == 0 {
                v = v - dd;
            }
            let out = v / a * qk;
            qk = qk * qinv;
            out
        })
        .collect()
}

/// Jet of `f` at `q w` from the jet at `w`; the depth drops by one.
pub fn continue_step(p: &EquationParams, inner: &Jet) -> Result<Jet, ContinuationError> {
    p.validate()?;
    if inner.depth() == 0 {
        return Err(ContinuationError::DepthExhausted { needed: 1, available: 0 });
    }
    let binom = binomials(inner.depth());
    let out = match p.precision {
        Precision::Double => step_in::<f64>(p, &inner.d, &binom),
        Precision::Extended => {
            let d: Vec<Complex<Extended>> = inner.d.iter().map(|v| lift(*v)).collect();
            step_in(p, &d, &binom).into_iter().map(lower).collect()
        }
    };
    Jet::new(p.q * inner.z, out)
}

/// The `f`-variable view of a series that may be continued.
fn continuable(s: &SolutionSeries) -> Result<SolutionSeries, ContinuationError> {
    if s.formal {
        return Err(ContinuationError::Formal);
    }
    if !s.series.center().is_zero() {
        return Err(SeriesError::NonzeroCenter(s.series.center()).into());
    }
    let r = s.evaluation_radius();
    Ok(s.to_f()?.with_radius(r))
}

fn derivative_series(s: &TruncatedSeries, depth: usize) -> Vec<TruncatedSeries> {
    let mut out = vec![s.clone()];
    for _ in 0..depth {
        let next = out.last().expect("non-empty").differentiate();
        out.push(next);
    }
    out
}

/// Jet of the solution's `f` at `z` by term-wise differentiation.
pub fn jet_from_series(s: &SolutionSeries, z: Complex64, depth: usize) -> Result<Jet, ContinuationError> {
    if depth > MAX_JET_DEPTH {
        return Err(ContinuationError::DepthTooLarge(depth));
    }
    let f = continuable(s)?;
    let radius = f.evaluation_radius();
    if z.norm() >= radius {
        return Err(ContinuationError::OutsideRadius { z, radius });
    }
    let d = derivative_series(&f.series, depth)
        .iter()
        .map(|t| t.evaluate(z))
        .collect::<Result<Vec<_>, _>>()?;
    Jet::new(z, d)
}

/// Tuning for [`evaluate_continued`].
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationOptions {
    /// Overrides the series' own evaluation radius.
    pub radius: Option<f64>,
    /// Pole-exclusion radius relative to the base point modulus.
    pub eps_pole: f64,
    pub known_poles: Vec<Complex64>,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { radius: None, eps_pole: DEFAULT_EPS_POLE, known_poles: Vec::new() }
    }
}

/// Radius reachable after `k` steps from a disc of radius `r0`.
pub fn reachable_radius(r0: f64, q: Complex64, k: usize) -> f64 {
    let m = q.norm();
    if m < 1.0 {
        r0 / m.powi(k as i32)
    } else {
        r0 * m.powi(k as i32)
    }
}

/// Value of `f` at `z_target`, reached in `k` continuation steps.
pub fn evaluate_continued(
    s: &SolutionSeries,
    z_target: Complex64,
    k: usize,
    opts: &ContinuationOptions,
) -> Result<Complex64, ContinuationError> {
    let p = s.params;
    p.validate()?;
    let mut f = continuable(s)?;
    if let Some(r) = opts.radius {
        f = f.with_radius(r);
    }
    let r0 = f.evaluation_radius();
    let qn = p.q.norm();
    if qn == 1.0 && k > 0 {
        return Err(ContinuationError::UnitModulusQ);
    }
    let reachable = reachable_radius(r0, p.q, k);
    if z_target.norm() >= reachable {
        return Err(ContinuationError::DomainExceeded { z: z_target, reachable });
    }
    let orbit: Vec<Complex64> = if qn < 1.0 {
        (0..=k).map(|j| z_target * p.q.powi((k - j) as i32)).collect()
    } else {
        (0..=k).map(|j| z_target / p.q.powi((k - j) as i32)).collect()
    };
    for &w in &orbit {
        for &pole in &opts.known_poles {
            if (w - pole).norm() <= opts.eps_pole * w.norm() {
                return Err(ContinuationError::PoleProximity(w));
            }
        }
    }
    if k == 0 {
        return Ok(f.evaluate(z_target)?);
    }
    if qn > 1.0 {
        if k > MAX_JET_DEPTH {
            return Err(ContinuationError::DepthTooLarge(k));
        }
        let jet = jet_from_series(&f, orbit[0], k)?;
        let binom = binomials(k);
        let value = match p.precision {
            Precision::Double => iterate_steps::<f64>(&p, &jet, k, &binom),
            Precision::Extended => iterate_steps::<Extended>(&p, &jet, k, &binom),
        };
        if !value.is_finite() {
            return Err(ContinuationError::PoleProximity(z_target));
        }
        return Ok(value);
    }
    match p.precision {
        Precision::Double => integrate_levels::<f64>(&p, &f, z_target, k),
        Precision::Extended => integrate_levels::<Extended>(&p, &f, z_target, k),
    }
}

fn iterate_steps<T: Real>(p: &EquationParams, jet: &Jet, k: usize, binom: &[Vec<f64>]) -> Complex64 {
    let mut d: Vec<Complex<T>> = jet.d.iter().map(|v| lift(*v)).collect();
    for _ in 0..k {
        d = step_in(p, &d, binom);
    }
    lower(d[0])
}

/// Integrates `y_j(t) = f(c_j t)`, `c_j = q^{k-j} z`, over `t` in `[t_s, 1]`.
///
/// Level 0 stays inside the series disc; level `j >= 1` obeys
/// `y_j' = c_j (A y_{j-1} + B y_j^2 + C y_j + D)`.
fn integrate_levels<T: Real>(
    p: &EquationParams,
    f: &SolutionSeries,
    z: Complex64,
    k: usize,
) -> Result<Complex64, ContinuationError> {
    let r0 = f.evaluation_radius();
    let (a, b, c, d) = (lift::<T>(p.a), lift::<T>(p.b), lift::<T>(p.c), lift::<T>(p.d));
    let cs: Vec<Complex64> = (0..=k).map(|j| z * p.q.powi((k - j) as i32)).collect();
    let derivs: Vec<TruncatedSeries<T>> = derivative_series(&f.series, TAYLOR_ORDER)
        .iter()
        .map(|s| s.convert())
        .collect();
    let t_start = (0.5 * r0 / z.norm()).min(1.0);
    let mut t = t_start;
    let mut y: Vec<Complex<T>> = cs
        .iter()
        .map(|cj| f.series.evaluate(cj * t).map(lift::<T>))
        .collect::<Result<_, _>>()?;
    let mut factorial = [1.0_f64; TAYLOR_ORDER + 1];
    for n in 1..=TAYLOR_ORDER {
        factorial[n] = factorial[n - 1] * n as f64;
    }
    let c0 = lift::<T>(cs[0]);
    let mut steps = 0;
    while t < 1.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(ContinuationError::PoleProximity(cs[k] * t));
        }
        // Taylor coefficients in h of every level at t.
        let base = lift::<T>(cs[0] * t);
        let mut coef: Vec<Vec<Complex<T>>> = Vec::with_capacity(k + 1);
        let mut c0n = Complex::<T>::one();
        let level0: Vec<Complex<T>> = (0..=TAYLOR_ORDER)
            .map(|n| {
                let v = derivs[n].evaluate(base).map(|dv| dv * c0n / real::<T>(factorial[n]));
                c0n = c0n * c0;
                v
            })
            .collect::<Result<_, _>>()?;
        coef.push(level0);
        for j in 1..=k {
            let cj = lift::<T>(cs[j]);
            let mut yj = vec![y[j]];
            for n in 0..TAYLOR_ORDER {
                let square = (0..=n).fold(Complex::<T>::zero(), |acc, i| acc + yj[i] * yj[n - i]);
                let mut rhs = a * coef[j - 1][n] + b * square + c * yj[n];
                if n == 0 {
                    rhs = rhs + d;
                }
                yj.push(cj * rhs / real::<T>((n + 1) as f64));
            }
            coef.push(yj);
        }
        let mut rho = f64::INFINITY;
        for level in &coef[1..] {
            for n in [TAYLOR_ORDER - 1, TAYLOR_ORDER] {
                let m = lower(level[n]).norm();
                if m > 0.0 {
                    rho = rho.min(m.powf(-1.0 / n as f64));
                }
            }
        }
        let h = (STEP_FRACTION * rho).min(1.0 - t);
        if !(h > 1e-12) {
            return Err(ContinuationError::PoleProximity(cs[k] * t));
        }
        let hh = real::<T>(h);
        for j in 1..=k {
            y[j] = coef[j].iter().rev().fold(Complex::<T>::zero(), |acc, v| acc * hh + v);
            if !lower(y[j]).is_finite() {
                return Err(ContinuationError::PoleProximity(cs[j] * t));
            }
        }
        t = if 1.0 - t - h <= 0.0 { 1.0 } else { t + h };
    }
    Ok(lower(y[k]))
}
