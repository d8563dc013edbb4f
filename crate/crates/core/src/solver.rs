//! Coefficient recurrences for the solution families of
//! `f'(z) = A f(qz) + B f(z)^2 + C f(z) + D`.
//!
//! Solutions are computed in `f`-variables. For `B != 0` the normalised
//! variable `g = B f` satisfies `g' = A g(qz) + g^2 + C g + BD`; the
//! [`SolutionSeries::to_g`] view applies `g_n = B f_n` coefficientwise.
//! Laurent solutions are produced directly in `g`-variables.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{lift, lower, real, Extended, Precision, Real, SeriesError, TruncatedSeries};

/// Coefficients below this modulus are replaced by exact zeros.
pub const FLUSH_THRESHOLD: f64 = 1e-300;

/// Relative coefficient size used by the evaluation-radius estimate.
pub const RADIUS_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("A must be nonzero")]
    ZeroA,
    #[error("q = {0} is not allowed (q must avoid 0 and 1)")]
    InvalidQ(Complex64),
    #[error("parameter {0} is not finite")]
    NonFiniteParam(&'static str),
    #[error("this operation requires B = 0")]
    NonlinearParams,
    #[error("this operation requires B != 0")]
    ZeroB,
    #[error("this operation requires D != 0")]
    ZeroD,
    #[error("A + C = 0: the linear equation has no constant solution unless D = 0")]
    DegenerateLinear,
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("z0 = 0: use the origin Laurent solver")]
    ZeroCenter,
    #[error("seed values must be pairwise distinct (duplicate at index {0})")]
    DuplicateSeed(usize),
    #[error("coefficient {0} overflowed")]
    Overflow(i32),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The constants of the equation together with the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub q: Complex64,
    #[serde(default)]
    pub precision: Precision,
}

impl EquationParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64, q: Complex64) -> Result<Self, SolverError> {
        let p = Self { a, b, c, d, q, precision: Precision::Double };
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor for real parameters.
    pub fn real(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<Self, SolverError> {
        let r = |x| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d), r(q))
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (name, v) in [("A", self.a), ("B", self.b), ("C", self.c), ("D", self.d), ("q", self.q)] {
            if !v.is_finite() {
                return Err(SolverError::NonFiniteParam(name));
            }
        }
        if self.a.is_zero() {
            return Err(SolverError::ZeroA);
        }
        if self.q.is_zero() || self.q == Complex64::one() {
            return Err(SolverError::InvalidQ(self.q));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.b.is_zero()
    }
}

/// Which unknown a series expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    F,
    G,
}

/// How the leading coefficient was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    Free(Complex64),
    Forced,
}

/// A series produced by one of the recurrences.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSeries {
    pub series: TruncatedSeries,
    pub variable: Variable,
    pub seed: Seed,
    pub params: EquationParams,
    /// Set for Laurent expansions about `z0 != 0`, whose recurrence is not
    /// a verified consequence of the equation.
    pub formal: bool,
    radius: Option<f64>,
}

impl SolutionSeries {
    fn new(series: TruncatedSeries, variable: Variable, seed: Seed, params: EquationParams) -> Self {
        Self { series, variable, seed, params, formal: false, radius: None }
    }

    /// Replaces the estimated evaluation radius.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    /// Radius inside which the truncation is trusted.
    ///
    /// Unless set explicitly, this is the smallest `r` with
    /// `|a_n| r^n = RADIUS_TOL * max(1, max |a_k|)` over the last four
    /// nonzero regular coefficients, and infinite when all regular
    /// coefficients past the constant vanish.
    pub fn evaluation_radius(&self) -> f64 {
        if let Some(r) = self.radius {
            return r;
        }
        let scale = self
            .series
            .iter()
            .map(|(_, c)| c.norm())
            .fold(1.0, f64::max);
        self.series
            .iter()
            .filter(|(n, c)| *n >= 1 && !c.is_zero())
            .collect::<Vec<_>>()
            .iter()
            .rev()
            .take(4)
            .map(|(n, c)| (RADIUS_TOL * scale / c.norm()).powf(1.0 / *n as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// The same solution in `g = B f` variables.
    pub fn to_g(&self) -> Result<Self, SolverError> {
        match self.variable {
            Variable::G => Ok(self.clone()),
            Variable::F => {
                let mut out = self.clone();
                out.series = self.series.scale(self.params.b)?;
                out.variable = Variable::G;
                if let Seed::Free(a0) = self.seed {
                    out.seed = Seed::Free(a0 * self.params.b);
                }
                Ok(out)
            }
        }
    }

    /// The same solution in `f = g / B` variables.
    pub fn to_f(&self) -> Result<Self, SolverError> {
        match self.variable {
            Variable::F => Ok(self.clone()),
            Variable::G => {
                if self.params.b.is_zero() {
                    return Err(SolverError::ZeroB);
                }
                let inv = self.params.b.inv();
                let mut out = self.clone();
                out.series = self.series.scale(inv)?;
                out.variable = Variable::F;
                if let Seed::Free(a0) = self.seed {
                    out.seed = Seed::Free(a0 * inv);
                }
                Ok(out)
            }
        }
    }

    /// Evaluates the series in its own variable, inside the evaluation radius.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, SolverError> {
        Ok(self.series.evaluate_in_disc(z, self.evaluation_radius())?)
    }

    /// Value of `f` at `z`, converting from `g` when needed.
    pub fn evaluate_f(&self, z: Complex64) -> Result<Complex64, SolverError> {
        let v = self.evaluate(z)?;
        match self.variable {
            Variable::F => Ok(v),
            Variable::G if self.params.b.is_zero() => Err(SolverError::ZeroB),
            Variable::G => Ok(v / self.params.b),
        }
    }

    /// Number of exactly vanishing coefficients with index `0..=N`.
    pub fn zero_count(&self) -> usize {
        self.series.iter().filter(|(n, c)| *n >= 0 && c.is_zero()).count()
    }
}

fn flush<T: Real>(z: Complex<T>) -> Complex<T> {
    if lower(z).norm() < FLUSH_THRESHOLD {
        Complex::zero()
    } else {
        z
    }
}

fn check<T: Real>(z: Complex<T>, n: i32) -> Result<Complex<T>, SolverError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(flush(z))
    } else {
        Err(SolverError::Overflow(n))
    }
}

/// Runs `(n+1) u_{n+1} = A q^n u_n + beta sum u_i u_{n-i} + C u_n + delta [n = 0]`.
fn taylor_recurrence<T: Real>(
    p: &EquationParams,
    beta: Complex64,
    delta: Complex64,
    u0: Complex64,
    order: usize,
) -> Result<Vec<Complex64>, SolverError> {
    let (a, c, q, beta, delta) = (lift::<T>(p.a), lift::<T>(p.c), lift::<T>(p.q), lift::<T>(beta), lift::<T>(delta));
    let mut u: Vec<Complex<T>> = Vec::with_capacity(order + 1);
    u.push(flush(lift(u0)));
    let mut qn = Complex::<T>::one();
    for n in 0..order {
        let conv = (0..=n).fold(Complex::<T>::zero(), |acc, i| acc + u[i] * u[n - i]);
        let mut rhs = a * qn * u[n] + beta * conv + c * u[n];
        if n == 0 {
            rhs = rhs + delta;
        }
        u.push(check(rhs / real::<T>((n + 1) as f64), n as i32 + 1)?);
        qn = flush(qn * q);
    }
    Ok(u.into_iter().map(lower).collect())
}

/// Runs the origin Laurent recurrence
/// `(n+3) b_{n+1} = A q^n b_n + sum_{i+j=n} b_i b_j + C b_n + BD [n = 0]`
/// for `n >= 1`, starting from the given `b_0`, `b_1`.
fn laurent_recurrence<T: Real>(
    p: &EquationParams,
    b0: Complex64,
    b1: Complex64,
    order: usize,
) -> Result<Vec<Complex64>, SolverError> {
    let (a, c, q) = (lift::<T>(p.a), lift::<T>(p.c), lift::<T>(p.q));
    let mut b: Vec<Complex<T>> = vec![flush(lift(b0))];
    if order >= 1 {
        b.push(check(lift(b1), 1)?);
    }
    let mut qn = q;
    for n in 1..order {
        let conv = (0..=n).fold(Complex::<T>::zero(), |acc, i| acc + b[i] * b[n - i]);
        let rhs = a * qn * b[n] + conv + c * b[n];
        b.push(check(rhs / real::<T>((n + 3) as f64), n as i32 + 1)?);
        qn = flush(qn * q);
    }
    Ok(b.into_iter().map(lower).collect())
}

fn dispatch_taylor(p: &EquationParams, beta: Complex64, delta: Complex64, u0: Complex64, order: usize) -> Result<Vec<Complex64>, SolverError> {
    match p.precision {
        Precision::Double => taylor_recurrence::<f64>(p, beta, delta, u0, order),
        Precision::Extended => taylor_recurrence::<Extended>(p, beta, delta, u0, order),
    }
}

fn dispatch_laurent(p: &EquationParams, b0: Complex64, b1: Complex64, order: usize) -> Result<Vec<Complex64>, SolverError> {
    match p.precision {
        Precision::Double => laurent_recurrence::<f64>(p, b0, b1, order),
        Precision::Extended => laurent_recurrence::<Extended>(p, b0, b1, order),
    }
}

fn first_laurent_row(p: &EquationParams, b0: Complex64) -> Complex64 {
    (p.a * b0 + b0 * b0 + p.c * b0 + p.b * p.d) / 3.0
}

fn require_order(order: usize) -> Result<(), SolverError> {
    if order == 0 {
        Err(SolverError::ZeroOrder)
    } else {
        Ok(())
    }
}

/// Entire solution in `f`-variables with `f(0) = a0`:
/// `f_1 = A f_0 + B f_0^2 + C f_0 + D` and
/// `(n+1) f_{n+1} = A q^n f_n + B sum f_i f_{n-i} + C f_n`.
pub fn solve_entire(p: &EquationParams, a0: Complex64, order: usize) -> Result<SolutionSeries, SolverError> {
    p.validate()?;
    require_order(order)?;
    let coeffs = dispatch_taylor(p, p.b, p.d, a0, order)?;
    Ok(SolutionSeries::new(TruncatedSeries::taylor(coeffs)?, Variable::F, Seed::Free(a0), *p))
}

/// Entire solution of the normalised equation with `g(0) = g0`, computed
/// directly from `(n+1) g_{n+1} = A q^n g_n + sum g_i g_{n-i} + C g_n + BD [n = 0]`.
pub fn solve_entire_g(p: &EquationParams, g0: Complex64, order: usize) -> Result<SolutionSeries, SolverError> {
    p.validate()?;
    require_order(order)?;
    let coeffs = dispatch_taylor(p, Complex64::one(), p.b * p.d, g0, order)?;
    Ok(SolutionSeries::new(TruncatedSeries::taylor(coeffs)?, Variable::G, Seed::Free(g0), *p))
}

/// Linear case `B = 0`: `a_1 = (A + C) a_0 + D`, `a_{n+1} = a_n (A q^n + C) / (n + 1)`.
pub fn solve_linear(p: &EquationParams, a0: Complex64, order: usize) -> Result<SolutionSeries, SolverError> {
    if !p.is_linear() {
        return Err(SolverError::NonlinearParams);
    }
    solve_entire(p, a0, order)
}

/// The constant solution `-D / (A + C)` of the linear equation.
pub fn linear_constant_solution(p: &EquationParams) -> Result<Complex64, SolverError> {
    p.validate()?;
    if !p.is_linear() {
        return Err(SolverError::NonlinearParams);
    }
    let s = p.a + p.c;
    if s.is_zero() {
        return Err(SolverError::DegenerateLinear);
    }
    Ok(-p.d / s)
}

/// `ln |a_n|` for `n = 0..=n_max` of the linear solution, accumulated in
/// log space so that neither overflow nor underflow occurs.
pub fn linear_log_magnitudes(p: &EquationParams, a0: Complex64, n_max: usize) -> Result<Vec<f64>, SolverError> {
    p.validate()?;
    if !p.is_linear() {
        return Err(SolverError::NonlinearParams);
    }
    let mut out = vec![a0.norm().ln()];
    if n_max == 0 {
        return Ok(out);
    }
    let mut acc = ((p.a + p.c) * a0 + p.d).norm().ln();
    out.push(acc);
    let ln_q = p.q.ln();
    for n in 1..n_max {
        // |A q^n + C| with q^n = exp(n ln q) kept in log form when C = 0.
        let term = if p.c.is_zero() {
            p.a.norm().ln() + n as f64 * ln_q.re
        } else {
            (p.a * (ln_q * n as f64).exp() + p.c).norm().ln()
        };
        acc += term - ((n + 1) as f64).ln();
        out.push(acc);
    }
    Ok(out)
}

/// Root-test estimate `|a_n|^{1/n}` of the reciprocal radius, from log-magnitudes.
pub fn root_test_inverse_radius(log_mags: &[f64], n: usize) -> Option<f64> {
    (n >= 1).then(|| log_mags.get(n).map(|l| (l / n as f64).exp())).flatten()
}

/// The forced Laurent solution at the origin in `g`-variables:
/// `b_{-1} = -1`, `b_0 = -(A/q + C)/2`, `3 b_1 = A b_0 + b_0^2 + C b_0 + BD`,
/// `(n+3) b_{n+1} = A q^n b_n + sum b_i b_j + C b_n`.
pub fn solve_laurent_origin(p: &EquationParams, order: usize) -> Result<SolutionSeries, SolverError> {
    p.validate()?;
    require_order(order)?;
    if p.b.is_zero() {
        return Err(SolverError::ZeroB);
    }
    let b0 = -(p.a / p.q + p.c) / 2.0;
    let regular = dispatch_laurent(p, b0, first_laurent_row(p, b0), order)?;
    let mut coeffs = vec![Complex64::new(-1.0, 0.0)];
    coeffs.extend(regular);
    let s = TruncatedSeries::new(Complex64::zero(), -1, coeffs)?;
    Ok(SolutionSeries::new(s, Variable::G, Seed::Forced, *p))
}

/// Formal Laurent series in `(z - z0)` with `b_{-1} = -1`, a free `b_0` and
/// `(n+3) b_{n+1} = A q^n b_n + sum b_i b_j + C b_n` for `n >= 1`.
///
/// `b_1` defaults to `(A b_0 + b_0^2 + C b_0 + BD) / 3`, the same first row
/// as at the origin; pass `Some` to prescribe it. The result is marked
/// [`formal`](SolutionSeries::formal).
pub fn solve_laurent_at(
    p: &EquationParams,
    z0: Complex64,
    b0: Complex64,
    b1: Option<Complex64>,
    order: usize,
) -> Result<SolutionSeries, SolverError> {
    p.validate()?;
    require_order(order)?;
    if p.b.is_zero() {
        return Err(SolverError::ZeroB);
    }
    if z0.is_zero() {
        return Err(SolverError::ZeroCenter);
    }
    let b1 = b1.unwrap_or_else(|| first_laurent_row(p, b0));
    let regular = dispatch_laurent(p, b0, b1, order)?;
    let mut coeffs = vec![Complex64::new(-1.0, 0.0)];
    coeffs.extend(regular);
    let s = TruncatedSeries::new(z0, -1, coeffs)?;
    let mut out = SolutionSeries::new(s, Variable::G, Seed::Free(b0), *p);
    out.formal = true;
    Ok(out)
}

/// One member of [`enumerate_family`].
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub solution: SolutionSeries,
    /// Exactly vanishing coefficients among indices `0..=N`.
    pub zero_count: usize,
}

/// Solves for each seed in turn.
pub fn enumerate_family(p: &EquationParams, seeds: &[Complex64], order: usize) -> Result<Vec<FamilyMember>, SolverError> {
    for (i, s) in seeds.iter().enumerate() {
        if seeds[..i].contains(s) {
            return Err(SolverError::DuplicateSeed(i));
        }
    }
    seeds
        .iter()
        .map(|&a0| {
            let solution = solve_entire(p, a0, order)?;
            let zero_count = solution.zero_count();
            Ok(FamilyMember { solution, zero_count })
        })
        .collect()
}

/// `a_1` of the `g`-recurrence as a function of the seed: `a_0^2 + (A+C) a_0 + BD`.
pub fn first_coefficient_g(p: &EquationParams, a0: Complex64) -> Complex64 {
    a0 * a0 + (p.a + p.c) * a0 + p.b * p.d
}

/// The unique entire solution with `f(0) = 0` when `B, D != 0`.
pub fn check_forced_uniqueness(p: &EquationParams, order: usize) -> Result<SolutionSeries, SolverError> {
    if p.d.is_zero() {
        return Err(SolverError::ZeroD);
    }
    if p.b.is_zero() {
        return Err(SolverError::ZeroB);
    }
    let mut s = solve_entire(p, Complex64::zero(), order)?;
    s.seed = Seed::Forced;
    Ok(s)
}

/// Regimes in which a geometric bound on the `g`-coefficients is known for `|q| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundRegime {
    /// `D = 0`, `|a_0| <= 1`: `|a_n| <= (|A| + |C| + 1)^n`.
    UnitSeed,
    /// `D = 0`, `|a_0| = |beta| > 1`: `|a_n| <= |beta|^{n+1} (|A| + |C| + |beta|)^n`.
    LargeSeed,
    /// `a_0 = 0`, `D != 0`: `|a_n| <= max(1, |BD|)^n (|A| + |C| + 1)^n`.
    ForcedConstant,
}

impl BoundRegime {
    /// `ln` of the bound at index `n`.
    pub fn log_bound(&self, p: &EquationParams, a0: Complex64, n: usize) -> f64 {
        let base = p.a.norm() + p.c.norm();
        let n = n as f64;
        match self {
            Self::UnitSeed => n * (base + 1.0).ln(),
            Self::LargeSeed => {
                let beta = a0.norm();
                (n + 1.0) * beta.ln() + n * (base + beta).ln()
            }
            Self::ForcedConstant => n * ((p.b * p.d).norm().max(1.0).ln() + (base + 1.0).ln()),
        }
    }

    /// Whether `(p, a0)` satisfies the hypotheses of the regime.
    pub fn applies(&self, p: &EquationParams, a0: Complex64) -> bool {
        let inside = p.q.norm() < 1.0;
        inside
            && match self {
                Self::UnitSeed => p.d.is_zero() && a0.norm() <= 1.0,
                Self::LargeSeed => p.d.is_zero() && a0.norm() > 1.0,
                Self::ForcedConstant => !p.d.is_zero() && a0.is_zero(),
            }
    }
}

/// First index whose coefficient exceeds a bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundViolation {
    pub n: usize,
    pub log_value: f64,
    pub log_bound: f64,
}

/// Checks `ln |a_n| <= ln bound_n` (up to rounding) for the `g`-coefficients of `s`.
pub fn check_coefficient_bound(s: &SolutionSeries, regime: BoundRegime) -> Result<Option<BoundViolation>, SolverError> {
    let g = s.to_g()?;
    let a0 = g.series.coeff(0).unwrap_or_default();
    for (n, c) in g.series.iter().filter(|(n, _)| *n >= 0) {
        let n = n as usize;
        let log_value = c.norm().ln();
        let log_bound = regime.log_bound(&s.params, a0, n);
        if log_value > log_bound + 1e-12 * (1.0 + log_bound.abs()) {
            return Ok(Some(BoundViolation { n, log_value, log_bound }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn params_validation() {
        assert_eq!(EquationParams::real(0.0, 1.0, 0.0, 0.0, 0.5), Err(SolverError::ZeroA));
        assert!(matches!(EquationParams::real(1.0, 1.0, 0.0, 0.0, 0.0), Err(SolverError::InvalidQ(_))));
        assert!(matches!(EquationParams::real(1.0, 1.0, 0.0, 0.0, 1.0), Err(SolverError::InvalidQ(_))));
        assert!(EquationParams::real(1.0, 0.0, 0.0, 0.0, -1.0).is_ok());
    }

    #[test]
    fn forced_first_coefficient() {
        let p = EquationParams::real(0.7, 2.0, -0.3, 3.0, 0.4).unwrap();
        let g = solve_entire(&p, c(0.0, 0.0), 8).unwrap().to_g().unwrap();
        assert!(close(g.series.coeff(1).unwrap(), c(6.0, 0.0), 1e-15));
    }

    #[test]
    fn zero_solution() {
        let p = EquationParams::real(1.3, 0.5, 0.2, 0.0, 0.5).unwrap();
        let s = solve_entire(&p, c(0.0, 0.0), 16).unwrap();
        assert!(s.series.coeffs().iter().all(|c| c.is_zero()));
        assert_eq!(s.zero_count(), 17);
    }

    #[test]
    fn hand_evaluated_g_recurrence() {
        // a1 = a0^2 + a0 = 2, 2 a2 = a1 q + 2 a0 a1 = 1 + 4 = 5.
        let p = EquationParams::real(1.0, 1.0, 0.0, 0.0, 0.5).unwrap();
        let g = solve_entire_g(&p, c(1.0, 0.0), 4).unwrap();
        assert_eq!(g.series.coeff(1).unwrap(), c(2.0, 0.0));
        assert_eq!(g.series.coeff(2).unwrap(), c(2.5, 0.0));
        // 3 a3 = A a2 q^2 + (2 a0 a2 + a1^2) = 5/8 + 9 = 77/8.
        assert!(close(g.series.coeff(3).unwrap(), c(77.0 / 24.0, 0.0), 1e-15));
    }

    #[test]
    fn linear_examples() {
        let p = EquationParams::real(1.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let s = solve_linear(&p, c(1.0, 0.0), 6).unwrap();
        // a1 = 1, 2 a2 = a1 q, 3 a3 = a2 q^2.
        assert_eq!(s.series.coeff(1).unwrap(), c(1.0, 0.0));
        assert_eq!(s.series.coeff(2).unwrap(), c(0.25, 0.0));
        assert!(close(s.series.coeff(3).unwrap(), c(1.0 / 48.0, 0.0), 1e-15));

        let p = EquationParams::real(0.6, 0.0, 0.9, 1.5, 0.3).unwrap();
        let k = linear_constant_solution(&p).unwrap();
        let s = solve_linear(&p, k, 10).unwrap();
        assert!(s.series.iter().skip(1).all(|(_, c)| c.norm() < 1e-15));

        let p = EquationParams::real(1.0, 0.0, -1.0, 1.0, 0.3).unwrap();
        assert_eq!(linear_constant_solution(&p), Err(SolverError::DegenerateLinear));
        let p = EquationParams::real(1.0, 1.0, 0.0, 0.0, 0.3).unwrap();
        assert_eq!(solve_linear(&p, c(1.0, 0.0), 4).unwrap_err(), SolverError::NonlinearParams);
    }

    #[test]
    fn linear_ratio_matches_product_form() {
        let p = EquationParams::new(c(0.8, 0.1), c(0.0, 0.0), c(0.3, -0.2), c(0.5, 0.0), c(0.4, 0.3)).unwrap();
        let s = solve_linear(&p, c(0.2, 0.7), 20).unwrap();
        for n in 1..20 {
            let ratio = s.series.coeff(n + 1).unwrap() / s.series.coeff(n).unwrap();
            let expect = (p.a * p.q.powi(n) + p.c) / (n + 1) as f64;
            assert!(close(ratio, expect, 1e-13));
        }
    }

    #[test]
    fn log_magnitudes_match_direct() {
        let p = EquationParams::new(c(0.8, 0.1), c(0.0, 0.0), c(0.3, -0.2), c(0.5, 0.0), c(0.4, 0.3)).unwrap();
        let s = solve_linear(&p, c(0.2, 0.7), 30).unwrap();
        let logs = linear_log_magnitudes(&p, c(0.2, 0.7), 30).unwrap();
        for (n, c) in s.series.iter() {
            assert!((c.norm().ln() - logs[n as usize]).abs() < 1e-10);
        }
        let q2 = EquationParams::real(1.0, 0.0, 0.0, 0.0, 2.0).unwrap();
        let logs = linear_log_magnitudes(&q2, c(1.0, 0.0), 200).unwrap();
        assert!(logs.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn laurent_origin_forced_values() {
        let p = EquationParams::new(c(0.9, 0.2), c(1.1, -0.4), c(0.3, 0.5), c(-0.7, 0.2), c(0.3, 0.4)).unwrap();
        let s = solve_laurent_origin(&p, 12).unwrap();
        assert_eq!(s.series.low(), -1);
        assert_eq!(s.series.coeff(-1).unwrap(), c(-1.0, 0.0));
        assert!(close(s.series.coeff(0).unwrap(), -(p.a / p.q + p.c) / 2.0, 1e-15));
        assert_eq!(s.seed, Seed::Forced);

        let q = c(0.5, 0.1);
        let a = c(1.2, -0.3);
        let cc = -a / q;
        let p = EquationParams::new(a, c(0.7, 0.0), cc, c(2.0, 1.0), q).unwrap();
        let s = solve_laurent_origin(&p, 12).unwrap();
        assert!(s.series.coeff(0).unwrap().norm() < 1e-15);
        assert!(close(s.series.coeff(1).unwrap(), p.b * p.d / 3.0, 1e-14));

        let p = EquationParams::new(a, c(0.7, 0.0), cc, c(0.0, 0.0), q).unwrap();
        let s = solve_laurent_origin(&p, 40).unwrap();
        assert!(s.series.iter().filter(|(n, _)| *n >= 0).all(|(_, c)| c.norm() < 1e-30));
    }

    #[test]
    fn laurent_at_cases() {
        let p = EquationParams::real(1.0, 2.0, 0.0, 0.0, 0.5).unwrap();
        let z0 = c(1.5, 0.0);
        let s = solve_laurent_at(&p, z0, c(0.0, 0.0), None, 10).unwrap();
        assert!(s.formal);
        assert!(s.series.iter().filter(|(n, _)| *n >= 0).all(|(_, c)| c.is_zero()));
        let p_d = EquationParams::real(1.0, 2.0, 0.0, 3.0, 0.5).unwrap();
        let s = solve_laurent_at(&p_d, z0, c(0.0, 0.0), Some(c(0.0, 0.0)), 10).unwrap();
        assert!(s.series.iter().filter(|(n, _)| *n >= 0).all(|(_, c)| c.is_zero()));

        // b0 = B s0 with s0 a root of B s^2 + (A + C) s + D: the regular part is constant.
        let p = EquationParams::real(1.0, 2.0, 0.5, -1.0, 0.5).unwrap();
        let disc = ((p.a + p.c) * (p.a + p.c) - 4.0 * p.b * p.d).sqrt();
        let s0 = (-(p.a + p.c) + disc) / (2.0 * p.b);
        let s = solve_laurent_at(&p, z0, p.b * s0, None, 10).unwrap().to_f().unwrap();
        assert!(close(s.series.coeff(0).unwrap(), s0, 1e-14));
        assert!(close(s.series.coeff(-1).unwrap(), -p.b.inv(), 1e-15));
        assert!(s.series.iter().filter(|(n, _)| *n >= 1).all(|(_, c)| c.norm() < 1e-14));

        // Generic b0: b2 = (A b1 q + 2 b0 b1 + C b1) / 4.
        let p = EquationParams::real(1.0, 1.0, 0.0, 0.0, 0.5).unwrap();
        let s = solve_laurent_at(&p, z0, c(1.0, 0.0), None, 4).unwrap();
        let b1 = s.series.coeff(1).unwrap();
        assert!(close(b1, c(2.0 / 3.0, 0.0), 1e-15));
        let b2 = (p.a * b1 * p.q + 2.0 * b1 + p.c * b1) / 4.0;
        assert!(close(s.series.coeff(2).unwrap(), b2, 1e-15));

        assert_eq!(solve_laurent_at(&p, c(0.0, 0.0), c(1.0, 0.0), None, 4).unwrap_err(), SolverError::ZeroCenter);
    }

    #[test]
    fn family_enumeration() {
        let p = EquationParams::new(c(0.9, 0.2), c(1.1, -0.4), c(0.3, 0.5), c(0.0, 0.0), c(0.3, 0.4)).unwrap();
        // Degenerate member: root of a0^2 + (A + C) a0 in g-variables.
        let root = -(p.a + p.c) / p.b;
        let fam = enumerate_family(&p, &[root, c(0.3, 0.1)], 16).unwrap();
        assert!(fam[0].solution.to_g().unwrap().series.coeff(1).unwrap().norm() < 1e-15);
        assert!(fam[1].zero_count == 0);
        assert_eq!(enumerate_family(&p, &[root, root], 4).unwrap_err(), SolverError::DuplicateSeed(1));
        let a0 = c(0.2, -0.6);
        let g1 = fam[1].solution.to_g().unwrap().series.coeff(1).unwrap();
        assert!(close(first_coefficient_g(&p, p.b * c(0.3, 0.1)), g1, 1e-14));
        let _ = a0;
    }

    #[test]
    fn forced_uniqueness() {
        let p = EquationParams::real(1.0, 2.0, 0.5, 3.0, 0.5).unwrap();
        let s = check_forced_uniqueness(&p, 20).unwrap();
        assert_eq!(s.seed, Seed::Forced);
        assert_eq!(s, check_forced_uniqueness(&p, 20).unwrap());
        let p0 = EquationParams::real(1.0, 2.0, 0.5, 0.0, 0.5).unwrap();
        assert_eq!(check_forced_uniqueness(&p0, 20).unwrap_err(), SolverError::ZeroD);
    }

    #[test]
    fn extended_agrees_with_double() {
        let p = EquationParams::new(c(0.9, 0.2), c(1.1, -0.4), c(0.3, 0.5), c(-0.7, 0.2), c(0.3, 0.4)).unwrap();
        let d = solve_entire(&p, c(0.1, 0.2), 30).unwrap();
        let e = solve_entire(&p.with_precision(Precision::Extended), c(0.1, 0.2), 30).unwrap();
        for (x, y) in d.series.coeffs().iter().zip(e.series.coeffs()) {
            assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn radius_estimate() {
        let p = EquationParams::real(1.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let k = solve_linear(&p, c(0.0, 0.0), 10).unwrap();
        assert_eq!(k.evaluation_radius(), f64::INFINITY);
        let s = solve_linear(&p, c(1.0, 0.0), 40).unwrap();
        assert!(s.evaluation_radius() > 1.0);
        assert_eq!(s.clone().with_radius(0.5).evaluation_radius(), 0.5);
        assert!(s.with_radius(0.5).evaluate(c(0.6, 0.0)).is_err());
    }

    fn arb_c(r: f64) -> impl Strategy<Value = Complex64> {
        (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
    }

    fn arb_params() -> impl Strategy<Value = EquationParams> {
        (arb_c(2.0), arb_c(2.0), arb_c(2.0), arb_c(2.0), arb_c(0.95)).prop_filter_map("valid", |(a, b, c, d, q)| {
            (a.norm() > 0.05 && b.norm() > 0.05 && q.norm() > 0.05).then(|| EquationParams::new(a, b, c, d, q).ok()).flatten()
        })
    }

    proptest! {
        #[test]
        fn normalisation_equivariance(p in arb_params(), a0 in arb_c(1.0)) {
            let f = solve_entire(&p, a0, 40).unwrap().to_g().unwrap();
            let g = solve_entire_g(&p, p.b * a0, 40).unwrap();
            for (x, y) in f.series.coeffs().iter().zip(g.series.coeffs()) {
                prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()), "{} vs {}", x, y);
            }
        }

        #[test]
        fn laurent_origin_is_forced(p in arb_params()) {
            prop_assert_eq!(solve_laurent_origin(&p, 20).unwrap(), solve_laurent_origin(&p, 20).unwrap());
        }

        #[test]
        fn unit_seed_bound(p in arb_params(), a0 in arb_c(1.0)) {
            let p = EquationParams { d: Complex64::zero(), ..p };
            let s = solve_entire_g(&p, a0, 120).unwrap();
            prop_assert!(BoundRegime::UnitSeed.applies(&p, a0));
            prop_assert_eq!(check_coefficient_bound(&s, BoundRegime::UnitSeed).unwrap(), None);
        }

        #[test]
        fn large_seed_bound(p in arb_params(), r in 1.01..3.0f64, t in 0.0..std::f64::consts::TAU) {
            let p = EquationParams { d: Complex64::zero(), ..p };
            let a0 = Complex64::from_polar(r, t);
            let s = solve_entire_g(&p, a0, 120).unwrap();
            prop_assert_eq!(check_coefficient_bound(&s, BoundRegime::LargeSeed).unwrap(), None);
        }

        #[test]
        fn forced_constant_bound(p in arb_params()) {
            prop_assume!(!p.d.is_zero());
            let s = solve_entire_g(&p, Complex64::zero(), 120).unwrap();
            prop_assert_eq!(check_coefficient_bound(&s, BoundRegime::ForcedConstant).unwrap(), None);
        }
    }
}
