//! Substitution checks: how far a candidate is from solving the equation.

use num_complex::Complex64;
use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries};
use crate::solver::{EquationParams, SolutionSeries, SolverError, Variable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResidualError {
    #[error("residuals are not computed for formal Laurent expansions")]
    Formal,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Quadratic and constant coefficients of the equation in the given variable.
pub fn variable_constants(p: &EquationParams, v: Variable) -> (Complex64, Complex64) {
    match v {
        Variable::F => (p.b, p.d),
        Variable::G => (Complex64::new(1.0, 0.0), p.b * p.d),
    }
}

/// `f'(z) - A f(qz) - B f(z)^2 - C f(z) - D` from the three values.
pub fn residual_from_values(p: &EquationParams, f: Complex64, df: Complex64, fq: Complex64) -> Complex64 {
    df - p.a * fq - p.b * f * f - p.c * f - p.d
}

/// Residual of a closed-form candidate with derivative `df`.
pub fn closed_form_residual(
    p: &EquationParams,
    f: impl Fn(Complex64) -> Complex64,
    df: impl Fn(Complex64) -> Complex64,
    z: Complex64,
) -> Complex64 {
    residual_from_values(p, f(z), df(z), f(p.q * z))
}

/// Pointwise residual of a solution series, in its own variable.
pub struct SeriesResidual<'a> {
    sol: &'a SolutionSeries,
    derivative: TruncatedSeries,
    radius: f64,
}

impl<'a> SeriesResidual<'a> {
    pub fn new(sol: &'a SolutionSeries) -> Result<Self, ResidualError> {
        if sol.formal {
            return Err(ResidualError::Formal);
        }
        if sol.series.center() != Complex64::new(0.0, 0.0) {
            return Err(SeriesError::NonzeroCenter(sol.series.center()).into());
        }
        Ok(Self { sol, derivative: sol.series.differentiate(), radius: sol.evaluation_radius() })
    }

    pub fn at(&self, z: Complex64) -> Result<Complex64, ResidualError> {
        let p = &self.sol.params;
        let (beta, delta) = variable_constants(p, self.sol.variable);
        let f = self.sol.series.evaluate_in_disc(z, self.radius)?;
        let df = self.derivative.evaluate(z)?;
        let fq = self.sol.series.evaluate_in_disc(p.q * z, self.radius)?;
        Ok(df - p.a * fq - beta * f * f - p.c * f - delta)
    }

    /// Largest residual modulus over the points.
    pub fn max_over(&self, points: &[Complex64]) -> Result<f64, ResidualError> {
        points.iter().try_fold(0.0_f64, |m, &z| Ok(m.max(self.at(z)?.norm())))
    }
}

/// Coefficients of the residual series, reliable through order `N - 1`.
pub fn coefficient_residual(sol: &SolutionSeries) -> Result<TruncatedSeries, ResidualError> {
    if sol.formal {
        return Err(ResidualError::Formal);
    }
    let p = &sol.params;
    let (beta, delta) = variable_constants(p, sol.variable);
    let s = &sol.series;
    let mut constant = vec![Complex64::new(0.0, 0.0); s.order().max(0) as usize + 1];
    constant[0] = delta;
    let rhs = s
        .dilate(p.q)?
        .scale(p.a)?
        .add(&s.mul(s)?.scale(beta)?)?
        .add(&s.scale(p.c)?)?
        .add(&TruncatedSeries::new(s.center(), 0, constant)?)?;
    Ok(s.differentiate().sub(&rhs)?)
}
