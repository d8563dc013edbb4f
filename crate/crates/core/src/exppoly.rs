//! Exponential polynomials `sum_j H_j(z) exp(E_j(z))` with polynomial
//! prefactors `H_j` and polynomial exponents `E_j`.
//!
//! Exponents are compared after rounding their coefficients to twelve
//! significant digits, and constant parts of exponents are folded into the
//! prefactor, so each exponent without constant term appears at most once.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Poly;
use crate::solver::EquationParams;

/// Largest polynomial degree accepted in prefactors and exponents.
pub const MAX_DEGREE: usize = 64;

/// Significant digits kept when comparing exponents.
const KEY_DIGITS: usize = 12;

/// Relative size below which a merged coefficient counts as cancelled.
const CANCEL_REL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpPolyError {
    #[error("polynomial degree {0} exceeds the limit {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("the residual is zero, there is no witness")]
    NoWitness,
}

/// One summand `prefactor(z) * exp(exponent(z))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub prefactor: Poly,
    pub exponent: Poly,
}

impl Term {
    pub fn new(prefactor: Poly, exponent: Poly) -> Self {
        Self { prefactor, exponent }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.prefactor.eval(z) * self.exponent.eval(z).exp()
    }
}

/// Normalised sum of [`Term`]s, sorted by exponent.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

fn round_component(x: f64, scale: f64) -> String {
    if x.abs() <= 1e-12 * scale {
        return "0".into();
    }
    format!("{:.*e}", KEY_DIGITS - 1, x)
}

/// Comparison key of an exponent without constant term.
fn exponent_key(e: &Poly) -> Vec<(String, String)> {
    let scale = e.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut key: Vec<_> = e
        .coeffs()
        .iter()
        .map(|c| (round_component(c.re, scale), round_component(c.im, scale)))
        .collect();
    while key.last().is_some_and(|(r, i)| r == "0" && i == "0") {
        key.pop();
    }
    key
}

fn check_poly(p: &Poly) -> Result<(), ExpPolyError> {
    if let Some(d) = p.degree() {
        if d > MAX_DEGREE {
            return Err(ExpPolyError::DegreeTooLarge(d));
        }
    }
    if p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(ExpPolyError::NonFinite);
    }
    Ok(())
}

impl ExpPoly {
    /// Merges equal exponents, folds constant exponent parts and drops
    /// vanishing prefactors.
    pub fn normalize(raw: Vec<Term>) -> Result<Self, ExpPolyError> {
        struct Acc {
            exponent: Poly,
            sum: Vec<Complex64>,
            size: Vec<f64>,
        }
        let mut groups: BTreeMap<Vec<(String, String)>, Acc> = BTreeMap::new();
        for t in raw {
            check_poly(&t.prefactor)?;
            check_poly(&t.exponent)?;
            let shift = t.exponent.coeff(0).exp();
            let mut e = t.exponent.coeffs().to_vec();
            if !e.is_empty() {
                e[0] = Complex64::new(0.0, 0.0);
            }
            let exponent = Poly::new(e);
            let key = exponent_key(&exponent);
            let acc = groups.entry(key).or_insert_with(|| Acc { exponent, sum: Vec::new(), size: Vec::new() });
            for (k, c) in t.prefactor.coeffs().iter().enumerate() {
                if acc.sum.len() <= k {
                    acc.sum.resize(k + 1, Complex64::new(0.0, 0.0));
                    acc.size.resize(k + 1, 0.0);
                }
                let v = c * shift;
                acc.sum[k] += v;
                acc.size[k] += v.norm();
            }
        }
        let mut terms = Vec::new();
        for (_, acc) in groups {
            let coeffs: Vec<_> = acc
                .sum
                .iter()
                .zip(&acc.size)
                .map(|(s, m)| if s.norm() <= CANCEL_REL * m { Complex64::new(0.0, 0.0) } else { *s })
                .collect();
            let prefactor = Poly::new(coeffs);
            if prefactor.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(ExpPolyError::NonFinite);
            }
            if !prefactor.is_zero() {
                terms.push(Term { prefactor, exponent: acc.exponent });
            }
        }
        Ok(Self { terms })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::normalize(vec![Term::new(Poly::constant(c), Poly::zero())]).expect("constant is valid")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExpPolyError> {
        Self::normalize(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, s: Complex64) -> Result<Self, ExpPolyError> {
        Self::normalize(
            self.terms
                .iter()
                .map(|t| Term::new(t.prefactor.scale(s), t.exponent.clone()))
                .collect(),
        )
    }

    /// `(H e^E)' = (H' + H E') e^E`, termwise.
    pub fn derivative(&self) -> Result<Self, ExpPolyError> {
        Self::normalize(
            self.terms
                .iter()
                .map(|t| {
                    let h = &t.prefactor.derivative() + &(&t.prefactor * &t.exponent.derivative());
                    Term::new(h, t.exponent.clone())
                })
                .collect(),
        )
    }

    /// `f(qz)`.
    pub fn dilate(&self, q: Complex64) -> Result<Self, ExpPolyError> {
        Self::normalize(
            self.terms
                .iter()
                .map(|t| Term::new(t.prefactor.dilate(q), t.exponent.dilate(q)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExpPolyError> {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for t in &other.terms {
                raw.push(Term::new(&s.prefactor * &t.prefactor, &s.exponent + &t.exponent));
            }
        }
        Self::normalize(raw)
    }
}

/// `f' - A f(qz) - B f^2 - C f - D`, normalised. Empty exactly when the
/// candidate solves the equation.
pub fn residual(p: &EquationParams, f: &ExpPoly) -> Result<ExpPoly, ExpPolyError> {
    let rhs = f
        .dilate(p.q)?
        .scale(p.a)?
        .add(&f.mul(f)?.scale(p.b)?)?
        .add(&f.scale(p.c)?)?
        .add(&ExpPoly::constant(p.d))?;
    f.derivative()?.add(&rhs.scale(Complex64::new(-1.0, 0.0))?)
}

fn rounded_norm(z: Complex64) -> f64 {
    format!("{:.*e}", KEY_DIGITS - 1, z.norm()).parse().unwrap_or(f64::NAN)
}

fn witness_order(a: &Term, b: &Term) -> Ordering {
    let deg = |t: &Term| t.exponent.degree().unwrap_or(0);
    let lead = |t: &Term| t.exponent.leading();
    deg(a)
        .cmp(&deg(b))
        .then(rounded_norm(lead(a)).total_cmp(&rounded_norm(lead(b))))
        .then(lead(a).re.total_cmp(&lead(b).re))
        .then(lead(a).im.total_cmp(&lead(b).im))
}

/// The term of a nonzero residual whose exponent has the largest degree,
/// then the largest leading-coefficient modulus, then the largest real and
/// imaginary parts of that coefficient. Returns `(exponent, prefactor)`.
pub fn leading_witness(residual: &ExpPoly) -> Result<(Poly, Poly), ExpPolyError> {
    residual
        .terms
        .iter()
        .max_by(|a, b| witness_order(a, b))
        .map(|t| (t.exponent.clone(), t.prefactor.clone()))
        .ok_or(ExpPolyError::NoWitness)
}
