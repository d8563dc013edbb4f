//! Proximity, counting and characteristic functions on circles `|z| = r`,
//! and numerical checks of identities between them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{cluster_roots, Poly};

/// Default number of trapezoid nodes.
pub const DEFAULT_NODES: usize = 4096;

/// Nodes closer than this multiple of `r` to a pole are skipped.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Relative distance at which two roots are merged into one of higher multiplicity.
const ROOT_CLUSTER_TOL: f64 = 1e-6;

/// Largest degree accepted for root-finding.
pub const MAX_ROOT_DEGREE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NevanlinnaError {
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("{excluded} of {nodes} quadrature nodes were excluded")]
    UnreliableQuadrature { excluded: usize, nodes: usize },
    #[error("the denominator is identically zero")]
    ZeroDenominator,
    #[error("numerator and denominator share the root {0}")]
    CommonFactor(Complex64),
    #[error("the composition cancels at {0}")]
    DegenerateComposition(Complex64),
    #[error("f is identically equal to {0}")]
    ConstantEqualsTarget(Complex64),
    #[error("degree {0} exceeds the root-finding limit {MAX_ROOT_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("the radius grid is empty or not increasing")]
    BadGrid,
}

/// `m`, `N` and `T = m + N` at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacteristicSample {
    pub r: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

/// `m(r, f)`: trapezoid average of `log+ |f|` over `nodes` equally spaced angles.
///
/// Nodes within `POLE_EXCLUSION * r` of a listed pole, or where `f` is not
/// finite, are skipped and the average is taken over the rest. Listed poles
/// with `r/2 <= |p| <= 2r` have their logarithmic singularity subtracted
/// before averaging and its exact mean `mult * log max(r, |p|)` added back.
pub fn proximity(
    f: impl Fn(Complex64) -> Complex64,
    poles: &[(Complex64, u32)],
    r: f64,
    nodes: usize,
) -> Result<f64, NevanlinnaError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(NevanlinnaError::BadRadius(r));
    }
    let near: Vec<(Complex64, f64)> = poles
        .iter()
        .filter(|(p, _)| p.norm() >= 0.5 * r && p.norm() <= 2.0 * r)
        .map(|&(p, m)| (p, m as f64))
        .collect();
    let mut sum = 0.0;
    let mut used = 0usize;
    for k in 0..nodes {
        let z = Complex64::from_polar(r, TAU * k as f64 / nodes as f64);
        if poles.iter().any(|(p, _)| (z - p).norm() <= POLE_EXCLUSION * r) {
            continue;
        }
        let v = f(z);
        if !v.is_finite() {
            continue;
        }
        let singular: f64 = near.iter().map(|(p, m)| m * (z - p).norm().ln()).sum();
        sum += v.norm().ln().max(0.0) + singular;
        used += 1;
    }
    let excluded = nodes - used;
    if used == 0 || excluded * 8 > nodes {
        return Err(NevanlinnaError::UnreliableQuadrature { excluded, nodes });
    }
    let mean_singular: f64 = near.iter().map(|(p, m)| m * r.max(p.norm()).ln()).sum();
    Ok(sum / used as f64 - mean_singular)
}

/// `N(r, f) = sum_{0 < |z_k| <= r} m_k log(r / |z_k|) + n(0) log r`.
pub fn counting(poles: &[(Complex64, u32)], r: f64) -> f64 {
    poles
        .iter()
        .map(|&(z, mult)| {
            let a = z.norm();
            if a == 0.0 {
                mult as f64 * r.ln()
            } else if a <= r {
                mult as f64 * (r / a).ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// `T(r, f) = m(r, f) + N(r, f)`.
pub fn characteristic(
    f: impl Fn(Complex64) -> Complex64,
    poles: &[(Complex64, u32)],
    r: f64,
    nodes: usize,
) -> Result<CharacteristicSample, NevanlinnaError> {
    let m = proximity(f, poles, r, nodes)?;
    let n = counting(poles, r);
    Ok(CharacteristicSample { r, m, n, t: m + n })
}

fn check_grid(grid: &[f64]) -> Result<(), NevanlinnaError> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] > 0.0) {
        return Err(NevanlinnaError::BadGrid);
    }
    Ok(())
}

/// `num(z) / den(z)` with complex polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
    pub irreducible: bool,
}

fn common_root(a: &Poly, b: &Poly) -> Result<Option<Complex64>, NevanlinnaError> {
    for p in [a, b] {
        if let Some(d) = p.degree() {
            if d > MAX_ROOT_DEGREE {
                return Err(NevanlinnaError::DegreeTooLarge(d));
            }
        }
    }
    let rb = b.roots();
    Ok(a.roots().into_iter().find(|x| {
        rb.iter().any(|y| (x - y).norm() <= ROOT_CLUSTER_TOL * (1.0 + x.norm()))
    }))
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, NevanlinnaError> {
        if den.is_zero() {
            return Err(NevanlinnaError::ZeroDenominator);
        }
        Ok(Self { num, den, irreducible: false })
    }

    /// Like [`new`](Self::new), but rejects a shared root of numerator and denominator.
    pub fn new_irreducible(num: Poly, den: Poly) -> Result<Self, NevanlinnaError> {
        let mut f = Self::new(num, den)?;
        if let Some(z) = common_root(&f.num, &f.den)? {
            return Err(NevanlinnaError::CommonFactor(z));
        }
        f.irreducible = true;
        Ok(f)
    }

    pub fn polynomial(p: Poly) -> Self {
        Self { num: p, den: Poly::one(), irreducible: true }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Zeros of the denominator with multiplicities.
    pub fn poles(&self) -> Result<Vec<(Complex64, u32)>, NevanlinnaError> {
        let d = self.den.degree().unwrap_or(0);
        if d > MAX_ROOT_DEGREE {
            return Err(NevanlinnaError::DegreeTooLarge(d));
        }
        Ok(cluster_roots(&self.den.roots(), ROOT_CLUSTER_TOL))
    }

    /// `f(qz)`.
    pub fn dilate(&self, q: Complex64) -> Self {
        Self { num: self.num.dilate(q), den: self.den.dilate(q), irreducible: self.irreducible }
    }

    pub fn characteristic(&self, r: f64, nodes: usize) -> Result<CharacteristicSample, NevanlinnaError> {
        characteristic(|z| self.eval(z), &self.poles()?, r, nodes)
    }

    /// Characteristic samples along a grid.
    pub fn curve(&self, grid: &[f64], nodes: usize) -> Result<Vec<CharacteristicSample>, NevanlinnaError> {
        check_grid(grid)?;
        let poles = self.poles()?;
        grid.iter().map(|&r| characteristic(|z| self.eval(z), &poles, r, nodes)).collect()
    }
}

/// `max_r |T(r, f(q.)) - T(|q| r, f)|` over the grid.
pub fn verify_q_shift(f: &RationalFunction, q: Complex64, grid: &[f64], nodes: usize) -> Result<f64, NevanlinnaError> {
    check_grid(grid)?;
    let fq = f.dilate(q);
    let poles = f.poles()?;
    let poles_q: Vec<_> = poles.iter().map(|&(z, m)| (z / q, m)).collect();
    grid.iter().try_fold(0.0_f64, |acc, &r| {
        let lhs = characteristic(|z| fq.eval(z), &poles_q, r, nodes)?;
        let rhs = characteristic(|z| f.eval(z), &poles, q.norm() * r, nodes)?;
        Ok(acc.max((lhs.t - rhs.t).abs()))
    })
}

/// Outcome of [`verify_mokhonko`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MokhonkoReport {
    pub r: f64,
    pub ratio: f64,
    /// `max(p, s)`.
    pub expected: usize,
    pub composite_degree: usize,
}

/// `R(f)` for `R(y) = P(y) / Q(y)` with constant coefficients, as a rational
/// function of `z`: both parts are homogenised with the power `max(p, s)` of
/// the denominator of `f`.
pub fn compose(f: &RationalFunction, p: &Poly, q: &Poly) -> Result<RationalFunction, NevanlinnaError> {
    if q.is_zero() {
        return Err(NevanlinnaError::ZeroDenominator);
    }
    let k = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
    let homogenise = |r: &Poly| {
        r.coeffs().iter().enumerate().fold(Poly::zero(), |acc, (i, c)| {
            let term = &(&f.num.powi(i as u32) * &f.den.powi((k - i) as u32)) * &Poly::constant(*c);
            &acc + &term
        })
    };
    RationalFunction::new(homogenise(p), homogenise(q))
}

/// `T(r, R(f)) / T(r, f)` at the largest grid radius, for comparison with
/// `max(p, s)`.
pub fn verify_mokhonko(
    f: &RationalFunction,
    p: &Poly,
    q: &Poly,
    grid: &[f64],
    nodes: usize,
) -> Result<MokhonkoReport, NevanlinnaError> {
    check_grid(grid)?;
    let composite = compose(f, p, q)?;
    if let Some(z) = common_root(&composite.num, &composite.den)? {
        return Err(NevanlinnaError::DegenerateComposition(z));
    }
    let r = *grid.last().expect("grid checked non-empty");
    let t_comp = composite.characteristic(r, nodes)?.t;
    let t_f = f.characteristic(r, nodes)?.t;
    Ok(MokhonkoReport {
        r,
        ratio: t_comp / t_f,
        expected: p.degree().unwrap_or(0).max(q.degree().unwrap_or(0)),
        composite_degree: composite.degree(),
    })
}

/// `max_r |T(r, 1 / (f - a)) - T(r, f)|` over the grid.
pub fn verify_first_main(f: &RationalFunction, a: Complex64, grid: &[f64], nodes: usize) -> Result<f64, NevanlinnaError> {
    check_grid(grid)?;
    let shifted = (&f.num - &f.den.scale(a)).trim_relative(1e-14);
    if shifted.is_zero() {
        return Err(NevanlinnaError::ConstantEqualsTarget(a));
    }
    let inv = RationalFunction::new(f.den.clone(), shifted)?;
    let poles_f = f.poles()?;
    let poles_inv = inv.poles()?;
    grid.iter().try_fold(0.0_f64, |acc, &r| {
        let lhs = characteristic(|z| inv.eval(z), &poles_inv, r, nodes)?;
        let rhs = characteristic(|z| f.eval(z), &poles_f, r, nodes)?;
        Ok(acc.max((lhs.t - rhs.t).abs()))
    })
}
