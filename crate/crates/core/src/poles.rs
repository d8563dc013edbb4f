//! Pole orders along q-orbits for `f'(z) = a(z) f(qz) + P(z, f) / Q(z, f)`.
//!
//! At a generic pole of order `o` the left side has order `o + 1` and the
//! rational term has order `(p - s) o` when `p > s`, so `f(qz)` has a pole
//! of order `max(o + 1, (p - s) o)`. A generic zero of order `t` of the
//! `Q`-factor produces a pole of order `t` at the next orbit point. Genericity
//! (no cancellation against coefficient zeros or poles) is assumed, not checked.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest orbit that is iterated.
pub const MAX_ORBIT_STEPS: usize = 64;

/// Largest `f`-degree accepted for `P` and `Q`.
pub const MAX_RHS_DEGREE: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoleError {
    #[error("degrees (p = {p}, s = {s}) exceed the limit {MAX_RHS_DEGREE}")]
    DegreeTooLarge { p: u32, s: u32 },
    #[error("starting order must be at least 1")]
    ZeroOrder,
    #[error("{0} steps exceed the orbit cap {MAX_ORBIT_STEPS}")]
    TooManySteps(usize),
    #[error("pole order overflowed at step {0}")]
    Overflow(usize),
    #[error("the start point must be nonzero")]
    ZeroStart,
    #[error("the growth bound needs |q| > 1, got {0}")]
    QInsideUnitDisc(f64),
    #[error("the growth bound needs a multiplier of at least 2, got {0}")]
    SmallMultiplier(u32),
}

/// `f`-degrees of numerator `P` and denominator `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RhsDegrees {
    pub p: u32,
    pub s: u32,
}

impl RhsDegrees {
    pub fn new(p: u32, s: u32) -> Result<Self, PoleError> {
        if p > MAX_RHS_DEGREE || s > MAX_RHS_DEGREE {
            return Err(PoleError::DegreeTooLarge { p, s });
        }
        Ok(Self { p, s })
    }

    /// Geometric multiplier `p - s`, zero when `p <= s`.
    pub fn multiplier(&self) -> u32 {
        self.p.saturating_sub(self.s)
    }
}

/// What sits at the start of the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Pole,
    QZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AccumulatesAtOrigin,
    ForcesPositiveOrder,
    Benign,
}

/// Result of [`propagate_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    /// Orders at `q z0, q^2 z0, ...`.
    Orders(Vec<u128>),
    /// A `Q`-zero start with `s = 0`: there is nothing to propagate.
    NonPropagating,
}

fn next_order(d: RhsDegrees, o: u128, step: usize) -> Result<u128, PoleError> {
    let mult = o.checked_mul(d.multiplier() as u128).ok_or(PoleError::Overflow(step))?;
    Ok((o + 1).max(mult))
}

/// Orders at the first `n_steps` orbit points after the start.
pub fn propagate_order(d: RhsDegrees, kind: StartKind, t: u128, n_steps: usize) -> Result<Propagation, PoleError> {
    if t == 0 {
        return Err(PoleError::ZeroOrder);
    }
    if n_steps > MAX_ORBIT_STEPS {
        return Err(PoleError::TooManySteps(n_steps));
    }
    let mut orders = Vec::with_capacity(n_steps);
    let mut o = match kind {
        StartKind::QZero if d.s == 0 => return Ok(Propagation::NonPropagating),
        StartKind::QZero => {
            if n_steps == 0 {
                return Ok(Propagation::Orders(orders));
            }
            orders.push(t);
            t
        }
        StartKind::Pole => t,
    };
    while orders.len() < n_steps {
        o = next_order(d, o, orders.len() + 1)?;
        orders.push(o);
    }
    Ok(Propagation::Orders(orders))
}

/// Steps at which `o + 1 = (p - s) o`, where the two leading terms have
/// equal order and could cancel.
pub fn tie_steps(d: RhsDegrees, orders: &[u128], kind: StartKind, t: u128) -> Vec<usize> {
    let mut prev = match kind {
        StartKind::Pole => Some(t),
        StartKind::QZero => None,
    };
    let mut out = Vec::new();
    for (i, &o) in orders.iter().enumerate() {
        if let Some(p) = prev {
            if p + 1 == p * d.multiplier() as u128 {
                out.push(i + 1);
            }
        }
        prev = Some(o);
    }
    out
}

/// `log m / log |q|`, the lower bound for the exponent of convergence of
/// the poles forced by a multiplier `m` along an outward orbit.
pub fn growth_lower_bound(m: u32, q: Complex64) -> Result<f64, PoleError> {
    let qn = q.norm();
    if qn <= 1.0 {
        return Err(PoleError::QInsideUnitDisc(qn));
    }
    if m < 2 {
        return Err(PoleError::SmallMultiplier(m));
    }
    Ok((m as f64).ln() / qn.ln())
}

/// Classifies the orbit: accumulation at the origin when `|q| < 1` and the
/// orders propagate, forced positive order when `|q| > 1` and `p - s >= 2`.
pub fn meromorphy_verdict(d: RhsDegrees, kind: StartKind, q: Complex64) -> Verdict {
    let propagates = !(kind == StartKind::QZero && d.s == 0);
    let qn = q.norm();
    if propagates && qn < 1.0 {
        Verdict::AccumulatesAtOrigin
    } else if propagates && qn > 1.0 && d.multiplier() >= 2 {
        Verdict::ForcesPositiveOrder
    } else {
        Verdict::Benign
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitStep {
    pub n: usize,
    pub point: Complex64,
    pub order: u128,
}

/// Orbit of a pole or `Q`-zero together with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleOrbit {
    pub start: Complex64,
    pub kind: StartKind,
    pub start_order: u128,
    pub degrees: RhsDegrees,
    pub steps: Vec<OrbitStep>,
    pub verdict: Verdict,
    /// `log(p - s) / log |q|` when the verdict forces positive order.
    pub growth_bound: Option<f64>,
    /// Steps where the generic rule had a tie.
    pub tie_steps: Vec<usize>,
    /// Always true: coefficient functions are assumed generic along the orbit.
    pub generic_assumed: bool,
}

pub fn pole_orbit(
    d: RhsDegrees,
    kind: StartKind,
    t: u128,
    z0: Complex64,
    q: Complex64,
    n_steps: usize,
) -> Result<PoleOrbit, PoleError> {
    if z0 == Complex64::new(0.0, 0.0) {
        return Err(PoleError::ZeroStart);
    }
    let orders = match propagate_order(d, kind, t, n_steps)? {
        Propagation::Orders(o) => o,
        Propagation::NonPropagating => Vec::new(),
    };
    let mut point = z0;
    let steps = orders
        .iter()
        .enumerate()
        .map(|(i, &order)| {
            point *= q;
            OrbitStep { n: i + 1, point, order }
        })
        .collect();
    let verdict = meromorphy_verdict(d, kind, q);
    let growth_bound = match verdict {
        Verdict::ForcesPositiveOrder => growth_lower_bound(d.multiplier(), q).ok(),
        _ => None,
    };
    Ok(PoleOrbit {
        start: z0,
        kind,
        start_order: t,
        degrees: d,
        tie_steps: tie_steps(d, &orders, kind, t),
        steps,
        verdict,
        growth_bound,
        generic_assumed: true,
    })
}
