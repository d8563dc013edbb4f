//! Truncated Laurent/Taylor series with complex coefficients.
//!
//! A [`TruncatedSeries`] stores the coefficients `a_low, ..., a_N` of
//! `sum a_n (z - center)^n`. Solution series only ever carry `low` of `0`
//! or `-1`; products and derivatives of pole series may go lower, which is
//! allowed so that residuals can be formed term by term.
//!
//! Coefficients are generic over a [`Real`] scalar so the same code runs in
//! `f64` and in double-double ([`Extended`]) arithmetic.

use std::fmt::Debug;

use num_complex::{Complex, Complex64};
use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scalar type usable as the real part of series coefficients.
pub trait Real: Float + Debug + Send + Sync + 'static {}

impl<T: Float + Debug + Send + Sync + 'static> Real for T {}

/// Double-double scalar used by the extended-precision backend.
pub type Extended = twofloat::TwoFloat;

/// Default truncation order for solution series.
pub const DEFAULT_ORDER: usize = 128;

/// Relative threshold (2^-40 of the largest coefficient) below which a
/// principal-part coefficient is treated as cancelled by [`TruncatedSeries::add`].
pub const POLE_CANCEL_REL: f64 = 1.0 / 1_099_511_627_776.0;

/// Working precision of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series centers differ: {0} vs {1}")]
    CenterMismatch(Complex64, Complex64),
    #[error("series has no coefficients")]
    Empty,
    #[error("non-finite coefficient at index {0}")]
    NonFinite(i32),
    #[error("dilation factor must be nonzero")]
    ZeroDilation,
    #[error("dilation is only defined for series centered at the origin (center {0})")]
    NonzeroCenter(Complex64),
    #[error("cannot evaluate a series with a pole at its center")]
    PoleEvaluation,
    #[error("point {z} lies outside the evaluation radius {radius}")]
    OutsideRadius { z: Complex64, radius: f64 },
}

/// Converts an `f64` complex into the working scalar.
pub fn lift<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(
        T::from(z.re).expect("f64 converts to every Real"),
        T::from(z.im).expect("f64 converts to every Real"),
    )
}

/// Rounds a working-precision complex back to `f64`.
pub fn lower<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from(x).expect("f64 converts to every Real")
}

pub(crate) fn modulus<T: Real>(z: Complex<T>) -> f64 {
    lower(z).norm()
}

fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Finite expansion `sum_{n=low}^{N} a_n (z - center)^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T: Real = f64> {
    center: Complex<T>,
    low: i32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TruncatedSeries<T> {
    /// Builds a series from `coeffs[k] = a_{low + k}`.
    ///
    /// Leading principal-part coefficients that are exactly zero are
    /// stripped, so a negative `low` always denotes a genuine pole.
    pub fn new(center: Complex<T>, low: i32, coeffs: Vec<Complex<T>>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(k) = coeffs.iter().position(|c| !is_finite(c)) {
            return Err(SeriesError::NonFinite(low + k as i32));
        }
        let mut s = Self { center, low, coeffs };
        s.strip_principal(|c, _| c.is_zero());
        Ok(s)
    }

    /// Power series about the origin.
    pub fn taylor(coeffs: Vec<Complex<T>>) -> Result<Self, SeriesError> {
        Self::new(Complex::zero(), 0, coeffs)
    }

    /// The zero series known through `order`.
    pub fn zero(center: Complex<T>, order: usize) -> Self {
        Self { center, low: 0, coeffs: vec![Complex::zero(); order + 1] }
    }

    pub fn center(&self) -> Complex<T> {
        self.center
    }

    /// Lowest stored index.
    pub fn low(&self) -> i32 {
        self.low
    }

    /// Truncation order `N`: the highest index whose coefficient is known.
    pub fn order(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `(z - center)^n`, zero below `low`, `None` above the
    /// truncation order.
    pub fn coeff(&self, n: i32) -> Option<Complex<T>> {
        if n > self.order() {
            None
        } else if n < self.low {
            Some(Complex::zero())
        } else {
            Some(self.coeffs[(n - self.low) as usize])
        }
    }

    /// `(index, coefficient)` pairs from `low` to `N`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex<T>)> + '_ {
        self.coeffs.iter().enumerate().map(move |(k, c)| (self.low + k as i32, *c))
    }

    pub fn has_pole(&self) -> bool {
        self.low < 0
    }

    fn max_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| modulus(*c)).fold(0.0, f64::max)
    }

    fn strip_principal(&mut self, vanished: impl Fn(&Complex<T>, f64) -> bool) {
        let scale = self.max_modulus();
        while self.low < 0 && self.coeffs.len() > 1 && vanished(&self.coeffs[0], scale) {
            self.coeffs.remove(0);
            self.low += 1;
        }
        if self.low < 0 && self.coeffs.len() == 1 && vanished(&self.coeffs[0], scale) {
            // Nothing but a cancelled principal part: the zero series at order `low`
            // carries no regular information, keep a single zero constant.
            self.coeffs = vec![Complex::zero()];
            self.low = 0;
        }
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center != other.center {
            return Err(SeriesError::CenterMismatch(lower(self.center), lower(other.center)));
        }
        Ok(())
    }

    fn check_finite(self) -> Result<Self, SeriesError> {
        match self.coeffs.iter().position(|c| !is_finite(c)) {
            Some(k) => Err(SeriesError::NonFinite(self.low + k as i32)),
            None => Ok(self),
        }
    }

    /// Coefficientwise sum truncated at the smaller order. Principal-part
    /// coefficients that cancel below [`POLE_CANCEL_REL`] times the largest
    /// coefficient are dropped.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let low = self.low.min(other.low);
        let top = self.order().min(other.order());
        let coeffs = (low..=top)
            .map(|n| self.coeff(n).unwrap_or_else(Complex::zero) + other.coeff(n).unwrap_or_else(Complex::zero))
            .collect();
        let mut out = Self { center: self.center, low, coeffs };
        out.strip_principal(|c, scale| modulus(*c) <= POLE_CANCEL_REL * scale);
        out.check_finite()
    }

    pub fn scale(&self, factor: Complex<T>) -> Result<Self, SeriesError> {
        let coeffs = self.coeffs.iter().map(|c| *c * factor).collect();
        Self::new(self.center, self.low, coeffs)?.check_finite()
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scale(-Complex::<T>::new(T::one(), T::zero()))?)
    }

    /// Cauchy product.
    ///
    /// The result is reliable through `N' = min(N_s, N_t) + min(low_s, low_t)`
    /// and is truncated there; its lowest index is `low_s + low_t`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let low = self.low + other.low;
        let top = self.order().min(other.order()) + self.low.min(other.low);
        let coeffs = (low..=top)
            .map(|n| {
                let mut acc = Complex::zero();
                let i_min = self.low.max(n - other.order());
                let i_max = self.order().min(n - other.low);
                for i in i_min..=i_max {
                    acc = acc + self.coeffs[(i - self.low) as usize] * other.coeffs[(n - i - other.low) as usize];
                }
                acc
            })
            .collect();
        Self::new(self.center, low, coeffs)?.check_finite()
    }

    /// Term-by-term derivative; the truncation order drops by one.
    pub fn differentiate(&self) -> Self {
        let start = if self.low >= 0 { self.low.max(1) } else { self.low };
        let coeffs: Vec<_> = self
            .iter()
            .filter(|(n, _)| *n >= start)
            .map(|(n, c)| c * real::<T>(n as f64))
            .collect();
        if coeffs.is_empty() {
            return Self::zero(self.center, 0);
        }
        Self { center: self.center, low: start - 1, coeffs }
    }

    /// `s(qz)` for a series centered at the origin: `a_n -> a_n q^n`.
    pub fn dilate(&self, q: Complex<T>) -> Result<Self, SeriesError> {
        if q.is_zero() {
            return Err(SeriesError::ZeroDilation);
        }
        if !self.center.is_zero() {
            return Err(SeriesError::NonzeroCenter(lower(self.center)));
        }
        let coeffs = self.iter().map(|(n, c)| c * q.powi(n)).collect();
        Self::new(self.center, self.low, coeffs)?.check_finite()
    }

    /// Horner evaluation of the regular part plus the principal part.
    pub fn evaluate(&self, z: Complex<T>) -> Result<Complex<T>, SeriesError> {
        let w = z - self.center;
        let regular = self
            .coeffs
            .iter()
            .skip((-self.low).max(0) as usize)
            .rev()
            .fold(Complex::zero(), |acc, c| acc * w + c);
        let regular = if self.low > 0 { regular * w.powi(self.low) } else { regular };
        if self.low >= 0 {
            return Ok(regular);
        }
        if w.is_zero() {
            return Err(SeriesError::PoleEvaluation);
        }
        let inv = w.inv();
        let principal = self.coeffs[..(-self.low) as usize]
            .iter()
            .fold(Complex::<T>::zero(), |acc, c| acc * inv + c)
            * inv;
        Ok(regular + principal)
    }

    /// [`evaluate`](Self::evaluate) restricted to `|z - center| < radius`.
    pub fn evaluate_in_disc(&self, z: Complex<T>, radius: f64) -> Result<Complex<T>, SeriesError> {
        if modulus(z - self.center) >= radius {
            return Err(SeriesError::OutsideRadius { z: lower(z), radius });
        }
        self.evaluate(z)
    }

    /// Re-expresses the coefficients in another scalar type.
    pub fn convert<U: Real>(&self) -> TruncatedSeries<U> {
        TruncatedSeries {
            center: lift(lower(self.center)),
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| lift(lower(*c))).collect(),
        }
    }

    /// Coefficients rounded to `f64`.
    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        self.convert()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn taylor(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::taylor(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn add_is_coefficientwise() {
        let s = taylor(&[1.0, 2.0]).add(&taylor(&[3.0, 1.0])).unwrap();
        assert_eq!(s, taylor(&[4.0, 3.0]));
        let z = TruncatedSeries::zero(c(0.0, 0.0), 1);
        assert_eq!(taylor(&[1.0, 2.0]).add(&z).unwrap(), taylor(&[1.0, 2.0]));
    }

    #[test]
    fn add_cancels_pole() {
        let s = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let t = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let sum = s.add(&t).unwrap();
        assert_eq!(sum.low(), 0);
        assert_eq!(sum.coeffs(), &[c(1.0, 0.0)]);
        // Near-cancellation within 2^-40 relative also counts.
        let t2 = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(1.0 + 1e-14, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.add(&t2).unwrap().low(), 0);
    }

    #[test]
    fn center_mismatch_rejected() {
        let s = TruncatedSeries::new(c(1.0, 0.0), 0, vec![c(1.0, 0.0)]).unwrap();
        let t = taylor(&[1.0]);
        assert!(matches!(s.add(&t), Err(SeriesError::CenterMismatch(..))));
        assert!(matches!(s.mul(&t), Err(SeriesError::CenterMismatch(..))));
    }

    #[test]
    fn mul_truncates() {
        let p = taylor(&[1.0, 1.0, 0.0]).mul(&taylor(&[1.0, -1.0, 0.0])).unwrap();
        assert_eq!(p, taylor(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn square_matches_convolution() {
        let a: Vec<f64> = (0..8).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let s = taylor(&a);
        let sq = s.mul(&s).unwrap();
        for n in 0..8 {
            let conv: f64 = (0..=n).map(|i| a[i] * a[n - i]).sum();
            assert!(close(sq.coeff(n as i32).unwrap(), c(conv, 0.0), 1e-15));
        }
    }

    #[test]
    fn square_of_simple_pole() {
        let b0 = c(0.3, -0.2);
        let s = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(-1.0, 0.0), b0, c(0.0, 0.0)]).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.low(), -2);
        assert_eq!(sq.coeff(-2).unwrap(), c(1.0, 0.0));
        assert!(close(sq.coeff(-1).unwrap(), -2.0 * b0, 1e-15));
        assert!(close(sq.coeff(0).unwrap(), b0 * b0, 1e-15));
    }

    #[test]
    fn differentiate_examples() {
        let d = taylor(&[0.0, 0.0, 0.0, 1.0]).differentiate();
        assert_eq!(d, taylor(&[0.0, 0.0, 3.0]));
        let g = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let dg = g.differentiate();
        assert_eq!(dg.low(), -2);
        assert_eq!(dg.coeff(-2).unwrap(), c(1.0, 0.0));
        assert_eq!(dg.coeff(-1).unwrap(), c(0.0, 0.0));
        let k = taylor(&[5.0, 0.0, 0.0]).differentiate();
        assert!(k.coeffs().iter().all(|c| c.norm() == 0.0));
        assert_eq!(taylor(&[5.0]).differentiate(), TruncatedSeries::zero(c(0.0, 0.0), 0));
    }

    #[test]
    fn dilate_examples() {
        let q = c(0.5, 0.25);
        let s = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let d = s.dilate(q).unwrap();
        assert!(close(d.coeff(-1).unwrap(), -q.inv(), 1e-15));
        assert!(close(d.coeff(1).unwrap(), q, 1e-15));
        assert_eq!(s.dilate(c(1.0, 0.0)).unwrap(), s);
        assert_eq!(s.dilate(c(0.0, 0.0)), Err(SeriesError::ZeroDilation));
        let off = TruncatedSeries::new(c(1.0, 0.0), 0, vec![c(1.0, 0.0)]).unwrap();
        assert!(matches!(off.dilate(q), Err(SeriesError::NonzeroCenter(_))));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(taylor(&[1.0, 1.0, 1.0]).evaluate(c(1.0, 0.0)).unwrap(), c(3.0, 0.0));
        let g = TruncatedSeries::new(c(0.0, 0.0), -1, vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(g.evaluate(c(2.0, 0.0)).unwrap(), c(-0.5, 0.0));
        assert_eq!(g.evaluate(c(0.0, 0.0)), Err(SeriesError::PoleEvaluation));
        assert!(matches!(
            g.evaluate_in_disc(c(2.0, 0.0), 1.0),
            Err(SeriesError::OutsideRadius { .. })
        ));
    }

    #[test]
    fn truncated_exponential_error_is_tail_sized() {
        // Oracle: exp evaluated directly; the remainder of the degree-N
        // truncation is bounded by |z|^{N+1} e^{|z|} / (N+1)!.
        let n = 12;
        let mut fact = 1.0;
        let coeffs: Vec<_> = (0..=n)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                c(1.0 / fact, 0.0)
            })
            .collect();
        let s = TruncatedSeries::taylor(coeffs).unwrap();
        for &z in &[c(0.1, 0.0), c(0.3, 0.4), c(-0.7, 0.2), c(1.0, -1.0)] {
            let err = (s.evaluate(z).unwrap() - z.exp()).norm();
            let bound = z.norm().powi(n + 1) * z.norm().exp() / (fact * (n + 1) as f64);
            assert!(err <= bound + 1e-15, "z={z} err={err} bound={bound}");
        }
    }

    #[test]
    fn extended_backend_round_trips() {
        let s = taylor(&[1.0, 0.5, 0.25]);
        let e: TruncatedSeries<Extended> = s.convert();
        let sq = e.mul(&e).unwrap().to_f64();
        assert_eq!(sq, s.mul(&s).unwrap());
    }

    fn arb_c() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_series(low: i32) -> impl Strategy<Value = TruncatedSeries> {
        (prop::collection::vec(arb_c(), 6), arb_c()).prop_map(move |(mut v, lead)| {
            if low < 0 {
                v[0] = if lead.norm() < 0.1 { c(1.0, 0.0) } else { lead };
            }
            TruncatedSeries::new(c(0.0, 0.0), low, v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mul_commutes(s in arb_series(-1), t in arb_series(0)) {
            let a = s.mul(&t).unwrap();
            let b = t.mul(&s).unwrap();
            prop_assert_eq!(a.low(), b.low());
            prop_assert_eq!(a.order(), b.order());
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!(close(*x, *y, 1e-14));
            }
        }

        #[test]
        fn mul_associates_on_reliable_range(s in arb_series(0), t in arb_series(0), u in arb_series(0)) {
            let a = s.mul(&t).unwrap().mul(&u).unwrap();
            let b = s.mul(&t.mul(&u).unwrap()).unwrap();
            for n in 0..=a.order().min(b.order()) {
                prop_assert!((a.coeff(n).unwrap() - b.coeff(n).unwrap()).norm() <= 1e-12);
            }
        }

        #[test]
        fn dilate_composes(s in arb_series(-1), q1 in arb_c(), q2 in arb_c()) {
            prop_assume!(q1.norm() > 0.1 && q2.norm() > 0.1);
            let a = s.dilate(q1).unwrap().dilate(q2).unwrap();
            let b = s.dilate(q1 * q2).unwrap();
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!(close(*x, *y, 1e-13));
            }
        }

        #[test]
        fn leibniz_rule(s in arb_series(-1), t in arb_series(0)) {
            let lhs = s.mul(&t).unwrap().differentiate();
            let rhs = s.differentiate().mul(&t).unwrap().add(&s.mul(&t.differentiate()).unwrap()).unwrap();
            let top = lhs.order().min(rhs.order());
            for n in lhs.low().min(rhs.low())..=top {
                prop_assert!((lhs.coeff(n).unwrap() - rhs.coeff(n).unwrap()).norm() <= 1e-12);
            }
        }

        #[test]
        fn finite_in_finite_out(s in arb_series(-1), q in arb_c()) {
            prop_assume!(q.norm() > 0.1);
            let all_finite = |x: &TruncatedSeries| x.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite());
            prop_assert!(all_finite(&s.mul(&s).unwrap()));
            prop_assert!(all_finite(&s.dilate(q).unwrap()));
            prop_assert!(all_finite(&s.differentiate()));
            prop_assert!(all_finite(&s.add(&s).unwrap()));
        }
    }
}
