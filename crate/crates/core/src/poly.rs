//! Dense complex polynomials in ascending coefficient order.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `sum c[k] z^k`. Trailing exact zeros are trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for Poly {
    fn from(v: Vec<Complex64>) -> Self {
        Self::new(v)
    }
}

impl From<Poly> for Vec<Complex64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// `p(qz)`.
    pub fn dilate(&self, q: Complex64) -> Self {
        let mut qk = Complex64::new(1.0, 0.0);
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let out = c * qk;
                    qk *= q;
                    out
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Drops trailing coefficients below `tol` times the largest one.
    pub fn trim_relative(&self, tol: f64) -> Self {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(|c| c.norm() <= tol * scale) {
            v.pop();
        }
        Self::new(v)
    }

    /// Roots from the eigenvalues of the companion matrix, each polished by
    /// a few Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let zeros = self.coeffs.iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
        let mut out = vec![Complex64::new(0.0, 0.0); zeros];
        let reduced = Poly::new(self.coeffs[zeros..].to_vec());
        let n = deg - zeros;
        if n == 0 {
            return out;
        }
        let lead = reduced.leading();
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -reduced.coeffs[i] / lead
            } else if i == j + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let eig = companion
            .try_schur(f64::EPSILON, 10_000)
            .and_then(|s| s.eigenvalues())
            .map(|v| v.iter().copied().collect::<Vec<_>>())
            .unwrap_or_else(|| durand_kerner(&reduced));
        let dp = reduced.derivative();
        out.extend(eig.iter().map(|&z0| {
            let mut z = z0;
            for _ in 0..4 {
                let d = dp.eval(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = reduced.eval(z) / d;
                if !step.is_finite() {
                    break;
                }
                z -= step;
            }
            if reduced.eval(z).norm() <= reduced.eval(z0).norm() {
                z
            } else {
                z0
            }
        }));
        out
    }
}

/// Simultaneous iteration, used when the Schur iteration does not converge.
fn durand_kerner(p: &Poly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let monic = p.scale(p.leading().inv());
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = monic.eval(z[i]) / denom;
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Groups nearby roots into `(location, multiplicity)` pairs.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, u32)> {
    let mut out: Vec<(Complex64, u32, Complex64)> = Vec::new();
    for &r in roots {
        match out
            .iter_mut()
            .find(|(c, _, _)| (c - r).norm() <= tol * (1.0 + r.norm()))
        {
            Some((c, m, sum)) => {
                *m += 1;
                *sum += r;
                *c = *sum / *m as f64;
            }
            None => out.push((r, 1, r)),
        }
    }
    out.into_iter().map(|(c, m, _)| (c, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic() {
        let p = Poly::from_real(&[1.0, 1.0]);
        let q = Poly::from_real(&[-1.0, 1.0]);
        assert_eq!(&p * &q, Poly::from_real(&[-1.0, 0.0, 1.0]));
        assert_eq!(&p - &p, Poly::zero());
        assert_eq!(p.powi(2), Poly::from_real(&[1.0, 2.0, 1.0]));
        assert_eq!(Poly::from_real(&[0.0, 0.0, 1.0]).derivative(), Poly::from_real(&[0.0, 2.0]));
        assert_eq!(Poly::from_real(&[1.0, 1.0, 1.0]).dilate(c(2.0, 0.0)), Poly::from_real(&[1.0, 2.0, 4.0]));
        assert_eq!(Poly::from_real(&[1.0, 2.0, 3.0]).eval(c(2.0, 0.0)), c(17.0, 0.0));
    }

    #[test]
    fn roots_of_known_polynomials() {
        let p = &(&Poly::from_real(&[-3.0, 1.0]) * &Poly::from_real(&[1.0, 0.0, 1.0])) * &Poly::from_real(&[-0.5, 1.0]);
        let r = p.roots();
        assert_eq!(r.len(), 4);
        for y in [c(0.0, -1.0), c(0.0, 1.0), c(0.5, 0.0), c(3.0, 0.0)] {
            assert!(r.iter().any(|x| (x - y).norm() < 1e-12), "missing {y} in {r:?}");
        }
        assert!(Poly::constant(c(2.0, 0.0)).roots().is_empty());
    }

    #[test]
    fn clusters_double_root() {
        let p = Poly::from_real(&[4.0, -4.0, 1.0]);
        let cl = cluster_roots(&p.roots(), 1e-6);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].1, 2);
        assert!((cl[0].0 - c(2.0, 0.0)).norm() < 1e-7);
    }
}
