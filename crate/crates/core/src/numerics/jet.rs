//! Truncated Taylor series ("jets") for exact high-order derivatives.
//!
//! A `Jet` of order K stores the coefficients c₀..c_K of f(x₀ + h) in powers
//! of h, so the k-th derivative at x₀ is k!·c_k. Arithmetic propagates the
//! truncated series exactly; nothing is differenced numerically.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::numerics::special::factorial;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The independent variable expanded around `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut jet = Self::constant(center, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    /// Wraps externally computed Taylor coefficients (e.g. from quadrature).
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        factorial(k as u32) * self.coeffs[k]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    fn check_order(&self, other: &Jet) {
        assert_eq!(self.order(), other.order(), "jets of different order");
    }

    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::Singularity);
        }
        let mut out = vec![0.0; self.coeffs.len()];
        out[0] = 1.0 / a0;
        for k in 1..out.len() {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -s / a0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Jet) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut out = vec![0.0; a.len()];
        out[0] = a[0].exp();
        for k in 1..out.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * out[k - j]).sum();
            out[k] = s / k as f64;
        }
        Self { coeffs: out }
    }

    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain {
                function: "jet ln",
                value: a[0],
            });
        }
        let mut out = vec![0.0; a.len()];
        out[0] = a[0].ln();
        for k in 1..out.len() {
            let s: f64 = (1..k).map(|j| j as f64 * out[j] * a[k - j]).sum();
            out[k] = (a[k] - s / k as f64) / a[0];
        }
        Ok(Self { coeffs: out })
    }

    /// Real power; needs a positive constant term unless `p` is a
    /// non-negative integer.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a = &self.coeffs;
        if p.fract() == 0.0 && p >= 0.0 && p <= i32::MAX as f64 {
            return Ok(self.powi(p as u32));
        }
        if a[0] == 0.0 {
            return Err(Error::Singularity);
        }
        if a[0] < 0.0 {
            return Err(Error::Domain {
                function: "jet powf",
                value: a[0],
            });
        }
        let mut out = vec![0.0; a.len()];
        out[0] = a[0].powf(p);
        for k in 1..out.len() {
            let kf = k as f64;
            let s: f64 = (1..=k)
                .map(|j| (p * j as f64 - (kf - j as f64)) * a[j] * out[k - j])
                .sum();
            out[k] = s / (kf * a[0]);
        }
        Ok(Self { coeffs: out })
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Composes an outer series with an inner jet: `outer` holds the Taylor
    /// coefficients of g around `inner.value()`, the result is g(inner).
    pub fn compose(outer: &Jet, inner: &Jet) -> Self {
        outer.check_order(inner);
        let shift = inner.add_scalar(-inner.value());
        let order = inner.order();
        // Horner in the shifted series; constant term of `shift` is zero.
        let mut acc = Jet::constant(outer.coeffs[order], order);
        for k in (0..order).rev() {
            acc = (&acc * &shift).add_scalar(outer.coeffs[k]);
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.check_order(rhs);
        Jet {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.check_order(rhs);
        Jet {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.check_order(rhs);
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Evaluates `f` on the variable jet at `center`, giving its Taylor
/// coefficients up to `order`.
pub fn jet_eval<F>(f: F, center: f64, order: usize) -> Result<Jet>
where
    F: FnOnce(&Jet) -> Result<Jet>,
{
    f(&Jet::variable(center, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_series() {
        let j = jet_eval(|x| Ok(x.exp()), 0.0, 3).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in j.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reciprocal_series() {
        let j = jet_eval(|x| x.recip(), 2.0, 2).unwrap();
        assert_eq!(j.coeffs(), &[0.5, -0.25, 0.125]);
    }

    #[test]
    fn zero_constant_term_is_singular() {
        assert_eq!(Jet::variable(0.0, 3).recip(), Err(Error::Singularity));
        assert_eq!(Jet::variable(0.0, 3).powf(-0.5), Err(Error::Singularity));
    }

    #[test]
    fn ln_inverts_exp() {
        let x = Jet::variable(0.7, 6);
        let back = x.exp().ln().unwrap();
        for (a, b) in back.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn powf_matches_repeated_product() {
        let x = Jet::variable(1.3, 5).add_scalar(0.2);
        let cube = x.powf(3.0).unwrap();
        let product = &(&x * &x) * &x;
        for (a, b) in cube.coeffs().iter().zip(product.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        let half = x.powf(0.5).unwrap();
        let sq = &half * &half;
        for (a, b) in sq.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn compose_with_linear_inner_rescales() {
        // g(y) = 1/y around y0 = 2, inner y = x/3 at x0 = 6.
        let outer = Jet::variable(2.0, 4).recip().unwrap();
        let inner = Jet::variable(6.0, 4).scale(1.0 / 3.0);
        let composed = Jet::compose(&outer, &inner);
        let direct = inner.recip().unwrap();
        for (a, b) in composed.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_uses_factorial() {
        let j = Jet::variable(1.0, 3).powi(3);
        assert_eq!(j.derivative(3), 6.0);
        assert_eq!(j.derivative(1), 3.0);
    }
}
