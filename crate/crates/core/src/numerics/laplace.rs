//! Numerical inversion of Laplace transforms.
//!
//! Transforms are passed as their complex logarithm, ln F(s), so that the
//! product e^{st}F(s) is formed as a single exponential. This keeps the sums
//! finite when F(s) alone would overflow on the deformed contour.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    /// Fixed Talbot contour, r = 2M/(5t).
    Talbot,
    /// Fourier series on a vertical Bromwich line with Euler summation.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionParams {
    pub method: InversionMethod,
    /// Node count of the first pass; doubled until successive results agree.
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl InversionParams {
    pub fn talbot() -> Self {
        // Above ~32 nodes the e^{0.4M} weights amplify double rounding.
        Self {
            method: InversionMethod::Talbot,
            initial_nodes: 8,
            max_nodes: 32,
            tol: 1e-8,
        }
    }

    pub fn euler() -> Self {
        Self {
            method: InversionMethod::Euler,
            initial_nodes: 16,
            max_nodes: 256,
            tol: 1e-8,
        }
    }
}

impl Default for InversionParams {
    fn default() -> Self {
        Self::talbot()
    }
}

/// Result of a converged inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    pub nodes: usize,
    /// |f_M − f_{M/2}| at the accepted node count.
    pub change: f64,
}

fn talbot<F: Fn(Complex64) -> Complex64>(ln_f: &F, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut sum = 0.5 * (r * t + ln_f(Complex64::new(r, 0.0))).exp().re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t + ln_f(s)).exp() * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    r / mf * sum
}

// Abate–Whitt Fourier-series algorithm: discretization error ≈ e^{-A}.
const EULER_A: f64 = 10.0 * LN_10;
const EULER_TERMS: usize = 11;

fn euler<F: Fn(Complex64) -> Complex64>(ln_f: &F, t: f64, n: usize) -> f64 {
    let a = EULER_A;
    let scale = 1.0 / (2.0 * t);
    let value_at = |k: usize| {
        let s = Complex64::new(a * scale, k as f64 * PI / t);
        // e^{A/2} folded into the exponent; e^{st} contributes the (−1)^k.
        (ln_f(s) + a / 2.0).exp().re / t
    };
    let mut partial = 0.5 * value_at(0);
    let mut partials = Vec::with_capacity(EULER_TERMS + 1);
    for k in 1..=n + EULER_TERMS {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        partial += sign * value_at(k);
        if k >= n {
            partials.push(partial);
        }
    }
    // Binomial average of the partial sums s_n .. s_{n+m}.
    let m = EULER_TERMS;
    let mut coef = 1.0;
    let mut acc = 0.0;
    for (j, s) in partials.iter().enumerate() {
        if j > 0 {
            coef *= (m - j + 1) as f64 / j as f64;
        }
        acc += coef * s;
    }
    acc / 2f64.powi(m as i32)
}

/// Inverts the transform whose logarithm is `ln_f` at time `t`, doubling the
/// node count until two passes agree within `params.tol`.
pub fn invert<F: Fn(Complex64) -> Complex64>(ln_f: F, t: f64, params: &InversionParams) -> Result<Inversion> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            function: "inverse Laplace",
            value: t,
        });
    }
    if params.initial_nodes < 2 || params.max_nodes < params.initial_nodes {
        return Err(invalid("nodes", "need 2 <= initial_nodes <= max_nodes"));
    }
    let eval = |m: usize| match params.method {
        InversionMethod::Talbot => talbot(&ln_f, t, m),
        InversionMethod::Euler => euler(&ln_f, t, m),
    };
    let mut nodes = params.initial_nodes;
    let mut prev = eval(nodes);
    loop {
        let next_nodes = nodes * 2;
        if next_nodes > params.max_nodes {
            return Err(Error::Accuracy {
                routine: "inverse Laplace",
                estimate: prev,
                error_bound: f64::NAN,
            });
        }
        let next = eval(next_nodes);
        let change = (next - prev).abs();
        if !next.is_finite() {
            return Err(Error::Accuracy {
                routine: "inverse Laplace",
                estimate: next,
                error_bound: f64::INFINITY,
            });
        }
        if change < params.tol {
            return Ok(Inversion {
                value: next,
                nodes: next_nodes,
                change,
            });
        }
        nodes = next_nodes;
        prev = next;
    }
}

/// Inverse transform of (1/s)·exp(−κ s^{2/α}) at `t`: the CDF at `t` of a
/// positive stable variable with Laplace exponent κ s^{2/α}. Clamped to [0, 1].
pub fn inverse_laplace_cdf(kappa: f64, alpha: f64, t: f64, params: &InversionParams) -> Result<f64> {
    stable_cdf(kappa, alpha, t, params).map(|inv| inv.value.clamp(0.0, 1.0))
}

/// Unclamped variant of [`inverse_laplace_cdf`] carrying convergence data.
pub fn stable_cdf(kappa: f64, alpha: f64, t: f64, params: &InversionParams) -> Result<Inversion> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(invalid("kappa", "must be finite and non-negative"));
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(invalid("alpha", "path-loss exponent must exceed 2"));
    }
    let v = 2.0 / alpha;
    invert(|s: Complex64| -s.ln() - kappa * s.powf(v), t, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::erfc_fn;

    fn both() -> [InversionParams; 2] {
        [InversionParams::talbot(), InversionParams::euler()]
    }

    #[test]
    fn unit_step() {
        for p in both() {
            for t in [1e-12, 0.3, 1.0, 40.0] {
                let v = invert(|s: Complex64| -s.ln(), t, &p).unwrap().value;
                assert!((v - 1.0).abs() < 1e-8, "{:?} t={t}: {v}", p.method);
            }
        }
    }

    #[test]
    fn one_minus_exp() {
        for p in both() {
            let v = invert(|s: Complex64| -(s * (s + 1.0)).ln(), 1.0, &p).unwrap().value;
            assert!((v - 0.632_120_558_8).abs() < 1e-8, "{:?}: {v}", p.method);
        }
    }

    #[test]
    fn zero_kappa_is_step() {
        let v = inverse_laplace_cdf(0.0, 2.75, 0.5, &InversionParams::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn levy_closed_form_at_alpha_four() {
        for p in both() {
            for (kappa, t) in [(1.0, 0.05), (1.0, 1.0), (3.0, 10.0), (2e-5, 1e-11)] {
                let got = inverse_laplace_cdf(kappa, 4.0, t, &p).unwrap();
                let want = erfc_fn(kappa / (2.0 * t.sqrt()));
                assert!(
                    (got - want).abs() < 1e-8,
                    "{:?} κ={kappa} t={t}: {got} vs {want}",
                    p.method
                );
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = InversionParams::default();
        assert!(inverse_laplace_cdf(1.0, 4.0, 0.0, &p).is_err());
        assert!(inverse_laplace_cdf(-1.0, 4.0, 1.0, &p).is_err());
        assert!(inverse_laplace_cdf(1.0, 2.0, 1.0, &p).is_err());
    }

    #[test]
    fn budget_too_small_is_accuracy_error() {
        let p = InversionParams {
            initial_nodes: 2,
            max_nodes: 4,
            tol: 1e-14,
            method: InversionMethod::Talbot,
        };
        let err = invert(|s: Complex64| -(s * (s + 1.0)).ln(), 1.0, &p).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }
}
