//! Gamma and error functions, accurate to near machine precision on the
//! positive half-line.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

/// Euler's Gamma function for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "gamma",
            value: x,
        });
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum on its accurate range.
        return Ok(gamma_fn(x + 1.0)? / x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so t^(z+1/2) does not overflow before e^-t is applied.
    let half = t.powf((z + 0.5) / 2.0);
    Ok(SQRT_2PI * half * (half * (-t).exp()) * lanczos_sum(z))
}

/// Natural log of Γ(x) for `x > 0`; stays finite where `gamma_fn` overflows.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
        });
    }
    if x < 0.5 {
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(SQRT_2PI.ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// n! as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Error function for `z >= 0` (negative arguments use odd symmetry).
pub fn erf_fn(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return -erf_fn(-z);
    }
    if z == 0.0 {
        return 0.0;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z < 3.0 {
        erf_series(z)
    } else {
        1.0 - erfc_fraction(z)
    }
}

/// Complementary error function for `z >= 0`, with relative accuracy in the tail.
pub fn erfc_fn(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc_fn(-z);
    }
    if z == 0.0 {
        return 1.0;
    }
    if z == f64::INFINITY {
        return 0.0;
    }
    if z < 3.0 {
        1.0 - erf_series(z)
    } else {
        erfc_fraction(z)
    }
}

// erf(z) = 2/√π e^{-z²} Σ (2z²)^n z / (2n+1)!!, all terms positive.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * z2 / (2.0 * n + 1.0);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-z2).exp() * sum
}

// Continued fraction z + (1/2)/(z + 1/(z + (3/2)/(z + ...))), modified Lentz.
fn erfc_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}
