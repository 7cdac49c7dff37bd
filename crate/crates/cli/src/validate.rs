//! Cross-check battery: fixed numerical identities, distribution laws by
//! Kolmogorov–Smirnov tests, and analytic-versus-simulation coverage.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use uavcov::analytic::{
    cdf_r_star, cellfree_coverage, downlink_coverage, jensen_bound, nearest_sq_rate, NearestCase, WeightModel,
};
use uavcov::model::{db_to_linear, ElevationModel, NetworkParams};
use uavcov::montecarlo::{
    estimate_cellfree, estimate_downlink, sample_nearest_sq, sample_r_star, CoverageEstimate, McSettings,
};
use uavcov::numerics::laplace::{invert, InversionParams};
use uavcov::numerics::{erf_fn, erfc_fn, gamma_fn, inverse_laplace_cdf, jet_eval, Jet};
use uavcov::stats::ks_test;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Distributions,
    Coverage,
    Numerics,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "distributions" => Some(Self::Distributions),
            "coverage" => Some(Self::Coverage),
            "numerics" => Some(Self::Numerics),
            "all" => Some(Self::All),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// The measured quantity (error, p-value, |z|, ...).
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs `suite`; `samples` sets the Monte Carlo size of the statistical checks.
pub fn validate(suite: Suite, samples: u64) -> Report {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Numerics | Suite::All) {
        numerics(&mut checks);
    }
    if matches!(suite, Suite::Distributions | Suite::All) {
        distributions(&mut checks, samples);
    }
    if matches!(suite, Suite::Coverage | Suite::All) {
        coverage(&mut checks, samples);
    }
    Report {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn at_most(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64, detail: String) -> Check {
    Check {
        suite,
        name: name.into(),
        passed: value <= threshold,
        value,
        threshold,
        detail,
    }
}

fn at_least(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64, detail: String) -> Check {
    Check {
        suite,
        name: name.into(),
        passed: value >= threshold,
        value,
        threshold,
        detail,
    }
}

fn failed(suite: &'static str, name: impl Into<String>, error: impl ToString) -> Check {
    Check {
        suite,
        name: name.into(),
        passed: false,
        value: f64::NAN,
        threshold: f64::NAN,
        detail: error.to_string(),
    }
}

// k-th Taylor coefficient at x0 from the Cauchy integral on a circle of
// radius r, using m equispaced points.
fn cauchy_coeff<F: Fn(Complex64) -> Complex64>(f: &F, x0: f64, r: f64, k: usize, m: usize) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let phi = 2.0 * PI * j as f64 / m as f64;
        let z = Complex64::from_polar(r, phi);
        acc += f(Complex64::new(x0, 0.0) + z) * Complex64::from_polar(1.0, -(k as f64) * phi);
    }
    acc.re / (m as f64 * r.powi(k as i32))
}

type JetFn = fn(&Jet) -> uavcov::Result<Jet>;
type CFn = fn(Complex64) -> Complex64;

fn jet_cases() -> Vec<(&'static str, f64, JetFn, CFn)> {
    vec![
        (
            "t^3 exp(-1/t)",
            1.0,
            |x| Ok(&x.powi(3) * &x.recip()?.scale(-1.0).exp()),
            |z| z.powi(3) * (-z.inv()).exp(),
        ),
        (
            "exp(x) / (1 + x)^0.7",
            0.5,
            |x| x.exp().div(&x.add_scalar(1.0).powf(0.7)?),
            |z| z.exp() / (z + 1.0).powf(0.7),
        ),
        (
            "ln(2 + x^2) * x",
            0.3,
            |x| Ok(&x.powi(2).add_scalar(2.0).ln()? * x),
            |z| (z * z + 2.0).ln() * z,
        ),
        (
            "exp(-x^1.5) / (3 - x)",
            1.2,
            |x| x.powf(1.5)?.scale(-1.0).exp().div(&x.scale(-1.0).add_scalar(3.0)),
            |z| (-z.powf(1.5)).exp() / (-z + 3.0),
        ),
    ]
}

fn numerics(out: &mut Vec<Check>) {
    const S: &str = "numerics";
    let worst = [0.3, 1.7, 6.4]
        .iter()
        .map(|&x| {
            let a = gamma_fn(x + 1.0).unwrap_or(f64::NAN);
            let b = x * gamma_fn(x).unwrap_or(f64::NAN);
            ((a - b) / b).abs()
        })
        .fold(0.0, f64::max);
    out.push(at_most(
        S,
        "gamma recurrence",
        worst,
        1e-12,
        "max relative error over x in {0.3, 1.7, 6.4}".into(),
    ));
    out.push(at_most(
        S,
        "erf(1)",
        (erf_fn(1.0) - 0.842_700_792_949_714_9).abs(),
        1e-10,
        format!("erf(1) = {}", erf_fn(1.0)),
    ));
    out.push(at_most(
        S,
        "erfc(5)",
        (erfc_fn(5.0) / 1.537_459_794_428_034_8e-12 - 1.0).abs(),
        1e-12,
        "relative error".into(),
    ));

    for (name, x0, jf, cf) in jet_cases() {
        match jet_eval(jf, x0, 7) {
            Err(e) => out.push(failed(S, format!("jet vs differences: {name}"), e)),
            Ok(jet) => {
                let worst = (0..=7)
                    .map(|k| {
                        let fd = cauchy_coeff(&cf, x0, 0.25, k, 64);
                        ((jet.coeff(k) - fd) / fd.abs().max(1e-300)).abs()
                    })
                    .fold(0.0, f64::max);
                out.push(at_most(
                    S,
                    format!("jet vs differences: {name}"),
                    worst,
                    1e-5,
                    "max relative error of Taylor coefficients 0..=7 against circle differences".into(),
                ));
            }
        }
    }

    let params = InversionParams::default();
    let step = invert(|s: Complex64| -s.ln(), 0.7, &params).map(|i| (i.value - 1.0).abs());
    out.push(match step {
        Ok(e) => at_most(S, "inverse Laplace: unit step", e, 1e-8, "1/s at t = 0.7".into()),
        Err(e) => failed(S, "inverse Laplace: unit step", e),
    });
    let pair =
        invert(|s: Complex64| -(s * (s + 1.0)).ln(), 1.0, &params).map(|i| (i.value - (1.0 - (-1.0f64).exp())).abs());
    out.push(match pair {
        Ok(e) => at_most(S, "inverse Laplace: 1 - e^-t", e, 1e-8, "1/(s(s+1)) at t = 1".into()),
        Err(e) => failed(S, "inverse Laplace: 1 - e^-t", e),
    });
    let levy = inverse_laplace_cdf(1.0, 4.0, 0.5, &params).map(|v| (v - erfc_fn(1.0 / (2.0 * 0.5f64.sqrt()))).abs());
    out.push(match levy {
        Ok(e) => at_most(
            S,
            "inverse Laplace: Levy law",
            e,
            1e-8,
            "exp(-sqrt(s))/s against erfc".into(),
        ),
        Err(e) => failed(S, "inverse Laplace: Levy law", e),
    });
}

fn distributions(out: &mut Vec<Check>, n: u64) {
    const S: &str = "distributions";
    let params = NetworkParams {
        lambda: 1e-6,
        ..NetworkParams::table_one()
    };
    let radius = 10.0 / (PI * params.lambda).sqrt();
    let cases = [
        (
            "nearest squared distance, all LoS unit weights",
            NearestCase::AllLosUnit,
        ),
        ("nearest squared distance, attenuation-scaled", NearestCase::LosWeighted),
        ("nearest squared distance, LoS points only", NearestCase::PureLos),
    ];
    let elev = ElevationModel::GammaTan {
        shape: 3.0,
        theta_bar: 30f64.to_radians(),
    };
    for (i, (name, case)) in cases.into_iter().enumerate() {
        let r = (|| {
            let rate = nearest_sq_rate(&params, &elev, case)?;
            let xs = sample_nearest_sq(&params, &elev, case, radius, n, 100 + i as u64)?;
            ks_test(&xs, |y| 1.0 - (-rate * y).exp())
        })();
        out.push(match r {
            Ok(ks) => at_least(
                S,
                name,
                ks.p_value,
                0.01,
                format!("KS D = {:.5}, n = {}", ks.statistic, ks.n),
            ),
            Err(e) => failed(S, name, e),
        });
    }
    let constant = ElevationModel::Constant {
        theta_bar: 25f64.to_radians(),
    };
    let r = (|| {
        let xs = sample_r_star(&params, &constant, &WeightModel::Unit, radius, n, 200)?;
        let cdf = |r: f64| {
            if r > 0.0 {
                cdf_r_star(r, &params, &constant, &WeightModel::Unit).unwrap_or(f64::NAN)
            } else {
                0.0
            }
        };
        ks_test(&xs, cdf)
    })();
    out.push(match r {
        Ok(ks) => at_least(
            S,
            "law of the strongest average power",
            ks.p_value,
            0.01,
            format!("KS D = {:.5}", ks.statistic),
        ),
        Err(e) => failed(S, "law of the strongest average power", e),
    });
}

/// |analytic − simulated| in units of the estimator's standard error. When
/// every sample agreed (standard error 0), the binomial standard error
/// under the analytic value is used instead.
pub fn z_score(analytic: f64, est: &CoverageEstimate) -> f64 {
    let se = if est.std_error > 0.0 {
        est.std_error
    } else {
        (analytic * (1.0 - analytic) / est.n_samples as f64).sqrt()
    };
    let d = (analytic - est.mean).abs();
    if d == 0.0 {
        0.0
    } else {
        d / se
    }
}

fn coverage(out: &mut Vec<Check>, n: u64) {
    const S: &str = "coverage";
    let mc = McSettings {
        n_samples: n,
        master_seed: 7,
        ..McSettings::default()
    };
    for n_ant in [1u32, 4] {
        for deg in [10.0f64, 40.0] {
            let params = NetworkParams {
                n_antennas: n_ant,
                ..NetworkParams::table_one()
            };
            let elev = ElevationModel::Constant {
                theta_bar: deg.to_radians(),
            };
            let name = format!("downlink N={n_ant} theta={deg}deg");
            let r = (|| {
                let a = downlink_coverage(&params, &elev)?;
                let j = jensen_bound(&params, &elev)?;
                let c = cellfree_coverage(&params, &elev)?;
                let est = estimate_downlink(&params, &elev, &mc)?;
                Ok::<_, uavcov::Error>((a.value, j.value, c.value, est))
            })();
            match r {
                Err(e) => out.push(failed(S, name, e)),
                Ok((a, j, c, est)) => {
                    out.push(at_most(
                        S,
                        format!("{name}: analytic vs simulation"),
                        z_score(a, &est),
                        3.0,
                        format!("analytic {a:.6}, simulated {:.6} ± {:.6}", est.mean, est.std_error),
                    ));
                    out.push(at_most(
                        S,
                        format!("{name}: Jensen bound below"),
                        j - a,
                        1e-6,
                        format!("bound {j:.6}"),
                    ));
                    out.push(at_most(
                        S,
                        format!("{name}: cell-free above"),
                        a - c,
                        1e-6,
                        format!("cell-free {c:.6}"),
                    ));
                }
            }
        }
    }
    let params = NetworkParams {
        lambda: 1e-6,
        n_antennas: 1,
        beta: db_to_linear(45.0),
        ..NetworkParams::table_one()
    };
    let elev = ElevationModel::Constant {
        theta_bar: 25f64.to_radians(),
    };
    let name = "cell-free N=1 beta=45dB: inversion vs simulation";
    match (
        cellfree_coverage(&params, &elev),
        estimate_cellfree(&params, &elev, &mc),
    ) {
        (Ok(a), Ok(est)) => out.push(at_most(
            S,
            name,
            z_score(a.value, &est),
            3.0,
            format!(
                "inversion {:.6}, simulated {:.6} ± {:.6}",
                a.value, est.mean, est.std_error
            ),
        )),
        (Err(e), _) | (_, Err(e)) => out.push(failed(S, name, e)),
    }
}
