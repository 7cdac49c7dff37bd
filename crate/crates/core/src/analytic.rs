//! Closed-form and semi-analytical coverage expressions.
//!
//! Conventions: v = 2/α, c = πλω, and D★ ~ Exp(c) is the squared distance to
//! the nearest point of the thinned process. The downlink coverage is the
//! (N−1)-th Taylor coefficient at τ = 1/β of
//!
//! ```text
//! τ^{N−1} · E[ exp(−σ₀ D★^{α/2} / (Pτ) − c D★ J(τ)) ],   J(τ) = I_G(1/τ, v),
//! ```
//!
//! computed with jets whose coefficients come from quadrature.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{los_probability_unchecked, ElevationModel, LinkState, NetworkParams, NetworkRealization};
use crate::numerics::laplace::{stable_cdf, InversionMethod, InversionParams};
use crate::numerics::quad::{gamma_expectation, integrate_with_error, GaussLaguerre, QuadratureSpec};
use crate::numerics::special::{erf_fn, factorial, gamma_fn};
use crate::numerics::Jet;

/// Distribution of the association weight W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightModel {
    /// W ≡ 1.
    Unit,
    /// Only E[W^{2/α}] = m is known.
    MomentOnly { m: f64 },
    /// A samplable law, used for Monte Carlo cross-checks.
    Sampler(WeightDistribution),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightDistribution {
    Gamma { shape: f64, rate: f64 },
}

impl WeightDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            Self::Gamma { shape, rate } => {
                let g = Gamma::new(shape, 1.0 / rate).map_err(|e| invalid("weight", e.to_string()))?;
                Ok(g.sample(rng))
            }
        }
    }
}

impl WeightModel {
    /// E[W^{2/α}]. For a sampler this integrates against the stated density.
    pub fn moment(&self, alpha: f64) -> Result<f64> {
        let delta = 2.0 / alpha;
        let m = match *self {
            Self::Unit => 1.0,
            Self::MomentOnly { m } => m,
            Self::Sampler(WeightDistribution::Gamma { shape, rate }) => {
                if !(shape > 0.0 && rate > 0.0) {
                    return Err(invalid("weight", "Gamma shape and rate must be positive"));
                }
                gamma_expectation(shape, |y| (y / rate).powf(delta), &QuadratureSpec::default())?
            }
        };
        if !(m > 0.0) || !m.is_finite() {
            return Err(invalid(
                "weight",
                format!("moment E[W^(2/alpha)] must be positive and finite, got {m}"),
            ));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageMethod {
    ExactIntegration,
    ClosedForm,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    /// Probability in [0, 1].
    pub value: f64,
    pub method: CoverageMethod,
    /// Estimated absolute numerical error, including any clamp applied.
    pub numerical_error: f64,
    /// Distance the raw value was moved to land in [0, 1].
    pub clamped: f64,
}

impl CoverageResult {
    fn clamp(raw: f64, method: CoverageMethod, error: f64) -> Result<Self> {
        if !raw.is_finite() {
            return Err(Error::Domain {
                function: "coverage",
                value: raw,
            });
        }
        let value = raw.clamp(0.0, 1.0);
        let clamped = (raw - value).abs();
        Ok(Self {
            value,
            method,
            numerical_error: error + clamped,
            clamped,
        })
    }
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// ω = E[cos²Θ (ρ(Θ)(1 − ℓ^{2/α}) + ℓ^{2/α})].
pub fn omega(params: &NetworkParams, elev: &ElevationModel) -> Result<f64> {
    params.validate()?;
    let l = params.ell.powf(params.delta());
    elev.expect(
        |t| {
            let c = t.cos();
            c * c * (los_probability_unchecked(t, params.c1, params.c2) * (1.0 - l) + l)
        },
        &spec(),
    )
}

/// E[cos²Θ].
pub fn mean_cos_sq(elev: &ElevationModel) -> Result<f64> {
    elev.expect(|t| t.cos().powi(2), &spec())
}

/// E[ρ(Θ) cos²Θ].
pub fn mean_los_cos_sq(params: &NetworkParams, elev: &ElevationModel) -> Result<f64> {
    elev.expect(
        |t| los_probability_unchecked(t, params.c1, params.c2) * t.cos().powi(2),
        &spec(),
    )
}

/// CDF of R★ = max_i W_i L_i ‖U_i‖^{−α}: exp(−πλ E[W^{2/α}] ω r^{−2/α}).
pub fn cdf_r_star(r: f64, params: &NetworkParams, elev: &ElevationModel, weight: &WeightModel) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            function: "cdf_r_star",
            value: r,
        });
    }
    let w = weight.moment(params.alpha)?;
    let om = omega(params, elev)?;
    if r.is_infinite() {
        return Ok(1.0);
    }
    Ok((-PI * params.lambda * w * om * r.powf(-params.delta())).exp())
}

/// Special cases of the law of the nearest squared distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NearestCase {
    /// W = L = 1: min ‖U‖², rate πλE[cos²Θ].
    AllLosUnit,
    /// W = 1: min L^{−2/α}‖U‖², rate πλω.
    LosWeighted,
    /// ℓ = 0: min ‖U‖² over LoS points, rate πλE[ρ(Θ)cos²Θ].
    PureLos,
}

/// Exponential rate of the nearest squared distance for `case`.
pub fn nearest_sq_rate(params: &NetworkParams, elev: &ElevationModel, case: NearestCase) -> Result<f64> {
    params.validate()?;
    let m = match case {
        NearestCase::AllLosUnit => mean_cos_sq(elev)?,
        NearestCase::LosWeighted => omega(params, elev)?,
        NearestCase::PureLos => mean_los_cos_sq(params, elev)?,
    };
    Ok(PI * params.lambda * m)
}

/// CCDF of R★^{−2/α} (a squared distance) at `y`.
pub fn ccdf_nearest_sq(y: f64, params: &NetworkParams, elev: &ElevationModel, case: NearestCase) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::Domain {
            function: "ccdf_nearest_sq",
            value: y,
        });
    }
    Ok((-nearest_sq_rate(params, elev, case)? * y).exp())
}

/// Scales every UAV by L^{−1/α}. With ℓ = 0 the NLoS points go to infinity
/// and are dropped.
pub fn thinned_points(realization: &NetworkRealization, ell: f64, alpha: f64) -> Result<Vec<[f64; 3]>> {
    if !(0.0..=1.0).contains(&ell) {
        return Err(invalid("ell", "must lie in [0, 1]"));
    }
    if !(alpha > 2.0) {
        return Err(invalid("alpha", "path-loss exponent must exceed 2"));
    }
    let nlos_scale = if ell > 0.0 {
        ell.powf(-1.0 / alpha)
    } else {
        f64::INFINITY
    };
    Ok(realization
        .uavs
        .iter()
        .filter_map(|u| {
            let s = match u.los {
                LinkState::Los => 1.0,
                LinkState::Nlos if nlos_scale.is_finite() => nlos_scale,
                LinkState::Nlos => return None,
            };
            Some([s * u.x, s * u.y, s * u.altitude])
        })
        .collect())
}

fn check_v(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid("v", format!("must lie in (0, 1), got {v}")))
    }
}

// ∫_0^{z0} (1 − z^{1/(1−v)})^{e} dz: the Beta-type integral after the
// substitution z = (1 − t)^{1−v}, which removes the (1 − t)^{−v} endpoint.
fn beta_tail(z0: f64, v: f64, e: f64) -> Result<(f64, f64)> {
    let q = 1.0 / (1.0 - v);
    let est = integrate_with_error(|z: f64| (1.0 - z.powf(q)).max(0.0).powf(e), 0.0, z0, &spec())?;
    Ok((est.value, est.error))
}

/// I_G(u, v) = u^v (πv/sin πv − ∫₀^{u^{−v}} dr/(1 + r^{1/v})).
pub fn i_g(u: f64, v: f64) -> Result<f64> {
    check_v(v)?;
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain {
            function: "i_g",
            value: u,
        });
    }
    // = v u^v ∫_{1/(1+u)}^1 t^{v−1}(1−t)^{−v} dt
    let z0 = (u / (1.0 + u)).powf(1.0 - v);
    let (b, _) = beta_tail(z0, v, v - 1.0)?;
    Ok(v * u.powf(v) * b / (1.0 - v))
}

/// Taylor coefficients of J(τ) = I_G(1/τ, v) around τ0, up to `order`,
/// with the total quadrature error.
pub fn i_g_jet(tau0: f64, v: f64, order: usize) -> Result<(Jet, f64)> {
    check_v(v)?;
    if !(tau0 > 0.0) || !tau0.is_finite() {
        return Err(Error::Domain {
            function: "i_g_jet",
            value: tau0,
        });
    }
    let z0 = (1.0 / (1.0 + tau0)).powf(1.0 - v);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut err = 0.0;
    for k in 0..=order {
        let kf = k as f64;
        let (b, e) = beta_tail(z0, v, kf + v - 1.0)?;
        let scale = v * tau0.powf(-kf - v) / (1.0 - v);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign * scale * b);
        err += scale * e;
    }
    Ok((Jet::from_coeffs(coeffs), err))
}

fn coverage_inputs(params: &NetworkParams, elev: &ElevationModel) -> Result<(f64, usize, f64)> {
    params.validate()?;
    let c = PI * params.lambda * omega(params, elev)?;
    if !(c > 0.0) {
        return Err(invalid("omega", "thinned density must be positive"));
    }
    Ok((c, params.n_antennas as usize - 1, 1.0 / params.beta))
}

/// Downlink coverage of the strongest-average-power association with
/// N-antenna beamforming and Rayleigh interferers.
pub fn downlink_coverage(params: &NetworkParams, elev: &ElevationModel) -> Result<CoverageResult> {
    let (c, order, tau0) = coverage_inputs(params, elev)?;
    let v = params.delta();
    let (j, j_err) = i_g_jet(tau0, v, order)?;
    let j0 = j.value();
    let dj = j.add_scalar(-j0);
    let tau = Jet::variable(tau0, order);
    let inv_tau = tau.recip()?;
    let tau_pow = tau.powi(order as u32);
    let noise = params.noise / (params.power * c.powf(params.alpha / 2.0));

    // With u = c·D★ ~ Exp(1) and w = u(1 + J(τ0)), the weight e^{−w} absorbs
    // the dominant decay; the remaining integrand is smooth in w.
    let scale = 1.0 / (1.0 + j0);
    let inner = |w: f64| -> Jet {
        let u = w * scale;
        let expo = &inv_tau.scale(-noise * u.powf(params.alpha / 2.0)) - &dj.scale(u);
        expo.exp()
    };
    let target = |e: &Jet| -> f64 { (0..=order).map(|k| tau_pow.coeff(order - k) * e.coeff(k)).sum::<f64>() * scale };

    let gl = GaussLaguerre::standard().integrate(|w| target(&inner(w)));
    let adaptive = integrate_with_error(|w| (-w).exp() * target(&inner(w)), 0.0, f64::INFINITY, &spec())?;
    let gap = (gl - adaptive.value).abs();
    let (raw, quad_err) = if gap <= 1e-9 {
        (gl, gap)
    } else {
        (adaptive.value, adaptive.error.max(gap))
    };
    // Error in J propagates with a factor bounded by E[u]·max|coeff|.
    let j_prop = j_err * tau_pow.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs())) * (order + 1) as f64;
    CoverageResult::clamp(raw, CoverageMethod::ExactIntegration, quad_err + j_prop)
}

/// Jensen lower bound on the downlink coverage: the exponential of the mean
/// exponent, differentiated like the exact expression.
pub fn jensen_bound(params: &NetworkParams, elev: &ElevationModel) -> Result<CoverageResult> {
    let (c, order, tau0) = coverage_inputs(params, elev)?;
    let v = params.delta();
    let n = params.n_antennas as f64;
    let a = n * params.noise * gamma_fn(1.0 + params.alpha / 2.0)? / (params.power * c.powf(params.alpha / 2.0));
    if order == 0 {
        let ig = i_g(params.beta, v)?;
        return CoverageResult::clamp((-a * params.beta - ig).exp(), CoverageMethod::Bound, 1e-12);
    }
    // I_G(N/τ, v) = J(τ/N): coefficients of J at τ0/N rescaled by N^{−k}.
    let (jn, j_err) = i_g_jet(tau0 / n, v, order)?;
    let jn = Jet::from_coeffs(
        jn.coeffs()
            .iter()
            .enumerate()
            .map(|(k, x)| x * n.powi(-(k as i32)))
            .collect(),
    );
    let tau = Jet::variable(tau0, order);
    let expo = &tau.recip()?.scale(-a) - &jn;
    let f = &tau.powi(order as u32) * &expo.exp();
    CoverageResult::clamp(f.coeff(order), CoverageMethod::Bound, j_err * (order + 1) as f64)
}

/// κ = πλω Γ(N + 2/α) Γ(1 − 2/α) / (N − 1)!.
pub fn cellfree_kappa(params: &NetworkParams, elev: &ElevationModel) -> Result<f64> {
    let (c, order, _) = coverage_inputs(params, elev)?;
    let v = params.delta();
    Ok(c * gamma_fn(order as f64 + 1.0 + v)? * gamma_fn(1.0 - v)? / factorial(order as u32))
}

fn check_noise(params: &NetworkParams) -> Result<()> {
    if params.noise > 0.0 {
        Ok(())
    } else {
        Err(invalid("noise", "cell-free coverage needs positive noise power"))
    }
}

/// Coverage under non-coherent joint transmission by every UAV, by numerical
/// inversion of the Laplace transform of the aggregate received power.
pub fn cellfree_coverage(params: &NetworkParams, elev: &ElevationModel) -> Result<CoverageResult> {
    cellfree_coverage_with(params, elev, &InversionParams::default())
}

pub fn cellfree_coverage_with(
    params: &NetworkParams,
    elev: &ElevationModel,
    inversion: &InversionParams,
) -> Result<CoverageResult> {
    check_noise(params)?;
    let kappa = cellfree_kappa(params, elev)?;
    let t = params.beta * params.noise / params.power;
    // The fixed Talbot contour enters the left half-plane, where
    // exp(−κ s^{2/α}) can grow without bound; the Bromwich-line series is
    // safe there.
    let inv = match stable_cdf(kappa, params.alpha, t, inversion) {
        Ok(inv) => inv,
        Err(Error::Accuracy { .. }) if inversion.method == InversionMethod::Talbot => {
            stable_cdf(kappa, params.alpha, t, &InversionParams::euler())?
        }
        Err(e) => return Err(e),
    };
    CoverageResult::clamp(1.0 - inv.value, CoverageMethod::ExactIntegration, inv.change)
}

/// The α = 4 closed form of the cell-free coverage.
pub fn cellfree_coverage_erf(params: &NetworkParams, elev: &ElevationModel) -> Result<CoverageResult> {
    check_noise(params)?;
    if params.alpha != 4.0 {
        return Err(invalid("alpha", "the erf closed form holds only for alpha = 4"));
    }
    let kappa = cellfree_kappa(params, elev)?;
    let t = params.beta * params.noise / params.power;
    CoverageResult::clamp(erf_fn(kappa / (2.0 * t.sqrt())), CoverageMethod::ClosedForm, 1e-14)
}
