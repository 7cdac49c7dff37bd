//! Monte Carlo estimates of coverage and of the distance laws.
//!
//! Sample `i` of a run with master seed `s` draws its geometry from stream
//! `2i` and its fading from stream `2i + 1` of `s`, so an estimate does not
//! depend on how samples are split across threads. Points are generated in
//! order of increasing distance, which keeps the inner part of a realization
//! fixed when the simulation radius grows.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{thinned_points, NearestCase, WeightModel};
use crate::error::{invalid, Error, Result};
use crate::model::{
    los_probability_unchecked, radial_ppp, realize_network_stream, stream_rng, ElevationModel, ElevationSampler,
    LinkState, NetworkParams, NetworkRealization,
};
use crate::numerics::quad::QuadratureSpec;

/// Fading for one realization, aligned with its UAV order.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingDraw {
    /// G★ ~ Gamma(N, 1).
    pub serving_gain: f64,
    /// G_i ~ Exp(1) per UAV; the entry at the serving index is ignored.
    pub interferer_gains: Vec<f64>,
}

impl FadingDraw {
    pub fn sample<R: Rng + ?Sized>(n_uavs: usize, n_antennas: u32, rng: &mut R) -> Result<Self> {
        let gamma = Gamma::new(n_antennas as f64, 1.0).map_err(|e| invalid("n_antennas", e.to_string()))?;
        let serving_gain = gamma.sample(rng);
        let interferer_gains = (0..n_uavs).map(|_| Exp1.sample(rng)).collect();
        Ok(Self {
            serving_gain,
            interferer_gains,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub mean: f64,
    /// √(mean(1 − mean)/n).
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl CoverageEstimate {
    pub fn from_counts(successes: u64, n_samples: u64, seed: u64) -> Self {
        let mean = successes as f64 / n_samples as f64;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / n_samples as f64).sqrt(),
            n_samples,
            seed,
        }
    }
}

/// How the part of the plane beyond the guard radius is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    /// Add the expected received power from beyond the guard radius.
    MeanCompensated,
    /// Ignore everything beyond the guard radius.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_samples: u64,
    pub master_seed: u64,
    pub guard_tolerance: f64,
    pub tail: TailModel,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            master_seed: 1,
            guard_tolerance: 0.1,
            tail: TailModel::MeanCompensated,
        }
    }
}

impl McSettings {
    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "need at least one sample"));
        }
        if !(self.guard_tolerance > 0.0 && self.guard_tolerance < 1.0) {
            return Err(invalid("guard_tolerance", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Simulation radius R. The expected power received from projections
/// beyond R decays as R^{2−α}; R is the smallest radius at which it is at
/// most `tolerance` times the expected power from beyond the mean
/// nearest-neighbour scale r₀ = 1/√(πλ), and never less than 10·r₀.
pub fn guard_radius(params: &NetworkParams, elev: &ElevationModel, tolerance: f64) -> Result<f64> {
    params.validate()?;
    elev.validate()?;
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(invalid("tolerance", "must lie in (0, 1)"));
    }
    let r0 = 1.0 / (PI * params.lambda).sqrt();
    let r = r0 * tolerance.powf(-1.0 / (params.alpha - 2.0));
    Ok(r.max(10.0 * r0))
}

/// Expected received power per unit fading mean from all UAVs whose
/// projection lies beyond `radius`: 2πλ E[L cos^αΘ] R^{2−α}/(α−2), times P.
pub fn far_field_power(params: &NetworkParams, elev: &ElevationModel, radius: f64) -> Result<f64> {
    let m = elev.expect(
        |t| {
            let rho = los_probability_unchecked(t, params.c1, params.c2);
            t.cos().powf(params.alpha) * (rho + params.ell * (1.0 - rho))
        },
        &QuadratureSpec::default(),
    )?;
    Ok(params.power * 2.0 * PI * params.lambda * m * radius.powf(2.0 - params.alpha) / (params.alpha - 2.0))
}

/// Index maximizing L_i ‖U_i‖^{−α}; the smallest index wins ties.
pub fn associate(realization: &NetworkRealization, alpha: f64, ell: f64) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, u) in realization.uavs.iter().enumerate() {
        let g = u.path_gain(alpha, ell);
        if best.is_none_or(|(_, b)| g > b) {
            best = Some((i, g));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoUav)
}

/// γ₀ = P G★ L★ ‖U★‖^{−α} / (I₀ + σ₀).
pub fn sinr(
    realization: &NetworkRealization,
    fading: &FadingDraw,
    serving: usize,
    params: &NetworkParams,
) -> Result<f64> {
    let n = realization.uavs.len();
    if fading.interferer_gains.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: fading.interferer_gains.len(),
        });
    }
    if serving >= n {
        return Err(Error::Shape {
            expected: n,
            actual: serving + 1,
        });
    }
    let (a, ell) = (params.alpha, params.ell);
    let signal = params.power * fading.serving_gain * realization.uavs[serving].path_gain(a, ell);
    let interference: f64 = realization
        .uavs
        .iter()
        .zip(&fading.interferer_gains)
        .enumerate()
        .filter(|(i, _)| *i != serving)
        .map(|(_, (u, g))| params.power * g * u.path_gain(a, ell))
        .sum();
    Ok(signal / (interference + params.noise))
}

// Lean point generator for the estimators: yields L·‖U‖^{−α} per point.
struct LinkSampler {
    lambda: f64,
    radius: f64,
    alpha: f64,
    ell: f64,
    c1: f64,
    c2: f64,
    elev: ElevationSampler,
    // (cos^α θ̄, ρ(θ̄)) for a constant elevation.
    fixed: Option<(f64, f64)>,
}

impl LinkSampler {
    fn new(params: &NetworkParams, elev: &ElevationModel, radius: f64) -> Result<Self> {
        let fixed = match *elev {
            ElevationModel::Constant { theta_bar } => Some((
                theta_bar.cos().powf(params.alpha),
                los_probability_unchecked(theta_bar, params.c1, params.c2),
            )),
            ElevationModel::GammaTan { .. } => None,
        };
        Ok(Self {
            lambda: params.lambda,
            radius,
            alpha: params.alpha,
            ell: params.ell,
            c1: params.c1,
            c2: params.c2,
            elev: elev.sampler()?,
            fixed,
        })
    }

    fn for_each<R: Rng + ?Sized, F: FnMut(f64)>(&self, rng: &mut R, mut f: F) {
        radial_ppp(self.lambda, self.radius, rng, |r, rng| {
            let (cos_a, rho) = match self.fixed {
                Some(v) => v,
                None => {
                    let t = self.elev.sample(rng);
                    (t.cos().powf(self.alpha), los_probability_unchecked(t, self.c1, self.c2))
                }
            };
            let l = if rng.random::<f64>() < rho { 1.0 } else { self.ell };
            f(l * cos_a * r.powf(-self.alpha));
        });
    }
}

struct Run {
    sampler: LinkSampler,
    tail: f64,
}

fn prepare(params: &NetworkParams, elev: &ElevationModel, settings: &McSettings) -> Result<Run> {
    params.validate()?;
    settings.validate()?;
    let radius = guard_radius(params, elev, settings.guard_tolerance)?;
    let tail = match settings.tail {
        TailModel::MeanCompensated => far_field_power(params, elev, radius)?,
        TailModel::Truncated => 0.0,
    };
    Ok(Run {
        sampler: LinkSampler::new(params, elev, radius)?,
        tail,
    })
}

fn count_successes<F: Fn(u64) -> bool + Sync>(n: u64, trial: F) -> u64 {
    (0..n).into_par_iter().filter(|&i| trial(i)).count() as u64
}

/// Fraction of samples with γ₀ ≥ β. An empty realization counts as not
/// covered.
pub fn estimate_downlink(
    params: &NetworkParams,
    elev: &ElevationModel,
    settings: &McSettings,
) -> Result<CoverageEstimate> {
    let run = prepare(params, elev, settings)?;
    let extra = if params.n_antennas > 1 {
        Some(Gamma::new(params.n_antennas as f64 - 1.0, 1.0).map_err(|e| invalid("n_antennas", e.to_string()))?)
    } else {
        None
    };
    let seed = settings.master_seed;
    let p = *params;
    let hits = count_successes(settings.n_samples, |i| {
        let mut geo = stream_rng(seed, 2 * i);
        let mut fad = stream_rng(seed, 2 * i + 1);
        // G★ = (own Exp(1) draw) + Gamma(N−1, 1).
        let extra_gain = extra.as_ref().map_or(0.0, |g| g.sample(&mut fad));
        let mut total = 0.0;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        run.sampler.for_each(&mut geo, |m| {
            let g: f64 = Exp1.sample(&mut fad);
            total += g * m;
            if m > best.0 {
                best = (m, g, g * m);
            }
        });
        if best.0 == f64::NEG_INFINITY {
            return false;
        }
        let (m, g, own) = best;
        let signal = p.power * (g + extra_gain) * m;
        let interference = p.power * (total - own).max(0.0) + run.tail;
        signal > 0.0 && signal >= p.beta * (interference + p.noise)
    });
    Ok(CoverageEstimate::from_counts(hits, settings.n_samples, seed))
}

/// Fraction of samples with P Σ G_i L_i ‖U_i‖^{−α} ≥ βσ₀, G_i ~ Gamma(N, 1).
pub fn estimate_cellfree(
    params: &NetworkParams,
    elev: &ElevationModel,
    settings: &McSettings,
) -> Result<CoverageEstimate> {
    if !(params.noise > 0.0) {
        return Err(invalid("noise", "cell-free coverage needs positive noise power"));
    }
    let run = prepare(params, elev, settings)?;
    let gain = Gamma::new(params.n_antennas as f64, 1.0).map_err(|e| invalid("n_antennas", e.to_string()))?;
    let seed = settings.master_seed;
    let p = *params;
    let tail = run.tail * p.n_antennas as f64;
    let hits = count_successes(settings.n_samples, |i| {
        let mut geo = stream_rng(seed, 2 * i);
        let mut fad = stream_rng(seed, 2 * i + 1);
        let mut total = 0.0;
        run.sampler.for_each(&mut geo, |m| {
            total += gain.sample(&mut fad) * m;
        });
        p.power * total + tail >= p.beta * p.noise
    });
    Ok(CoverageEstimate::from_counts(hits, settings.n_samples, seed))
}

/// `n` draws of R★ = max_i W_i L_i ‖U_i‖^{−α} over disks of radius
/// `sim_radius`; 0 for an empty disk.
pub fn sample_r_star(
    params: &NetworkParams,
    elev: &ElevationModel,
    weight: &WeightModel,
    sim_radius: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if let WeightModel::MomentOnly { .. } = weight {
        return Err(invalid("weight", "a moment-only weight cannot be sampled"));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let real = realize_network_stream(params, elev, sim_radius, seed, 2 * i)?;
            let mut rng = stream_rng(seed, 2 * i + 1);
            let mut best: f64 = 0.0;
            for u in &real.uavs {
                let w = match weight {
                    WeightModel::Sampler(d) => d.sample(&mut rng)?,
                    _ => 1.0,
                };
                best = best.max(w * u.path_gain(params.alpha, params.ell));
            }
            Ok(best)
        })
        .collect()
}

/// `n` draws of the nearest squared distance for `case`; +∞ when no
/// qualifying point falls in the disk.
pub fn sample_nearest_sq(
    params: &NetworkParams,
    elev: &ElevationModel,
    case: NearestCase,
    sim_radius: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let real = realize_network_stream(params, elev, sim_radius, seed, 2 * i)?;
            let sq = |p: [f64; 3]| p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            let min = match case {
                NearestCase::AllLosUnit => real
                    .uavs
                    .iter()
                    .map(|u| sq([u.x, u.y, u.altitude]))
                    .fold(f64::INFINITY, f64::min),
                NearestCase::LosWeighted => thinned_points(&real, params.ell, params.alpha)?
                    .into_iter()
                    .map(sq)
                    .fold(f64::INFINITY, f64::min),
                NearestCase::PureLos => real
                    .uavs
                    .iter()
                    .filter(|u| u.los == LinkState::Los)
                    .map(|u| sq([u.x, u.y, u.altitude]))
                    .fold(f64::INFINITY, f64::min),
            };
            Ok(min)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinkState, UavPoint};

    fn point(r: f64, los: LinkState) -> UavPoint {
        UavPoint {
            x: r,
            y: 0.0,
            theta: 0.0,
            altitude: 0.0,
            los,
        }
    }

    fn realization(uavs: Vec<UavPoint>) -> NetworkRealization {
        NetworkRealization {
            uavs,
            sim_radius: 1e4,
            seed: 0,
        }
    }

    #[test]
    fn association_prefers_attenuation_adjusted_power() {
        let real = realization(vec![point(100.0, LinkState::Los), point(80.0, LinkState::Nlos)]);
        assert_eq!(associate(&real, 2.75, 0.25).unwrap(), 0);
        // Without attenuation the nearer point wins.
        assert_eq!(associate(&real, 2.75, 1.0).unwrap(), 1);
        let single = realization(vec![point(5.0, LinkState::Nlos)]);
        assert_eq!(associate(&single, 2.75, 0.25).unwrap(), 0);
        assert_eq!(associate(&realization(vec![]), 2.75, 0.25), Err(Error::NoUav));
    }

    #[test]
    fn ties_go_to_the_first_index() {
        let real = realization(vec![point(10.0, LinkState::Los), point(10.0, LinkState::Los)]);
        assert_eq!(associate(&real, 3.0, 0.5).unwrap(), 0);
    }

    #[test]
    fn sinr_without_interferers() {
        let params = NetworkParams::table_one();
        let real = realization(vec![point(100.0, LinkState::Los)]);
        let fading = FadingDraw {
            serving_gain: 2.0,
            interferer_gains: vec![0.7],
        };
        let got = sinr(&real, &fading, 0, &params).unwrap();
        let want = params.power * 2.0 * 100f64.powf(-params.alpha) / params.noise;
        assert!(((got - want) / want).abs() < 1e-14);
    }

    #[test]
    fn sinr_shape_mismatch() {
        let params = NetworkParams::table_one();
        let real = realization(vec![point(100.0, LinkState::Los)]);
        let fading = FadingDraw {
            serving_gain: 1.0,
            interferer_gains: vec![],
        };
        assert!(matches!(sinr(&real, &fading, 0, &params), Err(Error::Shape { .. })));
    }

    #[test]
    fn symmetric_pair_covers_half_the_time() {
        let params = NetworkParams {
            noise: 0.0,
            n_antennas: 1,
            ..NetworkParams::table_one()
        };
        let real = realization(vec![point(50.0, LinkState::Los), point(50.0, LinkState::Los)]);
        let mut rng = stream_rng(9, 0);
        let n = 40_000;
        let mut hits = 0;
        for _ in 0..n {
            let f = FadingDraw::sample(2, 1, &mut rng).unwrap();
            if sinr(&real, &f, 0, &params).unwrap() >= 1.0 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt() + 1e-9, "{p}");
    }

    #[test]
    fn guard_radius_cases() {
        let params = NetworkParams {
            alpha: 4.0,
            ..NetworkParams::table_one()
        };
        let e = ElevationModel::constant(0.0).unwrap();
        let r0 = 1.0 / (PI * params.lambda).sqrt();
        // Tail ∝ R^{−2}: R = r0 / √tol.
        let r = guard_radius(&params, &e, 1e-3).unwrap();
        assert!((r / (r0 * 1e3f64.sqrt()) - 1.0).abs() < 1e-12);
        assert!((guard_radius(&params, &e, 0.999).unwrap() - 10.0 * r0).abs() < 1e-9 * r0);
        assert!(guard_radius(&params, &e, 0.0).is_err());
        assert!(guard_radius(&params, &e, 1.0).is_err());
    }

    #[test]
    fn extreme_thresholds() {
        let e = ElevationModel::constant(25f64.to_radians()).unwrap();
        let s = McSettings {
            n_samples: 500,
            ..McSettings::default()
        };
        let low = NetworkParams {
            beta: 1e-12,
            ..NetworkParams::table_one()
        };
        assert_eq!(estimate_downlink(&low, &e, &s).unwrap().mean, 1.0);
        let high = NetworkParams {
            beta: 1e12,
            ..NetworkParams::table_one()
        };
        assert_eq!(estimate_downlink(&high, &e, &s).unwrap().mean, 0.0);
    }

    #[test]
    fn estimates_are_reproducible() {
        let e = ElevationModel::gamma_tan(2.0, 0.4).unwrap();
        let s = McSettings {
            n_samples: 300,
            master_seed: 17,
            ..McSettings::default()
        };
        let p = NetworkParams::table_one();
        let a = estimate_downlink(&p, &e, &s).unwrap();
        let b = estimate_downlink(&p, &e, &s).unwrap();
        assert_eq!(a, b);
        let c = estimate_cellfree(&p, &e, &s).unwrap();
        assert_eq!(c, estimate_cellfree(&p, &e, &s).unwrap());
    }

    #[test]
    fn stderr_formula() {
        let est = CoverageEstimate::from_counts(30, 100, 0);
        assert!((est.std_error - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_settings() {
        let e = ElevationModel::constant(0.3).unwrap();
        let p = NetworkParams::table_one();
        let s = McSettings {
            n_samples: 0,
            ..McSettings::default()
        };
        assert!(estimate_downlink(&p, &e, &s).is_err());
        let quiet = NetworkParams { noise: 0.0, ..p };
        assert!(estimate_cellfree(&quiet, &e, &McSettings::default()).is_err());
    }
}
