//! Network parameters and the 3D marked point process of UAV positions.
//!
//! Ground projections form a homogeneous planar PPP. Each projection carries
//! an elevation-angle mark Θ seen from the origin, drawn independently of the
//! projection, and the altitude follows as ‖X‖·tan Θ. A LoS/NLoS mark is drawn
//! per point from the elevation-dependent LoS probability.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::quad::{gamma_expectation, QuadratureSpec};

/// Suburban LoS-model constants, for elevation angles in radians.
pub const SUBURBAN_C1: f64 = 24.5811;
pub const SUBURBAN_C2: f64 = 39.5971;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Scalar network constants. Powers are linear milliwatts, β is linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Density of UAV ground projections [1/m²].
    pub lambda: f64,
    /// Transmit power per UAV [mW].
    pub power: f64,
    pub n_antennas: u32,
    /// Thermal noise power [mW].
    pub noise: f64,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// NLoS attenuation factor in [0, 1].
    pub ell: f64,
    /// SINR threshold (linear).
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl NetworkParams {
    /// Suburban simulation defaults: P = 50 mW, σ₀ = −92.5 dBm, α = 2.75,
    /// ℓ = 0.25, β = −10 dB, λ = 1e-7 /m², N = 4.
    pub fn table_one() -> Self {
        Self {
            lambda: 1e-7,
            power: 50.0,
            n_antennas: 4,
            noise: db_to_linear(-92.5),
            alpha: 2.75,
            ell: 0.25,
            beta: db_to_linear(-10.0),
            c1: SUBURBAN_C1,
            c2: SUBURBAN_C2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("power", self.power)?;
        positive("beta", self.beta)?;
        positive("c1", self.c1)?;
        positive("c2", self.c2)?;
        if self.n_antennas < 1 {
            return Err(invalid("n_antennas", "need at least one antenna"));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(invalid("noise", "noise power must be finite and >= 0"));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(invalid(
                "alpha",
                format!("path-loss exponent must exceed 2, got {}", self.alpha),
            ));
        }
        if !(0.0..=1.0).contains(&self.ell) {
            return Err(invalid(
                "ell",
                format!("NLoS attenuation must lie in [0, 1], got {}", self.ell),
            ));
        }
        Ok(())
    }

    /// The exponent 2/α that appears throughout the coverage expressions.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}

/// Distribution of the elevation-angle mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElevationModel {
    /// Θ ≡ θ̄.
    Constant { theta_bar: f64 },
    /// tan Θ ~ Gamma(shape, rate = shape / tan θ̄), so E[tan Θ] = tan θ̄.
    GammaTan { shape: f64, theta_bar: f64 },
}

impl ElevationModel {
    pub fn constant(theta_bar: f64) -> Result<Self> {
        let m = Self::Constant { theta_bar };
        m.validate()?;
        Ok(m)
    }

    pub fn gamma_tan(shape: f64, theta_bar: f64) -> Result<Self> {
        let m = Self::GammaTan { shape, theta_bar };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { theta_bar } => {
                if !(0.0..FRAC_PI_2).contains(&theta_bar) {
                    return Err(invalid("theta_bar", "constant elevation must lie in [0, π/2)"));
                }
            }
            Self::GammaTan { shape, theta_bar } => {
                positive("shape", shape)?;
                if !(theta_bar > 0.0 && theta_bar < FRAC_PI_2) {
                    return Err(invalid("theta_bar", "mean elevation must lie in (0, π/2)"));
                }
            }
        }
        Ok(())
    }

    pub fn theta_bar(&self) -> f64 {
        match *self {
            Self::Constant { theta_bar } | Self::GammaTan { theta_bar, .. } => theta_bar,
        }
    }

    /// Prebuilt sampler; construct once and reuse in hot loops.
    pub fn sampler(&self) -> Result<ElevationSampler> {
        self.validate()?;
        Ok(match *self {
            Self::Constant { theta_bar } => ElevationSampler::Constant(theta_bar),
            Self::GammaTan { shape, theta_bar } => {
                let scale = theta_bar.tan() / shape;
                let gamma = Gamma::new(shape, scale).map_err(|e| invalid("shape", e.to_string()))?;
                ElevationSampler::GammaTan(gamma)
            }
        })
    }

    /// E[f(Θ)], exact for the constant model and by quadrature against the
    /// Gamma density of tan Θ otherwise.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F, spec: &QuadratureSpec) -> Result<f64> {
        self.validate()?;
        match *self {
            Self::Constant { theta_bar } => Ok(f(theta_bar)),
            Self::GammaTan { shape, theta_bar } => {
                let scale = theta_bar.tan() / shape;
                gamma_expectation(shape, |y| f((y * scale).atan()), spec)
            }
        }
    }
}

/// Draws elevation angles for one [`ElevationModel`].
#[derive(Debug, Clone, Copy)]
pub enum ElevationSampler {
    Constant(f64),
    GammaTan(Gamma<f64>),
}

impl Distribution<f64> for ElevationSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Constant(theta) => *theta,
            Self::GammaTan(gamma) => gamma.sample(rng).atan(),
        }
    }
}

/// Draws one elevation angle in [0, π/2).
pub fn sample_elevation<R: Rng + ?Sized>(model: &ElevationModel, rng: &mut R) -> Result<f64> {
    Ok(model.sampler()?.sample(rng))
}

/// LoS probability 1 / (1 + c₂ e^{−c₁θ}), θ in radians.
pub fn los_probability(theta: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain {
            function: "los_probability",
            value: theta,
        });
    }
    if !(c1 > 0.0) || !(c2 >= 0.0) {
        return Err(invalid("c1/c2", "LoS constants must satisfy c1 > 0, c2 >= 0"));
    }
    Ok(los_probability_unchecked(theta, c1, c2))
}

#[inline]
pub(crate) fn los_probability_unchecked(theta: f64, c1: f64, c2: f64) -> f64 {
    1.0 / (1.0 + c2 * (-c1 * theta).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkState {
    Los,
    Nlos,
}

/// One realized UAV as seen from the typical user at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavPoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub altitude: f64,
    pub los: LinkState,
}

impl UavPoint {
    pub fn horizontal_distance(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// 3D distance ‖U‖ = ‖X‖ sec Θ.
    pub fn distance(&self) -> f64 {
        self.horizontal_distance().hypot(self.altitude)
    }

    /// L ∈ {1, ℓ}.
    pub fn attenuation(&self, ell: f64) -> f64 {
        match self.los {
            LinkState::Los => 1.0,
            LinkState::Nlos => ell,
        }
    }

    /// Average received-power metric L‖U‖^{−α} used for association.
    pub fn path_gain(&self, alpha: f64, ell: f64) -> f64 {
        self.attenuation(ell) * self.distance().powf(-alpha)
    }
}

/// One sampled point pattern restricted to a disk around the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    /// Ordered by increasing horizontal distance.
    pub uavs: Vec<UavPoint>,
    pub sim_radius: f64,
    pub seed: u64,
}

/// Deterministic random stream `stream` of the master seed.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Generates PPP points of density `lambda` on the disk of radius
/// `sim_radius` in order of increasing distance: squared radii are the
/// arrival times of a Poisson process of rate πλ. For each point the
/// callback receives the horizontal distance and the rng to draw marks from.
///
/// Extending the radius keeps the inner points (and their marks) unchanged.
pub(crate) fn radial_ppp<R, F>(lambda: f64, sim_radius: f64, rng: &mut R, mut on_point: F)
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R),
{
    let rate = PI * lambda;
    let limit = sim_radius * sim_radius;
    let mut area = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        area += e / rate;
        if area > limit {
            break;
        }
        on_point(area.sqrt(), rng);
    }
}

fn check_disk(lambda: f64, sim_radius: f64) -> Result<()> {
    positive("lambda", lambda)?;
    positive("sim_radius", sim_radius)
}

/// Projections of a PPP of density `lambda` on the disk of radius `sim_radius`.
pub fn sample_projections<R: Rng + ?Sized>(lambda: f64, sim_radius: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    check_disk(lambda, sim_radius)?;
    let mut points = Vec::new();
    radial_ppp(lambda, sim_radius, rng, |r, rng| {
        let phi = rng.random::<f64>() * 2.0 * PI;
        let (s, c) = phi.sin_cos();
        points.push([r * c, r * s]);
    });
    Ok(points)
}

/// Samples Φ_u on a disk: projections, independent elevation marks,
/// altitudes and LoS marks. Reproducible from `seed`.
pub fn realize_network(
    params: &NetworkParams,
    elev: &ElevationModel,
    sim_radius: f64,
    seed: u64,
) -> Result<NetworkRealization> {
    realize_network_stream(params, elev, sim_radius, seed, 0)
}

/// [`realize_network`] drawn from sub-stream `stream` of `seed`, so that
/// many independent realizations can share one master seed.
pub fn realize_network_stream(
    params: &NetworkParams,
    elev: &ElevationModel,
    sim_radius: f64,
    seed: u64,
    stream: u64,
) -> Result<NetworkRealization> {
    params.validate()?;
    check_disk(params.lambda, sim_radius)?;
    let sampler = elev.sampler()?;
    let mut rng = stream_rng(seed, stream);
    let mut uavs = Vec::new();
    radial_ppp(params.lambda, sim_radius, &mut rng, |r, rng| {
        uavs.push(mark_point(r, &sampler, params, rng));
    });
    Ok(NetworkRealization { uavs, sim_radius, seed })
}

// Draw order per point: azimuth, elevation, LoS uniform.
pub(crate) fn mark_point<R: Rng + ?Sized>(
    r: f64,
    sampler: &ElevationSampler,
    params: &NetworkParams,
    rng: &mut R,
) -> UavPoint {
    let phi = rng.random::<f64>() * 2.0 * PI;
    let theta = sampler.sample(rng);
    let p_los = los_probability_unchecked(theta, params.c1, params.c2);
    let los = if rng.random::<f64>() < p_los {
        LinkState::Los
    } else {
        LinkState::Nlos
    };
    let (s, c) = phi.sin_cos();
    UavPoint {
        x: r * c,
        y: r * s,
        theta,
        altitude: r * theta.tan(),
        los,
    }
}
