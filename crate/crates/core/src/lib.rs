//! UAV downlink coverage under a 3D marked Poisson point process:
//! sampling, Monte Carlo estimation and the semi-analytical expressions.

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod stats;

pub use error::{Error, Result};
