//! Command-line front end: configuration files, parallel sweeps and the
//! validation battery.

pub mod config;
pub mod sweep;
pub mod validate;

pub use config::{emit, parse_config, ConfigError, RunConfig};
pub use sweep::{run_sweep, Row};
pub use validate::{validate, Report, Suite};
