//! Run configuration: a flat TOML document of `key = value` pairs.
//!
//! Decibel and degree forms are accepted at the boundary and converted on
//! ingest. Emitting writes the linear / radian forms so a round trip through
//! [`emit`] and [`parse_config`] is exact.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;
use toml::{Table, Value};
use uavcov::model::{db_to_linear, ElevationModel, NetworkParams};
use uavcov::montecarlo::{McSettings, TailModel};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    ThetaBar,
    Lambda,
    Beta,
    NAntennas,
    Shape,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThetaBar => "theta_bar",
            Self::Lambda => "lambda",
            Self::Beta => "beta",
            Self::NAntennas => "n_antennas",
            Self::Shape => "shape",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::ThetaBar, Self::Lambda, Self::Beta, Self::NAntennas, Self::Shape]
            .into_iter()
            .find(|v| v.name() == s)
    }

    fn default_scale(self) -> Scale {
        match self {
            Self::ThetaBar => Scale::Degrees,
            Self::Lambda => Scale::Log,
            Self::Beta => Scale::Db,
            Self::NAntennas | Self::Shape => Scale::Linear,
        }
    }

    fn allows(self, scale: Scale) -> bool {
        match self {
            Self::ThetaBar => matches!(scale, Scale::Degrees | Scale::Linear),
            Self::Lambda => matches!(scale, Scale::Log | Scale::Linear),
            Self::Beta => matches!(scale, Scale::Db | Scale::Linear | Scale::Log),
            Self::NAntennas => matches!(scale, Scale::Linear),
            Self::Shape => matches!(scale, Scale::Linear | Scale::Log),
        }
    }
}

/// How sweep endpoints are read and how points are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Evenly spaced in the variable's internal unit.
    Linear,
    /// Geometrically spaced.
    Log,
    /// Endpoints in dB, evenly spaced in dB.
    Db,
    /// Endpoints in degrees, evenly spaced in degrees.
    Degrees,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Log => "log",
            Self::Db => "db",
            Self::Degrees => "degrees",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Linear, Self::Log, Self::Db, Self::Degrees]
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub var: SweepVar,
    /// Endpoints in the units of `scale`.
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Sweep {
    /// Sweep values in `scale` units (what the output table reports).
    pub fn display_values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    Scale::Log => (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp(),
                    _ => self.start + f * (self.stop - self.start),
                }
            })
            .collect()
    }

    /// Converts a display value to the internal unit.
    pub fn to_internal(&self, value: f64) -> f64 {
        match self.scale {
            Scale::Db => db_to_linear(value),
            Scale::Degrees => value.to_radians(),
            Scale::Linear | Scale::Log => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Montecarlo,
    Both,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Montecarlo => "montecarlo",
            Self::Both => "both",
        }
    }

    pub fn analytic(self) -> bool {
        self != Self::Montecarlo
    }

    pub fn montecarlo(self) -> bool {
        self != Self::Analytic
    }
}

/// Which coverage quantity a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Downlink,
    Cellfree,
    /// Jensen lower bound on the downlink coverage (compared against the
    /// downlink Monte Carlo estimate).
    Jensen,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Self::Downlink => "downlink",
            Self::Cellfree => "cellfree",
            Self::Jensen => "jensen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: NetworkParams,
    pub elevation: ElevationModel,
    pub sweep: Sweep,
    pub mode: Mode,
    pub metric: Metric,
    pub mc: McSettings,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let theta = 25f64.to_radians();
        Self {
            params: NetworkParams::table_one(),
            elevation: ElevationModel::Constant { theta_bar: theta },
            sweep: Sweep {
                var: SweepVar::ThetaBar,
                start: 25.0,
                stop: 25.0,
                steps: 1,
                scale: Scale::Degrees,
            },
            mode: Mode::Both,
            metric: Metric::Downlink,
            mc: McSettings::default(),
            output: None,
            format: Format::Csv,
        }
    }
}

const KEYS: &[&str] = &[
    "lambda",
    "power_mw",
    "n_antennas",
    "noise_dbm",
    "noise_mw",
    "alpha",
    "ell",
    "beta_db",
    "beta",
    "c1",
    "c2",
    "elevation",
    "theta_bar_deg",
    "theta_bar_rad",
    "shape",
    "sweep_var",
    "sweep_start",
    "sweep_stop",
    "sweep_steps",
    "sweep_scale",
    "mode",
    "metric",
    "n_samples",
    "seed",
    "guard_tolerance",
    "tail",
    "output",
    "format",
];

struct Doc {
    table: Table,
}

impl Doc {
    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(err(key, format!("expected a number, got {}", other.type_str()))),
        }
        .and_then(|v| match v {
            Some(x) if !x.is_finite() => Err(err(key, "must be finite")),
            v => Ok(v),
        })
    }

    fn int(&self, key: &str) -> Result<Option<i64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(other) => Err(err(key, format!("expected an integer, got {}", other.type_str()))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(other) => Err(err(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    /// At most one of two alternative spellings.
    fn either(&self, a: &str, b: &str) -> Result<(), ConfigError> {
        if self.table.contains_key(a) && self.table.contains_key(b) {
            return Err(err(b, format!("conflicts with `{a}`; give only one")));
        }
        Ok(())
    }
}

fn positive(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(err(key, format!("must be positive, got {x}")))
    }
}

/// Parses and validates a configuration document. Omitted keys take the
/// suburban defaults: λ = 1e-7, N = 4, constant 25° elevation, mode both.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| err("<document>", e.message().to_string()))?;
    if let Some((key, _)) = table.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
        return Err(err(key, "unknown key"));
    }
    if let Some((key, _)) = table.iter().find(|(_, v)| v.is_table() || v.is_array()) {
        return Err(err(key, "nested values are not allowed; the document is flat"));
    }
    let doc = Doc { table };
    let mut cfg = RunConfig::default();
    let p = &mut cfg.params;

    if let Some(x) = doc.float("lambda")? {
        p.lambda = positive("lambda", x)?;
    }
    if let Some(x) = doc.float("power_mw")? {
        p.power = positive("power_mw", x)?;
    }
    if let Some(n) = doc.int("n_antennas")? {
        if !(1..=64).contains(&n) {
            return Err(err("n_antennas", format!("must be an integer in 1..=64, got {n}")));
        }
        p.n_antennas = n as u32;
    }
    doc.either("noise_dbm", "noise_mw")?;
    if let Some(x) = doc.float("noise_dbm")? {
        p.noise = db_to_linear(x);
    }
    if let Some(x) = doc.float("noise_mw")? {
        if x < 0.0 {
            return Err(err("noise_mw", "must be >= 0"));
        }
        p.noise = x;
    }
    if let Some(x) = doc.float("alpha")? {
        if !(x > 2.0) {
            return Err(err(
                "alpha",
                format!("path-loss exponent must satisfy alpha > 2, got {x}"),
            ));
        }
        p.alpha = x;
    }
    if let Some(x) = doc.float("ell")? {
        if !(0.0..=1.0).contains(&x) {
            return Err(err("ell", format!("must lie in [0, 1], got {x}")));
        }
        p.ell = x;
    }
    doc.either("beta_db", "beta")?;
    if let Some(x) = doc.float("beta_db")? {
        p.beta = db_to_linear(x);
    }
    if let Some(x) = doc.float("beta")? {
        p.beta = positive("beta", x)?;
    }
    if let Some(x) = doc.float("c1")? {
        p.c1 = positive("c1", x)?;
    }
    if let Some(x) = doc.float("c2")? {
        p.c2 = positive("c2", x)?;
    }
    p.validate().map_err(|e| err("<params>", e.to_string()))?;

    doc.either("theta_bar_deg", "theta_bar_rad")?;
    let theta_key = if doc.table.contains_key("theta_bar_rad") {
        "theta_bar_rad"
    } else {
        "theta_bar_deg"
    };
    let theta = match (doc.float("theta_bar_deg")?, doc.float("theta_bar_rad")?) {
        (Some(d), _) => d.to_radians(),
        (_, Some(r)) => r,
        _ => cfg.elevation.theta_bar(),
    };
    let kind = doc.string("elevation")?.unwrap_or("constant");
    let shape = doc.float("shape")?;
    cfg.elevation = match kind {
        "constant" => {
            if shape.is_some() {
                return Err(err("shape", "only used with elevation = \"gamma_tan\""));
            }
            ElevationModel::Constant { theta_bar: theta }
        }
        "gamma_tan" => ElevationModel::GammaTan {
            shape: positive("shape", shape.unwrap_or(3.0))?,
            theta_bar: theta,
        },
        other => {
            return Err(err(
                "elevation",
                format!("expected \"constant\" or \"gamma_tan\", got {other:?}"),
            ))
        }
    };
    cfg.elevation.validate().map_err(|e| err(theta_key, e.to_string()))?;

    cfg.sweep = parse_sweep(&doc, &cfg)?;

    if let Some(m) = doc.string("mode")? {
        cfg.mode = match m {
            "analytic" => Mode::Analytic,
            "montecarlo" => Mode::Montecarlo,
            "both" => Mode::Both,
            other => {
                return Err(err(
                    "mode",
                    format!("expected analytic, montecarlo or both, got {other:?}"),
                ))
            }
        };
    }
    if let Some(m) = doc.string("metric")? {
        cfg.metric = match m {
            "downlink" => Metric::Downlink,
            "cellfree" => Metric::Cellfree,
            "jensen" => Metric::Jensen,
            other => {
                return Err(err(
                    "metric",
                    format!("expected downlink, cellfree or jensen, got {other:?}"),
                ))
            }
        };
    }
    if cfg.metric == Metric::Cellfree && !(cfg.params.noise > 0.0) {
        return Err(err("noise_mw", "cell-free coverage needs positive noise power"));
    }
    if let Some(n) = doc.int("n_samples")? {
        if n < 1 {
            return Err(err("n_samples", "must be at least 1"));
        }
        cfg.mc.n_samples = n as u64;
    }
    if let Some(s) = doc.int("seed")? {
        if s < 0 {
            return Err(err("seed", "must be non-negative"));
        }
        cfg.mc.master_seed = s as u64;
    }
    if let Some(t) = doc.float("guard_tolerance")? {
        if !(t > 0.0 && t < 1.0) {
            return Err(err("guard_tolerance", "must lie in (0, 1)"));
        }
        cfg.mc.guard_tolerance = t;
    }
    if let Some(t) = doc.string("tail")? {
        cfg.mc.tail = match t {
            "mean-compensated" => TailModel::MeanCompensated,
            "truncated" => TailModel::Truncated,
            other => {
                return Err(err(
                    "tail",
                    format!("expected mean-compensated or truncated, got {other:?}"),
                ))
            }
        };
    }
    if let Some(o) = doc.string("output")? {
        if o.is_empty() {
            return Err(err("output", "empty path"));
        }
        cfg.output = Some(PathBuf::from(o));
    }
    if let Some(f) = doc.string("format")? {
        cfg.format = match f {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(err("format", format!("expected csv or json, got {other:?}"))),
        };
    }
    Ok(cfg)
}

fn parse_sweep(doc: &Doc, cfg: &RunConfig) -> Result<Sweep, ConfigError> {
    let var = match doc.string("sweep_var")? {
        Some(s) => SweepVar::parse(s).ok_or_else(|| {
            err(
                "sweep_var",
                format!("expected theta_bar, lambda, beta, n_antennas or shape, got {s:?}"),
            )
        })?,
        None => {
            if let Some(k) = ["sweep_start", "sweep_stop", "sweep_steps", "sweep_scale"]
                .into_iter()
                .find(|k| doc.table.contains_key(*k))
            {
                return Err(err(k, "needs `sweep_var`"));
            }
            // Single point at the configured elevation.
            let deg = cfg.elevation.theta_bar().to_degrees();
            return Ok(Sweep {
                var: SweepVar::ThetaBar,
                start: deg,
                stop: deg,
                steps: 1,
                scale: Scale::Degrees,
            });
        }
    };
    let scale = match doc.string("sweep_scale")? {
        Some(s) => Scale::parse(s)
            .ok_or_else(|| err("sweep_scale", format!("expected linear, log, db or degrees, got {s:?}")))?,
        None => var.default_scale(),
    };
    if !var.allows(scale) {
        return Err(err(
            "sweep_scale",
            format!("scale {} does not apply to {}", scale.name(), var.name()),
        ));
    }
    let start = doc
        .float("sweep_start")?
        .ok_or_else(|| err("sweep_start", "required with `sweep_var`"))?;
    let stop = doc.float("sweep_stop")?.unwrap_or(start);
    let steps = doc.int("sweep_steps")?.unwrap_or(if start == stop { 1 } else { 2 });
    if !(1..=100_000).contains(&steps) {
        return Err(err("sweep_steps", format!("must lie in 1..=100000, got {steps}")));
    }
    if steps > 1 && start == stop {
        return Err(err(
            "sweep_stop",
            "range is empty: start equals stop with several steps",
        ));
    }
    let sweep = Sweep {
        var,
        start,
        stop,
        steps: steps as usize,
        scale,
    };
    if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
        return Err(err("sweep_start", "log sweeps need positive endpoints"));
    }
    // Every point must make a valid configuration.
    for (i, x) in sweep.display_values().into_iter().enumerate() {
        let key = if i == 0 { "sweep_start" } else { "sweep_stop" };
        apply(cfg, &sweep, x).map_err(|m| err(key, m))?;
    }
    Ok(sweep)
}

/// Parameters and elevation model at sweep display value `x`.
pub fn apply(cfg: &RunConfig, sweep: &Sweep, x: f64) -> Result<(NetworkParams, ElevationModel), String> {
    let mut p = cfg.params;
    let mut e = cfg.elevation;
    let v = sweep.to_internal(x);
    match sweep.var {
        SweepVar::ThetaBar => match &mut e {
            ElevationModel::Constant { theta_bar } | ElevationModel::GammaTan { theta_bar, .. } => *theta_bar = v,
        },
        SweepVar::Lambda => p.lambda = v,
        SweepVar::Beta => p.beta = v,
        SweepVar::NAntennas => {
            if v.fract() != 0.0 || !(1.0..=64.0).contains(&v) {
                return Err(format!("antenna count must be an integer in 1..=64, got {v}"));
            }
            p.n_antennas = v as u32;
        }
        SweepVar::Shape => match &mut e {
            ElevationModel::GammaTan { shape, .. } => *shape = v,
            ElevationModel::Constant { .. } => return Err("shape sweeps need elevation = \"gamma_tan\"".into()),
        },
    }
    p.validate().map_err(|e| e.to_string())?;
    e.validate().map_err(|e| e.to_string())?;
    Ok((p, e))
}

fn toml_str(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

/// Writes `cfg` as a document that [`parse_config`] maps back to `cfg`.
pub fn emit(cfg: &RunConfig) -> String {
    let p = &cfg.params;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    // `{:?}` prints the shortest representation that reads back exactly.
    kv("lambda", format!("{:?}", p.lambda));
    kv("power_mw", format!("{:?}", p.power));
    kv("n_antennas", p.n_antennas.to_string());
    kv("noise_mw", format!("{:?}", p.noise));
    kv("alpha", format!("{:?}", p.alpha));
    kv("ell", format!("{:?}", p.ell));
    kv("beta", format!("{:?}", p.beta));
    kv("c1", format!("{:?}", p.c1));
    kv("c2", format!("{:?}", p.c2));
    match cfg.elevation {
        ElevationModel::Constant { theta_bar } => {
            kv("elevation", toml_str("constant"));
            kv("theta_bar_rad", format!("{theta_bar:?}"));
        }
        ElevationModel::GammaTan { shape, theta_bar } => {
            kv("elevation", toml_str("gamma_tan"));
            kv("theta_bar_rad", format!("{theta_bar:?}"));
            kv("shape", format!("{shape:?}"));
        }
    }
    let s = &cfg.sweep;
    kv("sweep_var", toml_str(s.var.name()));
    kv("sweep_start", format!("{:?}", s.start));
    kv("sweep_stop", format!("{:?}", s.stop));
    kv("sweep_steps", s.steps.to_string());
    kv("sweep_scale", toml_str(s.scale.name()));
    kv("mode", toml_str(cfg.mode.name()));
    kv("metric", toml_str(cfg.metric.name()));
    kv("n_samples", cfg.mc.n_samples.to_string());
    kv("seed", cfg.mc.master_seed.to_string());
    kv("guard_tolerance", format!("{:?}", cfg.mc.guard_tolerance));
    kv(
        "tail",
        toml_str(match cfg.mc.tail {
            TailModel::MeanCompensated => "mean-compensated",
            TailModel::Truncated => "truncated",
        }),
    );
    if let Some(o) = &cfg.output {
        kv("output", toml_str(&o.to_string_lossy()));
    }
    kv(
        "format",
        toml_str(match cfg.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.params.power, 50.0);
        assert!((cfg.params.noise - 10f64.powf(-9.25)).abs() < 1e-24);
        assert_eq!(cfg.mode, Mode::Both);
    }

    #[test]
    fn decibel_threshold() {
        let cfg = parse_config("beta_db = -10").unwrap();
        assert!((cfg.params.beta - 0.1).abs() < 1e-16);
    }

    #[test]
    fn alpha_below_two_is_rejected() {
        let e = parse_config("alpha = 1.5").unwrap_err();
        assert_eq!(e.key, "alpha");
        assert!(e.message.contains("alpha > 2"), "{e}");
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config("lamda = 1e-6").unwrap_err();
        assert_eq!(e.key, "lamda");
    }

    #[test]
    fn conflicting_spellings() {
        assert_eq!(parse_config("beta = 0.1\nbeta_db = -10").unwrap_err().key, "beta");
    }

    #[test]
    fn malformed_ranges() {
        assert_eq!(parse_config("sweep_start = 3").unwrap_err().key, "sweep_start");
        let e =
            parse_config("sweep_var = \"theta_bar\"\nsweep_start = 5\nsweep_stop = 5\nsweep_steps = 4").unwrap_err();
        assert_eq!(e.key, "sweep_stop");
        let e =
            parse_config("sweep_var = \"theta_bar\"\nsweep_start = 5\nsweep_stop = 95\nsweep_steps = 4").unwrap_err();
        assert_eq!(e.key, "sweep_stop");
        let e = parse_config("sweep_var = \"lambda\"\nsweep_start = 0\nsweep_stop = 1e-5").unwrap_err();
        assert_eq!(e.key, "sweep_start");
        let e = parse_config("sweep_var = \"shape\"\nsweep_start = 1\nsweep_stop = 3").unwrap_err();
        assert_eq!(e.key, "sweep_start");
        let e = parse_config("sweep_var = \"beta\"\nsweep_scale = \"degrees\"\nsweep_start = 1").unwrap_err();
        assert_eq!(e.key, "sweep_scale");
    }

    #[test]
    fn sweep_values() {
        let cfg =
            parse_config("sweep_var = \"lambda\"\nsweep_start = 1e-7\nsweep_stop = 1e-5\nsweep_steps = 3").unwrap();
        let v = cfg.sweep.display_values();
        assert!((v[1] - 1e-6).abs() < 1e-18);
        let cfg = parse_config("sweep_var = \"beta\"\nsweep_start = -20\nsweep_stop = 10\nsweep_steps = 4").unwrap();
        assert_eq!(cfg.sweep.display_values(), vec![-20.0, -10.0, 0.0, 10.0]);
        assert!((cfg.sweep.to_internal(-10.0) - 0.1).abs() < 1e-16);
    }

    #[test]
    fn theta_without_sweep_is_a_single_point() {
        let cfg = parse_config("theta_bar_deg = 40").unwrap();
        assert_eq!(cfg.sweep.display_values(), vec![40.0]);
        let (_, e) = apply(&cfg, &cfg.sweep, 40.0).unwrap();
        assert!((e.theta_bar() - 40f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn wrong_types_are_reported() {
        assert_eq!(parse_config("n_antennas = 2.5").unwrap_err().key, "n_antennas");
        assert_eq!(parse_config("mode = 3").unwrap_err().key, "mode");
        assert_eq!(parse_config("seed = -1").unwrap_err().key, "seed");
        assert_eq!(parse_config("[table]\nx = 1").unwrap_err().key, "table");
        assert_eq!(parse_config("lambda = ").unwrap_err().key, "<document>");
    }

    #[test]
    fn cellfree_needs_noise() {
        assert_eq!(
            parse_config("metric = \"cellfree\"\nnoise_mw = 0").unwrap_err().key,
            "noise_mw"
        );
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (
                1e-8f64..1e-4,
                1.0f64..1e3,
                1u32..=16,
                0.0f64..1e-6,
                2.01f64..6.0,
                0.0f64..=1.0,
                1e-3f64..1e3,
            ),
            (prop::bool::ANY, 0.01f64..1.5, 0.1f64..50.0),
            (0usize..3, 1usize..20, prop::bool::ANY),
            (
                1u64..1_000_000,
                0u64..=i64::MAX as u64,
                0.001f64..0.999,
                prop::bool::ANY,
                prop::option::of("[a-z]{1,8}\\.csv"),
            ),
        )
            .prop_map(|(p, e, s, m)| {
                let params = NetworkParams {
                    lambda: p.0,
                    power: p.1,
                    n_antennas: p.2,
                    noise: p.3,
                    alpha: p.4,
                    ell: p.5,
                    beta: p.6,
                    ..NetworkParams::table_one()
                };
                let elevation = if e.0 {
                    ElevationModel::Constant { theta_bar: e.1 }
                } else {
                    ElevationModel::GammaTan {
                        shape: e.2,
                        theta_bar: e.1,
                    }
                };
                let sweep = match s.0 {
                    0 => Sweep {
                        var: SweepVar::Beta,
                        start: -20.0,
                        stop: 10.0,
                        steps: s.1 + 1,
                        scale: Scale::Db,
                    },
                    1 => Sweep {
                        var: SweepVar::Lambda,
                        start: 1e-7,
                        stop: 1e-5,
                        steps: s.1 + 1,
                        scale: Scale::Log,
                    },
                    _ => Sweep {
                        var: SweepVar::ThetaBar,
                        start: 5.0,
                        stop: 5.0 + s.1 as f64,
                        steps: s.1 + 1,
                        scale: Scale::Degrees,
                    },
                };
                RunConfig {
                    params,
                    elevation,
                    sweep,
                    mode: if s.2 { Mode::Both } else { Mode::Analytic },
                    metric: if m.3 { Metric::Downlink } else { Metric::Jensen },
                    mc: McSettings {
                        n_samples: m.0,
                        master_seed: m.1,
                        guard_tolerance: m.2,
                        tail: if m.3 {
                            TailModel::MeanCompensated
                        } else {
                            TailModel::Truncated
                        },
                    },
                    output: m.4.map(PathBuf::from),
                    format: if s.2 { Format::Csv } else { Format::Json },
                }
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(cfg in arb_config()) {
            let text = emit(&cfg);
            let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(back, cfg);
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = parse_config(&text);
        }
    }
}
