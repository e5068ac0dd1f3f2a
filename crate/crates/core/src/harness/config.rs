//! Line-oriented `key = value` run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{ModelParams, TauMean};

use super::presets::Preset;

/// Which evolution law a run integrates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModelKind {
    #[default]
    Oldroyd,
    Hookean,
    /// Oldroyd-B with every quadratic term switched off.
    Linearized,
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "oldroyd" => Ok(Self::Oldroyd),
            "hookean" => Ok(Self::Hookean),
            "linearized" => Ok(Self::Linearized),
            other => Err(format!("expected oldroyd, hookean or linearized, got `{other}`")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Oldroyd => "oldroyd",
            Self::Hookean => "hookean",
            Self::Linearized => "linearized",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitConfig {
    pub preset: Preset,
    /// Data norm `‖|∇|⁻¹u₀‖_{H³} + ‖|∇|⁻¹τ₀‖_{H³}` (or with `F₀ − I`);
    /// the velocity amplitude for `taylor-green`.
    pub amplitude: f64,
    pub kmax: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub snapshots: bool,
    /// Steps between snapshots.
    pub snapshot_interval: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub identities: bool,
    pub identity_trials: usize,
    /// Fit window; `None` means `[t_end/2, t_end]`.
    pub fit_start: Option<f64>,
    pub fit_end: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub params: ModelParams,
    pub time: IntegratorConfig,
    pub init: InitConfig,
    pub model: ModelKind,
    pub tau_mean: TauMean,
    pub output: OutputConfig,
    pub report: ReportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 32,
            params: ModelParams::default(),
            time: IntegratorConfig::default(),
            init: InitConfig { preset: Preset::RandomBand, amplitude: 0.01, kmax: 4.0, seed: 42 },
            model: ModelKind::Oldroyd,
            tau_mean: TauMean::Evolve,
            output: OutputConfig { dir: PathBuf::from("run"), snapshots: false, snapshot_interval: 1000 },
            report: ReportConfig { identities: false, identity_trials: 10, fit_start: None, fit_end: None },
        }
    }
}

/// Every recognised key, in the order [`RunConfig::to_text`] writes them.
pub const KEYS: &[&str] = &[
    "grid.n",
    "params.mu",
    "params.mu1",
    "params.mu2",
    "params.a",
    "params.b",
    "time.dt",
    "time.t_end",
    "time.diag_interval",
    "time.cfl_limit",
    "init.preset",
    "init.amplitude",
    "init.kmax",
    "init.seed",
    "model.kind",
    "model.tau_mean",
    "output.dir",
    "output.snapshots",
    "output.snapshot_interval",
    "report.identities",
    "report.identity_trials",
    "report.fit_start",
    "report.fit_end",
];

/// Why a single assignment was refused.
#[derive(Debug)]
pub enum SetError {
    Unknown,
    Invalid(String),
}

fn parse<T: FromStr>(value: &str) -> std::result::Result<T, SetError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| SetError::Invalid(format!("`{value}`: {e}")))
}

fn parse_bool(value: &str) -> std::result::Result<bool, SetError> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(SetError::Invalid(format!("`{value}` is not a boolean"))),
    }
}

fn parse_tau_mean(value: &str) -> std::result::Result<TauMean, SetError> {
    match value {
        "evolve" => Ok(TauMean::Evolve),
        "remove" => Ok(TauMean::Remove),
        _ => Err(SetError::Invalid(format!("expected evolve or remove, got `{value}`"))),
    }
}

fn unquote(value: &str) -> &str {
    let v = value.trim();
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

impl RunConfig {
    /// Applies one `key = value` assignment without range validation.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), SetError> {
        let v = unquote(value);
        match key {
            "grid.n" => self.n = parse(v)?,
            "params.mu" => self.params.mu = parse(v)?,
            "params.mu1" => self.params.mu1 = parse(v)?,
            "params.mu2" => self.params.mu2 = parse(v)?,
            "params.a" => self.params.a = parse(v)?,
            "params.b" => self.params.b = parse(v)?,
            "time.dt" => self.time.dt = parse(v)?,
            "time.t_end" => self.time.t_end = parse(v)?,
            "time.diag_interval" => self.time.diag_interval = parse(v)?,
            "time.cfl_limit" => self.time.cfl_limit = parse(v)?,
            "init.preset" => {
                self.init.preset = v.parse().map_err(|e: Error| SetError::Invalid(e.to_string()))?
            }
            "init.amplitude" => self.init.amplitude = parse(v)?,
            "init.kmax" => self.init.kmax = parse(v)?,
            "init.seed" => self.init.seed = parse(v)?,
            "model.kind" => self.model = v.parse().map_err(SetError::Invalid)?,
            "model.tau_mean" => self.tau_mean = parse_tau_mean(v)?,
            "output.dir" => self.output.dir = PathBuf::from(v),
            "output.snapshots" => self.output.snapshots = parse_bool(v)?,
            "output.snapshot_interval" => self.output.snapshot_interval = parse(v)?,
            "report.identities" => self.report.identities = parse_bool(v)?,
            "report.identity_trials" => self.report.identity_trials = parse(v)?,
            "report.fit_start" => self.report.fit_start = Some(parse(v)?),
            "report.fit_end" => self.report.fit_end = Some(parse(v)?),
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    /// Checks every field against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Err(Error::OutOfRange { key: key.into(), reason });
        if self.n < 8 || self.n % 2 != 0 {
            return bad("grid.n", format!("must be even and at least 8, got {}", self.n));
        }
        self.params.validate()?;
        self.time.validate()?;
        if !(self.init.amplitude >= 0.0 && self.init.amplitude.is_finite()) {
            return bad("init.amplitude", format!("must be non-negative, got {}", self.init.amplitude));
        }
        if !(self.init.kmax >= 1.0) || self.init.kmax > self.n as f64 / 3.0 {
            return bad(
                "init.kmax",
                format!("must lie in [1, n/3] = [1, {:.3}], got {}", self.n as f64 / 3.0, self.init.kmax),
            );
        }
        if self.output.snapshot_interval == 0 {
            return bad("output.snapshot_interval", "must be at least 1".into());
        }
        if !self.init.preset.supports(self.model) {
            return bad(
                "init.preset",
                format!("preset {} cannot initialise a {} run", self.init.preset, self.model),
            );
        }
        let (lo, hi) = self.fit_window();
        if !(lo < hi) {
            return bad("report.fit_start", format!("empty fit window [{lo}, {hi}]"));
        }
        Ok(())
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (
            self.report.fit_start.unwrap_or(0.5 * self.time.t_end),
            self.report.fit_end.unwrap_or(self.time.t_end),
        )
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        line("grid.n", self.n.to_string());
        line("params.mu", self.params.mu.to_string());
        line("params.mu1", self.params.mu1.to_string());
        line("params.mu2", self.params.mu2.to_string());
        line("params.a", self.params.a.to_string());
        line("params.b", self.params.b.to_string());
        line("time.dt", self.time.dt.to_string());
        line("time.t_end", self.time.t_end.to_string());
        line("time.diag_interval", self.time.diag_interval.to_string());
        line("time.cfl_limit", self.time.cfl_limit.to_string());
        line("init.preset", self.init.preset.to_string());
        line("init.amplitude", self.init.amplitude.to_string());
        line("init.kmax", self.init.kmax.to_string());
        line("init.seed", self.init.seed.to_string());
        line("model.kind", self.model.to_string());
        line(
            "model.tau_mean",
            match self.tau_mean {
                TauMean::Evolve => "evolve".into(),
                TauMean::Remove => "remove".into(),
            },
        );
        line("output.dir", format!("\"{}\"", self.output.dir.display()));
        line("output.snapshots", self.output.snapshots.to_string());
        line("output.snapshot_interval", self.output.snapshot_interval.to_string());
        line("report.identities", self.report.identities.to_string());
        line("report.identity_trials", self.report.identity_trials.to_string());
        if let Some(t) = self.report.fit_start {
            line("report.fit_start", t.to_string());
        }
        if let Some(t) = self.report.fit_end {
            line("report.fit_end", t.to_string());
        }
        s
    }
}

/// Parses and validates a configuration. Blank lines and `#` comments are
/// ignored; later assignments override earlier ones.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Parse { line, message: format!("expected `key = value`, got `{body}`") });
        };
        let key = key.trim();
        if value.trim().is_empty() {
            return Err(Error::Parse { line, message: format!("missing value for `{key}`") });
        }
        match cfg.set(key, value) {
            Ok(()) => {}
            Err(SetError::Unknown) => return Err(Error::UnknownKey { line, name: key.into() }),
            Err(SetError::Invalid(message)) => return Err(Error::Parse { line, message }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
