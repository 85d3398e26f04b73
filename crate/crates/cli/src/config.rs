//! Run configuration: paper defaults, flat key-value files, validation.

use std::fmt;
use std::path::Path;

use qsd_nmr_core::{ExpectationSource, Frame, NoiseConvention, NoiseSharing};

use crate::{CliError, CliResult};

/// Gate applied to the thermal state before the measurement starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateChoice {
    X,
    Y,
    Z,
    None,
}

/// All run parameters. Defaults are the published experiment values:
/// 500 steps over 1 s, omega0 = 5e8 rad/s, room temperature, the appendix
/// noise convention with one shared realization per step, and the X gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Larmor angular frequency, rad/s.
    pub omega0: f64,
    /// Sample temperature, K.
    pub temperature: f64,
    /// Measurement duration, s.
    pub duration: f64,
    pub steps: usize,
    pub seed: u64,
    pub convention: NoiseConvention,
    pub frame: Frame,
    pub noise_sharing: NoiseSharing,
    pub expectation_source: ExpectationSource,
    pub ensemble_size: usize,
    pub gate: GateChoice,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            omega0: 5e8,
            temperature: 300.0,
            duration: 1.0,
            steps: 500,
            seed: 7,
            convention: NoiseConvention::AppendixComplex,
            frame: Frame::Laboratory,
            noise_sharing: NoiseSharing::Shared,
            expectation_source: ExpectationSource::PerState,
            ensemble_size: 1,
            gate: GateChoice::X,
        }
    }
}

impl SimulationConfig {
    pub fn dt(&self) -> f64 {
        self.duration / self.steps as f64
    }

    /// Checks all field invariants at once and reports every violation.
    pub fn validate(&self) -> CliResult<()> {
        let mut problems = Vec::new();
        if !(0.0..=1.0).contains(&self.alpha) {
            problems.push(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            problems.push(format!("beta must be in [0, 1], got {}", self.beta));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            problems.push(format!("omega0 must be positive, got {}", self.omega0));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            problems.push(format!(
                "temperature must be positive, got {}",
                self.temperature
            ));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            problems.push(format!("duration must be positive, got {}", self.duration));
        }
        if self.steps < 1 {
            problems.push("steps must be at least 1".to_string());
        }
        if self.ensemble_size < 1 {
            problems.push("ensemble_size must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(problems.join("; ")))
        }
    }

    /// Loads `key = value` lines from a file over the current values.
    /// `#` starts a comment; unknown keys are rejected.
    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| {
                CliError::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "alpha" => self.alpha = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "omega0" => self.omega0 = parse_num(key, value)?,
            "temperature" => self.temperature = parse_num(key, value)?,
            "duration" => self.duration = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "ensemble_size" => self.ensemble_size = parse_num(key, value)?,
            "convention" => self.convention = parse_convention(value)?,
            "frame" => self.frame = parse_frame(value)?,
            "noise_sharing" => self.noise_sharing = parse_sharing(value)?,
            "expectation_source" => self.expectation_source = parse_source(value)?,
            "gate" => self.gate = parse_gate(value)?,
            _ => {
                return Err(CliError::Config(format!("unknown configuration key `{key}`")));
            }
        }
        Ok(())
    }

    /// `key = value` lines mirroring the config-file format, used for the
    /// report echo.
    pub fn echo(&self) -> String {
        format!(
            "alpha = {}\nbeta = {}\nomega0 = {:e}\ntemperature = {}\nduration = {}\n\
             steps = {}\nseed = {}\nconvention = {}\nframe = {}\nnoise_sharing = {}\n\
             expectation_source = {}\nensemble_size = {}\ngate = {}",
            self.alpha,
            self.beta,
            self.omega0,
            self.temperature,
            self.duration,
            self.steps,
            self.seed,
            convention_name(self.convention),
            frame_name(self.frame),
            sharing_name(self.noise_sharing),
            source_name(self.expectation_source),
            self.ensemble_size,
            self.gate,
        )
    }
}

impl fmt::Display for GateChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GateChoice::X => "x",
            GateChoice::Y => "y",
            GateChoice::Z => "z",
            GateChoice::None => "none",
        };
        f.write_str(name)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse `{value}` for key `{key}`")))
}

pub fn parse_convention(value: &str) -> CliResult<NoiseConvention> {
    match value.to_ascii_lowercase().as_str() {
        "appendix-complex" => Ok(NoiseConvention::AppendixComplex),
        "gisin-percival" => Ok(NoiseConvention::GisinPercival),
        _ => Err(CliError::Config(format!(
            "convention must be `appendix-complex` or `gisin-percival`, got `{value}`"
        ))),
    }
}

pub fn parse_frame(value: &str) -> CliResult<Frame> {
    match value.to_ascii_lowercase().as_str() {
        "laboratory" => Ok(Frame::Laboratory),
        "rotating" => Ok(Frame::Rotating),
        _ => Err(CliError::Config(format!(
            "frame must be `laboratory` or `rotating`, got `{value}`"
        ))),
    }
}

pub fn parse_sharing(value: &str) -> CliResult<NoiseSharing> {
    match value.to_ascii_lowercase().as_str() {
        "shared" => Ok(NoiseSharing::Shared),
        "independent" => Ok(NoiseSharing::Independent),
        _ => Err(CliError::Config(format!(
            "noise_sharing must be `shared` or `independent`, got `{value}`"
        ))),
    }
}

pub fn parse_source(value: &str) -> CliResult<ExpectationSource> {
    match value.to_ascii_lowercase().as_str() {
        "per-state" => Ok(ExpectationSource::PerState),
        "appendix-compat" => Ok(ExpectationSource::AppendixCompat),
        _ => Err(CliError::Config(format!(
            "expectation_source must be `per-state` or `appendix-compat`, got `{value}`"
        ))),
    }
}

pub fn parse_gate(value: &str) -> CliResult<GateChoice> {
    match value.to_ascii_lowercase().as_str() {
        "x" => Ok(GateChoice::X),
        "y" => Ok(GateChoice::Y),
        "z" => Ok(GateChoice::Z),
        "none" => Ok(GateChoice::None),
        _ => Err(CliError::Config(format!(
            "gate must be `x`, `y`, `z` or `none`, got `{value}`"
        ))),
    }
}

pub fn convention_name(c: NoiseConvention) -> &'static str {
    match c {
        NoiseConvention::AppendixComplex => "appendix-complex",
        NoiseConvention::GisinPercival => "gisin-percival",
    }
}

pub fn frame_name(f: Frame) -> &'static str {
    match f {
        Frame::Laboratory => "laboratory",
        Frame::Rotating => "rotating",
    }
}

pub fn sharing_name(s: NoiseSharing) -> &'static str {
    match s {
        NoiseSharing::Shared => "shared",
        NoiseSharing::Independent => "independent",
    }
}

pub fn source_name(s: ExpectationSource) -> &'static str {
    match s {
        ExpectationSource::PerState => "per-state",
        ExpectationSource::AppendixCompat => "appendix-compat",
    }
}
