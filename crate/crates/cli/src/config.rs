//! Flat key = value scenario configuration.
//!
//! The file format is a diff-friendly subset of INI/TOML: one `key = value`
//! pair per line, `#` comments, blank lines ignored. Keys are exactly the
//! baseline-scenario parameters; anything else is rejected so that typos
//! fail loudly instead of silently running the defaults.

use cvml_core::acceptance::AcceptanceParams;
use cvml_core::channel::{ChannelParams, SqueezedSource};
use std::fmt;
use std::path::Path;

/// Scenario parameters with the terrestrial baseline as default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Atmospheric attenuation, 1/m.
    pub mu: f64,
    /// Ambient temperature, K.
    pub temperature: f64,
    /// Environment thermal occupation.
    pub n_env: f64,
    /// Source squeezing parameter.
    pub r: f64,
    /// Source thermal occupation.
    pub n: f64,
    /// Photon-subtraction beamsplitter transmissivity.
    pub tau: f64,
    /// Antenna reflectivity.
    pub eta_ant: f64,
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Default sweep start, m.
    pub sweep_from: f64,
    /// Default sweep end, m.
    pub sweep_to: f64,
    /// Default sweep spacing, m.
    pub sweep_step: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let p = AcceptanceParams::default();
        Self {
            mu: p.mu,
            temperature: p.temperature,
            n_env: p.n_env,
            r: p.r,
            n: p.n,
            tau: p.tau,
            eta_ant: p.eta_ant,
            frequency: p.frequency,
            sweep_from: 0.0,
            sweep_to: 500.0,
            sweep_step: 10.0,
        }
    }
}

/// Problem in the configuration file or values; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    /// Parse a config file over the defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                ConfigError(format!(
                    "{}:{}: value for `{key}` is not a number: `{}`",
                    path.display(),
                    lineno + 1,
                    value.trim()
                ))
            })?;
            let slot = match key {
                "mu" => &mut config.mu,
                "temperature" => &mut config.temperature,
                "n_env" => &mut config.n_env,
                "r" => &mut config.r,
                "n" => &mut config.n,
                "tau" => &mut config.tau,
                "eta_ant" => &mut config.eta_ant,
                "frequency" => &mut config.frequency,
                "sweep_from" => &mut config.sweep_from,
                "sweep_to" => &mut config.sweep_to,
                "sweep_step" => &mut config.sweep_step,
                other => {
                    return Err(ConfigError(format!(
                        "{}:{}: unknown key `{other}` (known: mu, temperature, n_env, r, n, \
                         tau, eta_ant, frequency, sweep_from, sweep_to, sweep_step)",
                        path.display(),
                        lineno + 1
                    )))
                }
            };
            *slot = value;
        }
        Ok(config)
    }

    /// The verification suite's view of these parameters.
    pub fn acceptance_params(&self) -> AcceptanceParams {
        AcceptanceParams {
            mu: self.mu,
            temperature: self.temperature,
            n_env: self.n_env,
            r: self.r,
            n: self.n,
            tau: self.tau,
            eta_ant: self.eta_ant,
            frequency: self.frequency,
        }
    }

    pub fn source(&self) -> Result<SqueezedSource, ConfigError> {
        SqueezedSource::new(self.r, self.n).map_err(|e| ConfigError(e.to_string()))
    }

    /// Zero-length channel template; sweeps set the length per point.
    pub fn channel(&self) -> Result<ChannelParams, ConfigError> {
        ChannelParams::new(self.mu, self.n_env, self.eta_ant, 0.0)
            .map_err(|e| ConfigError(e.to_string()))
    }

    /// One `key = value` line per parameter, for CSV headers.
    pub fn describe(&self) -> String {
        format!(
            "mu = {:e}, temperature = {}, n_env = {}, r = {}, n = {:e}, tau = {}, \
             eta_ant = {:e}, frequency = {:e}",
            self.mu,
            self.temperature,
            self.n_env,
            self.r,
            self.n,
            self.tau,
            self.eta_ant,
            self.frequency
        )
    }
}
