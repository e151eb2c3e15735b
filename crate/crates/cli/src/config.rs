use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Encode,
    SyndromeScan,
    LossReadout,
    Connect,
    RgsLoss,
    Rate,
    PhotonicsRate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Encode => "encode",
            CommandKind::SyndromeScan => "syndrome-scan",
            CommandKind::LossReadout => "loss-readout",
            CommandKind::Connect => "connect",
            CommandKind::RgsLoss => "rgs-loss",
            CommandKind::Rate => "rate",
            CommandKind::PhotonicsRate => "photonics-rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    BitFlip,
    PhaseFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    PConnect,
    Efficiency,
}

/// Every run parameter, as read from flags or a JSON config file. Missing
/// values fall back to per-command defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub noise: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub channel: Option<Channel>,
    pub qubit: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub loss: Option<Vec<usize>>,
    pub lost: Option<usize>,
    pub bare: Option<bool>,
    pub eta: Option<f64>,
    pub q: Option<f64>,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
    pub metric: Option<MetricArg>,
    pub pair_prob: Option<f64>,
    pub eta_pair: Option<f64>,
    pub rep_rate: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        overlay!(
            self, flags, command, seed, shots, out, format, noise, theta, phi, channel, qubit, p, loss, lost, bare,
            eta, q, n_max, m_max, metric, pair_prob, eta_pair, rep_rate
        );
        self
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// The seed of a sampling run; sampling without one is a config error.
    pub fn require_seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("{what} samples and needs --seed")))
    }

    pub fn check_unit(name: &str, v: f64) -> Result<f64, CliError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Config(format!("{name} = {v} outside [0, 1]")));
        }
        Ok(v)
    }

    pub fn noise(&self) -> Result<Option<f64>, CliError> {
        self.noise.map(|v| Self::check_unit("noise", v)).transpose()
    }

    pub fn angles(&self, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        let theta = self.theta.unwrap_or(default.0);
        let phi = self.phi.unwrap_or(default.1);
        if !theta.is_finite() || !phi.is_finite() {
            return Err(CliError::Config(format!("angles must be finite, got theta = {theta}, phi = {phi}")));
        }
        Ok((theta, phi))
    }
}
