//! `apqr`: runs the simulations of the all-photonic repeater toolkit and
//! writes JSON or CSV artifacts.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 invalid config, 3 simulation
//! precondition violated.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Channel, CommandKind, Format, MetricArg, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "apqr", version, about = "Loss-tolerant all-photonic repeater simulations")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// JSON file with run parameters; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples to draw; selects sampling mode where a command also enumerates.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Interference visibility V of the dephasing model.
    #[arg(long, global = true)]
    noise: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct Angles {
    /// Polar Bloch angle of the input, radians.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Azimuthal Bloch angle of the input, radians.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nine-qubit codeword and its stabilizer expectations.
    Encode(Angles),
    /// Stabilizer expectations under a bit- or phase-flip channel.
    SyndromeScan {
        #[command(flatten)]
        angles: Angles,
        #[arg(long, value_enum)]
        channel: Option<Channel>,
        /// Qubit hit by the channel, 1..=9.
        #[arg(long)]
        qubit: Option<usize>,
        /// Flip probabilities.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// Decodes the codeword after losing the listed qubits.
    LossReadout {
        #[command(flatten)]
        angles: Angles,
        /// Lost qubits, 1..=9.
        #[arg(long, value_delimiter = ',')]
        loss: Option<Vec<usize>>,
    },
    /// Entanglement connection through the partially encoded node.
    Connect {
        /// Photons of the protected logical qubit lost, 0..=3.
        #[arg(long)]
        lost: Option<usize>,
        /// Use the unencoded GHZ node instead.
        #[arg(long)]
        bare: bool,
    },
    /// Connection through the fully encoded node with loss on one logical qubit.
    RgsLoss {
        /// Photons of the logical qubit lost, 0..=3.
        #[arg(long)]
        lost: Option<usize>,
    },
    /// Connection-probability sweep and optimal (n, m).
    Rate {
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
    },
    /// Coincidence rate, post-selection factors and noise figures.
    PhotonicsRate {
        #[arg(long)]
        pair_prob: Option<f64>,
        #[arg(long)]
        eta_pair: Option<f64>,
        #[arg(long)]
        rep_rate: Option<f64>,
    },
}

impl Cli {
    fn flags(self) -> RunConfig {
        let mut cfg = RunConfig {
            seed: self.seed,
            shots: self.shots,
            out: self.out,
            format: self.format,
            noise: self.noise,
            ..RunConfig::default()
        };
        let angles = |cfg: &mut RunConfig, a: Angles| {
            cfg.theta = a.theta;
            cfg.phi = a.phi;
        };
        cfg.command = self.command.as_ref().map(Command::kind);
        match self.command {
            None => {}
            Some(Command::Encode(a)) => angles(&mut cfg, a),
            Some(Command::SyndromeScan {
                angles: a,
                channel,
                qubit,
                p,
            }) => {
                angles(&mut cfg, a);
                cfg.channel = channel;
                cfg.qubit = qubit;
                cfg.p = p;
            }
            Some(Command::LossReadout { angles: a, loss }) => {
                angles(&mut cfg, a);
                cfg.loss = loss;
            }
            Some(Command::Connect { lost, bare }) => {
                cfg.lost = lost;
                cfg.bare = bare.then_some(true);
            }
            Some(Command::RgsLoss { lost }) => cfg.lost = lost,
            Some(Command::Rate {
                eta,
                q,
                n_max,
                m_max,
                metric,
            }) => {
                cfg.eta = eta;
                cfg.q = q;
                cfg.n_max = n_max;
                cfg.m_max = m_max;
                cfg.metric = metric;
            }
            Some(Command::PhotonicsRate {
                pair_prob,
                eta_pair,
                rep_rate,
            }) => {
                cfg.pair_prob = pair_prob;
                cfg.eta_pair = eta_pair;
                cfg.rep_rate = rep_rate;
            }
        }
        cfg
    }
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::Encode(_) => CommandKind::Encode,
            Command::SyndromeScan { .. } => CommandKind::SyndromeScan,
            Command::LossReadout { .. } => CommandKind::LossReadout,
            Command::Connect { .. } => CommandKind::Connect,
            Command::RgsLoss { .. } => CommandKind::RgsLoss,
            Command::Rate { .. } => CommandKind::Rate,
            Command::PhotonicsRate { .. } => CommandKind::PhotonicsRate,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.overlay(cli.flags());
    let kind = cfg
        .command
        .ok_or_else(|| CliError::Config("no command given on the command line or in --config".into()))?;
    let report = commands::run(kind, &cfg)?;
    output::emit(&report, cfg.format(), cfg.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
