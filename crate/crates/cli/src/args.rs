//! Command-line surface. Every parameter flag is optional; unset flags fall back to
//! the config file and then to the defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::commands::{GateKind, Geometry, RANGE_KEYS};
use crate::config::{to_params, Params};

#[derive(Debug, Parser)]
#[command(name = "dipolatt", version, about = "Dipole-dipole gate figures of merit, gate simulation and error budgets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON parameter object, or a previous JSON output.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Worker threads for sweeps and ensemble replicas.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Figure of merit of a trap geometry.
    Fom(FomArgs),
    /// Simulate a two-qubit gate.
    Gate(GateArgs),
    /// Scattering error budget of a lattice gate.
    Fidelity(FidelityArgs),
    /// Monte Carlo of the ensemble fidelity measurement.
    Ensemble(EnsembleArgs),
    /// Figure of merit over a grid of one geometry parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FomArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub geometry: Option<Geometry>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub zbar: Option<f64>,
    #[arg(long)]
    pub eta_perp: Option<f64>,
    #[arg(long)]
    pub eta_par: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<i32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub retarded: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub keep_n0: Option<bool>,
}

#[derive(Debug, Args, Serialize)]
pub struct GateArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: Option<GateKind>,
    #[arg(long, value_enum)]
    pub geometry: Option<Geometry>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub zbar: Option<f64>,
    #[arg(long)]
    pub eta_perp: Option<f64>,
    #[arg(long)]
    pub eta_par: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<i32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub retarded: Option<bool>,
    #[arg(long)]
    pub rabi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub detuning: Option<f64>,
    #[arg(long)]
    pub twice_i: Option<u32>,
    #[arg(long)]
    pub pulse_rabi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub pulse_detuning: Option<f64>,
    #[arg(long)]
    pub min_ratio: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FidelityArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long)]
    pub intensity_ratio: Option<f64>,
    #[arg(long)]
    pub linewidth_over_recoil: Option<f64>,
    #[arg(long)]
    pub hyperfine_f: Option<u32>,
    #[arg(long)]
    pub transport_factor: Option<f64>,
    #[arg(long)]
    pub protocol_constant: Option<f64>,
    #[arg(long)]
    pub lattice_detuning: Option<f64>,
    #[arg(long)]
    pub entangling_time: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub optimize: Option<bool>,
    #[arg(long)]
    pub detuning_min: Option<f64>,
    #[arg(long)]
    pub detuning_max: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long)]
    pub n_sites: Option<usize>,
    #[arg(long)]
    pub fill_probability: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gate_fidelity: Option<f64>,
    #[arg(long)]
    pub partner_lost: Option<f64>,
    #[arg(long)]
    pub both_lost: Option<f64>,
    #[arg(long)]
    pub wrong_state: Option<f64>,
    #[arg(long)]
    pub control_fraction: Option<f64>,
    #[arg(long)]
    pub unpaired_flip_probability: Option<f64>,
    #[arg(long)]
    pub pre_cycles: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
}

/// Geometry keys take either a number or `start:stop:count`.
#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub geometry: Option<Geometry>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub zbar: Option<String>,
    #[arg(long)]
    pub eta_perp: Option<String>,
    #[arg(long)]
    pub eta_par: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<i32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub retarded: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub keep_n0: Option<bool>,
}

fn set_only<T: Serialize>(args: &T) -> Params {
    to_params(args).into_iter().filter(|(_, v)| !v.is_null()).collect()
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fom(_) => "fom",
            Command::Gate(_) => "gate",
            Command::Fidelity(_) => "fidelity",
            Command::Ensemble(_) => "ensemble",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Fom(a) => &a.common,
            Command::Gate(a) => &a.common,
            Command::Fidelity(a) => &a.common,
            Command::Ensemble(a) => &a.common,
            Command::Sweep(a) => &a.common,
        }
    }

    /// Parameters given on the command line.
    pub fn overrides(&self) -> Params {
        match self {
            Command::Fom(a) => set_only(a),
            Command::Gate(a) => set_only(a),
            Command::Fidelity(a) => set_only(a),
            Command::Ensemble(a) => set_only(a),
            Command::Sweep(a) => {
                let mut m = set_only(a);
                for k in RANGE_KEYS {
                    if let Some(Value::String(s)) = m.get(*k) {
                        if let Ok(x) = s.trim().parse::<f64>() {
                            m.insert(k.to_string(), serde_json::json!(x));
                        }
                    }
                }
                m
            }
        }
    }
}
