use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::lattice::MomentumGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Observables over a time grid plus the t→∞ row.
    Timeseries,
    /// Asymptotic concurrence over an (a, b) grid.
    Surface,
    /// Equilibrium observables as a function of a uniform field.
    Equilibrium,
    /// Pipeline against exact diagonalization on small rings.
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Entanglement dynamics of the XY ring after a transverse-field quench.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "xy-quench", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Number of sites N.
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Anisotropy γ.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Temperature kT of the initial state (`inf` allowed).
    #[arg(long, allow_negative_numbers = true)]
    pub kt: Option<f64>,
    /// Field before the quench.
    #[arg(long, allow_negative_numbers = true)]
    pub field_a: Option<f64>,
    /// Field after the quench.
    #[arg(long, allow_negative_numbers = true)]
    pub field_b: Option<f64>,
    /// Site offset d of the pair.
    #[arg(long)]
    pub offset: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_steps: Option<usize>,
    /// Fermion momentum grid.
    #[arg(long)]
    pub momentum_grid: Option<MomentumGrid>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also report the mean over t ∈ [T, 2T].
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub time_average: Option<f64>,
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated sample times for oracle-compare.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub times: Option<Vec<f64>>,
    /// Comma-separated ring sizes for oracle-compare.
    #[arg(long, value_delimiter = ',')]
    pub oracle_sites: Option<Vec<usize>>,
}
