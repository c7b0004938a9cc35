//! Effective run configuration: flags over config file over defaults.

use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser};
use serde::{Serialize, Serializer};

use super::args::{Cli, Command, Format};
use crate::error::{Error, Result};
use crate::lattice::{ChainConfig, MomentumGrid};
use crate::oracle::{MAX_SITES, MIN_SITES};

pub const DEFAULT_SITES: usize = 2000;

fn finite_or_label<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&v.to_string())
    }
}

/// Fully resolved parameters of one invocation, echoed into output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub command: Command,
    pub n_sites: usize,
    pub gamma: f64,
    #[serde(serialize_with = "finite_or_label")]
    pub kt: f64,
    pub field_a: f64,
    pub field_b: f64,
    pub momentum_grid: MomentumGrid,
    pub offset: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub t_steps: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_steps: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub time_average: Option<f64>,
    pub times: Vec<f64>,
    pub oracle_sites: Vec<usize>,
}

fn normalize(key: &str) -> String {
    key.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Parses a flat `key = value` file into the same shape as the flags. Keys
/// are the long flag names, with dashes and underscores optional.
pub fn parse_config_text(text: &str) -> Result<Cli> {
    let longs: Vec<String> = Cli::command()
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();
    let mut argv = vec!["xy-quench".to_owned()];
    let mut command = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidSpec(format!("config line {}: expected `key = value`", lineno + 1))
        })?;
        let key = normalize(key.trim());
        let value = value.trim().trim_matches('"').to_owned();
        if key == "command" {
            command = Some(value);
            continue;
        }
        let long = longs
            .iter()
            .find(|l| normalize(l) == key && l.as_str() != "config")
            .ok_or_else(|| Error::InvalidSpec(format!("config line {}: unknown key `{key}`", lineno + 1)))?;
        argv.push(format!("--{long}"));
        argv.push(value);
    }
    if let Some(c) = command {
        argv.insert(1, c);
    }
    Cli::try_parse_from(argv).map_err(|e| Error::InvalidSpec(format!("config file: {e}")))
}

pub fn read_config_file(path: &Path) -> Result<Cli> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpec(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn merge(flags: Cli, file: Cli) -> Cli {
    Cli {
        command: flags.command.or(file.command),
        n_sites: flags.n_sites.or(file.n_sites),
        gamma: flags.gamma.or(file.gamma),
        kt: flags.kt.or(file.kt),
        field_a: flags.field_a.or(file.field_a),
        field_b: flags.field_b.or(file.field_b),
        offset: flags.offset.or(file.offset),
        t_start: flags.t_start.or(file.t_start),
        t_end: flags.t_end.or(file.t_end),
        t_steps: flags.t_steps.or(file.t_steps),
        grid_min: flags.grid_min.or(file.grid_min),
        grid_max: flags.grid_max.or(file.grid_max),
        grid_steps: flags.grid_steps.or(file.grid_steps),
        momentum_grid: flags.momentum_grid.or(file.momentum_grid),
        format: flags.format.or(file.format),
        out: flags.out.or(file.out),
        workers: flags.workers.or(file.workers),
        time_average: flags.time_average.or(file.time_average),
        config: flags.config,
        times: flags.times.or(file.times),
        oracle_sites: flags.oracle_sites.or(file.oracle_sites),
    }
}

impl RunSpec {
    /// Resolves flags, the optional config file and defaults, then validates.
    pub fn resolve(flags: Cli) -> Result<Self> {
        let merged = match &flags.config {
            Some(path) => {
                let file = read_config_file(path)?;
                merge(flags, file)
            }
            None => flags,
        };
        Self::from_cli(merged)
    }

    fn from_cli(c: Cli) -> Result<Self> {
        let command = c
            .command
            .ok_or_else(|| Error::InvalidSpec("no command given (timeseries, surface, equilibrium, oracle-compare)".into()))?;
        let oracle_sites = match (command, c.n_sites, c.oracle_sites) {
            (_, _, Some(list)) => list,
            (Command::OracleCompare, Some(n), None) => vec![n],
            _ => vec![6, 8, 10],
        };
        let spec = RunSpec {
            command,
            n_sites: c.n_sites.unwrap_or(DEFAULT_SITES),
            gamma: c.gamma.unwrap_or(1.0),
            kt: c.kt.unwrap_or(0.0),
            field_a: c.field_a.unwrap_or(1.001),
            field_b: c.field_b.unwrap_or(0.5),
            momentum_grid: c.momentum_grid.unwrap_or_default(),
            offset: c.offset.unwrap_or(1),
            t_start: c.t_start.unwrap_or(0.0),
            t_end: c.t_end.unwrap_or(20.0),
            t_steps: c.t_steps.unwrap_or(201),
            grid_min: c.grid_min.unwrap_or(0.0),
            grid_max: c.grid_max.unwrap_or(3.0),
            grid_steps: c.grid_steps.unwrap_or(31),
            format: c.format.unwrap_or(Format::Csv),
            out: c.out,
            workers: c.workers.unwrap_or(0),
            time_average: c.time_average,
            times: c.times.unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 5.0]),
            oracle_sites,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(1..=3).contains(&self.offset) {
            return bad(format!("offset must be 1, 2 or 3, got {}", self.offset));
        }
        match self.command {
            Command::Timeseries => {
                if self.t_steps == 0 {
                    return bad("t-steps must be at least 1".into());
                }
                if !(self.t_start >= 0.0 && self.t_end >= self.t_start && self.t_end.is_finite()) {
                    return bad(format!("time grid [{}, {}] is invalid", self.t_start, self.t_end));
                }
            }
            Command::Surface | Command::Equilibrium => {
                if self.grid_steps < 2 {
                    return bad(format!("grid-steps must be at least 2, got {}", self.grid_steps));
                }
                if !(self.grid_min.is_finite() && self.grid_max.is_finite() && self.grid_max > self.grid_min) {
                    return bad(format!("grid range [{}, {}] is invalid", self.grid_min, self.grid_max));
                }
            }
            Command::OracleCompare => {
                if self.oracle_sites.is_empty() || self.times.is_empty() {
                    return bad("oracle-compare needs at least one ring size and one time".into());
                }
                if let Some(&n) = self.oracle_sites.iter().find(|n| !(MIN_SITES..=MAX_SITES).contains(*n)) {
                    return Err(crate::oracle::OracleError::SiteCount(n).into());
                }
                if let Some(t) = self.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
                    return bad(format!("oracle time {t} is invalid"));
                }
            }
        }
        if let Some(t) = self.time_average {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("time-average window start must be positive, got {t}"));
            }
        }
        // field values are checked by the chain configuration itself
        self.chain()?;
        Ok(())
    }

    /// Chain configuration at `n_sites` (for oracle runs the first ring size).
    pub fn chain(&self) -> Result<ChainConfig> {
        let n = match self.command {
            Command::OracleCompare => self.oracle_sites[0],
            _ => self.n_sites,
        };
        Ok(ChainConfig::new(n, self.gamma, self.kt, self.field_a, self.field_b)?.with_grid(self.momentum_grid))
    }
}
