//! The four subcommands.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{Cell, Table};
use super::spec::RunSpec;
use crate::dynamics::TimePoint;
use crate::error::{Error, Result};
use crate::lattice::ChainConfig;
use crate::oracle::QuenchOracle;
use crate::pipeline::{linspace, observe, window_average, Observables};

/// Largest tolerated change of `C` when the ring size is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;
const CONVERGENCE_SAMPLES: usize = 5;

const SERIES_COLUMNS: [&str; 7] = ["t", "M_z", "S_x", "S_y", "S_z", "C", "EoF"];

fn series_row(label: Cell, o: &Observables) -> Vec<Cell> {
    vec![
        label,
        o.magnetization.into(),
        o.sx.into(),
        o.sy.into(),
        o.sz.into(),
        o.concurrence.into(),
        o.entanglement.into(),
    ]
}

fn sample_indices(len: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..CONVERGENCE_SAMPLES)
        .map(|k| k * len.saturating_sub(1) / (CONVERGENCE_SAMPLES - 1))
        .collect();
    idx.dedup();
    idx
}

/// Recomputes `C` at `2N` for a few points and warns when it moved by more
/// than [`CONVERGENCE_TOLERANCE`].
fn convergence_check(d: usize, points: &[(ChainConfig, TimePoint, f64)]) -> Result<Value> {
    let chosen: Vec<&(ChainConfig, TimePoint, f64)> = sample_indices(points.len()).into_iter().map(|k| &points[k]).collect();
    let diffs: Vec<f64> = chosen
        .par_iter()
        .map(|(config, time, c)| {
            let doubled = (*config).with_sites(2 * config.n_sites())?;
            Ok((observe(&doubled, d, *time)?.concurrence - c).abs())
        })
        .collect::<Result<_>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    if worst > CONVERGENCE_TOLERANCE {
        let n = points.first().map(|p| p.0.n_sites()).unwrap_or_default();
        eprintln!(
            "warning: concurrence changes by {worst:.3e} between N={n} and N={}; consider a larger --n-sites",
            2 * n
        );
    }
    Ok(json!({ "convergence": { "samples": diffs.len(), "max_difference": worst } }))
}

pub fn run_timeseries(spec: &RunSpec) -> Result<()> {
    let config = spec.chain()?;
    let d = spec.offset;
    let times = linspace(spec.t_start, spec.t_end, spec.t_steps);
    let series: Vec<Observables> = times
        .par_iter()
        .map(|&t| observe(&config, d, TimePoint::At(t)))
        .collect::<Result<_>>()?;

    let mut table = Table::new(SERIES_COLUMNS.to_vec());
    for (t, o) in times.iter().zip(&series) {
        table.push(series_row((*t).into(), o));
    }
    let late = observe(&config, d, TimePoint::Asymptotic)?;
    table.push(series_row(f64::INFINITY.into(), &late));
    if let Some(start) = spec.time_average {
        table.push(series_row("window".into(), &window_average(&config, d, start)?));
    }

    let points: Vec<(ChainConfig, TimePoint, f64)> = times
        .iter()
        .zip(&series)
        .map(|(&t, o)| (config, TimePoint::At(t), o.concurrence))
        .collect();
    let extra = convergence_check(d, &points)?;
    table.emit(spec, extra)
}

pub fn run_surface(spec: &RunSpec) -> Result<()> {
    let base = spec.chain()?;
    let d = spec.offset;
    let axis = linspace(spec.grid_min, spec.grid_max, spec.grid_steps);
    let grid: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect();
    let cells: Vec<(ChainConfig, Observables, Option<Observables>)> = grid
        .par_iter()
        .map(|&(a, b)| {
            let config = base.with_fields(a, b)?;
            let late = observe(&config, d, TimePoint::Asymptotic)?;
            let window = spec
                .time_average
                .map(|start| window_average(&config, d, start))
                .transpose()?;
            Ok((config, late, window))
        })
        .collect::<Result<_>>()?;

    let mut columns = vec!["a", "b", "C", "EoF"];
    if spec.time_average.is_some() {
        columns.extend(["C_window", "EoF_window"]);
    }
    let mut table = Table::new(columns);
    for ((a, b), (_, late, window)) in grid.iter().zip(&cells) {
        let mut row = vec![(*a).into(), (*b).into(), late.concurrence.into(), late.entanglement.into()];
        if let Some(w) = window {
            row.extend([w.concurrence.into(), w.entanglement.into()]);
        }
        table.push(row);
    }

    let peak = grid
        .iter()
        .zip(&cells)
        .fold(None, |best: Option<((f64, f64), f64)>, (p, (_, o, _))| match best {
            Some((_, c)) if c >= o.concurrence => best,
            _ => Some((*p, o.concurrence)),
        });
    let points: Vec<(ChainConfig, TimePoint, f64)> = cells
        .iter()
        .map(|(config, o, _)| (*config, TimePoint::Asymptotic, o.concurrence))
        .collect();
    let mut extra = convergence_check(d, &points)?;
    if let (Some(((a, b), c)), Value::Object(m)) = (peak, &mut extra) {
        m.insert("peak".into(), json!({ "a": a, "b": b, "C": c }));
    }
    table.emit(spec, extra)
}

pub fn run_equilibrium(spec: &RunSpec) -> Result<()> {
    let base = spec.chain()?;
    let d = spec.offset;
    let fields = linspace(spec.grid_min, spec.grid_max, spec.grid_steps);
    let rows: Vec<Observables> = fields
        .par_iter()
        .map(|&h| observe(&base.with_fields(h, h)?, d, TimePoint::At(0.0)))
        .collect::<Result<_>>()?;
    let mut columns = SERIES_COLUMNS.to_vec();
    columns[0] = "h";
    let mut table = Table::new(columns);
    for (h, o) in fields.iter().zip(&rows) {
        table.push(series_row((*h).into(), o));
    }
    table.emit(spec, json!({}))
}

/// Largest absolute pipeline–oracle differences for one ring size.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OracleErrors {
    pub n_sites: usize,
    pub magnetization: f64,
    pub correlators: f64,
    pub concurrence: f64,
}

/// `true` when the concurrence error strictly decreases with ring size.
pub fn schedule_holds(errors: &[OracleErrors]) -> bool {
    let mut sorted = errors.to_vec();
    sorted.sort_by_key(|e| e.n_sites);
    sorted.windows(2).all(|w| w[1].concurrence < w[0].concurrence)
}

pub fn run_oracle_compare(spec: &RunSpec) -> Result<()> {
    let d = spec.offset;
    let mut table = Table::new(vec![
        "N", "t", "M_z", "M_z_ed", "S_x", "S_x_ed", "S_y", "S_y_ed", "S_z", "S_z_ed", "C", "C_ed",
    ]);
    let mut summary = Vec::new();
    for &n in &spec.oracle_sites {
        let config = spec.chain()?.with_sites(n)?;
        let oracle = QuenchOracle::new(n, spec.gamma, spec.kt, spec.field_a, spec.field_b)?;
        let mut errors = OracleErrors {
            n_sites: n,
            magnetization: 0.0,
            correlators: 0.0,
            concurrence: 0.0,
        };
        for &t in &spec.times {
            let p = observe(&config, d, TimePoint::At(t))?;
            let e = oracle.observe(d, t)?;
            errors.magnetization = errors.magnetization.max((p.magnetization - e.magnetization).abs());
            for (x, y) in [(p.sx, e.sx), (p.sy, e.sy), (p.sz, e.sz)] {
                errors.correlators = errors.correlators.max((x - y).abs());
            }
            errors.concurrence = errors.concurrence.max((p.concurrence - e.concurrence).abs());
            table.push(vec![
                n.into(),
                t.into(),
                p.magnetization.into(),
                e.magnetization.into(),
                p.sx.into(),
                e.sx.into(),
                p.sy.into(),
                e.sy.into(),
                p.sz.into(),
                e.sz.into(),
                p.concurrence.into(),
                e.concurrence.into(),
            ]);
        }
        eprintln!(
            "N={n}: max |ΔM_z| = {:.3e}, max |ΔS| = {:.3e}, max |ΔC| = {:.3e}",
            errors.magnetization, errors.correlators, errors.concurrence
        );
        summary.push(errors);
    }
    let holds = schedule_holds(&summary);
    table.emit(spec, json!({ "errors": summary, "schedule_holds": holds }))?;
    if holds {
        Ok(())
    } else {
        Err(Error::OracleSchedule(
            "concurrence error does not decrease strictly with N".into(),
        ))
    }
}
