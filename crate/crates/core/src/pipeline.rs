//! Observables of a site pair along the full chain pipeline: mode sums,
//! Pfaffian correlators, the X-state and its concurrence.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::ContractionTable;
use crate::dynamics::TimePoint;
use crate::entanglement::{concurrence_x, entanglement_of_formation, two_site_state_with_cross};
use crate::error::{Error, Result};
use crate::lattice::ChainConfig;

/// Number of samples in a windowed time average.
pub const WINDOW_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub magnetization: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    /// `⟨S^x_l S^y_{l+d}⟩`, nonzero only while the state is still evolving.
    pub sxy: f64,
    /// `⟨S^y_l S^x_{l+d}⟩`.
    pub syx: f64,
    pub concurrence: f64,
    pub entanglement: f64,
    /// Diagonal entries of the pair state rounded up from tiny negatives.
    #[serde(skip)]
    pub clamped: usize,
}

/// Observables at offset `d` from a precomputed contraction table.
pub fn observe_table(table: &ContractionTable, d: usize) -> Result<Observables> {
    let magnetization = table.magnetization();
    let sx = table.correlator_xx(d)?;
    let sy = table.correlator_yy(d)?;
    let sz = table.correlator_zz(d)?;
    let sxy = table.correlator_xy(d)?;
    let syx = table.correlator_yx(d)?;
    let state = two_site_state_with_cross(magnetization, sx, sy, sz, sxy, syx)?;
    let concurrence = concurrence_x(&state);
    Ok(Observables {
        magnetization,
        sx,
        sy,
        sz,
        sxy,
        syx,
        concurrence,
        entanglement: entanglement_of_formation(concurrence)?,
        clamped: state.clamped(),
    })
}

/// Observables of sites `(l, l + d)` at `time`.
///
/// ```
/// use xy_quench::{pipeline::observe, ChainConfig, TimePoint};
///
/// let config = ChainConfig::new(200, 1.0, 0.0, 1.0, 1.0)?;
/// let obs = observe(&config, 1, TimePoint::At(0.0))?;
/// assert!(obs.concurrence > 0.15 && obs.concurrence < 0.2);
/// # Ok::<(), xy_quench::Error>(())
/// ```
pub fn observe(config: &ChainConfig, d: usize, time: TimePoint) -> Result<Observables> {
    check_offset(config, d)?;
    let table = ContractionTable::new(config, time, d)?;
    observe_table(&table, d)
}

fn check_offset(config: &ChainConfig, d: usize) -> Result<()> {
    if d == 0 || d >= config.n_sites() {
        Err(Error::InvalidSpec(format!(
            "offset {d} must lie in 1..{} for {} sites",
            config.n_sites(),
            config.n_sites()
        )))
    } else {
        Ok(())
    }
}

/// Sample times `T + T (k + ½) / samples` covering `[T, 2T]`.
pub fn window_times(start: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| start + start * (k as f64 + 0.5) / samples as f64)
        .collect()
}

/// Mean of every observable over [`WINDOW_SAMPLES`] times in `[T, 2T]`.
pub fn window_average(config: &ChainConfig, d: usize, start: f64) -> Result<Observables> {
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::InvalidSpec(format!("time-average window start must be positive, got {start}")));
    }
    let samples: Vec<Observables> = window_times(start, WINDOW_SAMPLES)
        .into_par_iter()
        .map(|t| observe(config, d, TimePoint::At(t)))
        .collect::<Result<_>>()?;
    let mean = |f: fn(&Observables) -> f64| {
        let v: Vec<f64> = samples.iter().map(f).collect();
        crate::summation::pairwise_sum(&v) / v.len() as f64
    };
    Ok(Observables {
        magnetization: mean(|o| o.magnetization),
        sx: mean(|o| o.sx),
        sy: mean(|o| o.sy),
        sz: mean(|o| o.sz),
        sxy: mean(|o| o.sxy),
        syx: mean(|o| o.syx),
        concurrence: mean(|o| o.concurrence),
        entanglement: mean(|o| o.entanglement),
        clamped: samples.iter().map(|o| o.clamped).sum(),
    })
}

/// Location and value of a surface maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePeak {
    pub a: f64,
    pub b: f64,
    pub concurrence: f64,
}

/// Evenly spaced grid with `steps` points from `min` to `max`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps)
            .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

fn best_on_grid(config: &ChainConfig, d: usize, a_values: &[f64], b_values: &[f64]) -> Result<SurfacePeak> {
    let points: Vec<(f64, f64)> = a_values
        .iter()
        .flat_map(|&a| b_values.iter().map(move |&b| (a, b)))
        .collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(a, b)| {
            let c = (*config).with_fields(a, b)?;
            Ok(observe(&c, d, TimePoint::Asymptotic)?.concurrence)
        })
        .collect::<Result<_>>()?;
    // first maximum in row-major order
    let (k, &concurrence) = values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, cur| match best {
            Some(b) if *b.1 >= *cur.1 => Some(b),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::InvalidSpec("empty surface grid".into()))?;
    Ok(SurfacePeak {
        a: points[k].0,
        b: points[k].1,
        concurrence,
    })
}

/// Coarse-to-fine search for the largest asymptotic concurrence on
/// `[min, max]²`: a coarse pass at spacing `coarse`, then a pass at spacing
/// `fine` over the coarse cells around the best point.
pub fn surface_maximum(
    config: &ChainConfig,
    d: usize,
    (min, max): (f64, f64),
    coarse: f64,
    fine: f64,
) -> Result<SurfacePeak> {
    if !(coarse > 0.0 && fine > 0.0 && max > min) {
        return Err(Error::InvalidSpec("surface search needs max > min and positive spacings".into()));
    }
    let grid = |lo: f64, hi: f64, step: f64| linspace(lo, hi, ((hi - lo) / step).round() as usize + 1);
    let peak = best_on_grid(config, d, &grid(min, max, coarse), &grid(min, max, coarse))?;
    let window = |x: f64| ((x - coarse).max(min), (x + coarse).min(max));
    let (a_lo, a_hi) = window(peak.a);
    let (b_lo, b_hi) = window(peak.b);
    best_on_grid(config, d, &grid(a_lo, a_hi, fine), &grid(b_lo, b_hi, fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::QuenchOracle;

    #[test]
    fn stationary_without_quench() {
        let config = ChainConfig::equilibrium(100, 0.8, 0.2, 1.1).unwrap();
        let first = observe(&config, 1, TimePoint::At(0.0)).unwrap();
        for t in [1.0, 10.0, 55.5] {
            let o = observe(&config, 1, TimePoint::At(t)).unwrap();
            for (x, y) in [
                (o.magnetization, first.magnetization),
                (o.sx, first.sx),
                (o.sy, first.sy),
                (o.sz, first.sz),
                (o.concurrence, first.concurrence),
            ] {
                assert!((x - y).abs() < 1e-10);
            }
        }
        let asym = observe(&config, 1, TimePoint::Asymptotic).unwrap();
        assert!((asym.concurrence - first.concurrence).abs() < 1e-10);
    }

    #[test]
    fn matches_oracle_at_zero_temperature() {
        let n = 8;
        let config = ChainConfig::new(n, 1.0, 0.0, 1.001, 0.5).unwrap();
        let oracle = QuenchOracle::new(n, 1.0, 0.0, 1.001, 0.5).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let p = observe(&config, 1, TimePoint::At(t)).unwrap();
            let e = oracle.observe(1, t).unwrap();
            assert!((p.concurrence - e.concurrence).abs() < 1e-9, "t={t}");
            for d in 2..=3 {
                let p = observe(&config, d, TimePoint::At(t)).unwrap();
                let e = oracle.observe(d, t).unwrap();
                assert!((p.concurrence - e.concurrence).abs() < 1e-9, "t={t} d={d}");
            }
        }
    }

    #[test]
    fn cross_correlators_vanish_asymptotically() {
        let config = ChainConfig::new(300, 0.7, 0.3, 0.5, 2.0).unwrap();
        for d in 1..=3 {
            let o = observe(&config, d, TimePoint::Asymptotic).unwrap();
            assert_eq!((o.sxy, o.syx), (0.0, 0.0));
            let early = observe(&config, d, TimePoint::At(0.7)).unwrap();
            assert!(early.sxy.abs() > 1e-6);
            assert_eq!(early.sxy, early.syx);
        }
    }

    #[test]
    fn offset_validation() {
        let config = ChainConfig::equilibrium(10, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(observe(&config, 0, TimePoint::At(0.0)), Err(Error::InvalidSpec(_))));
        assert!(matches!(observe(&config, 10, TimePoint::At(0.0)), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn window_times_cover_interval() {
        let t = window_times(10.0, 4);
        assert_eq!(t, vec![11.25, 13.75, 16.25, 18.75]);
        assert_eq!(window_times(1.0, WINDOW_SAMPLES).len(), WINDOW_SAMPLES);
    }

    #[test]
    fn grid_helper() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn surface_search_finds_interior_peak() {
        let config = ChainConfig::new(200, 1.0, 0.0, 0.0, 0.0).unwrap();
        let peak = surface_maximum(&config, 1, (0.5, 2.0), 0.25, 0.05).unwrap();
        let coarse = best_on_grid(&config, 1, &linspace(0.5, 2.0, 7), &linspace(0.5, 2.0, 7)).unwrap();
        assert!(peak.concurrence >= coarse.concurrence);
        assert!(peak.a > 0.75 && peak.a < 1.75);
    }
}
