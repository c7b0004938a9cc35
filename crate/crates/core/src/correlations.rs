//! Wick contractions, magnetization and the spin–spin correlators.
//!
//! With `A_i = b†_i + b_i` and `B_i = b†_i - b_i` the Jordan–Wigner strings
//! give
//!
//! * `S^x_{l,l+d} = ¼ ⟨B_l A_{l+1} B_{l+1} … A_{l+d}⟩`
//! * `S^y_{l,l+d} = ¼ (-1)^d ⟨A_l B_{l+1} A_{l+1} … B_{l+d}⟩`
//! * `S^z_{l,l+d} = ¼ ⟨A_l B_l A_{l+d} B_{l+d}⟩`
//!
//! and each expectation value is the Pfaffian of the skew matrix of pairwise
//! contractions taken in operator order.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{DynamicsError, ModeState, QuenchFactors, TimePoint};
use crate::lattice::{mode_grid, thermal_tanh, ChainConfig, Mode};
use crate::pfaffian::{pfaffian, SkewMatrix};
use crate::summation::pairwise_sum;

/// Largest imaginary residue tolerated in a correlator before it is dropped.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("site offset must be at least 1, got {0}")]
    OffsetTooSmall(usize),
    #[error("offset {offset} is out of range for a chain of {n_sites} sites")]
    OffsetOutOfRange { offset: isize, n_sites: usize },
    #[error("offset {offset} exceeds the contraction table range {max}")]
    OutsideTable { offset: isize, max: usize },
    #[error("mode state list has {got} entries, expected {expected}")]
    ModeCount { got: usize, expected: usize },
    #[error("correlator has imaginary part {0:e}")]
    ComplexResidue(f64),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Per-mode coefficients shared by all contraction sums at one time point.
#[derive(Debug, Clone, Copy)]
struct ModeCoefficients {
    phi: f64,
    delta: f64,
    cos_phi: f64,
    /// `tanh(βΛ(a)) / Λ(a)`; zero for a flat mode.
    weight: f64,
    factors: QuenchFactors,
}

fn coefficients(config: &ChainConfig, time: TimePoint) -> Result<Vec<ModeCoefficients>, CorrelationError> {
    let time = time.validate()?;
    let (a, b, kt) = (config.field_before(), config.field_after(), config.kt());
    let modes = mode_grid(config);
    Ok(modes
        .par_iter()
        .map(|m: &Mode| {
            let lambda_a = m.lambda(a);
            let weight = if lambda_a < 1e-12 {
                0.0
            } else {
                thermal_tanh(lambda_a, kt) / lambda_a
            };
            ModeCoefficients {
                phi: m.phi,
                delta: m.delta(),
                cos_phi: m.cos_phi(),
                weight,
                factors: QuenchFactors::new(m.lambda(b), time),
            }
        })
        .collect())
}

fn mode_sum<T, F>(coeffs: &[ModeCoefficients], term: F) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + Send,
    F: Fn(&ModeCoefficients) -> T + Sync + Send,
{
    let terms: Vec<T> = coeffs.par_iter().map(term).collect();
    pairwise_sum(&terms)
}

fn ba_term(m: &ModeCoefficients, d: isize, a: f64, b: f64) -> f64 {
    let s2 = m.factors.sin2_over_lambda2;
    let arg = d as f64 * m.phi;
    let sin_part = m.delta * arg.sin() * (1.0 + 2.0 * (a - b) * (m.cos_phi + b) * s2);
    let cos_part = arg.cos() * (m.delta * m.delta * (b - a) * s2 + 2.0 * (m.cos_phi + a));
    m.weight * (sin_part + cos_part)
}

fn anomalous_term(m: &ModeCoefficients, d: isize, a: f64, b: f64) -> f64 {
    m.delta * (a - b) * (d as f64 * m.phi).sin() * m.factors.sin4_over_lambda * m.weight
}

fn check_offset(config: &ChainConfig, d: isize) -> Result<(), CorrelationError> {
    if d.unsigned_abs() >= config.n_sites() {
        Err(CorrelationError::OffsetOutOfRange {
            offset: d,
            n_sites: config.n_sites(),
        })
    } else {
        Ok(())
    }
}

/// `⟨B_l A_{l+d}⟩`.
pub fn contraction_ba(config: &ChainConfig, d: isize, time: TimePoint) -> Result<f64, CorrelationError> {
    check_offset(config, d)?;
    let coeffs = coefficients(config, time)?;
    let (a, b) = (config.field_before(), config.field_after());
    Ok(mode_sum(&coeffs, |m| ba_term(m, d, a, b)) / config.n_sites() as f64)
}

fn aa_or_bb(config: &ChainConfig, d: isize, time: TimePoint, sign: f64) -> Result<C64, CorrelationError> {
    check_offset(config, d)?;
    let coeffs = coefficients(config, time)?;
    let (a, b) = (config.field_before(), config.field_after());
    let n = config.n_sites() as f64;
    let re = mode_sum(&coeffs, |m| sign * 2.0 * (d as f64 * m.phi).cos());
    let im = mode_sum(&coeffs, |m| anomalous_term(m, d, a, b));
    Ok(C64::new(re / n, im / n))
}

/// `⟨A_l A_{l+d}⟩`.
pub fn contraction_aa(config: &ChainConfig, d: isize, time: TimePoint) -> Result<C64, CorrelationError> {
    aa_or_bb(config, d, time, 1.0)
}

/// `⟨B_l B_{l+d}⟩`.
pub fn contraction_bb(config: &ChainConfig, d: isize, time: TimePoint) -> Result<C64, CorrelationError> {
    aa_or_bb(config, d, time, -1.0)
}

/// Magnetization per site `M_z = ⟨S^z⟩`.
pub fn magnetization_z(config: &ChainConfig, time: TimePoint) -> Result<f64, CorrelationError> {
    let coeffs = coefficients(config, time)?;
    let (a, b) = (config.field_before(), config.field_after());
    let sum = mode_sum(&coeffs, |m| {
        let s2 = m.factors.sin2_over_lambda2;
        m.weight * (2.0 * m.delta * m.delta * (b - a) * s2 + 4.0 * (m.cos_phi + a))
    });
    Ok(sum / (4.0 * config.n_sites() as f64))
}

/// Contractions for every offset in `-max..=max` at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTable {
    max_offset: usize,
    ba: Vec<f64>,
    aa: Vec<C64>,
    bb: Vec<C64>,
    magnetization: f64,
}

impl ContractionTable {
    /// Evaluates the closed-form mode sums.
    pub fn new(config: &ChainConfig, time: TimePoint, max_offset: usize) -> Result<Self, CorrelationError> {
        check_offset(config, max_offset as isize)?;
        let coeffs = coefficients(config, time)?;
        let (a, b) = (config.field_before(), config.field_after());
        let n = config.n_sites() as f64;
        let offsets: Vec<isize> = (-(max_offset as isize)..=max_offset as isize).collect();

        let ba = offsets
            .iter()
            .map(|&d| mode_sum(&coeffs, |m| ba_term(m, d, a, b)) / n)
            .collect();
        let mut aa = Vec::with_capacity(offsets.len());
        let mut bb = Vec::with_capacity(offsets.len());
        for &d in &offsets {
            let re = mode_sum(&coeffs, |m| 2.0 * (d as f64 * m.phi).cos()) / n;
            let im = mode_sum(&coeffs, |m| anomalous_term(m, d, a, b)) / n;
            aa.push(C64::new(re, im));
            bb.push(C64::new(-re, im));
        }
        let magnetization = mode_sum(&coeffs, |m| {
            let s2 = m.factors.sin2_over_lambda2;
            m.weight * (2.0 * m.delta * m.delta * (b - a) * s2 + 4.0 * (m.cos_phi + a))
        }) / (4.0 * n);

        Ok(Self {
            max_offset,
            ba,
            aa,
            bb,
            magnetization,
        })
    }

    /// Builds the same table from explicit mode states through the
    /// occupations `⟨c†_p c_p⟩` and pair amplitudes `⟨c†_p c†_{-p}⟩`.
    pub fn from_mode_states(
        config: &ChainConfig,
        states: &[ModeState],
        max_offset: usize,
    ) -> Result<Self, CorrelationError> {
        check_offset(config, max_offset as isize)?;
        let modes = mode_grid(config);
        if states.len() != modes.len() {
            return Err(CorrelationError::ModeCount {
                got: states.len(),
                expected: modes.len(),
            });
        }
        let n = config.n_sites() as f64;
        let offsets: Vec<isize> = (-(max_offset as isize)..=max_offset as isize).collect();
        let pairs: Vec<(&Mode, &ModeState)> = modes.iter().zip(states).collect();

        let sum = |f: &dyn Fn(&Mode, &ModeState) -> f64| -> f64 {
            let terms: Vec<f64> = pairs.iter().map(|(m, s)| f(m, s)).collect();
            pairwise_sum(&terms) / n
        };

        let mut ba = Vec::with_capacity(offsets.len());
        let mut aa = Vec::with_capacity(offsets.len());
        let mut bb = Vec::with_capacity(offsets.len());
        for &d in &offsets {
            let arg = |m: &Mode| d as f64 * m.phi;
            let cos_part = sum(&|m, s| 2.0 * arg(m).cos() * (2.0 * s.occupation() - 1.0));
            let sin_part = sum(&|m, s| 4.0 * s.pairing().im * arg(m).sin());
            ba.push(cos_part + sin_part);
            let re = sum(&|m, _| 2.0 * arg(m).cos());
            let im = sum(&|m, s| -4.0 * s.pairing().re * arg(m).sin());
            aa.push(C64::new(re, im));
            bb.push(C64::new(-re, im));
        }
        let magnetization = sum(&|_, s| 2.0 * s.occupation() - 1.0);

        Ok(Self {
            max_offset,
            ba,
            aa,
            bb,
            magnetization,
        })
    }

    pub fn max_offset(&self) -> usize {
        self.max_offset
    }

    fn index(&self, d: isize) -> Result<usize, CorrelationError> {
        if d.unsigned_abs() > self.max_offset {
            Err(CorrelationError::OutsideTable {
                offset: d,
                max: self.max_offset,
            })
        } else {
            Ok((d + self.max_offset as isize) as usize)
        }
    }

    /// `⟨B_l A_{l+d}⟩`.
    pub fn ba(&self, d: isize) -> Result<f64, CorrelationError> {
        Ok(self.ba[self.index(d)?])
    }

    /// `⟨A_l B_{l+d}⟩ = -⟨B_{l+d} A_l⟩`.
    pub fn ab(&self, d: isize) -> Result<f64, CorrelationError> {
        Ok(-self.ba[self.index(-d)?])
    }

    pub fn aa(&self, d: isize) -> Result<C64, CorrelationError> {
        Ok(self.aa[self.index(d)?])
    }

    pub fn bb(&self, d: isize) -> Result<C64, CorrelationError> {
        Ok(self.bb[self.index(d)?])
    }

    pub fn magnetization(&self) -> f64 {
        self.magnetization
    }

    fn contraction(&self, left: Majorana, right: Majorana) -> Result<C64, CorrelationError> {
        let d = right.site - left.site;
        Ok(match (left.kind, right.kind) {
            (Kind::B, Kind::A) => C64::new(self.ba(d)?, 0.0),
            (Kind::A, Kind::B) => C64::new(self.ab(d)?, 0.0),
            (Kind::A, Kind::A) => self.aa(d)?,
            (Kind::B, Kind::B) => self.bb(d)?,
        })
    }

    fn string_expectation(&self, ops: &[Majorana]) -> Result<C64, CorrelationError> {
        let mut failure = None;
        let m = SkewMatrix::from_upper(ops.len(), |i, j| {
            self.contraction(ops[i], ops[j]).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            })
        })
        .expect("operator strings have even length");
        match failure {
            Some(e) => Err(e),
            None => Ok(pfaffian(&m)),
        }
    }

    /// `S^x_{l,l+d} = ⟨S^x_l S^x_{l+d}⟩`.
    pub fn correlator_xx(&self, d: usize) -> Result<f64, CorrelationError> {
        real_part(self.string_expectation(&x_string(check_d(d)?))? / 4.0)
    }

    /// `S^y_{l,l+d} = ⟨S^y_l S^y_{l+d}⟩`.
    pub fn correlator_yy(&self, d: usize) -> Result<f64, CorrelationError> {
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        real_part(self.string_expectation(&y_string(check_d(d)?))? * (sign / 4.0))
    }

    /// `⟨S^x_l S^y_{l+d}⟩`.
    pub fn correlator_xy(&self, d: usize) -> Result<f64, CorrelationError> {
        let mut ops = x_string(check_d(d)?);
        if let Some(last) = ops.last_mut() {
            last.kind = Kind::B;
        }
        real_part(self.string_expectation(&ops)? * C64::new(0.0, -0.25))
    }

    /// `⟨S^y_l S^x_{l+d}⟩`.
    pub fn correlator_yx(&self, d: usize) -> Result<f64, CorrelationError> {
        let mut ops = x_string(check_d(d)?);
        ops[0].kind = Kind::A;
        real_part(self.string_expectation(&ops)? * C64::new(0.0, -0.25))
    }

    /// `S^z_{l,l+d} = ⟨S^z_l S^z_{l+d}⟩`.
    pub fn correlator_zz(&self, d: usize) -> Result<f64, CorrelationError> {
        let d = check_d(d)? as isize;
        let ops = [
            Majorana::a(0),
            Majorana::b(0),
            Majorana::a(d),
            Majorana::b(d),
        ];
        real_part(self.string_expectation(&ops)? / 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    A,
    B,
}

#[derive(Debug, Clone, Copy)]
struct Majorana {
    kind: Kind,
    site: isize,
}

impl Majorana {
    fn a(site: isize) -> Self {
        Self { kind: Kind::A, site }
    }

    fn b(site: isize) -> Self {
        Self { kind: Kind::B, site }
    }
}

fn check_d(d: usize) -> Result<usize, CorrelationError> {
    if d < 1 {
        Err(CorrelationError::OffsetTooSmall(d))
    } else {
        Ok(d)
    }
}

// B_0 A_1 B_1 A_2 … B_{d-1} A_d
fn x_string(d: usize) -> Vec<Majorana> {
    let d = d as isize;
    let mut ops = vec![Majorana::b(0)];
    for k in 1..d {
        ops.push(Majorana::a(k));
        ops.push(Majorana::b(k));
    }
    ops.push(Majorana::a(d));
    ops
}

// A_0 B_1 A_1 B_2 … A_{d-1} B_d
fn y_string(d: usize) -> Vec<Majorana> {
    let d = d as isize;
    let mut ops = vec![Majorana::a(0)];
    for k in 1..d {
        ops.push(Majorana::b(k));
        ops.push(Majorana::a(k));
    }
    ops.push(Majorana::b(d));
    ops
}

fn real_part(z: C64) -> Result<f64, CorrelationError> {
    if z.im.abs() > IMAGINARY_TOLERANCE {
        Err(CorrelationError::ComplexResidue(z.im))
    } else {
        Ok(z.re)
    }
}

pub fn correlator_xx(config: &ChainConfig, d: usize, time: TimePoint) -> Result<f64, CorrelationError> {
    ContractionTable::new(config, time, check_d(d)?)?.correlator_xx(d)
}

pub fn correlator_yy(config: &ChainConfig, d: usize, time: TimePoint) -> Result<f64, CorrelationError> {
    ContractionTable::new(config, time, check_d(d)?)?.correlator_yy(d)
}

pub fn correlator_zz(config: &ChainConfig, d: usize, time: TimePoint) -> Result<f64, CorrelationError> {
    ContractionTable::new(config, time, check_d(d)?)?.correlator_zz(d)
}
