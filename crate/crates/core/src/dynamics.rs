//! Per-mode quench dynamics.
//!
//! Every momentum pair `(p, -p)` evolves independently inside the
//! four-dimensional space spanned by `|0⟩`, `c†_p c†_{-p}|0⟩`, `c†_p|0⟩` and
//! `c†_{-p}|0⟩`. The two singly occupied states are eigenstates of the mode
//! Hamiltonian at every field, so only the 2×2 pair block evolves
//! non-trivially. States are stored trace-normalized.

use nalgebra::{Matrix2, Matrix4, SVector};
use num_complex::Complex64 as C64;
use ode_solvers::{Dop853, System};
use thiserror::Error;

use crate::lattice::{boltzmann_ratio, Mode};

/// Below this `Λ(b)` the oscillating factors use their series limits.
pub const DEGENERATE_LAMBDA: f64 = 1e-8;
/// Below this `Λ(a)` the initial mode state is uniform.
const FLAT_LAMBDA: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("temperature must be non-negative, got kT = {0}")]
    NegativeTemperature(f64),
    #[error("time must be non-negative and finite, got t = {0}")]
    InvalidTime(f64),
    #[error("integrator tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("numerical integration failed: {0}")]
    Integration(String),
}

/// Time at which the chain is observed after the quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimePoint {
    At(f64),
    /// Phase-averaged `t → ∞` limit.
    Asymptotic,
}

impl TimePoint {
    pub fn validate(self) -> Result<Self, DynamicsError> {
        match self {
            TimePoint::At(t) if !(t >= 0.0 && t.is_finite()) => Err(DynamicsError::InvalidTime(t)),
            other => Ok(other),
        }
    }
}

impl From<f64> for TimePoint {
    fn from(t: f64) -> Self {
        TimePoint::At(t)
    }
}

/// Oscillating factors of the step quench with `Λ(b)` divided out:
/// `sin²(2tΛ)/Λ²` and `sin(4tΛ)/Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchFactors {
    pub sin2_over_lambda2: f64,
    pub sin4_over_lambda: f64,
}

impl QuenchFactors {
    pub fn new(lambda_after: f64, time: TimePoint) -> Self {
        let degenerate = lambda_after < DEGENERATE_LAMBDA;
        let (sin2_over_lambda2, sin4_over_lambda) = match time {
            TimePoint::At(t) if degenerate => (4.0 * t * t, 4.0 * t),
            TimePoint::At(t) => {
                let s = (2.0 * t * lambda_after).sin();
                (
                    s * s / (lambda_after * lambda_after),
                    (4.0 * t * lambda_after).sin() / lambda_after,
                )
            }
            // Frozen: the post-quench pair block is proportional to the identity.
            TimePoint::Asymptotic if degenerate => (0.0, 0.0),
            TimePoint::Asymptotic => (0.5 / (lambda_after * lambda_after), 0.0),
        };
        Self {
            sin2_over_lambda2,
            sin4_over_lambda,
        }
    }
}

/// Normalized density matrix of one mode pair: the pair block plus the common
/// weight of the two singly occupied states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub occ_block: Matrix2<C64>,
    pub single_occ: f64,
}

impl ModeState {
    pub fn uniform() -> Self {
        Self {
            occ_block: Matrix2::from_diagonal_element(C64::new(0.25, 0.0)),
            single_occ: 0.25,
        }
    }

    pub fn trace(&self) -> f64 {
        self.occ_block.trace().re + 2.0 * self.single_occ
    }

    /// `⟨c†_p c_p⟩`, equal for `p` and `-p`.
    pub fn occupation(&self) -> f64 {
        self.occ_block[(1, 1)].re + self.single_occ
    }

    /// `⟨c†_p c†_{-p}⟩`.
    pub fn pairing(&self) -> C64 {
        self.occ_block[(0, 1)]
    }

    /// Full 4×4 matrix in the basis `(|0⟩, |p,-p⟩, |p⟩, |-p⟩)`.
    pub fn to_matrix(&self) -> Matrix4<C64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.occ_block);
        m[(2, 2)] = C64::new(self.single_occ, 0.0);
        m[(3, 3)] = C64::new(self.single_occ, 0.0);
        m
    }

    pub fn max_abs_diff(&self, other: &ModeState) -> f64 {
        let block = (self.occ_block - other.occ_block)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        block.max((self.single_occ - other.single_occ).abs())
    }

    /// Eigenvalues of the Hermitian pair block, ascending.
    pub fn block_eigenvalues(&self) -> [f64; 2] {
        let p = self.occ_block[(0, 0)].re;
        let q = self.occ_block[(1, 1)].re;
        let r = self.occ_block[(0, 1)].norm();
        let mean = 0.5 * (p + q);
        let half_gap = (0.5 * (p - q)).hypot(r);
        [mean - half_gap, mean + half_gap]
    }
}

/// Closed-form `U_p(t)` for a constant post-quench field, without the global
/// phase `e^{2it cos φ}` (it cancels in `U ρ U†`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePropagator {
    pub u_block: Matrix2<C64>,
    pub u_single: C64,
    pub global_phase: C64,
}

impl ModePropagator {
    pub fn identity() -> Self {
        Self {
            u_block: Matrix2::identity(),
            u_single: C64::new(1.0, 0.0),
            global_phase: C64::new(1.0, 0.0),
        }
    }
}

/// 4×4 mode Hamiltonian at field `h`.
pub fn mode_hamiltonian(mode: &Mode, h: f64) -> Matrix4<C64> {
    let c = mode.cos_phi();
    let d = mode.delta();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = C64::new(2.0 * h, 0.0);
    m[(0, 1)] = C64::new(0.0, -d);
    m[(1, 0)] = C64::new(0.0, d);
    m[(1, 1)] = C64::new(-4.0 * c - 2.0 * h, 0.0);
    m[(2, 2)] = C64::new(-2.0 * c, 0.0);
    m[(3, 3)] = C64::new(-2.0 * c, 0.0);
    m
}

fn check_kt(kt: f64) -> Result<(), DynamicsError> {
    if kt.is_nan() || kt < 0.0 {
        Err(DynamicsError::NegativeTemperature(kt))
    } else {
        Ok(())
    }
}

/// Normalized thermal state `e^{-βH̃_p(a)} / Tr` of one mode.
pub fn thermal_mode_state(mode: &Mode, a: f64, kt: f64) -> Result<ModeState, DynamicsError> {
    check_kt(kt)?;
    let lambda = mode.lambda(a);
    if lambda < FLAT_LAMBDA {
        return Ok(ModeState::uniform());
    }
    let shift = mode.cos_phi() + a;
    let x = boltzmann_ratio(lambda, kt);
    let x2 = x * x;
    let norm = (1.0 + x) * (1.0 + x);

    let k11 = ((lambda + shift) * x2 + (lambda - shift)) / (2.0 * lambda);
    let k22 = ((lambda - shift) * x2 + (lambda + shift)) / (2.0 * lambda);
    let k12 = C64::new(0.0, mode.delta() * (1.0 - x2) / (4.0 * lambda));

    Ok(ModeState {
        occ_block: Matrix2::new(
            C64::new(k11 / norm, 0.0),
            k12 / norm,
            k12.conj() / norm,
            C64::new(k22 / norm, 0.0),
        ),
        single_occ: x / norm,
    })
}

/// `U_p(t)` for the constant field `b` applied after the quench.
pub fn step_propagator(mode: &Mode, b: f64, t: f64) -> ModePropagator {
    let lambda = mode.lambda(b);
    let shift = mode.cos_phi() + b;
    let delta = mode.delta();
    let cos = (2.0 * t * lambda).cos();
    // sin(2tΛ)/Λ
    let sinc = if lambda < DEGENERATE_LAMBDA {
        2.0 * t
    } else {
        (2.0 * t * lambda).sin() / lambda
    };
    let u11 = C64::new(cos, -shift * sinc);
    let u22 = C64::new(cos, shift * sinc);
    let u12 = C64::new(-0.5 * delta * sinc, 0.0);
    let u21 = C64::new(0.5 * delta * sinc, 0.0);
    ModePropagator {
        u_block: Matrix2::new(u11, u12, u21, u22),
        u_single: C64::new(1.0, 0.0),
        global_phase: C64::from_polar(1.0, 2.0 * t * mode.cos_phi()),
    }
}

/// `U ρ U†`.
pub fn evolve_mode(state: &ModeState, prop: &ModePropagator) -> ModeState {
    ModeState {
        occ_block: prop.u_block * state.occ_block * prop.u_block.adjoint(),
        single_occ: state.single_occ * prop.u_single.norm_sqr(),
    }
}

/// Evolved mode state written directly from its closed-form matrix elements,
/// without building a propagator. `Asymptotic` replaces `sin²(2tΛ(b))` by its
/// phase average `1/2` and `sin(4tΛ(b))` by `0`.
pub fn closed_form_mode_state(
    mode: &Mode,
    a: f64,
    b: f64,
    kt: f64,
    time: TimePoint,
) -> Result<ModeState, DynamicsError> {
    check_kt(kt)?;
    let time = time.validate()?;
    let lambda_a = mode.lambda(a);
    if lambda_a < FLAT_LAMBDA {
        return Ok(ModeState::uniform());
    }
    let c = mode.cos_phi();
    let delta = mode.delta();
    let f = QuenchFactors::new(mode.lambda(b), time);
    let s2 = f.sin2_over_lambda2;

    let x = boltzmann_ratio(lambda_a, kt);
    let e4 = x * x;
    let norm = (1.0 + x) * (1.0 + x);
    // ζ and η with the common factor 2Λ²(b) divided out.
    let zeta = 2.0 * (lambda_a + c + a);
    let eta = 2.0 * (lambda_a - c - a);
    let swing = delta * delta * (b - a) * s2;
    let denom = 4.0 * lambda_a * norm;

    let r11 = ((swing + zeta) * e4 - swing + eta) / denom;
    let r22 = ((-swing + eta) * e4 + swing + zeta) / denom;
    let r12 = C64::new(
        (b - a) * f.sin4_over_lambda,
        1.0 + 2.0 * (a - b) * (c + b) * s2,
    ) * (delta * (1.0 - e4) / denom);

    Ok(ModeState {
        occ_block: Matrix2::new(C64::new(r11, 0.0), r12, r12.conj(), C64::new(r22, 0.0)),
        single_occ: x / norm,
    })
}

/// Time-averaged (`t → ∞`) state of one mode after the quench `a -> b`.
pub fn asymptotic_mode(mode: &Mode, a: f64, b: f64, kt: f64) -> Result<ModeState, DynamicsError> {
    closed_form_mode_state(mode, a, b, kt, TimePoint::Asymptotic)
}

/// Mode state at `time` via the thermal state and the step propagator.
pub fn mode_state_at(
    mode: &Mode,
    a: f64,
    b: f64,
    kt: f64,
    time: TimePoint,
) -> Result<ModeState, DynamicsError> {
    match time.validate()? {
        TimePoint::At(t) => {
            let initial = thermal_mode_state(mode, a, kt)?;
            Ok(evolve_mode(&initial, &step_propagator(mode, b, t)))
        }
        TimePoint::Asymptotic => asymptotic_mode(mode, a, b, kt),
    }
}

type Flat = SVector<f64, 32>;

struct Liouville {
    h: Matrix4<C64>,
}

fn unpack(y: &Flat) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| C64::new(y[2 * (4 * i + j)], y[2 * (4 * i + j) + 1]))
}

fn pack(m: &Matrix4<C64>) -> Flat {
    let mut y = Flat::zeros();
    for i in 0..4 {
        for j in 0..4 {
            y[2 * (4 * i + j)] = m[(i, j)].re;
            y[2 * (4 * i + j) + 1] = m[(i, j)].im;
        }
    }
    y
}

impl System<f64, Flat> for Liouville {
    fn system(&self, _t: f64, y: &Flat, dy: &mut Flat) {
        let rho = unpack(y);
        let commutator = self.h * rho - rho * self.h;
        *dy = pack(&(commutator * C64::new(0.0, -1.0)));
    }
}

/// Integrates `i dρ/dt = [H̃_p(b), ρ]` from the thermal state at field `a`
/// with an adaptive 8th-order Runge–Kutta scheme (`rtol = atol = tol`).
pub fn evolve_mode_numeric(
    mode: &Mode,
    a: f64,
    b: f64,
    kt: f64,
    t: f64,
    tol: f64,
) -> Result<ModeState, DynamicsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(DynamicsError::InvalidTolerance(tol));
    }
    TimePoint::At(t).validate()?;
    let initial = thermal_mode_state(mode, a, kt)?;
    if t == 0.0 {
        return Ok(initial);
    }
    let rhs = Liouville {
        h: mode_hamiltonian(mode, b),
    };
    let mut stepper = Dop853::from_param(
        rhs,
        0.0,
        t,
        t,
        pack(&initial.to_matrix()),
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        t,
        0.0,
        1_000_000,
        1000,
        ode_solvers::OutputType::Sparse,
    );
    stepper
        .integrate()
        .map_err(|e| DynamicsError::Integration(e.to_string()))?;
    let last = stepper
        .y_out()
        .last()
        .ok_or_else(|| DynamicsError::Integration("no output produced".into()))?;
    let rho = unpack(last);
    Ok(ModeState {
        occ_block: rho.fixed_view::<2, 2>(0, 0).into_owned(),
        single_occ: 0.5 * (rho[(2, 2)].re + rho[(3, 3)].re),
    })
}
