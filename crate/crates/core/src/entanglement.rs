//! Two-site reduced density matrix, concurrence and entanglement of formation.
//!
//! Basis order is `(↑↑, ↑↓, ↓↑, ↓↓)` with `↑` the `+1` eigenstate of `σ^z` and
//! the left site as the most significant qubit.

use nalgebra::{Complex, Matrix4, Vector4};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Slack allowed below zero on a diagonal entry before it counts as an error.
pub const DIAGONAL_TOLERANCE: f64 = 1e-10;
/// Slack allowed on X-state positivity and on density-matrix eigenvalues.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("input {0} is not finite")]
    NotFinite(&'static str),
    #[error("diagonal element ρ{index}{index} = {value:e} is negative")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("coherence |{label}| = {coherence:e} exceeds the positivity bound {bound:e}")]
    Positivity {
        label: &'static str,
        coherence: f64,
        bound: f64,
    },
    #[error("trace is {0}, expected 1")]
    Trace(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("concurrence {0} is outside [0, 1]")]
    ConcurrenceOutOfRange(f64),
}

/// X-form two-qubit state of a translation-invariant chain: a real diagonal
/// and the two coherences `ρ14`, `ρ23`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteState {
    rho: Matrix4<C64>,
    clamped: usize,
}

impl TwoSiteState {
    /// Builds an X-state from `ρ11, ρ22, ρ33, ρ44` and the upper coherences.
    pub fn from_elements(diagonal: [f64; 4], r14: C64, r23: C64) -> Result<Self, EntanglementError> {
        let finite = |z: C64| z.re.is_finite() && z.im.is_finite();
        if diagonal.iter().any(|v| !v.is_finite()) || !finite(r14) || !finite(r23) {
            return Err(EntanglementError::NotFinite("X-state element"));
        }
        let mut diag = diagonal;
        let mut clamped = 0;
        for (k, v) in diag.iter_mut().enumerate() {
            if *v < -DIAGONAL_TOLERANCE {
                return Err(EntanglementError::NegativeDiagonal { index: k + 1, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
                clamped += 1;
            }
        }
        let trace: f64 = diag.iter().sum();
        if (trace - 1.0).abs() > DIAGONAL_TOLERANCE {
            return Err(EntanglementError::Trace(trace));
        }
        let [r11, r22, r33, r44] = diag;
        for (label, coherence, bound) in [
            ("ρ14", r14.norm(), (r11 * r44).sqrt()),
            ("ρ23", r23.norm(), (r22 * r33).sqrt()),
        ] {
            if coherence > bound + POSITIVITY_TOLERANCE {
                return Err(EntanglementError::Positivity {
                    label,
                    coherence,
                    bound,
                });
            }
        }
        let mut rho = Matrix4::from_diagonal(&Vector4::from(diag).map(|v| C64::new(v, 0.0)));
        rho[(0, 3)] = r14;
        rho[(3, 0)] = r14.conj();
        rho[(1, 2)] = r23;
        rho[(2, 1)] = r23.conj();
        Ok(Self { rho, clamped })
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    /// Number of diagonal entries that were rounded up from tiny negatives.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.rho[(i, j)]
    }

    fn diagonal(&self, k: usize) -> f64 {
        self.rho[(k, k)].re
    }
}

/// `ρ` from the magnetization and the three correlators at one offset, with
/// real coherences `ρ14 = S^x - S^y` and `ρ23 = S^x + S^y`.
pub fn two_site_state(mz: f64, sx: f64, sy: f64, sz: f64) -> Result<TwoSiteState, EntanglementError> {
    two_site_state_with_cross(mz, sx, sy, sz, 0.0, 0.0)
}

/// As [`two_site_state`], adding the imaginary parts carried by the mixed
/// correlators `sxy = ⟨S^x_l S^y_m⟩` and `syx = ⟨S^y_l S^x_m⟩`:
/// `ρ14 = S^x - S^y - i(sxy + syx)` and `ρ23 = S^x + S^y + i(sxy - syx)`.
pub fn two_site_state_with_cross(
    mz: f64,
    sx: f64,
    sy: f64,
    sz: f64,
    sxy: f64,
    syx: f64,
) -> Result<TwoSiteState, EntanglementError> {
    for (name, v) in [("mz", mz), ("sx", sx), ("sy", sy), ("sz", sz), ("sxy", sxy), ("syx", syx)] {
        if !v.is_finite() {
            return Err(EntanglementError::NotFinite(name));
        }
    }
    TwoSiteState::from_elements(
        [mz + sz + 0.25, -sz + 0.25, -sz + 0.25, -mz + sz + 0.25],
        C64::new(sx - sy, -(sxy + syx)),
        C64::new(sx + sy, sxy - syx),
    )
}

/// Concurrence of an X-state from its closed-form `λ` values.
pub fn concurrence_x(state: &TwoSiteState) -> f64 {
    let outer = (state.diagonal(0) * state.diagonal(3)).sqrt();
    let inner = (state.diagonal(1) * state.diagonal(2)).sqrt();
    let c14 = state.rho[(0, 3)].norm();
    let c23 = state.rho[(1, 2)].norm();
    let mut lambdas = [outer + c14, inner + c23, (outer - c14).abs(), (inner - c23).abs()];
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

// σ^y ⊗ σ^y
fn spin_flip() -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
///
/// The eigenvalues of `ρ ρ̃` are obtained from the Hermitian product
/// `√ρ ρ̃ √ρ`, which shares its spectrum.
pub fn concurrence_general(rho: &Matrix4<C64>) -> Result<f64, EntanglementError> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EntanglementError::NotFinite("density matrix"));
    }
    let skew = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if skew > 1e-10 {
        return Err(EntanglementError::NotHermitian(skew));
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > DIAGONAL_TOLERANCE {
        return Err(EntanglementError::Trace(trace));
    }
    let hermitian: Matrix4<Complex<f64>> = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen();
    if let Some(&min) = eig.eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -POSITIVITY_TOLERANCE {
            return Err(EntanglementError::NegativeEigenvalue(min));
        }
    }
    let sqrt_diag = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_diag) * eig.eigenvectors.adjoint();

    let flip = spin_flip();
    let tilde = flip * rho.conjugate() * flip;
    let product = sqrt_rho * tilde * sqrt_rho;
    let product = (product + product.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = product
        .symmetric_eigenvalues()
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `E = h((1 + √(1 - C²)) / 2)` with `h` the binary entropy.
pub fn entanglement_of_formation(c: f64) -> Result<f64, EntanglementError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(EntanglementError::ConcurrenceOutOfRange(c));
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}
