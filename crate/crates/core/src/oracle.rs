//! Exact diagonalization of the periodic spin chain for small `N`.
//!
//! Basis states are bit strings with site 0 as the most significant bit and
//! bit value 0 meaning spin up (`σ^z = +1`), so the two-site reduction lands
//! in the `(↑↑, ↑↓, ↓↑, ↓↓)` order used by [`crate::entanglement`].

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::entanglement::{concurrence_general, EntanglementError};

pub const MIN_SITES: usize = 4;
pub const MAX_SITES: usize = 12;
/// Energies within this distance of the minimum belong to the ground space.
pub const GROUND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle supports {MIN_SITES}..={MAX_SITES} sites, got {0}")]
    SiteCount(usize),
    #[error("site pair ({i}, {j}) is invalid for {n_sites} sites")]
    SitePair { i: usize, j: usize, n_sites: usize },
    #[error("temperature must be non-negative, got kT = {0}")]
    NegativeTemperature(f64),
    #[error("time must be non-negative and finite, got t = {0}")]
    InvalidTime(f64),
    #[error("parameter {0} is not finite")]
    NotFinite(&'static str),
    #[error("operator has a nonzero imaginary part; a real symmetric Hamiltonian is required")]
    NotReal,
    #[error("operator dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

/// Complex `2^N × 2^N` operator stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_sites: usize,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl DenseOperator {
    fn real(n_sites: usize, re: DMatrix<f64>) -> Self {
        let dim = re.nrows();
        Self {
            n_sites,
            re,
            im: DMatrix::zeros(dim, dim),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn real_part(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn imag_part(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        C64::new(self.re[(i, j)], self.im[(i, j)])
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.get(i, j))
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&v| v == 0.0)
    }

    pub fn trace(&self) -> C64 {
        C64::new(self.re.trace(), self.im.trace())
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let re = (&self.re - self.re.transpose()).amax();
        let im = (&self.im + self.im.transpose()).amax();
        re.max(im)
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &DenseOperator) -> C64 {
        let re = self.re.component_mul(&other.re.transpose()).sum()
            - self.im.component_mul(&other.im.transpose()).sum();
        let im = self.re.component_mul(&other.im.transpose()).sum()
            + self.im.component_mul(&other.re.transpose()).sum();
        C64::new(re, im)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.re - &other.re).amax().max((&self.im - &other.im).amax())
    }
}

fn check_sites(n: usize) -> Result<(), OracleError> {
    if (MIN_SITES..=MAX_SITES).contains(&n) {
        Ok(())
    } else {
        Err(OracleError::SiteCount(n))
    }
}

fn bit(state: usize, site: usize, n: usize) -> usize {
    (state >> (n - 1 - site)) & 1
}

/// Periodic XY Hamiltonian with `J = 1` and uniform field `h`.
pub fn build_hamiltonian(n: usize, gamma: f64, h: f64) -> Result<DenseOperator, OracleError> {
    check_sites(n)?;
    if !gamma.is_finite() {
        return Err(OracleError::NotFinite("gamma"));
    }
    if !h.is_finite() {
        return Err(OracleError::NotFinite("h"));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let ups = n as f64 - 2.0 * s.count_ones() as f64;
        m[(s, s)] = -h * ups;
        for i in 0..n {
            let j = (i + 1) % n;
            let flipped = s ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j));
            // σ^xσ^x + σ^yσ^y hopping for antiparallel bits, pairing for parallel ones.
            m[(flipped, s)] += if bit(s, i, n) == bit(s, j, n) { -gamma } else { -1.0 };
        }
    }
    Ok(DenseOperator::real(n, m))
}

/// Eigen-decomposition of a real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_sites: usize,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn new(h: &DenseOperator) -> Result<Self, OracleError> {
        if !h.is_real() {
            return Err(OracleError::NotReal);
        }
        let eig = h.re.clone().symmetric_eigen();
        Ok(Self {
            n_sites: h.n_sites,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies.min()
    }

    fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `V diag(w) Vᵀ`.
    fn weighted(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= w[k];
        }
        &scaled * self.vectors.transpose()
    }
}

fn check_kt(kt: f64) -> Result<(), OracleError> {
    if kt.is_nan() {
        Err(OracleError::NotFinite("kT"))
    } else if kt < 0.0 {
        Err(OracleError::NegativeTemperature(kt))
    } else {
        Ok(())
    }
}

fn thermal_from_spectrum(spec: &Spectrum, kt: f64) -> DenseOperator {
    let e0 = spec.ground_energy();
    let w = spec.energies.map(|e| {
        let gap = e - e0;
        if kt == 0.0 {
            if gap < GROUND_TOLERANCE {
                1.0
            } else {
                0.0
            }
        } else if kt.is_infinite() {
            1.0
        } else {
            (-gap / kt).exp()
        }
    });
    let z = w.sum();
    DenseOperator::real(spec.n_sites, spec.weighted(&(w / z)))
}

/// `e^{-βH} / Tr`, or the normalized ground-space projector at `kT = 0`.
pub fn thermal_state(h: &DenseOperator, kt: f64) -> Result<DenseOperator, OracleError> {
    check_kt(kt)?;
    Ok(thermal_from_spectrum(&Spectrum::new(h)?, kt))
}

/// State written in the eigenbasis of a fixed Hamiltonian, ready for repeated
/// evolution to different times.
#[derive(Debug, Clone)]
struct RotatedState {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl RotatedState {
    fn new(state: &DenseOperator, spec: &Spectrum) -> Result<Self, OracleError> {
        if state.dim() != spec.dim() {
            return Err(OracleError::DimensionMismatch(state.dim(), spec.dim()));
        }
        let v = &spec.vectors;
        let vt = v.transpose();
        Ok(Self {
            re: &vt * &state.re * v,
            im: &vt * &state.im * v,
        })
    }

    fn at(&self, spec: &Spectrum, t: f64) -> DenseOperator {
        let dim = spec.dim();
        let e = &spec.energies;
        let mut re = DMatrix::zeros(dim, dim);
        let mut im = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for j in 0..dim {
                let phase = C64::from_polar(1.0, -(e[j] - e[k]) * t);
                let z = C64::new(self.re[(j, k)], self.im[(j, k)]) * phase;
                re[(j, k)] = z.re;
                im[(j, k)] = z.im;
            }
        }
        let v = &spec.vectors;
        let vt = v.transpose();
        DenseOperator {
            n_sites: spec.n_sites,
            re: v * re * &vt,
            im: v * im * &vt,
        }
    }
}

fn check_time(t: f64) -> Result<(), OracleError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(OracleError::InvalidTime(t))
    }
}

/// `U ρ U†` with `U = e^{-i H t}`.
pub fn evolve(state0: &DenseOperator, h_after: &DenseOperator, t: f64) -> Result<DenseOperator, OracleError> {
    check_time(t)?;
    if t == 0.0 {
        if state0.dim() != h_after.dim() {
            return Err(OracleError::DimensionMismatch(state0.dim(), h_after.dim()));
        }
        return Ok(state0.clone());
    }
    let spec = Spectrum::new(h_after)?;
    Ok(RotatedState::new(state0, &spec)?.at(&spec, t))
}

/// Partial trace onto sites `i` and `j`, with `i` the more significant qubit.
pub fn reduce_pair(state: &DenseOperator, i: usize, j: usize) -> Result<Matrix4<C64>, OracleError> {
    let n = state.n_sites;
    if i == j || i >= n || j >= n {
        return Err(OracleError::SitePair { i, j, n_sites: n });
    }
    let (mi, mj) = (1usize << (n - 1 - i), 1usize << (n - 1 - j));
    let pair_index = |s: usize| 2 * usize::from(s & mi != 0) + usize::from(s & mj != 0);
    let with_pair = |s: usize, p: usize| {
        let mut s = s & !mi & !mj;
        if p & 2 != 0 {
            s |= mi;
        }
        if p & 1 != 0 {
            s |= mj;
        }
        s
    };
    let mut rho = Matrix4::<C64>::zeros();
    for row in 0..state.dim() {
        let r = pair_index(row);
        for c in 0..4 {
            rho[(r, c)] += state.get(row, with_pair(row, c));
        }
    }
    Ok(rho)
}

/// `(1/N) Σ_i ⟨σ^z_i⟩ / 2`.
pub fn magnetization(state: &DenseOperator) -> f64 {
    let n = state.n_sites;
    let total: f64 = (0..state.dim())
        .map(|s| state.re[(s, s)] * (n as f64 - 2.0 * s.count_ones() as f64))
        .sum();
    total / (2.0 * n as f64)
}

fn pauli_pair(which: char) -> Matrix4<C64> {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let single = match which {
        'x' => nalgebra::Matrix2::new(o, l, l, o),
        'y' => nalgebra::Matrix2::new(o, -i, i, o),
        _ => nalgebra::Matrix2::new(l, o, o, -l),
    };
    single.kronecker(&single)
}

/// Observables of one site pair in an exact state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairObservables {
    pub magnetization: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub concurrence: f64,
}

impl PairObservables {
    pub fn from_state(state: &DenseOperator, d: usize) -> Result<Self, OracleError> {
        let rho = reduce_pair(state, 0, d)?;
        let quarter = |c: char| (rho * pauli_pair(c)).trace().re / 4.0;
        Ok(Self {
            magnetization: magnetization(state),
            sx: quarter('x'),
            sy: quarter('y'),
            sz: quarter('z'),
            concurrence: concurrence_general(&rho)?,
        })
    }
}

/// Cached spectra for the quench `a -> b` starting from the thermal state at
/// field `a`.
#[derive(Debug, Clone)]
pub struct QuenchOracle {
    n_sites: usize,
    h_after: DenseOperator,
    after: Spectrum,
    rotated: RotatedState,
    initial: DenseOperator,
}

impl QuenchOracle {
    pub fn new(n: usize, gamma: f64, kt: f64, a: f64, b: f64) -> Result<Self, OracleError> {
        check_kt(kt)?;
        let h_before = build_hamiltonian(n, gamma, a)?;
        let initial = thermal_from_spectrum(&Spectrum::new(&h_before)?, kt);
        let h_after = build_hamiltonian(n, gamma, b)?;
        let after = Spectrum::new(&h_after)?;
        let rotated = RotatedState::new(&initial, &after)?;
        Ok(Self {
            n_sites: n,
            h_after,
            after,
            rotated,
            initial,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn initial_state(&self) -> &DenseOperator {
        &self.initial
    }

    pub fn hamiltonian_after(&self) -> &DenseOperator {
        &self.h_after
    }

    pub fn state_at(&self, t: f64) -> Result<DenseOperator, OracleError> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        Ok(self.rotated.at(&self.after, t))
    }

    pub fn observe(&self, d: usize, t: f64) -> Result<PairObservables, OracleError> {
        PairObservables::from_state(&self.state_at(t)?, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::magnetization_z;
    use crate::dynamics::TimePoint;
    use crate::lattice::ChainConfig;

    fn parity(n: usize) -> DenseOperator {
        let dim = 1 << n;
        let diag = DVector::from_fn(dim, |s, _| if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 });
        DenseOperator::real(n, DMatrix::from_diagonal(&diag))
    }

    #[test]
    fn site_count_is_enforced() {
        assert_eq!(build_hamiltonian(3, 1.0, 0.0), Err(OracleError::SiteCount(3)));
        assert_eq!(build_hamiltonian(14, 1.0, 0.0), Err(OracleError::SiteCount(14)));
        assert!(matches!(QuenchOracle::new(13, 1.0, 0.0, 1.0, 1.0), Err(OracleError::SiteCount(13))));
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(4, 1.0, 0.0).unwrap();
        let mut e: Vec<f64> = Spectrum::new(&h).unwrap().energies().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        for (lo, hi) in e.iter().zip(e.iter().rev()) {
            assert!((lo + hi).abs() < 1e-12);
        }
        let h = build_hamiltonian(4, 0.3, 0.7).unwrap();
        assert_eq!(h.get(0, 0), C64::new(-4.0 * 0.7, 0.0));
        assert_eq!(h.hermiticity_error(), 0.0);
        for (gamma, field) in [(1.0, 0.0), (0.4, 1.3), (0.0, -0.5)] {
            let h = build_hamiltonian(6, gamma, field).unwrap();
            let p = parity(6);
            let comm = &h.re * &p.re - &p.re * &h.re;
            assert_eq!(comm.amax(), 0.0);
        }
    }

    #[test]
    fn single_bond_matrix_elements() {
        // |↑↑↑↑⟩ couples to states with one adjacent pair flipped with amplitude -γ
        let h = build_hamiltonian(4, 0.25, 0.0).unwrap();
        assert_eq!(h.get(0b1100, 0), C64::new(-0.25, 0.0));
        assert_eq!(h.get(0b1001, 0), C64::new(-0.25, 0.0));
        assert_eq!(h.get(0b1010, 0), C64::new(0.0, 0.0));
        // hopping ↑↓ -> ↓↑ has amplitude -1
        assert_eq!(h.get(0b0100, 0b1000), C64::new(-1.0, 0.0));
    }

    #[test]
    fn thermal_state_properties() {
        let h = build_hamiltonian(6, 0.7, 0.9).unwrap();
        let dim = 64;
        let hot = thermal_state(&h, f64::INFINITY).unwrap();
        assert!((hot.re.clone() - DMatrix::identity(dim, dim) / dim as f64).amax() < 1e-14);
        for kt in [0.0, 0.3, 2.0] {
            let rho = thermal_state(&h, kt).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(rho.hermiticity_error() < 1e-12);
            let comm = &rho.re * &h.re - &h.re * &rho.re;
            assert!(comm.amax() < 1e-10);
            let min = rho.re.clone().symmetric_eigen().eigenvalues.min();
            assert!(min > -1e-12);
        }
        assert_eq!(thermal_state(&h, -1.0).unwrap_err(), OracleError::NegativeTemperature(-1.0));
    }

    #[test]
    fn ground_projector_is_idempotent_up_to_normalization() {
        let h = build_hamiltonian(6, 1.0, 0.5).unwrap();
        let rho = thermal_state(&h, 0.0).unwrap();
        let rank = (1.0 / (&rho.re * &rho.re).trace()).round();
        let p = &rho.re * rank;
        assert!((&p * &p - &p).amax() < 1e-10);
    }

    #[test]
    fn evolution_properties() {
        let h_a = build_hamiltonian(6, 1.0, 1.001).unwrap();
        let h_b = build_hamiltonian(6, 1.0, 0.5).unwrap();
        let rho0 = thermal_state(&h_a, 0.5).unwrap();
        assert_eq!(evolve(&rho0, &h_b, 0.0).unwrap(), rho0);

        let e0 = rho0.trace_product(&h_b).re;
        let spec0 = rho0.to_complex().symmetric_eigenvalues();
        let mut ev0: Vec<f64> = spec0.iter().copied().collect();
        ev0.sort_by(f64::total_cmp);
        for t in [0.5, 3.0] {
            let rho = evolve(&rho0, &h_b, t).unwrap();
            assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
            assert!((rho.trace_product(&h_b).re - e0).abs() < 1e-10);
            assert!(rho.hermiticity_error() < 1e-12);
            let mut ev: Vec<f64> = rho.to_complex().symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            for (x, y) in ev.iter().zip(&ev0) {
                assert!((x - y).abs() < 1e-10);
            }
        }
        let stationary = evolve(&rho0, &h_a, 4.0).unwrap();
        assert!(stationary.max_abs_diff(&rho0) < 1e-10);
        assert!(matches!(evolve(&rho0, &h_b, -1.0), Err(OracleError::InvalidTime(_))));
    }

    #[test]
    fn oracle_matches_direct_evolution() {
        let oracle = QuenchOracle::new(6, 0.6, 0.4, 1.2, 0.3).unwrap();
        let direct = evolve(oracle.initial_state(), oracle.hamiltonian_after(), 1.7).unwrap();
        assert!(oracle.state_at(1.7).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn pair_reduction() {
        let dim = 1 << 5;
        let mut up = DMatrix::zeros(dim, dim);
        up[(0, 0)] = 1.0;
        let up = DenseOperator::real(5, up);
        let rho = reduce_pair(&up, 1, 3).unwrap();
        let mut expected = Matrix4::<C64>::zeros();
        expected[(0, 0)] = C64::new(1.0, 0.0);
        assert_eq!(rho, expected);
        assert_eq!(magnetization(&up), 0.5);
        assert!(matches!(reduce_pair(&up, 2, 2), Err(OracleError::SitePair { .. })));
        assert!(matches!(reduce_pair(&up, 0, 5), Err(OracleError::SitePair { .. })));

        // |↑↓⟩ on sites (0, 1) of a 4-site product state
        let mut s = DMatrix::zeros(16, 16);
        s[(0b0100, 0b0100)] = 1.0;
        let rho = reduce_pair(&DenseOperator::real(4, s), 0, 1).unwrap();
        assert_eq!(rho[(1, 1)], C64::new(1.0, 0.0));
    }

    #[test]
    fn pair_reduction_is_translation_invariant() {
        let oracle = QuenchOracle::new(8, 1.0, 0.5, 1.001, 0.5).unwrap();
        for t in [0.0, 1.3] {
            let rho = oracle.state_at(t).unwrap();
            let first = reduce_pair(&rho, 0, 1).unwrap();
            assert!((first.trace().re - 1.0).abs() < 1e-12);
            assert!((first - first.adjoint()).norm() < 1e-12);
            for i in 1..8 {
                let other = reduce_pair(&rho, i, (i + 1) % 8).unwrap();
                assert!((other - first).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn equilibrium_magnetization_schedule() {
        let mut errors = Vec::new();
        for n in [6, 8, 10] {
            let h = build_hamiltonian(n, 1.0, 0.8).unwrap();
            let ed = magnetization(&thermal_state(&h, 0.5).unwrap());
            let config = ChainConfig::equilibrium(n, 1.0, 0.5, 0.8).unwrap();
            let free = magnetization_z(&config, TimePoint::At(0.0)).unwrap();
            errors.push((ed - free).abs());
        }
        assert!(errors[1] <= 0.06, "{errors:?}");
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }

    #[test]
    fn ground_state_observables_are_exact_at_zero_temperature() {
        // Without thermal weight on the odd sector the even-sector solution is exact.
        let n = 8;
        let oracle = QuenchOracle::new(n, 1.0, 0.0, 1.001, 0.5).unwrap();
        let config = ChainConfig::new(n, 1.0, 0.0, 1.001, 0.5).unwrap();
        let table = crate::correlations::ContractionTable::new(&config, TimePoint::At(1.0), 2).unwrap();
        let ed = oracle.observe(1, 1.0).unwrap();
        assert!((ed.magnetization - table.magnetization()).abs() < 1e-10);
        assert!((ed.sx - table.correlator_xx(1).unwrap()).abs() < 1e-10);
        assert!((ed.sy - table.correlator_yy(1).unwrap()).abs() < 1e-10);
        assert!((ed.sz - table.correlator_zz(1).unwrap()).abs() < 1e-10);
    }
}
