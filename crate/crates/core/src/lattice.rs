//! Chain configuration, momentum grid and single-mode dispersion.
//!
//! The coupling is fixed to `J = 1`. Temperatures are given directly in
//! energy units (`kT`), with `kT = 0` selecting analytic ground-state limits
//! rather than a large-`β` evaluation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("number of sites must be even and at least 4, got {0}")]
    InvalidSites(usize),
    #[error("temperature must be non-negative, got kT = {0}")]
    NegativeTemperature(f64),
    #[error("parameter `{name}` must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
}

/// Which set of lattice momenta the fermionized chain uses.
///
/// `AntiPeriodic` places the `N/2` momenta at `(2p - 1)π/N`, the sector that
/// contains the ground state of the periodic spin chain. `Periodic` places
/// them at `2πp/N`, which includes `φ = π` and omits `φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentumGrid {
    #[default]
    AntiPeriodic,
    Periodic,
}

impl std::str::FromStr for MomentumGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "anti-periodic" | "antiperiodic" => Ok(MomentumGrid::AntiPeriodic),
            "periodic" => Ok(MomentumGrid::Periodic),
            other => Err(format!("unknown momentum grid `{other}` (expected anti-periodic or periodic)")),
        }
    }
}

/// Static problem definition: ring of `n_sites` spins, anisotropy, temperature
/// and the field step `a -> b` applied at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    n_sites: usize,
    gamma: f64,
    kt: f64,
    field_before: f64,
    field_after: f64,
    grid: MomentumGrid,
}

impl ChainConfig {
    pub fn new(
        n_sites: usize,
        gamma: f64,
        kt: f64,
        field_before: f64,
        field_after: f64,
    ) -> Result<Self, ConfigError> {
        if n_sites < 4 || !n_sites.is_multiple_of(2) {
            return Err(ConfigError::InvalidSites(n_sites));
        }
        for (name, value) in [
            ("gamma", gamma),
            ("field_before", field_before),
            ("field_after", field_after),
        ] {
            if !value.is_finite() {
                return Err(ConfigError::NotFinite { name, value });
            }
        }
        // kT = +inf is the maximally mixed limit and is allowed.
        if kt.is_nan() {
            return Err(ConfigError::NotFinite { name: "kt", value: kt });
        }
        if kt < 0.0 {
            return Err(ConfigError::NegativeTemperature(kt));
        }
        Ok(Self {
            n_sites,
            gamma,
            kt,
            field_before,
            field_after,
            grid: MomentumGrid::default(),
        })
    }

    /// Equilibrium configuration: no quench, `a = b = h`.
    pub fn equilibrium(n_sites: usize, gamma: f64, kt: f64, h: f64) -> Result<Self, ConfigError> {
        Self::new(n_sites, gamma, kt, h, h)
    }

    pub fn with_grid(mut self, grid: MomentumGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_sites(self, n_sites: usize) -> Result<Self, ConfigError> {
        Self::new(n_sites, self.gamma, self.kt, self.field_before, self.field_after)
            .map(|c| c.with_grid(self.grid))
    }

    pub fn with_fields(self, field_before: f64, field_after: f64) -> Result<Self, ConfigError> {
        Self::new(self.n_sites, self.gamma, self.kt, field_before, field_after)
            .map(|c| c.with_grid(self.grid))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }

    /// Field `a` before the quench.
    pub fn field_before(&self) -> f64 {
        self.field_before
    }

    /// Field `b` after the quench.
    pub fn field_after(&self) -> f64 {
        self.field_after
    }

    pub fn grid(&self) -> MomentumGrid {
        self.grid
    }

    /// `β = 1/kT`, or `None` at zero temperature.
    pub fn beta(&self) -> Option<f64> {
        (self.kt > 0.0).then(|| 1.0 / self.kt)
    }
}

/// One momentum pair `(p, -p)` of the fermionized chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub p: usize,
    pub phi: f64,
    cos_phi: f64,
    sin_phi: f64,
    gamma: f64,
}

impl Mode {
    fn new(p: usize, n_sites: usize, gamma: f64, grid: MomentumGrid) -> Self {
        let (phi, cos_phi, sin_phi) = match grid {
            MomentumGrid::Periodic if 2 * p == n_sites => (PI, -1.0, 0.0),
            MomentumGrid::Periodic => {
                let phi = 2.0 * PI * p as f64 / n_sites as f64;
                (phi, phi.cos(), phi.sin())
            }
            MomentumGrid::AntiPeriodic => {
                let phi = (2 * p - 1) as f64 * PI / n_sites as f64;
                (phi, phi.cos(), phi.sin())
            }
        };
        Self {
            p,
            phi,
            cos_phi,
            sin_phi,
            gamma,
        }
    }

    /// Mode at an arbitrary momentum `φ`, outside any lattice grid (`p = 0`).
    pub fn at_momentum(phi: f64, gamma: f64) -> Self {
        Self {
            p: 0,
            phi,
            cos_phi: phi.cos(),
            sin_phi: phi.sin(),
            gamma,
        }
    }

    pub fn cos_phi(&self) -> f64 {
        self.cos_phi
    }

    pub fn sin_phi(&self) -> f64 {
        self.sin_phi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Diagonal single-particle energy `α_p = -2 cos φ - 2h`.
    pub fn alpha(&self, h: f64) -> f64 {
        -2.0 * self.cos_phi - 2.0 * h
    }

    /// Pairing amplitude `δ_p = 2γ sin φ`.
    pub fn delta(&self) -> f64 {
        2.0 * self.gamma * self.sin_phi
    }

    /// `Λ(h)` for this mode.
    pub fn lambda(&self, h: f64) -> f64 {
        (self.cos_phi + h).hypot(self.gamma * self.sin_phi)
    }
}

/// `Λ(h) = sqrt((cos φ + h)² + γ² sin² φ)`.
pub fn dispersion(phi: f64, h: f64, gamma: f64) -> f64 {
    (phi.cos() + h).hypot(gamma * phi.sin())
}

/// The `N/2` modes `p = 1..=N/2`, in order of increasing `φ`.
pub fn mode_grid(config: &ChainConfig) -> Vec<Mode> {
    let n = config.n_sites();
    (1..=n / 2)
        .map(|p| Mode::new(p, n, config.gamma(), config.grid()))
        .collect()
}

/// Thermal factor `tanh(βΛ)`, with the `kT = 0` limit taken analytically.
///
/// A mode with `Λ = 0` has a fully degenerate spectrum, so its state is
/// uniform and the factor is zero at every temperature.
pub fn thermal_tanh(lambda: f64, kt: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else if kt == 0.0 {
        1.0
    } else {
        (lambda / kt).tanh()
    }
}

/// Boltzmann ratio `e^{-2βΛ}` between single occupation and the pair ground
/// level; zero at `kT = 0` for `Λ > 0`.
pub fn boltzmann_ratio(lambda: f64, kt: f64) -> f64 {
    if lambda == 0.0 {
        1.0
    } else if kt == 0.0 {
        0.0
    } else {
        (-2.0 * lambda / kt).exp()
    }
}
