//! Exact quench dynamics of the anisotropic XY ring in a transverse field.
//!
//! The chain is mapped to free fermions; every momentum pair evolves in a
//! four-dimensional space, two-point contractions follow from mode sums, and
//! spin correlators are Pfaffians of those contractions. Nearest and
//! next-nearest neighbour entanglement is read off the resulting two-site
//! X-state. A dense exact-diagonalization oracle for small rings checks the
//! whole pipeline.
//!
//! ```
//! use xy_quench::{pipeline::observe, ChainConfig, TimePoint};
//!
//! let config = ChainConfig::new(400, 1.0, 0.5, 1.001, 0.5)?;
//! let late = observe(&config, 1, TimePoint::Asymptotic)?;
//! assert!(late.concurrence >= 0.0 && late.concurrence <= 1.0);
//! # Ok::<(), xy_quench::Error>(())
//! ```

pub mod cli;
pub mod correlations;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod pfaffian;
pub mod pipeline;
pub mod summation;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/chain-and-modes.md")]
mod book_chain_and_modes {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/quench-dynamics.md")]
mod book_quench_dynamics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/correlations.md")]
mod book_correlations {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/entanglement.md")]
mod book_entanglement {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/oracle.md")]
mod book_oracle {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

pub use dynamics::TimePoint;
pub use error::{Error, Result};
pub use lattice::{ChainConfig, MomentumGrid};
pub use pipeline::{observe, Observables};
