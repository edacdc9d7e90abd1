//! Exact and stochastic computations for the block-counting process of the
//! Bolthausen–Sznitman coalescent and its scaling limit, the Mittag–Leffler
//! process.
//!
//! * [`specfun`]: log-gamma, digamma, complex log-gamma, Stirling tables and a
//!   bounded-precision float context.
//! * [`coalescent`]: generator, path simulation, exact transition law and
//!   (joint) factorial moments of the block-counting chain.
//! * [`mlprocess`]: Mittag–Leffler moments, samplers, kernel, semigroup,
//!   joint moments and the subordinator representation.
//! * [`harness`]: reproducible experiments comparing the two.
//!
//! Monte Carlo work fans out over replicates through [`montecarlo`], which
//! uses rayon when the `parallel` feature is enabled and runs sequentially
//! otherwise. Results are bit-identical either way.

pub mod coalescent;
pub mod error;
pub mod harness;
pub mod mlprocess;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
