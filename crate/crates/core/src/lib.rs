//! Random pure quantum states with tunable entanglement.
//!
//! This crate samples bipartition spectra from distributions on the unit
//! n-sphere (uniform over the positive orthant, or Gaussian-concentrated
//! around the maximally entangled point with width σ), reconstructs global
//! matrix-product states compatible with the sampled spectra, and provides
//! the ensemble-level diagnostics: entropy and bond-dimension surfaces,
//! admission rates, log-spectrum regressions, and the σ_critical phase
//! boundary between volume-law and area-law behavior.
//!
//! Modules:
//!
//! * [`sphere`] — eigenvalue sampling on the n-sphere and truncation;
//! * [`oracles`] — closed-form reference entropies and moments;
//! * [`mps`] — matrix-product-state representation and canonical forms;
//! * [`construct`] — warmup recursion plus sweeping refinement that builds
//!   an MPS matching target Schmidt spectra;
//! * [`diagnostics`] — Monte Carlo ensemble statistics and regressions;
//! * [`rng`] — reproducible per-sample random substreams.

pub mod construct;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod mps;
pub mod oracles;
pub mod rng;
pub mod sphere;
pub mod table;

pub use error::{Error, Result};
