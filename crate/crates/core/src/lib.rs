//! Numerical laboratory for quadratic-phase ("Newman phase") magnitude
//! recovery.
//!
//! Attaching the chirp `π k² / N` to a magnitude spectrum, taking the
//! inverse DFT and reading off the pointwise modulus gives back a
//! time-reversed copy of the spectrum, approximately, once `N` is large.
//! This crate implements that map exactly and measures how well it works:
//!
//! - [`spectral`]: the pipeline itself and a brute-force DFT oracle.
//! - [`generators`]: sampled test spectra and seeded random ensembles.
//! - [`metrics`]: error norms, convergence sweeps, ensemble statistics and
//!   overshoot near jumps.
//! - [`phase_opt`]: ensemble phase optimization with an analytic gradient.
//! - [`io`]: the CSV and JSON artifact formats.
//! - [`extremal`]: L1 norm of the unimodular extremal polynomial and the
//!   crest factor of chirp-phased multitones.
//!
//! ```
//! use newman_lab::spectral::{newman_phase, reconstruct, Normalization, ReversalConvention, Spectrum};
//!
//! let n = 1024;
//! let m: Vec<f64> = (0..n)
//!     .map(|k| {
//!         let w = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / n as f64;
//!         2.0 + w.sin()
//!     })
//!     .collect();
//! let m = Spectrum::new(m).unwrap();
//! let out = reconstruct(&m, &newman_phase(n).unwrap(), Normalization::Unitary, ReversalConvention::Modular).unwrap();
//! let worst = m.iter().zip(out.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
//! assert!(worst < 1e-2);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal;
pub mod generators;
pub mod io;
pub mod metrics;
pub mod phase_opt;
pub mod spectral;

pub use error::{Error, Result};
