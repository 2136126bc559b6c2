//! Quantum harmonic analysis on the finite phase space ℤ_d × ℤ_d.
//!
//! The crate covers the data operator of a set of signals, the
//! function-operator and operator-operator convolutions, augmentation of a
//! dataset by time-frequency shifts over a phase-space domain, and the
//! entropy and concentration measures that relate the two.

pub mod augmentation;
pub mod datasets;
pub mod error;
mod fft;
pub mod metrics;
pub mod operators;
pub mod spectral;
pub mod tf;

pub use error::{QhaError, Result};
pub use num_complex::Complex64;
