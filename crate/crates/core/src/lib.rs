//! Propagators of quadratic Lagrangian systems with the correct Maslov phase.
//!
//! Four independent routes to the same kernel are provided and cross-checked:
//!
//! - closed forms with the Maslov integer made explicit ([`kernels`]),
//! - the Fourier-mode product over second-variation eigenvalues ([`modeproduct`]),
//! - the Van Vleck determinant of Hamilton's principal function ([`kernels::van_vleck_kernel`]),
//! - the exact spectral sum over oscillator eigenstates ([`hermite_oracle`]).
//!
//! The variational side is covered by [`secondvar`] (inertia of the discretized
//! second variation) and [`morse`] (Jacobi fields, conjugate points, Morse index).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classical;
pub mod error;
pub mod hermite_oracle;
pub mod interference;
pub mod kernels;
pub mod linalg;
pub mod modeproduct;
pub mod models;
pub mod morse;
mod numeric;
pub mod secondvar;

pub use classical::{ClassicalSolution, Path, Point};
pub use error::{Error, Result};
pub use kernels::KernelValue;
pub use models::{CausticIndex, ComplexAmplitude, ModelKind, NumericConfig, Potential, SystemModel};
pub use morse::MorseReport;
pub use secondvar::SpectrumReport;
