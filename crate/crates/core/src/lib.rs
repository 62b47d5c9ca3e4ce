//! Numerical kernels for Toeplitz and Hankel determinant asymptotics.
//!
//! The crate is built around truncated block Laurent series
//! ([`BlockSymbol`]) for matrix functions on the unit circle. On top of
//! that it provides finite sections of the induced structured operators
//! (Toeplitz, Hankel, Toeplitz-plus-Hankel), Wiener-Hopf factorization,
//! a determinant engine with grid/truncation doubling, the classical
//! asymptotic constants, and a small lab that checks determinant
//! identities numerically over ranges of the section size.
//!
//! Everything here is `no_std + alloc`; file formats, CLI and reporting
//! live in the companion `szegolab-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constants;
pub mod determinant;
pub mod error;
mod fft;
pub mod factorization;
pub mod lab;
pub mod matrix;
pub mod operators;
pub mod symbol;

pub use determinant::ConvergedValue;
pub use error::{Error, Result};
pub use factorization::{AntiFactorization, CanonicalFactorization, FactorSide};
pub use lab::{BocgReport, IdentityReport, ReportRow, SzegoWidomFit, TheoremTag};
pub use matrix::DenseMatrix;
pub use operators::{AnalyticityRegion, FunctionSpec, MVariant};
pub use symbol::{Band, BlockSymbol, GridSamples};

/// Scalar type used throughout: double precision complex.
pub type C64 = num_complex::Complex<f64>;
