//! Semi-selfdecomposable distributions on the real line and on the
//! nonnegative integers.
//!
//! The crate works entirely at the transform level: characteristic
//! functions, Laplace transforms and probability generating functions are
//! evaluable objects ([`TransformFn`]) that compose under mixing and
//! subordination. On top of that sit numerical certificates for the
//! decomposition identity `f(s) = f(bs) f0(s)` and its Laplace/PGF analogues,
//! and simulators for the stationary AR(1) / INAR(1) chains and subordinated
//! Lévy paths these laws generate.
//!
//! Everything here is `no_std` with `alloc`; IO and the command-line front end
//! live in the companion `semisd` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod autoregressive;
pub mod corpus;
pub mod decompose;
mod error;
mod fft;
pub mod linalg;
pub mod mixtures;
mod quadrature;
pub mod report;
pub mod sampling;
pub mod semistable;
pub mod stats;
pub mod subordination;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use report::{Certificate, CertificateKind, DecompositionReport, GridMeta, Identity, Verdict};
pub use semistable::SemiStableExponent;
pub use transforms::{InversionConfig, Support, TransformFn, TransformKind};
