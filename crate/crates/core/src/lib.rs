//! Exact-arithmetic workbench for one-way state generators (OWSGs) and the
//! primitives reachable from them: weakly verifiable quantum puzzles and their
//! hardness amplification, one-time quantum digital signatures, private-key
//! quantum money, quantum pseudo one-time pads, EFI pairs, canonical quantum
//! bit commitments, and secretly-verifiable statistically-invertible OWSGs.
//!
//! Everything runs on small labeled tensor-product registers in double
//! precision. States are immutable, operations are pure functions, and all
//! randomness flows through an explicitly seeded [`rng::WbRng`], so every
//! experiment is bit-reproducible from its seed.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod commitefi;
pub mod discriminate;
pub mod error;
pub mod linalg;
pub mod money;
pub mod owsg;
pub mod puzzles;
pub mod qds;
pub mod qpotp;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use qstate::{DensityMatrix, Povm, PureState, RegisterShape};
pub use rng::WbRng;

/// Default tolerance for invariant checks and asserted bounds.
pub const TOL_ASSERT: f64 = 1e-9;

/// Tolerance for identities that are expected to be exact up to rounding.
pub const TOL_EXACT: f64 = 1e-12;

/// Eigenvalues at or below this cutoff are treated as zero when inverting on
/// a support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Default cap on total register dimension. Operations that would build a
/// larger space fail fast with [`Error::DimCapExceeded`].
pub const DEFAULT_DIM_CAP: usize = 4096;

pub type Complex64 = num_complex::Complex<f64>;
