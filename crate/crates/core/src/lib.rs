//! Numerical verification of nearly Kähler geometry in real dimension six.
//!
//! The crate is organised in layers:
//!
//! - [`exterior6`]: exact exterior algebra on the model space `(R^6, g0, J0)`.
//! - [`geometry`]: almost Hermitian backends (round S⁶, flat C³, a perturbed
//!   ellipsoid), adapted frames, charts and a finite-difference oracle.
//! - [`connection`]: Levi-Civita data, curvature, exterior derivatives, the
//!   Nijenhuis tensor and the canonical Hermitian connection.
//! - [`verify`]: the identity registry, μ and λ estimation, SU(3) frames, the
//!   PDE and Einstein checks, and W1 classification.
//! - [`cli`]: run configuration and report emission used by the `nk6` binary.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod connection;
pub mod error;
pub mod exterior6;
pub mod geometry;
pub mod verify;

pub use error::{Error, Result};
