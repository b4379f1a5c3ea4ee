//! Minimal-energy boundary control of time-harmonic fields.
//!
//! A circular source (the antenna) radiates a 2D Helmholtz field through a
//! double-layer potential. Given a prescribed incident field on the boundary
//! of a nearby control region, this crate computes a boundary density whose
//! radiated field matches the prescription there while staying small on a
//! distant circle. The density is found by Tikhonov regularization, with the
//! regularization parameter chosen so a weighted relative residual hits a
//! prescribed discrepancy level (Morozov's principle).
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`]: Bessel and Hankel functions backing the 2D kernel.
//! * [`geometry`]: quadrature sampling of the three boundaries.
//! * [`operator`]: the collocation matrix of the radiation operator, its
//!   weighted norms and adjoint, assembled by two independent routes.
//! * [`regularize`]: SVD-based Tikhonov solves, the discrepancy functional,
//!   its derivative, and the Morozov root-finder.
//! * [`fields`]: incident-field traces, reproducible noise injection, and
//!   field evaluation at arbitrary points.
//! * [`problem`]: a bundled problem description with baseline defaults and
//!   the end-to-end solve pipeline.
//! * [`experiments`]: parameter sweeps, spectrum studies, the monotonicity
//!   threshold scan, and the noise-stability check.
//! * [`report`]: CSV/JSON writers with stable schemas.

pub mod error;
pub mod experiments;
pub mod fields;
pub mod geometry;
pub mod operator;
pub mod problem;
pub mod regularize;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
