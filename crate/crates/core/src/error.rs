//! Error types shared across the crate.
//!
//! Every variant here is reachable from well-typed user input (bad
//! configuration values, data-dependent numerical failure). Programmer
//! errors such as dimension mismatches or a non-positive regularization
//! parameter are contract violations and panic instead; the panics are
//! documented on the functions that raise them.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its documented range. The message
    /// names the offending key.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An evaluation point coincides (numerically) with a source point,
    /// where the kernel is singular.
    #[error("evaluation point within {distance:.3e} of a source point (limit {limit:.0e})")]
    Singularity { distance: f64, limit: f64 },

    /// A field evaluation point lies inside the exclusion band around the
    /// radiating circle, where the quadrature cannot be trusted.
    #[error("field point ({x}, {y}) is {distance:.3e} from the source circle (limit {limit:.0e})")]
    Proximity {
        x: f64,
        y: f64,
        distance: f64,
        limit: f64,
    },

    /// The discrepancy function has no sign change inside the search
    /// window, so no Morozov parameter exists there.
    #[error(
        "discrepancy has no root in [{lo:.3e}, {hi:.3e}]: \
         F(lo) = {f_lo:.6e}, F(hi) = {f_hi:.6e}"
    )]
    NoRoot {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An output file could not be written.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
