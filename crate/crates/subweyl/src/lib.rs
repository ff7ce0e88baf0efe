//! Certification pipeline for explicit sub-Weyl bounds of the form
//! |zeta(1/2 + it)| <= A * t^(27/164).
//!
//! The crate is organised around a directed-rounding arithmetic core
//! (`rigor`), exact exponent-pair algebra (`pairs`), the coefficient
//! pipeline that certifies a constant A over a t-range (`pipeline`),
//! a deterministic parameter optimizer (`optimizer`), an empirical lab
//! that stress-tests every inequality on concrete exponential sums
//! (`lab`), and serialization of schemes and reports (`schema`).

pub mod error;
pub mod lab;
pub mod optimizer;
pub mod pairs;
pub mod pipeline;
pub mod rigor;
pub mod schema;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
