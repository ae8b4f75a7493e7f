//! Configurable-precision special functions and a verification engine for
//! complete monotonicity of functions built from the trigamma function.

pub mod bernoulli;
pub mod decimal;
pub mod engine;
pub mod error;
pub mod functions;
pub mod precision;
pub mod quadrature;
pub mod report;
pub mod suite;
pub mod special;

pub use error::{Error, Result};
pub use precision::{BigReal, PrecisionConfig, SeriesValue};
