//! Classical and q-deformed special functions at configurable precision.

mod hardy;
mod laguerre;
mod polygamma;
mod qseries;
mod zeta;

pub use hardy::{hardy_littlewood_h, hardy_littlewood_partial, s_function};
pub use laguerre::{laguerre, laguerre_assoc, laguerre_derivative, laguerre_pair};
pub use polygamma::{digamma, polygamma, polygamma_range};
pub use qseries::{q_trigamma, q_trigamma_series};
pub use zeta::zeta;
