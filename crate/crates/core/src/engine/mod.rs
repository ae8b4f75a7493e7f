//! Verification engine: derivative sign tables, complete-monotonicity
//! verdicts, inequality suites, limit extrapolation, convergence studies and
//! negativity searches.

mod cm;
mod convergence;
mod grid;
mod inequality;
mod limits;
mod search;
mod table;

pub use cm::{check_cm, check_log_cm, report_from_table, CmReport, CrossCheck, SignEntry, Verdict};
pub use convergence::{convergence_study, ConvergenceRow};
pub use grid::{GridSpec, Spacing};
pub use inequality::{
    verify_alzer_inequality, verify_double_inequality, verify_elementary_inequality, verify_k2_sign,
    verify_k3_derivative, verify_kernel_identity, verify_polygamma_bracket, verify_theta1_bounds,
    verify_theta1_derivative_bound, verify_theta_m_nonnegative, InequalityReport, Part, Witness,
};
pub use limits::{
    extrapolate_to_zero, verify_derivative_limit_constants, verify_scaled_limits, DerivativeLimits, LimitEstimate,
    ScaledLimits, EXTRAPOLATION_EXPONENTS,
};
pub use search::{search_negative, SearchResult, SearchRow, Strategy, REFINE_PASSES, REFINE_TOP};
pub use table::{
    derivative_column, derivative_table, finite_difference_column, DerivativeTable, Differentiable, Entry, FAlpha,
    FnDifferentiable, Method, FD_DIGITS,
};
