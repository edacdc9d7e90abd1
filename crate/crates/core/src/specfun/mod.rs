//! Special functions and exact combinatorics shared by the coalescent and
//! Mittag–Leffler modules.

mod bigfun;
mod gamma;
mod precision;
mod stirling;

pub use gamma::{
    ascending_factorial, complex_log_gamma, digamma, log_ascending_factorial, log_gamma,
    mean_turning_time, EULER_GAMMA,
};
pub use precision::{to_f64, BigFloat, PrecisionContext, DEFAULT_PRECISION_BITS};
pub use stirling::{StirlingTables, DEFAULT_N_MAX};

pub(crate) use gamma::{gamma_ratio, lgamma, ln_rising, psi, rising};
pub(crate) use stirling::power_to_rising;
