//! Block-counting process `N^(n)` of the Bolthausen–Sznitman `n`-coalescent.
//!
//! The chain lives on `{1, …, n}`, only moves down, and leaves state `i` at
//! total rate `i - 1`. Exact results are provided for its transition law
//! (for `n` within a Stirling table), its factorial moments and its joint
//! moments at finitely many times; [`simulate_path`] gives trajectories.

mod moments;
mod path;
mod query;
mod transition;

pub use moments::{
    factorial_moment, inhomogeneous_semigroup_monomial, joint_factorial_moment,
    joint_polynomial_moment, mean_and_variance, scaled_conditional_moment, scaled_joint_moment,
    scaled_raw_moment, shifted_scaled_joint_moment,
};
pub use path::{sample_jump, sample_states_at, simulate_path, simulate_path_from, JumpChainPath};
pub use query::MomentQuery;
pub use transition::{transition_matrix, transition_probabilities, TransitionMatrix};

use crate::error::{Error, Result};

/// Sample size of the restricted coalescent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoalescentSpec {
    n: u64,
}

impl CoalescentSpec {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `n^{e^{-t}}`, the scaling of `X_t^(n) = N_t^(n) / n^{e^{-t}}`.
    pub fn scale(&self, t: f64) -> f64 {
        (self.n as f64).powf((-t).exp())
    }
}

/// Generator entry `q_{ij}`: `i/((i-j)(i-j+1))` below the diagonal, `1-i` on
/// it, zero above.
pub fn generator_entry(i: u64, j: u64) -> Result<f64> {
    if i == 0 || j == 0 {
        return Err(Error::OutOfRange(format!("generator indices start at 1, got ({i}, {j})")));
    }
    Ok(match j.cmp(&i) {
        std::cmp::Ordering::Less => {
            let d = (i - j) as f64;
            i as f64 / (d * (d + 1.0))
        }
        std::cmp::Ordering::Equal => 1.0 - i as f64,
        std::cmp::Ordering::Greater => 0.0,
    })
}

/// Jump probabilities of the embedded chain out of state `i ≥ 2`:
/// entry `j - 1` holds `P(i → j) = i / ((i-1)(i-j)(i-j+1))`, `j = 1..i-1`.
pub fn jump_distribution(i: u64) -> Result<Vec<f64>> {
    if i < 2 {
        return Err(Error::Domain(format!("state {i} has no jumps")));
    }
    let scale = i as f64 / (i - 1) as f64;
    Ok((1..i)
        .map(|j| {
            let d = (i - j) as f64;
            scale / (d * (d + 1.0))
        })
        .collect())
}
