use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::CoalescentSpec;
use crate::error::{domain, Result};

/// One trajectory of the block-counting chain, stored as its event list.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChainPath {
    times: Vec<f64>,
    states: Vec<u64>,
    horizon: f64,
}

impl JumpChainPath {
    /// Event times; the first entry is 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Block counts after each event; the first entry is the start state.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> usize {
        self.times.len() - 1
    }

    /// State at time `t ≤ horizon` (right-continuous).
    pub fn state_at(&self, t: f64) -> u64 {
        let idx = self.times.partition_point(|&s| s <= t);
        self.states[idx.saturating_sub(1)]
    }
}

/// Next state after a jump out of `i ≥ 2`, by inverting the closed-form CDF
/// `P(i - J ≤ k) = (i/(i-1))·k/(k+1)` of the number of lost blocks.
pub fn sample_jump<R: Rng + ?Sized>(i: u64, rng: &mut R) -> u64 {
    debug_assert!(i >= 2);
    let u: f64 = rng.random();
    let v = u * (i - 1) as f64 / i as f64;
    let k = (v / (1.0 - v)).ceil().clamp(1.0, (i - 1) as f64) as u64;
    i - k
}

fn holding_time<R: Rng + ?Sized>(i: u64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / (i - 1) as f64
}

/// Simulate `N^(n)` on `[0, horizon]`.
pub fn simulate_path<R: Rng + ?Sized>(
    spec: CoalescentSpec,
    horizon: f64,
    rng: &mut R,
) -> Result<JumpChainPath> {
    simulate_path_from(spec.n(), horizon, rng)
}

/// Simulate the chain started from `start` blocks.
pub fn simulate_path_from<R: Rng + ?Sized>(
    start: u64,
    horizon: f64,
    rng: &mut R,
) -> Result<JumpChainPath> {
    if !(horizon >= 0.0) {
        return Err(domain(format!("horizon must be nonnegative, got {horizon}")));
    }
    if start == 0 {
        return Err(domain("start state must be at least 1"));
    }
    let mut times = vec![0.0];
    let mut states = vec![start];
    let (mut t, mut state) = (0.0, start);
    while state > 1 {
        t += holding_time(state, rng);
        if t > horizon {
            break;
        }
        state = sample_jump(state, rng);
        times.push(t);
        states.push(state);
    }
    Ok(JumpChainPath {
        times,
        states,
        horizon,
    })
}

/// States of the chain started at `start` at the increasing `times`,
/// without storing the path.
pub fn sample_states_at<R: Rng + ?Sized>(start: u64, times: &[f64], rng: &mut R) -> Vec<u64> {
    let mut out = Vec::with_capacity(times.len());
    let mut state = start;
    let mut next_event = if state > 1 {
        holding_time(state, rng)
    } else {
        f64::INFINITY
    };
    for &t in times {
        while next_event <= t {
            state = sample_jump(state, rng);
            next_event = if state > 1 {
                next_event + holding_time(state, rng)
            } else {
                f64::INFINITY
            };
        }
        out.push(state);
    }
    out
}
