//! Oracles shared by the integration tests. None of them use the Stirling
//! representation of the transition law.

use mlcoal::coalescent::generator_entry;
use mlcoal::specfun::log_gamma;

/// `exp(Qt)` for the generator restricted to `{1, …, n}`, by scaling and
/// squaring a degree-24 Taylor polynomial. Row `i - 1` is the law started
/// from `i`.
pub fn expm_generator(n: usize, t: f64) -> Vec<Vec<f64>> {
    let q: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| generator_entry(i as u64, j as u64).unwrap() * t)
                .collect()
        })
        .collect();
    let norm = q
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 0.5f64.powi(squarings);
    let a: Vec<Vec<f64>> = q
        .iter()
        .map(|r| r.iter().map(|v| v * scale).collect())
        .collect();
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=24 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for (r, t) in result.iter_mut().zip(&term) {
            for (x, y) in r.iter_mut().zip(t) {
                *x += y;
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matmul(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| x[i][l] * y[l][j]).sum())
                .collect()
        })
        .collect()
}

/// `Γ(m + 1) · C(n - 1 + m e^{-t}, n - 1)`.
pub fn factorial_moment_closed_form(n: u64, t: f64, m: f64) -> f64 {
    let x = m * (-t).exp();
    let nf = n as f64;
    (log_gamma(m + 1.0).unwrap() + log_gamma(nf + x).unwrap()
        - log_gamma(nf).unwrap()
        - log_gamma(1.0 + x).unwrap())
    .exp()
}

/// `Γ(x + m) / Γ(x)` by direct multiplication for integer `m`.
pub fn rising_int(x: f64, m: u32) -> f64 {
    (0..m).map(|i| x + i as f64).product()
}
