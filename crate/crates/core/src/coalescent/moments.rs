//! Closed-form moments of `N^(n)` and of the scaled process
//! `X_t^(n) = N_t^(n) / n^{e^{-t}}`.

use super::{CoalescentSpec, MomentQuery};
use crate::error::{domain, Error, Result};
use crate::specfun::{gamma_ratio, lgamma, ln_rising, power_to_rising, rising};

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

fn check_exponent(m: f64) -> Result<()> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain(format!("exponent must be finite and nonnegative, got {m}")));
    }
    Ok(())
}

/// `E([N_t^(n)]_m) = Γ(m+1) [n]_{me^{-t}} / Γ(1+me^{-t})` for real `m ≥ 0`.
pub fn factorial_moment(spec: CoalescentSpec, t: f64, m: f64) -> Result<f64> {
    check_time(t)?;
    check_exponent(m)?;
    if m == 0.0 {
        return Ok(1.0);
    }
    let a = m * (-t).exp();
    let n = spec.n() as f64;
    Ok((lgamma(m + 1.0) + ln_rising(n, a) - lgamma(1.0 + a)).exp())
}

/// Mean and variance of `N_t^(n)`; the variance is clamped at zero.
pub fn mean_and_variance(spec: CoalescentSpec, t: f64) -> Result<(f64, f64)> {
    let mean = factorial_moment(spec, t, 1.0)?;
    let second = factorial_moment(spec, t, 2.0)?;
    Ok((mean, (second - mean - mean * mean).max(0.0)))
}

/// `E(∏_j [N_{t_j}^(n) + x_j]_{m_j}) = [n]_{x_0} ∏_j Γ(1+x_j+m_j)/Γ(1+x_{j-1})`.
pub fn joint_factorial_moment(spec: CoalescentSpec, q: &MomentQuery) -> Result<f64> {
    let x = q.weights();
    let mut log = ln_rising(spec.n() as f64, x[0]);
    for (j, &m) in q.exponents().iter().enumerate() {
        log += lgamma(1.0 + x[j + 1] + m) - lgamma(1.0 + x[j]);
    }
    Ok(log.exp())
}

/// `[n]_r / n^s`, exact for small integer `r`.
fn scaled_rising(n: f64, r: f64, s: f64) -> f64 {
    if r.fract() == 0.0 && r <= 64.0 {
        rising(n, r) / n.powf(s)
    } else {
        (ln_rising(n, r) - s * n.ln()).exp()
    }
}

/// `Γ(1+r)/Γ(1+re^{-Δ})`, the factor produced by
/// `E([N_Δ^(j)]_r) = Γ(1+r)/Γ(1+re^{-Δ}) · [j]_{re^{-Δ}}`.
fn lift_factor(r: f64, decay: f64) -> f64 {
    gamma_ratio(1.0 + r, 1.0 + r * decay)
}

/// Raw moment `E((X_t^(n))^m) = Σ_i (-1)^{m-i} S(m,i) E(X_t^i) [n]_{ie^{-t}} / n^{me^{-t}}`
/// for integer `m`.
pub fn scaled_raw_moment(spec: CoalescentSpec, t: f64, m: usize) -> Result<f64> {
    check_time(t)?;
    if m > 25 {
        return Err(Error::OutOfRange(format!("raw moment order {m} exceeds 25")));
    }
    if t == 0.0 || m == 0 {
        return Ok(1.0);
    }
    let a = (-t).exp();
    let n = spec.n() as f64;
    let coeffs = power_to_rising(m);
    let total = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| {
            let i = i as f64;
            c * lift_factor(i, a) * scaled_rising(n, i * a, m as f64 * a)
        })
        .sum();
    Ok(total)
}

/// `E((X_{s+t}^(n))^m | N_s^(n) = state)`, the time-inhomogeneous semigroup
/// applied to the monomial `p_m`, with the state given as a block count.
pub fn scaled_conditional_moment(
    spec: CoalescentSpec,
    s: f64,
    t: f64,
    m: usize,
    state: u64,
) -> Result<f64> {
    check_time(s)?;
    check_time(t)?;
    if state == 0 || state > spec.n() {
        return Err(Error::OutOfRange(format!(
            "state {state} outside 1..={}",
            spec.n()
        )));
    }
    if m > 25 {
        return Err(Error::OutOfRange(format!("monomial degree {m} exceeds 25")));
    }
    if t == 0.0 {
        return Ok((state as f64 / spec.scale(s)).powf(m as f64));
    }
    let a = (-t).exp();
    let n = spec.n() as f64;
    let target = m as f64 * (-(s + t)).exp();
    let j = state as f64;
    let coeffs = power_to_rising(m);
    // n^{-me^{-(s+t)}} is folded into each term relative to j to keep the
    // ratios O(1).
    let log_norm = target * n.ln();
    Ok(coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| {
            let r = i as f64 * a;
            let term = if r.fract() == 0.0 && r <= 64.0 {
                rising(j, r) * (-log_norm).exp()
            } else {
                (ln_rising(j, r) - log_norm).exp()
            };
            c * lift_factor(i as f64, a) * term
        })
        .sum())
}

/// `T_{s,t}^(n) p_m(x) = E((X_{s+t}^(n))^m | X_s^(n) = x)` for `x` on the grid
/// `E_n(s) = { j / n^{e^{-s}} : j = 1..n }`.
pub fn inhomogeneous_semigroup_monomial(
    spec: CoalescentSpec,
    s: f64,
    t: f64,
    m: usize,
    x: f64,
) -> Result<f64> {
    check_time(s)?;
    let state = x * spec.scale(s);
    let rounded = state.round();
    if !(rounded >= 1.0)
        || rounded > spec.n() as f64
        || (state - rounded).abs() > 1e-9 * rounded.max(1.0)
    {
        return Err(domain(format!(
            "x = {x} is not on the grid E_n(s) for n = {}, s = {s}",
            spec.n()
        )));
    }
    scaled_conditional_moment(spec, s, t, m, rounded as u64)
}

/// Write `P(N)·[N]_c = Σ_l b_l [N]_{c+l}` for a polynomial `P` given by its
/// monomial coefficients.
fn rebase(poly: &[f64], c: f64) -> Vec<f64> {
    let deg = poly.len().saturating_sub(1);
    // coefficients of P(y - c) in powers of y = N + c
    let mut shifted = vec![0.0; deg + 1];
    for (p, &a) in poly.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let mut binom = 1.0;
        for q in (0..=p).rev() {
            // C(p, q) (-c)^{p-q}
            shifted[q] += a * binom * (-c).powi((p - q) as i32);
            binom = binom * q as f64 / (p - q + 1) as f64;
        }
    }
    let mut out = vec![0.0; deg + 1];
    for (q, &a) in shifted.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (l, coef) in power_to_rising(q).into_iter().enumerate() {
            out[l] += a * coef;
        }
    }
    out
}

/// `E(∏_j P_j(N_{t_j}^(n))) / n^{scale}` for polynomials `P_j` in monomial
/// coefficients, evaluated exactly by conditioning backwards in time: each
/// conditional expectation maps `[N_{t_j}]_r` to a multiple of
/// `[N_{t_{j-1}}]_{re^{-(t_j - t_{j-1})}}`, and multiplying by the polynomial at
/// the earlier time is a change of basis.
pub fn joint_polynomial_moment(
    spec: CoalescentSpec,
    times: &[f64],
    polys: &[Vec<f64>],
    scale: f64,
) -> Result<f64> {
    if times.is_empty() || times.len() != polys.len() {
        return Err(Error::InvalidQuery("need one polynomial per time".into()));
    }
    check_time(times[0])?;
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidQuery("times must be strictly increasing".into()));
    }
    let k = times.len();
    // terms Σ coef·[N_{t_j}]_r as (r, coef)
    let mut terms: Vec<(f64, f64)> = rebase(&polys[k - 1], 0.0)
        .into_iter()
        .enumerate()
        .map(|(l, b)| (l as f64, b))
        .collect();
    for j in (0..k).rev() {
        let prev = if j == 0 { 0.0 } else { times[j - 1] };
        let decay = (-(times[j] - prev)).exp();
        for term in terms.iter_mut() {
            term.1 *= lift_factor(term.0, decay);
            term.0 *= decay;
        }
        if j == 0 {
            break;
        }
        let mut next = Vec::with_capacity(terms.len() * polys[j - 1].len());
        for &(c, coef) in &terms {
            if coef == 0.0 {
                continue;
            }
            for (l, b) in rebase(&polys[j - 1], c).into_iter().enumerate() {
                if b != 0.0 {
                    next.push((c + l as f64, coef * b));
                }
            }
        }
        terms = next;
    }
    let n = spec.n() as f64;
    Ok(terms
        .iter()
        .map(|&(r, coef)| coef * scaled_rising(n, r, scale))
        .sum())
}

fn binomial_poly(shift: f64, m: usize) -> Vec<f64> {
    // (N + shift)^m in powers of N
    let mut coeffs = vec![0.0; m + 1];
    let mut binom = 1.0;
    for p in 0..=m {
        coeffs[p] = binom * shift.powi((m - p) as i32);
        binom = binom * (m - p) as f64 / (p + 1) as f64;
    }
    coeffs
}

/// `E(∏_j (X_{t_j}^(n))^{m_j})` for integer exponents.
pub fn scaled_joint_moment(spec: CoalescentSpec, q: &MomentQuery) -> Result<f64> {
    let ms = q
        .integer_exponents()
        .ok_or_else(|| Error::InvalidQuery("raw joint moments need integer exponents".into()))?;
    if ms.len() == 1 {
        return scaled_raw_moment(spec, q.times()[0], ms[0]);
    }
    let polys: Vec<Vec<f64>> = ms.iter().map(|&m| binomial_poly(0.0, m)).collect();
    joint_polynomial_moment(spec, q.times(), &polys, q.weight(0))
}

/// `E(∏_j (X_{t_j}^(n) + x_j / n^{e^{-t_j}})^{m_j})` for integer exponents,
/// i.e. `E(∏_j (N_{t_j}^(n) + x_j)^{m_j}) / n^{x_0}`.
pub fn shifted_scaled_joint_moment(spec: CoalescentSpec, q: &MomentQuery) -> Result<f64> {
    let ms = q
        .integer_exponents()
        .ok_or_else(|| Error::InvalidQuery("shifted joint moments need integer exponents".into()))?;
    let polys: Vec<Vec<f64>> = ms
        .iter()
        .enumerate()
        .map(|(j, &m)| binomial_poly(q.weight(j + 1), m))
        .collect();
    joint_polynomial_moment(spec, q.times(), &polys, q.weight(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalescent::{generator_entry, sample_states_at, transition_probabilities};
    use crate::montecarlo::replicate_rng;
    use crate::specfun::{PrecisionContext, StirlingTables};
    use crate::stats::MeanAccumulator;
    use proptest::prelude::*;

    fn spec(n: u64) -> CoalescentSpec {
        CoalescentSpec::new(n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// `exp(Qt)` for the `n × n` generator by scaling and squaring a Taylor
    /// polynomial; independent of the Stirling formula.
    fn expm_generator(n: usize, t: f64) -> Vec<Vec<f64>> {
        let q: Vec<Vec<f64>> = (1..=n)
            .map(|i| (1..=n).map(|j| generator_entry(i as u64, j as u64).unwrap() * t).collect())
            .collect();
        let norm = q
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scale = 0.5f64.powi(squarings);
        let a: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
        let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|l| x[i][l] * y[l][j]).sum()).collect())
                .collect()
        };
        let mut result: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut term = result.clone();
        for k in 1..=20 {
            term = mul(&term, &a);
            for row in term.iter_mut() {
                for v in row.iter_mut() {
                    *v /= k as f64;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    result[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            result = mul(&result, &result);
        }
        result
    }

    #[test]
    fn transition_law_matches_matrix_exponential() {
        let tables = StirlingTables::new(30);
        let ctx = PrecisionContext::default();
        for &t in &[0.05, 0.4, 1.3] {
            let e = expm_generator(30, t);
            for i in [2usize, 7, 19, 30] {
                let p = transition_probabilities(spec(i as u64), t, &tables, &ctx).unwrap();
                for j in 1..=i {
                    assert!((p[j - 1] - e[i - 1][j - 1]).abs() < 1e-12, "i={i} j={j} t={t}");
                }
            }
        }
    }

    #[test]
    fn factorial_moment_matches_transition_law() {
        let tables = StirlingTables::new(40);
        let ctx = PrecisionContext::default();
        for &t in &[0.1, 0.7, 2.0] {
            let p = transition_probabilities(spec(40), t, &tables, &ctx).unwrap();
            for &m in &[0.5, 1.0, 2.0, 3.5] {
                let direct: f64 = p
                    .iter()
                    .enumerate()
                    .map(|(j, pj)| pj * rising(j as f64 + 1.0, m))
                    .sum();
                let closed = factorial_moment(spec(40), t, m).unwrap();
                assert!(rel(closed, direct) < 1e-11, "t={t} m={m}");
            }
        }
    }

    #[test]
    fn factorial_moment_examples() {
        assert_eq!(factorial_moment(spec(10), 0.0, 0.0).unwrap(), 1.0);
        // [n]_1 at t = 0 is n; for n = 1 every moment is Γ(m+1).
        assert!(rel(factorial_moment(spec(17), 0.0, 1.0).unwrap(), 17.0) < 1e-14);
        assert!(rel(factorial_moment(spec(1), 0.9, 3.0).unwrap(), 6.0) < 1e-13);
        let (mean, var) = mean_and_variance(spec(2), 0.5).unwrap();
        let e = (-0.5f64).exp();
        assert!(rel(mean, 1.0 + e) < 1e-14);
        assert!((var - e * (1.0 - e)).abs() < 1e-14);
        assert!(factorial_moment(spec(3), -1.0, 1.0).is_err());
        assert!(factorial_moment(spec(3), 1.0, -1.0).is_err());
    }

    #[test]
    fn joint_moment_single_time_reduces() {
        for &(t, m) in &[(0.3, 1.0), (1.1, 2.5), (0.0, 4.0)] {
            let q = MomentQuery::single(t, m).unwrap();
            let a = joint_factorial_moment(spec(25), &q).unwrap();
            let b = factorial_moment(spec(25), t, m).unwrap();
            assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn joint_moment_matches_transition_law() {
        // E([N_s]_a [N_{s+u} + x_2]_b) summed over the exact two-step law;
        // in the closed form the second factor is shifted by x_2 = 0 and the
        // first by x_1 = b e^{-u}.
        let n = 20usize;
        let tables = StirlingTables::new(n);
        let ctx = PrecisionContext::default();
        let (s, u, a, b) = (0.4, 0.6, 1.0, 2.0);
        let q = MomentQuery::new(vec![s, s + u], vec![a, b]).unwrap();
        let x1 = q.weight(1);
        let first = transition_probabilities(spec(n as u64), s, &tables, &ctx).unwrap();
        let mut direct = 0.0;
        for i in 1..=n {
            let second = transition_probabilities(spec(i as u64), u, &tables, &ctx).unwrap();
            let inner: f64 = second
                .iter()
                .enumerate()
                .map(|(j, p)| p * rising(j as f64 + 1.0, b))
                .sum();
            direct += first[i - 1] * rising(i as f64 + x1, a) * inner;
        }
        let closed = joint_factorial_moment(spec(n as u64), &q).unwrap();
        assert!(rel(closed, direct) < 1e-11, "{closed} vs {direct}");
    }

    #[test]
    fn joint_moment_is_continuous_as_times_merge() {
        let n = spec(30);
        let target = factorial_moment(n, 0.5, 3.0).unwrap();
        let mut last = f64::INFINITY;
        for h in [1e-2, 1e-4, 1e-6] {
            // [N]_1 [N+1]_2 → [N]_3 as the times merge
            let q = MomentQuery::new(vec![0.5, 0.5 + h], vec![1.0, 2.0]).unwrap();
            let err = (joint_factorial_moment(n, &q).unwrap() - target).abs() / target;
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn polynomial_moment_against_exact_law() {
        let n = 15usize;
        let tables = StirlingTables::new(n);
        let ctx = PrecisionContext::default();
        let (s, u) = (0.3, 0.5);
        let p1 = vec![2.0, -1.0, 0.5];
        let p2 = vec![0.0, 1.0, 0.0, 1.0];
        let eval = |p: &[f64], x: f64| p.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let first = transition_probabilities(spec(n as u64), s, &tables, &ctx).unwrap();
        let mut direct = 0.0;
        for i in 1..=n {
            let second = transition_probabilities(spec(i as u64), u, &tables, &ctx).unwrap();
            let inner: f64 = second
                .iter()
                .enumerate()
                .map(|(j, p)| p * eval(&p2, j as f64 + 1.0))
                .sum();
            direct += first[i - 1] * eval(&p1, i as f64) * inner;
        }
        let exact =
            joint_polynomial_moment(spec(n as u64), &[s, s + u], &[p1, p2], 0.0).unwrap();
        assert!(rel(exact, direct) < 1e-11, "{exact} vs {direct}");
    }

    #[test]
    fn scaled_moments_agree() {
        let n = spec(60);
        for m in 0..6 {
            for &t in &[0.0, 0.2, 1.5] {
                let raw = scaled_raw_moment(n, t, m).unwrap();
                let poly = joint_polynomial_moment(n, &[t], &[binomial_poly(0.0, m)], m as f64 * (-t).exp())
                    .unwrap();
                assert!(rel(raw, poly) < 1e-11, "m={m} t={t}");
            }
        }
        assert_eq!(scaled_raw_moment(n, 0.0, 3).unwrap(), 1.0);
        assert_eq!(scaled_raw_moment(n, 0.7, 0).unwrap(), 1.0);
        let q = MomentQuery::single(0.4, 2.0).unwrap();
        assert_eq!(
            scaled_joint_moment(n, &q).unwrap(),
            scaled_raw_moment(n, 0.4, 2).unwrap()
        );
        assert!(scaled_joint_moment(n, &MomentQuery::single(0.4, 1.5).unwrap()).is_err());
    }

    #[test]
    fn conditional_moment_is_restarted_chain() {
        let n = spec(40);
        let (s, t) = (0.3, 0.8);
        let c = n.scale(s + t);
        for j in [1u64, 9, 40] {
            let direct = scaled_raw_moment(spec(j), t, 3).unwrap() * spec(j).scale(t).powi(3)
                / c.powi(3);
            let cond = scaled_conditional_moment(n, s, t, 3, j).unwrap();
            assert!(rel(cond, direct) < 1e-12);
            let x = j as f64 / n.scale(s);
            assert_eq!(inhomogeneous_semigroup_monomial(n, s, t, 3, x).unwrap(), cond);
        }
        assert!(inhomogeneous_semigroup_monomial(n, s, t, 3, 0.123).is_err());
        assert!(scaled_conditional_moment(n, s, t, 3, 41).is_err());
    }

    #[test]
    fn semigroup_tower_property() {
        // E(X_{s+t}^m) = Σ_j P(N_s = j) T_{s,t} p_m(j / n^{e^{-s}})
        let n = 25usize;
        let tables = StirlingTables::new(n);
        let ctx = PrecisionContext::default();
        let (s, t) = (0.5, 0.7);
        let law = transition_probabilities(spec(n as u64), s, &tables, &ctx).unwrap();
        let mixed: f64 = (1..=n)
            .map(|j| law[j - 1] * scaled_conditional_moment(spec(n as u64), s, t, 2, j as u64).unwrap())
            .sum();
        let direct = scaled_raw_moment(spec(n as u64), s + t, 2).unwrap();
        assert!(rel(mixed, direct) < 1e-11);
    }

    #[test]
    fn shifted_moment_expands_binomially() {
        let n = spec(30);
        let q = MomentQuery::new(vec![0.2, 0.9], vec![2.0, 1.0]).unwrap();
        let x1 = q.weight(1);
        // (N_{t1} + x1)^2 N_{t2} = N^2 N' + 2 x1 N N' + x1^2 N'
        let times = [0.2, 0.9];
        let parts = [
            (1.0, vec![0.0, 0.0, 1.0]),
            (2.0 * x1, vec![0.0, 1.0]),
            (x1 * x1, vec![1.0]),
        ];
        let expected: f64 = parts
            .iter()
            .map(|(c, p)| c * joint_polynomial_moment(n, &times, &[p.clone(), vec![0.0, 1.0]], q.weight(0)).unwrap())
            .sum();
        let got = shifted_scaled_joint_moment(n, &q).unwrap();
        assert!(rel(got, expected) < 1e-12);
    }

    fn mc_moments(n: u64, times: &[f64], reps: u64, seed: u64) -> Vec<Vec<u64>> {
        (0..reps)
            .map(|r| sample_states_at(n, times, &mut replicate_rng(seed, 11, r)))
            .collect()
    }

    #[test]
    fn monte_carlo_mean_and_variance() {
        for &(n, t) in &[(100u64, 0.5), (50, 1.0)] {
            let draws = mc_moments(n, &[t], 40_000, n);
            let mean: MeanAccumulator = draws.iter().map(|d| d[0] as f64).collect();
            let (m, v) = mean_and_variance(spec(n), t).unwrap();
            assert!((mean.mean() - m).abs() < 4.0 * mean.std_error(), "n={n}");
            let sq: MeanAccumulator =
                draws.iter().map(|d| (d[0] as f64 - m).powi(2)).collect();
            assert!((sq.mean() - v).abs() < 4.0 * sq.std_error(), "n={n}");
        }
    }

    #[test]
    fn monte_carlo_joint_and_high_order() {
        let q = MomentQuery::new(vec![0.3, 0.9], vec![1.0, 2.0]).unwrap();
        let x1 = q.weight(1);
        let draws = mc_moments(20, &[0.3, 0.9], 40_000, 77);
        let acc: MeanAccumulator = draws
            .iter()
            .map(|d| rising(d[0] as f64 + x1, 1.0) * rising(d[1] as f64, 2.0))
            .collect();
        let exact = joint_factorial_moment(spec(20), &q).unwrap();
        assert!((acc.mean() - exact).abs() < 4.0 * acc.std_error());

        let draws = mc_moments(1000, &[1.0], 20_000, 78);
        let acc: MeanAccumulator = draws.iter().map(|d| rising(d[0] as f64, 3.0)).collect();
        let exact = factorial_moment(spec(1000), 1.0, 3.0).unwrap();
        assert!((acc.mean() - exact).abs() < 4.0 * acc.std_error());
    }

    proptest! {
        #[test]
        fn factorial_moments_decrease_in_time(
            n in 2u64..500,
            m in 0.1f64..6.0,
            t in 0.0f64..4.0,
            dt in 0.01f64..2.0,
        ) {
            let a = factorial_moment(spec(n), t, m).unwrap();
            let b = factorial_moment(spec(n), t + dt, m).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-13));
            prop_assert!(b >= gamma_ratio(m + 1.0, 1.0) * (1.0 - 1e-12));
        }

        #[test]
        fn markov_restart_consistency(
            s in 0.0f64..1.5,
            t in 0.0f64..1.5,
            m in 1usize..4,
        ) {
            // E(X_{s+t}^m) from the closed form against the tower property on a
            // small chain evaluated with the exact law.
            let n = 12usize;
            let tables = StirlingTables::new(n);
            let ctx = PrecisionContext::default();
            let law = transition_probabilities(spec(n as u64), s, &tables, &ctx).unwrap();
            let mixed: f64 = (1..=n)
                .map(|j| law[j - 1] * scaled_conditional_moment(spec(n as u64), s, t, m, j as u64).unwrap())
                .sum();
            let direct = scaled_raw_moment(spec(n as u64), s + t, m).unwrap();
            prop_assert!(rel(mixed, direct) < 1e-10);
        }
    }
}
