//! The Mittag–Leffler law and the Mittag–Leffler process.
//!
//! `η` is Mittag–Leffler with parameter `α ∈ [0,1]` when
//! `E(η^m) = Γ(1+m)/Γ(1+mα)`. The process `X` started at `x` has transition
//! law `p(t, x, ·)`, the law of `x^{e^{-t}} η_t` with `η_t` Mittag–Leffler
//! with parameter `e^{-t}`. Everything here works on moments, which
//! determine these laws; [`subordinator`] gives the second construction of
//! `η` as an exponential functional.

mod sampler;
pub mod subordinator;

pub use sampler::{kernel_sample, ml_sample};
pub use subordinator::{
    exponential_functional_moment, exponential_functional_sample, laplace_exponent_closed,
    laplace_exponent_quadrature, levy_density, levy_tail_mass, small_jump_drift,
    SubordinatorSpec,
};

use num_complex::Complex64;

use crate::coalescent::MomentQuery;
use crate::error::{domain, Result};
use crate::specfun::{complex_log_gamma, gamma_ratio, lgamma, psi, PrecisionContext};

/// Mittag–Leffler parameter `α ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MLParameter {
    alpha: f64,
}

impl MLParameter {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(domain(format!("Mittag-Leffler parameter must lie in [0,1], got {alpha}")));
        }
        Ok(Self { alpha })
    }

    /// Parameter `e^{-t}` of the process marginal at time `t`.
    pub fn at_time(t: f64) -> Result<Self> {
        check_time(t)?;
        Self::new((-t).exp())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Transition law `p(t, x, ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLKernel {
    t: f64,
    x: f64,
}

impl MLKernel {
    pub fn new(t: f64, x: f64) -> Result<Self> {
        check_time(t)?;
        if !(x >= 0.0) || !x.is_finite() {
            return Err(domain(format!("kernel start must be finite and nonnegative, got {x}")));
        }
        Ok(Self { t, x })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

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

/// `E(η^m) = Γ(1+m)/Γ(1+mα)`.
pub fn ml_moment(p: MLParameter, m: f64) -> Result<f64> {
    check_exponent(m)?;
    Ok(gamma_ratio(1.0 + m, 1.0 + m * p.alpha))
}

/// `∫ y^m p(t, x, dy) = x^{me^{-t}} Γ(1+m)/Γ(1+me^{-t})`.
pub fn kernel_moment(k: MLKernel, m: f64) -> Result<f64> {
    check_exponent(m)?;
    if m == 0.0 {
        return Ok(1.0);
    }
    let a = (-k.t).exp();
    Ok(k.x.powf(m * a) * gamma_ratio(1.0 + m, 1.0 + m * a))
}

/// Moment-level Chapman–Kolmogorov defects for `m = 0..=m_max`: the `m`-th
/// moment of `p(s+t, x, ·)` against that of `∫ p(s, y, ·) p(t, x, dy)`.
///
/// Both sides are evaluated independently in the precision context, so the
/// defects measure the identity itself rather than double rounding.
pub fn chapman_kolmogorov_defect(
    s: f64,
    t: f64,
    x: f64,
    m_max: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<f64>> {
    check_time(s)?;
    check_time(t)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("start point must be positive, got {x}")));
    }
    let one = ctx.float(1.0);
    let ln_x = ctx.ln(&ctx.float(x));
    let ds = ctx.exp(&-ctx.float(s));
    let dt = ctx.exp(&-ctx.float(t));
    let dst = ctx.exp(&-(ctx.float(s) + ctx.float(t)));
    (0..=m_max)
        .map(|m| {
            if m == 0 {
                return Ok(0.0);
            }
            let mb = ctx.float(m as f64);
            let m_st = &mb * &dst;
            // direct: x^{me^{-(s+t)}} Γ(1+m)/Γ(1+me^{-(s+t)})
            let direct = &m_st * &ln_x + ctx.ln_gamma_ratio(&(&one + &mb), &(&one + &m_st))?;
            // composed: ∫ y^{me^{-s}} p(t, x, dy) · Γ(1+m)/Γ(1+me^{-s})
            let m_s = &mb * &ds;
            let inner = &m_s * &dt;
            let composed = ctx.ln_gamma_ratio(&(&one + &mb), &(&one + &m_s))?
                + &inner * &ln_x
                + ctx.ln_gamma_ratio(&(&one + &m_s), &(&one + &inner))?;
            let diff = ctx.exp(&direct) - ctx.exp(&composed);
            Ok(crate::specfun::to_f64(&diff).abs())
        })
        .collect()
}

/// `E(X_{t_1}^{m_1} ⋯ X_{t_k}^{m_k}) = ∏_j Γ(1+x_j+m_j)/Γ(1+x_{j-1})` for the
/// process started at 1.
pub fn joint_moment(q: &MomentQuery) -> f64 {
    if q.len() == 1 {
        return gamma_ratio(1.0 + q.exponents()[0], 1.0 + q.weight(0));
    }
    let x = q.weights();
    let log: f64 = q
        .exponents()
        .iter()
        .enumerate()
        .map(|(j, &m)| lgamma(1.0 + x[j + 1] + m) - lgamma(1.0 + x[j]))
        .sum();
    log.exp()
}

/// Mean and variance of `X_t` started at 1.
pub fn process_mean_var(t: f64) -> Result<(f64, f64)> {
    let p = MLParameter::at_time(t)?;
    let mean = ml_moment(p, 1.0)?;
    let second = ml_moment(p, 2.0)?;
    Ok((mean, (second - mean * mean).max(0.0)))
}

/// `Cov(X_s, X_t)` for the process started at 1.
pub fn process_covariance(s: f64, t: f64) -> Result<f64> {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    let joint = if lo == hi {
        ml_moment(MLParameter::at_time(lo)?, 2.0)?
    } else {
        joint_moment(&MomentQuery::new(vec![lo, hi], vec![1.0, 1.0])?)
    };
    Ok(joint - process_mean_var(lo)?.0 * process_mean_var(hi)?.0)
}

/// Generator coefficient `a_k(x)`: `xΨ(2) - x ln x` for `k = 1` and
/// `(-x)^k/(k-1)` for `k ≥ 2`.
pub fn generator_coeff(k: u32, x: f64) -> Result<f64> {
    match k {
        0 => Err(domain("generator coefficients start at k = 1")),
        1 if !(x > 0.0) => Err(domain(format!("a_1 needs x > 0, got {x}"))),
        1 => Ok(x * psi(2.0) - x * x.ln()),
        _ => Ok((-x).powi(k as i32) / (k - 1) as f64),
    }
}

/// `E((x^{e^{-t}} η_t - x)^k)/t`, exact through the binomial expansion in
/// kernel moments.
pub fn generator_limit_estimate(k: u32, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 0.1) {
        return Err(domain(format!("generator estimates need 0 < t <= 0.1, got {t}")));
    }
    if k == 0 || k > 8 {
        return Err(domain(format!("generator estimates need 1 <= k <= 8, got {k}")));
    }
    let kernel = MLKernel::new(t, x)?;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for r in 0..=k {
        sum += binom * (-x).powi((k - r) as i32) * kernel_moment(kernel, r as f64)?;
        binom = binom * (k - r) as f64 / (r + 1) as f64;
    }
    Ok(sum / t)
}

/// Two-level Richardson extrapolation of [`generator_limit_estimate`] over
/// `t ∈ {10⁻², 10⁻³, 10⁻⁴}`.
pub fn generator_extrapolated(k: u32, x: f64) -> Result<f64> {
    let f2 = generator_limit_estimate(k, x, 1e-2)?;
    let f3 = generator_limit_estimate(k, x, 1e-3)?;
    let f4 = generator_limit_estimate(k, x, 1e-4)?;
    let r23 = (10.0 * f3 - f2) / 9.0;
    let r34 = (10.0 * f4 - f3) / 9.0;
    Ok((100.0 * r34 - r23) / 99.0)
}

/// Truncated generator series `Σ_{k=1}^{K} f^{(k)}(x)/k! · a_k(x)` with
/// `derivatives[k] = f^{(k)}(x)` and `K = derivatives.len() - 1`.
///
/// The remainder is not controlled: the series is only known to be exact for
/// polynomials of degree at most `K`.
pub fn generator_series(derivatives: &[f64], x: f64) -> Result<f64> {
    let mut factorial = 1.0;
    let mut sum = 0.0;
    for (k, d) in derivatives.iter().enumerate().skip(1) {
        factorial *= k as f64;
        sum += d / factorial * generator_coeff(k as u32, x)?;
    }
    Ok(sum)
}

/// `φ_t(x) = E(e^{ix ln X_t}) = Γ(1+ix)/Γ(1+ixe^{-t})`.
pub fn characteristic_function(t: f64, x: f64) -> Result<Complex64> {
    check_time(t)?;
    if !x.is_finite() {
        return Err(domain("characteristic function argument must be finite"));
    }
    if x == 0.0 || t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let num = complex_log_gamma(Complex64::new(1.0, x))?;
    let den = complex_log_gamma(Complex64::new(1.0, x * (-t).exp()))?;
    Ok((num - den).exp())
}

/// `T_t f(x) = E(f(x^{e^{-t}} η_t))` for `f(y) = Σ_m c_m y^m`.
pub fn semigroup_apply_poly(t: f64, coefficients: &[f64], x: f64) -> Result<f64> {
    let kernel = MLKernel::new(t, x)?;
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(m, c)| Ok(c * kernel_moment(kernel, m as f64)?))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{mean_turning_time, EULER_GAMMA};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn parameter_validation() {
        assert!(MLParameter::new(-0.1).is_err());
        assert!(MLParameter::new(1.1).is_err());
        assert!(MLParameter::new(f64::NAN).is_err());
        assert_eq!(MLParameter::at_time(0.0).unwrap().alpha(), 1.0);
        assert!(MLKernel::new(-1.0, 1.0).is_err());
        assert!(MLKernel::new(1.0, -1.0).is_err());
    }

    #[test]
    fn ml_moment_boundaries() {
        let one = MLParameter::new(1.0).unwrap();
        let zero = MLParameter::new(0.0).unwrap();
        for m in [0.0, 0.5, 3.0, 7.0] {
            assert_eq!(ml_moment(one, m).unwrap(), 1.0);
        }
        let mut fact = 1.0;
        for m in 1..=10 {
            fact *= m as f64;
            assert!(rel(ml_moment(zero, m as f64).unwrap(), fact) < 1e-13);
        }
        assert_eq!(ml_moment(MLParameter::new(0.3).unwrap(), 0.0).unwrap(), 1.0);
        let half = ml_moment(MLParameter::new(0.5).unwrap(), 1.0).unwrap();
        assert!(rel(half, 2.0 / std::f64::consts::PI.sqrt()) < 1e-14);
        assert!(ml_moment(one, -1.0).is_err());
    }

    #[test]
    fn kernel_moment_examples() {
        for &(t, m) in &[(0.3, 2.0), (1.5, 0.7)] {
            let k = MLKernel::new(t, 1.0).unwrap();
            let p = MLParameter::at_time(t).unwrap();
            assert_eq!(kernel_moment(k, m).unwrap(), ml_moment(p, m).unwrap());
        }
        let k = MLKernel::new(0.0, 2.5).unwrap();
        assert!(rel(kernel_moment(k, 3.0).unwrap(), 2.5f64.powi(3)) < 1e-14);
        assert_eq!(kernel_moment(MLKernel::new(0.8, 3.0).unwrap(), 0.0).unwrap(), 1.0);
        assert_eq!(kernel_moment(MLKernel::new(0.8, 0.0).unwrap(), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn chapman_kolmogorov_examples() {
        let ctx = PrecisionContext::default();
        let d = chapman_kolmogorov_defect(0.4, 1.1, 3.0, 10, &ctx).unwrap();
        assert_eq!(d.len(), 11);
        assert_eq!(d[0], 0.0);
        assert!(d.iter().all(|v| *v < 1e-10), "{d:?}");
        let d = chapman_kolmogorov_defect(0.0, 0.7, 2.0, 10, &ctx).unwrap();
        assert!(d.iter().all(|v| *v < 1e-40), "{d:?}");
        assert!(chapman_kolmogorov_defect(0.1, 0.1, 0.0, 3, &ctx).is_err());
    }

    #[test]
    fn chapman_kolmogorov_detects_a_wrong_kernel() {
        // Replace the composed exponent by e^{-s} alone: the defect is large.
        let ctx = PrecisionContext::default();
        let direct = kernel_moment(MLKernel::new(1.5, 4.0).unwrap(), 3.0).unwrap();
        let wrong = kernel_moment(MLKernel::new(0.4, 4.0).unwrap(), 3.0).unwrap();
        assert!((direct - wrong).abs() > 1.0);
        let d = chapman_kolmogorov_defect(0.4, 1.1, 4.0, 3, &ctx).unwrap();
        assert!(d[3] < 1e-10 * direct);
    }

    #[test]
    fn joint_moment_examples() {
        let q = MomentQuery::single(0.8, 2.5).unwrap();
        let p = MLParameter::at_time(0.8).unwrap();
        assert_eq!(joint_moment(&q), ml_moment(p, 2.5).unwrap());

        // E(X_s X_t) = Γ(2+e^{-(t-s)}) / (Γ(1+e^{-s}+e^{-t}) Γ(1+e^{-(t-s)}))
        let (s, t) = (0.3, 1.2f64);
        let q = MomentQuery::new(vec![s, t], vec![1.0, 1.0]).unwrap();
        let d = (-(t - s)).exp();
        let expected =
            (lgamma(2.0 + d) - lgamma(1.0 + (-s).exp() + (-t).exp()) - lgamma(1.0 + d)).exp();
        assert!(rel(joint_moment(&q), expected) < 1e-13);

        let q = MomentQuery::new(vec![0.1, 0.5, 0.9], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(joint_moment(&q), 1.0);
    }

    /// Nested tower evaluation: condition on `X_{t_{k-1}}`, integrate
    /// `kernel_moment` backwards. Each step turns `y^{a}` at the later time
    /// into `Γ(1+a)/Γ(1+ae^{-Δ}) · y^{ae^{-Δ}}` at the earlier one.
    fn tower(times: &[f64], ms: &[f64]) -> f64 {
        let mut power = 0.0;
        let mut factor = 1.0;
        for j in (0..times.len()).rev() {
            let prev = if j == 0 { 0.0 } else { times[j - 1] };
            let a = power + ms[j];
            let k = MLKernel::new(times[j] - prev, 1.0).unwrap();
            factor *= kernel_moment(k, a).unwrap();
            power = a * (-(times[j] - prev)).exp();
        }
        factor
    }

    #[test]
    fn joint_moment_matches_tower() {
        let times = [0.2, 0.9, 1.7];
        let ms = [1.0, 2.0, 1.0];
        let q = MomentQuery::new(times.to_vec(), ms.to_vec()).unwrap();
        assert!(rel(joint_moment(&q), tower(&times, &ms)) < 1e-12);
    }

    #[test]
    fn mean_and_variance() {
        assert_eq!(process_mean_var(0.0).unwrap(), (1.0, 0.0));
        let (m, v) = process_mean_var(60.0).unwrap();
        assert!((m - 1.0).abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
        // grid argmax of the mean
        let t0 = mean_turning_time();
        let grid: Vec<f64> = (0..3000).map(|i| i as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                process_mean_var(*a).unwrap().0.total_cmp(&process_mean_var(*b).unwrap().0)
            })
            .unwrap();
        assert!((best - t0).abs() <= 1e-3);
    }

    #[test]
    fn generator_coefficients() {
        assert!((generator_coeff(1, 1.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        assert_eq!(generator_coeff(2, 1.7).unwrap(), 1.7 * 1.7);
        assert_eq!(generator_coeff(3, 2.0).unwrap(), -4.0);
        assert!(generator_coeff(1, 0.0).is_err());
        assert!(generator_coeff(0, 1.0).is_err());
    }

    #[test]
    fn generator_estimates_converge() {
        for &(k, x) in &[(2u32, 1.0), (1, 1.0), (3, 0.5)] {
            let target = generator_coeff(k, x).unwrap();
            let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&t| (generator_limit_estimate(k, x, t).unwrap() - target).abs())
                .collect();
            assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
            assert!(errs[2] < 1e-2);
            assert!((generator_extrapolated(k, x).unwrap() - target).abs() < 1e-6);
        }
        assert!(generator_limit_estimate(9, 1.0, 1e-3).is_err());
        assert!(generator_limit_estimate(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn generator_series_on_polynomials() {
        // For f(y) = y^2 the truncated series is exact:
        // Af(x) = lim (T_t f(x) - f(x))/t = d/dt kernel_moment at t = 0.
        let x = 1.3;
        let series = generator_series(&[x * x, 2.0 * x, 2.0], x).unwrap();
        let h = 1e-6;
        let moment = |t: f64| kernel_moment(MLKernel::new(t, x).unwrap(), 2.0).unwrap();
        let derivative = (moment(2.0 * h) - moment(h)) / h;
        assert!((series - derivative).abs() < 1e-4, "{series} vs {derivative}");
    }

    #[test]
    fn characteristic_function_examples() {
        assert_eq!(characteristic_function(0.7, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(characteristic_function(0.0, 3.0).unwrap(), Complex64::new(1.0, 0.0));
        let one = characteristic_function(1.0, 1.0).unwrap();
        let two = characteristic_function(2.0, 1.0).unwrap();
        assert!((two - one * one).norm() > 1e-3);
    }

    #[test]
    fn semigroup_on_polynomials() {
        assert_eq!(semigroup_apply_poly(0.9, &[1.0], 2.0).unwrap(), 1.0);
        let (mean, _) = process_mean_var(0.6).unwrap();
        assert_eq!(semigroup_apply_poly(0.6, &[0.0, 1.0], 1.0).unwrap(), mean);
        let x = 1.7;
        let v = semigroup_apply_poly(0.0, &[0.0, -1.0, 1.0], x).unwrap();
        assert!((v - (x * x - x)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn marginals_of_joint_moments(
            gaps in prop::collection::vec(0.05f64..1.5, 2..5),
            pick in 0usize..4,
            m in 0.0f64..5.0,
        ) {
            let mut times = Vec::new();
            let mut t = 0.0;
            for g in &gaps {
                t += g;
                times.push(t);
            }
            let i = pick % times.len();
            let mut ms = vec![0.0; times.len()];
            ms[i] = m;
            let q = MomentQuery::new(times.clone(), ms).unwrap();
            let marginal = ml_moment(MLParameter::at_time(times[i]).unwrap(), m).unwrap();
            prop_assert!(rel(joint_moment(&q), marginal) < 1e-12);
        }

        #[test]
        fn correlations_are_bounded(s in 0.0f64..3.0, t in 0.0f64..3.0) {
            let (_, vs) = process_mean_var(s).unwrap();
            let (_, vt) = process_mean_var(t).unwrap();
            prop_assume!(vs > 1e-8 && vt > 1e-8);
            let c = process_covariance(s, t).unwrap() / (vs * vt).sqrt();
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&c), "{}", c);
            let (m1, _) = process_mean_var(s).unwrap();
            let m2 = ml_moment(MLParameter::at_time(s).unwrap(), 2.0).unwrap();
            prop_assert!(m2 - m1 * m1 >= -1e-12);
        }

        #[test]
        fn characteristic_function_symmetry(t in 0.0f64..4.0, x in -20.0f64..20.0) {
            let a = characteristic_function(t, x).unwrap();
            let b = characteristic_function(t, -x).unwrap();
            prop_assert!((a.conj() - b).norm() < 1e-12);
            prop_assert!(a.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn chapman_kolmogorov_grid(
            s in 0.0f64..2.0,
            t in 0.0f64..2.0,
            x in 0.1f64..5.0,
        ) {
            let ctx = PrecisionContext::default();
            let d = chapman_kolmogorov_defect(s, t, x, 10, &ctx).unwrap();
            prop_assert!(d.iter().all(|v| *v < 1e-10));
        }
    }
}
