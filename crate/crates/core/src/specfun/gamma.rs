//! Real and complex log-gamma, digamma and ascending factorials.
//!
//! `ln Γ` is evaluated by a Taylor series around 1 and 2 (where it has its
//! zeros, so relative accuracy is kept), the recurrence `Γ(x+1) = xΓ(x)` and
//! the Stirling series for large arguments.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Threshold above which the Stirling series is used directly.
const ASYMPTOTIC_MIN: f64 = 10.0;

const ZETA_TERMS: usize = 48;

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ζ(k) - 1` for `k = 0..ZETA_TERMS` (entries 0 and 1 unused).
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; ZETA_TERMS];
        // Euler–Maclaurin with the head summed explicitly up to N - 1.
        const N: f64 = 12.0;
        for (k, slot) in out.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let mut head = 0.0;
            for n in (2..12).rev() {
                head += (n as f64).powf(-s);
            }
            let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
            // Σ_j B_2j/(2j)! · s(s+1)…(s+2j-2) · N^{-s-2j+1}
            let mut rising = s;
            let mut factorial = 2.0;
            for (j, b) in BERNOULLI.iter().enumerate().take(6) {
                let two_j = 2.0 * (j as f64 + 1.0);
                tail += b / factorial * rising * N.powf(-s - two_j + 1.0);
                rising *= (s + two_j - 1.0) * (s + two_j);
                factorial *= (two_j + 1.0) * (two_j + 2.0);
            }
            *slot = head + tail;
        }
        out
    })
}

/// `Σ_{k≥2} (-1)^k (ζ(k)-1) z^k / k`, valid for `|z| ≤ 1/2`.
fn zeta_series(z: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut sum = 0.0;
    for k in (2..ZETA_TERMS).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * zeta[k] * z.powi(k as i32) / k as f64;
    }
    sum
}

fn stirling_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        corr += b / (two_j * (two_j - 1.0)) * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_unchecked(x + 1.0) - x.ln()
    } else if x < 1.5 {
        // ln Γ(1+z) = -ln(1+z) + z(1-γ) + Σ (-1)^k (ζ(k)-1) z^k / k
        let z = x - 1.0;
        -z.ln_1p() + z * (1.0 - EULER_GAMMA) + zeta_series(z)
    } else if x < 2.5 {
        // ln Γ(2+z) = z(1-γ) + Σ (-1)^k (ζ(k)-1) z^k / k
        let z = x - 2.0;
        z * (1.0 - EULER_GAMMA) + zeta_series(z)
    } else if x < ASYMPTOTIC_MIN {
        let mut shifted = x;
        let mut prod = 1.0;
        while shifted < ASYMPTOTIC_MIN {
            prod *= shifted;
            shifted += 1.0;
        }
        stirling_series(shifted) - prod.ln()
    } else {
        stirling_series(x)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `ln Γ(x)` without the domain check. Callers guarantee `x > 0`.
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "lgamma({x})");
    ln_gamma_unchecked(x)
}

/// Digamma function `Ψ = Γ'/Γ` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("digamma requires finite x > 0, got {x}")));
    }
    let mut shifted = x;
    let mut acc = 0.0;
    while shifted < ASYMPTOTIC_MIN {
        acc -= 1.0 / shifted;
        shifted += 1.0;
    }
    let inv2 = 1.0 / (shifted * shifted);
    let mut pow = inv2;
    let mut series = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        series += b / two_j * pow;
        pow *= inv2;
    }
    Ok(acc + shifted.ln() - 0.5 / shifted - series)
}

pub(crate) fn psi(x: f64) -> f64 {
    digamma(x).expect("digamma argument must be positive")
}

/// Time `t₀` at which the Mittag–Leffler process mean `1/Γ(1+e^{-t})` peaks,
/// i.e. the root of `Ψ(1+e^{-t}) = 0` on `[0, 5]`, found by bisection.
pub fn mean_turning_time() -> f64 {
    let f = |t: f64| psi(1.0 + (-t).exp());
    let (mut lo, mut hi) = (0.0_f64, 5.0_f64);
    // Ψ(2) > 0 and Ψ(1+e^{-5}) < 0.
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Principal branch of `ln Γ(z)` for `Re z > 0`.
pub fn complex_log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(domain(format!("complex_log_gamma requires Re z > 0, got {z}")));
    }
    let mut w = z;
    let mut logs = Complex64::new(0.0, 0.0);
    while w.re < 12.0 {
        logs += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        corr += pow * (b / (two_j * (two_j - 1.0)));
        pow *= inv2;
    }
    let stirling = (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr;
    Ok(stirling - logs)
}

/// `ln [x]_m = ln Γ(x+m) - ln Γ(x)`, accurate also when `x` is large.
pub fn log_ascending_factorial(x: f64, m: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ascending factorial requires x > 0, got {x}")));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(domain(format!("ascending factorial requires m >= 0, got {m}")));
    }
    Ok(ln_rising(x, m))
}

pub(crate) fn ln_rising(x: f64, m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    if x < ASYMPTOTIC_MIN {
        return ln_gamma_unchecked(x + m) - ln_gamma_unchecked(x);
    }
    // Difference of two Stirling series, arranged to avoid subtracting the
    // two O(x ln x) leading terms.
    let y = x + m;
    let lead = (x - 0.5) * (m / x).ln_1p() + m * y.ln() - m;
    let (ix, iy) = (1.0 / x, 1.0 / y);
    let (ix2, iy2) = (ix * ix, iy * iy);
    let (mut px, mut py) = (ix, iy);
    let mut corr = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        corr += b / (two_j * (two_j - 1.0)) * (py - px);
        px *= ix2;
        py *= iy2;
    }
    lead + corr
}

/// Ascending factorial `[x]_m = Γ(x+m)/Γ(x)`.
///
/// Integer `m` up to 64 is evaluated as the product `x(x+1)⋯(x+m-1)`; every
/// other exponent goes through log-space.
pub fn ascending_factorial(x: f64, m: f64) -> Result<f64> {
    log_ascending_factorial(x, m)?;
    Ok(rising(x, m))
}

pub(crate) fn rising(x: f64, m: f64) -> f64 {
    if m.fract() == 0.0 && m <= 64.0 {
        let mut prod = 1.0;
        let mut k = 0.0;
        while k < m {
            prod *= x + k;
            k += 1.0;
        }
        prod
    } else {
        ln_rising(x, m).exp()
    }
}

/// `Γ(a)/Γ(b)` through log-gamma.
pub(crate) fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0;
    }
    (lgamma(a) - lgamma(b)).exp()
}
