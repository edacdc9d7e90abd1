//! Running moments and the two-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

/// Count / sum / sum-of-squares accumulator. Merging is associative, and the
/// Monte Carlo driver always merges in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanAccumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for MeanAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Outcome of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    /// Effective sample size `n₁n₂/(n₁+n₂)`.
    pub effective_n: f64,
}

impl KsOutcome {
    /// Asymptotic critical value of the statistic at significance `level`.
    pub fn critical_value(&self, level: f64) -> f64 {
        kolmogorov_quantile(1.0 - level) / self.effective_n.sqrt()
    }

    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample KS statistic `sup |F₁ - F₂|` with ties handled by advancing
/// both samples through equal values together.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs non-empty samples");
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // Q is 1 to machine precision; the alternating series converges
        // too slowly here.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Inverse of the Kolmogorov CDF by bisection.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - kolmogorov_survival(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sample KS test with the asymptotic null distribution.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    let statistic = ks_statistic(a, b);
    let effective_n = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let p_value = kolmogorov_survival(effective_n.sqrt() * statistic);
    KsOutcome {
        statistic,
        p_value,
        effective_n,
    }
}
