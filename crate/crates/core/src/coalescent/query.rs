use crate::error::{Error, Result};

/// Time grid `0 ≤ t₁ < … < t_k` with exponents `m₁…m_k ≥ 0` and the derived
/// weights `x_j = Σ_{i>j} m_i e^{-(t_i - t_j)}`, `j = 0..k` (with `t₀ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentQuery {
    times: Vec<f64>,
    exponents: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentQuery {
    pub fn new(times: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidQuery("at least one time is required".into()));
        }
        if times.len() != exponents.len() {
            return Err(Error::InvalidQuery(format!(
                "{} times but {} exponents",
                times.len(),
                exponents.len()
            )));
        }
        if !(times[0] >= 0.0) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidQuery("times must be finite and nonnegative".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidQuery("times must be strictly increasing".into()));
        }
        if exponents.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidQuery("exponents must be finite and nonnegative".into()));
        }
        let k = times.len();
        let mut weights = vec![0.0; k + 1];
        for j in (1..=k).rev() {
            let prev = if j >= 2 { times[j - 2] } else { 0.0 };
            weights[j - 1] = (weights[j] + exponents[j - 1]) * (-(times[j - 1] - prev)).exp();
        }
        Ok(Self {
            times,
            exponents,
            weights,
        })
    }

    pub fn single(t: f64, m: f64) -> Result<Self> {
        Self::new(vec![t], vec![m])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// `x_0, …, x_k`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    /// Exponents rounded to integers, if they all are integers.
    pub fn integer_exponents(&self) -> Option<Vec<usize>> {
        self.exponents
            .iter()
            .map(|&m| (m.fract() == 0.0 && m <= 64.0).then_some(m as usize))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weights_need_not_be_monotone() {
        // x_1 = e^{-1} but x_0 = e^{-2} when the middle exponent vanishes.
        let q = MomentQuery::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(q.weight(0) < q.weight(1));
        let q = MomentQuery::new(vec![1.0, 2.0], vec![3.0, 1.0]).unwrap();
        assert!(q.weight(0) > q.weight(1) && q.weight(1) > q.weight(2));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(MomentQuery::new(vec![0.5, 0.5], vec![1.0, 1.0]).is_err());
        assert!(MomentQuery::new(vec![0.5, 0.2], vec![1.0, 1.0]).is_err());
        assert!(MomentQuery::new(vec![-0.1], vec![1.0]).is_err());
        assert!(MomentQuery::new(vec![0.1], vec![-1.0]).is_err());
        assert!(MomentQuery::new(vec![0.1], vec![]).is_err());
        assert!(MomentQuery::new(vec![], vec![]).is_err());
    }

    proptest! {
        #[test]
        fn weight_invariants(
            gaps in prop::collection::vec(0.01f64..2.0, 1..6),
            start in 0.0f64..1.0,
            ms in prop::collection::vec(0.0f64..4.0, 6),
        ) {
            let mut times = Vec::new();
            let mut t = start;
            for g in &gaps {
                times.push(t);
                t += g;
            }
            let k = times.len();
            let q = MomentQuery::new(times.clone(), ms[..k].to_vec()).unwrap();
            let x = q.weights();
            prop_assert_eq!(x[k], 0.0);
            let x0: f64 = (0..k).map(|i| ms[i] * (-times[i]).exp()).sum();
            prop_assert!((x[0] - x0).abs() <= 1e-12 * x0.max(1.0));
            for j in 0..k {
                prop_assert!(x[j] >= 0.0);
                let direct: f64 = (j + 1..=k)
                    .map(|i| ms[i - 1] * (-(times[i - 1] - if j == 0 { 0.0 } else { times[j - 1] })).exp())
                    .sum();
                prop_assert!((x[j] - direct).abs() <= 1e-12 * direct.max(1.0));
            }
        }
    }
}
