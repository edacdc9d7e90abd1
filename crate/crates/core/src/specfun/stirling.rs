use dashu_int::IBig;

use crate::error::{Error, Result};

/// Default table bound for exact distribution work.
pub const DEFAULT_N_MAX: usize = 200;

/// Exact Stirling numbers of both kinds for `0 ≤ k ≤ n ≤ n_max`.
///
/// `first_signed[n][k]` is the signed `s(n,k)` with
/// `(x)_n = x(x-1)⋯(x-n+1) = Σ_k s(n,k) x^k`; `second[n][k]` is `S(n,k)`.
/// Rows are stored triangularly. The table is immutable after construction.
#[derive(Debug, Clone)]
pub struct StirlingTables {
    n_max: usize,
    first_signed: Vec<Vec<IBig>>,
    second: Vec<Vec<IBig>>,
}

impl StirlingTables {
    pub fn new(n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let mut first: Vec<Vec<IBig>> = Vec::with_capacity(n_max + 1);
        let mut second: Vec<Vec<IBig>> = Vec::with_capacity(n_max + 1);
        first.push(vec![IBig::ONE]);
        second.push(vec![IBig::ONE]);
        for n in 0..n_max {
            let mut f = vec![IBig::ZERO; n + 2];
            let mut s = vec![IBig::ZERO; n + 2];
            let nn = IBig::from(n);
            for k in 1..=n + 1 {
                let (f_prev, s_prev) = (&first[n][k - 1], &second[n][k - 1]);
                // s(n+1,k) = s(n,k-1) - n·s(n,k);  S(n+1,k) = S(n,k-1) + k·S(n,k)
                f[k] = if k <= n {
                    f_prev - &nn * &first[n][k]
                } else {
                    f_prev.clone()
                };
                s[k] = if k <= n {
                    s_prev + IBig::from(k) * &second[n][k]
                } else {
                    s_prev.clone()
                };
            }
            first.push(f);
            second.push(s);
        }
        Self {
            n_max,
            first_signed: first,
            second,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check(&self, n: usize, k: usize) -> Result<()> {
        if n > self.n_max || k > n {
            return Err(Error::OutOfRange(format!(
                "Stirling index (n={n}, k={k}) outside 0 <= k <= n <= {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Signed Stirling number of the first kind `s(n,k)`.
    pub fn first(&self, n: usize, k: usize) -> Result<&IBig> {
        self.check(n, k)?;
        Ok(&self.first_signed[n][k])
    }

    /// Stirling number of the second kind `S(n,k)`.
    pub fn second(&self, n: usize, k: usize) -> Result<&IBig> {
        self.check(n, k)?;
        Ok(&self.second[n][k])
    }

    pub(crate) fn first_row(&self, n: usize) -> &[IBig] {
        &self.first_signed[n]
    }

    pub(crate) fn second_unchecked(&self, n: usize, k: usize) -> &IBig {
        &self.second[n][k]
    }
}

/// `S(m, i)` as `f64` for small `m`, used by the raw-moment expansions.
///
/// Values are exact for `m ≤ 25`.
pub(crate) fn second_kind_f64(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for n in 0..m {
        let mut next = vec![0.0; n + 2];
        for k in 1..=n + 1 {
            let carry = if k <= n { k as f64 * row[k] } else { 0.0 };
            next[k] = row[k - 1] + carry;
        }
        row = next;
    }
    row
}

/// Signed `S(m,i)·(-1)^{m-i}`: coefficients of `x^m = Σ_i c_i [x]_i`.
pub(crate) fn power_to_rising(m: usize) -> Vec<f64> {
    second_kind_f64(m)
        .into_iter()
        .enumerate()
        .map(|(i, s)| if (m - i) % 2 == 0 { s } else { -s })
        .collect()
}
