use dashu_int::IBig;

use super::CoalescentSpec;
use crate::error::{domain, Error, Result};
use crate::specfun::{to_f64, BigFloat, PrecisionContext, StirlingTables};

/// Entries above this magnitude below zero are not round-off.
const NEGATIVE_CLAMP: f64 = 1e-20;
/// Largest row-sum deviation that is renormalized away.
const ROW_SUM_TOL: f64 = 1e-10;

/// Transition probabilities `p_ij(t)` for all `1 ≤ j ≤ i ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    t: f64,
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `p_ij(t)` for `j = 1..=i`, indexed by `j - 1`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i - 1]
    }

    /// `p_ij(t)`, zero for `j > i`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i - 1].get(j - 1).copied().unwrap_or(0.0)
    }

    /// Dense `n × n` matrix product `self · other`.
    pub fn compose(&self, other: &TransitionMatrix) -> Vec<Vec<f64>> {
        assert_eq!(self.n, other.n);
        (1..=self.n)
            .map(|i| {
                (1..=self.n)
                    .map(|j| (j..=i).map(|l| self.get(i, l) * other.get(l, j)).sum())
                    .collect()
            })
            .collect()
    }
}

fn factorial(k: usize) -> IBig {
    (2..=k).fold(IBig::ONE, |acc, v| acc * IBig::from(v))
}

/// Evaluate `p_ij(t) = (-1)^{i+j} (Γ(j)/Γ(i)) Σ_{k=j}^{i} e^{-(k-1)t} s(i,k) S(k,j)`
/// for one start state `i` at the context precision.
fn row_unchecked(
    i: usize,
    t: f64,
    tables: &StirlingTables,
    ctx: &PrecisionContext,
) -> Result<Vec<f64>> {
    if i == 1 {
        return Ok(vec![1.0]);
    }
    let y = ctx.float((-t).exp());
    let mut powers: Vec<BigFloat> = Vec::with_capacity(i);
    powers.push(ctx.float(1.0));
    for k in 1..i {
        let next = &powers[k - 1] * &y;
        powers.push(next);
    }
    let first = tables.first_row(i);
    let fact_i = ctx.int(&factorial(i - 1));
    let mut row = Vec::with_capacity(i);
    let mut fact_j = IBig::ONE;
    for j in 1..=i {
        if j > 1 {
            fact_j *= IBig::from(j - 1);
        }
        let mut acc = ctx.zero();
        for k in j..=i {
            let coeff = &first[k] * tables.second_unchecked(k, j);
            acc += ctx.int(&coeff) * &powers[k - 1];
        }
        let mut value = to_f64(&(acc * ctx.int(&fact_j) / &fact_i));
        if (i + j) % 2 == 1 {
            value = -value;
        }
        row.push(value);
    }

    let min = row.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_CLAMP {
        return Err(Error::InsufficientPrecision {
            bits: ctx.bits(),
            deviation: -min,
        });
    }
    for p in row.iter_mut() {
        *p = p.max(0.0);
    }
    let sum: f64 = row.iter().sum();
    let deviation = (sum - 1.0).abs();
    if deviation > ROW_SUM_TOL || !sum.is_finite() {
        return Err(Error::InsufficientPrecision {
            bits: ctx.bits(),
            deviation,
        });
    }
    for p in row.iter_mut() {
        *p /= sum;
    }
    Ok(row)
}

fn check(n: usize, t: f64, tables: &StirlingTables) -> Result<()> {
    if n > tables.n_max() {
        return Err(Error::OutOfRange(format!(
            "n = {n} exceeds the Stirling table bound {}",
            tables.n_max()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

/// Law of `N_t^(n)`: entry `j - 1` is `P(N_t^(n) = j)`.
///
/// Round-off negatives above `-1e-20` are clamped and the row renormalized
/// when its sum is within `1e-10` of one; anything worse is reported as
/// [`Error::InsufficientPrecision`].
pub fn transition_probabilities(
    spec: CoalescentSpec,
    t: f64,
    tables: &StirlingTables,
    ctx: &PrecisionContext,
) -> Result<Vec<f64>> {
    let n = spec.n() as usize;
    check(n, t, tables)?;
    row_unchecked(n, t, tables, ctx)
}

/// All rows `i = 1..=n` of the transition matrix `P(t)`.
pub fn transition_matrix(
    spec: CoalescentSpec,
    t: f64,
    tables: &StirlingTables,
    ctx: &PrecisionContext,
) -> Result<TransitionMatrix> {
    let n = spec.n() as usize;
    check(n, t, tables)?;
    let rows = (1..=n)
        .map(|i| row_unchecked(i, t, tables, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionMatrix { n, t, rows })
}
