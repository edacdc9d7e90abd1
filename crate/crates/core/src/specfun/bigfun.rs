//! Elementary and gamma functions in the bounded-precision context.

use dashu_int::IBig;

use super::precision::{BigFloat, PrecisionContext};
use crate::error::{domain, Result};

/// `B_2, B_4, …, B_40` as numerator/denominator pairs.
const BERNOULLI: [(i128, i128); 20] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
    (-7709321041217, 510),
    (2577687858367, 6),
    (-26315271553053477373, 1919190),
    (2929993913841559, 6),
    (-261082718496449122051, 13530),
];

/// Arguments are shifted up to this value before the asymptotic series is
/// used; with twenty terms the truncation error is below `1e-55`.
const SHIFT_TO: f64 = 64.0;

impl PrecisionContext {
    pub fn exp(&self, x: &BigFloat) -> BigFloat {
        x.clone().with_precision(self.bits() as usize).value().exp()
    }

    pub fn ln(&self, x: &BigFloat) -> BigFloat {
        x.clone().with_precision(self.bits() as usize).value().ln()
    }

    /// `ln Γ(z) - ½ ln 2π` for `z > 0`; the constant cancels in every ratio
    /// of gamma functions with as many factors above as below.
    fn ln_gamma_shifted(&self, z: &BigFloat) -> BigFloat {
        let mut w = z.clone();
        let mut prod = self.float(1.0);
        let limit = self.float(SHIFT_TO);
        while w < limit {
            prod *= &w;
            w += self.float(1.0);
        }
        let half = self.float(0.5);
        let lnw = self.ln(&w);
        let mut value = (&w - &half) * &lnw - &w;
        let inv = self.float(1.0) / &w;
        let inv2 = &inv * &inv;
        let mut pow = inv;
        for (j, &(num, den)) in BERNOULLI.iter().enumerate() {
            let two_j = 2 * (j as i128 + 1);
            let coeff = self.int(&IBig::from(num)) / self.int(&IBig::from(den * two_j * (two_j - 1)));
            value += coeff * &pow;
            pow *= &inv2;
        }
        value - self.ln(&prod)
    }

    /// `ln(Γ(a)/Γ(b))` for `a, b > 0`.
    pub fn ln_gamma_ratio(&self, a: &BigFloat, b: &BigFloat) -> Result<BigFloat> {
        let zero = self.zero();
        if *a <= zero || *b <= zero {
            return Err(domain("gamma ratio needs positive arguments"));
        }
        Ok(self.ln_gamma_shifted(a) - self.ln_gamma_shifted(b))
    }
}
