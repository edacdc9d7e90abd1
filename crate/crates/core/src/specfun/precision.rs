use dashu_float::{round::mode::HalfEven, FBig};
use dashu_int::IBig;

use crate::error::{domain, Result};

/// Binary floating-point number with a bounded mantissa.
pub type BigFloat = FBig<HalfEven, 2>;

pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Working precision for alternating sums plus the tolerances used when
/// comparing their results downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    bits: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            bits: DEFAULT_PRECISION_BITS,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_tolerances(bits, 1e-10, 1e-10)
    }

    pub fn with_tolerances(bits: u32, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if bits < 64 {
            return Err(domain(format!("precision must be at least 64 bits, got {bits}")));
        }
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        Ok(Self {
            bits,
            abs_tol,
            rel_tol,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Round an exact integer to the working precision.
    pub fn int(&self, v: &IBig) -> BigFloat {
        BigFloat::from(v.clone())
            .with_precision(self.bits as usize)
            .value()
    }

    /// Lift a double (exactly) into the working precision.
    pub fn float(&self, v: f64) -> BigFloat {
        BigFloat::try_from(v)
            .expect("finite value")
            .with_precision(self.bits as usize)
            .value()
    }

    pub fn zero(&self) -> BigFloat {
        self.float(0.0)
    }

    /// `|a - b| ≤ abs_tol + rel_tol·|b|`
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * b.abs()
    }
}

pub fn to_f64(v: &BigFloat) -> f64 {
    v.to_f64().value()
}
