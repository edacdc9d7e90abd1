//! The killed, drift-free subordinator `S` with Lévy density
//! `ϱ(u) = e^{-u/α} / (Γ(1-α) (1-e^{-u/α})^{α+1})` and killing rate
//! `1/Γ(1-α)`, whose exponential functional `∫_0^∞ e^{-S_t} dt` is
//! Mittag–Leffler with parameter `α`.
//!
//! Integrals against `ϱ` are taken in the variable `y = 1 - e^{-u/α}`, where
//! `ϱ(u) du = α y^{-α-1} dy / Γ(1-α)` on `(0, 1)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::specfun::{gamma_ratio, lgamma};

/// Parameters of the killed subordinator and of its simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorSpec {
    alpha: f64,
    killing_rate: f64,
    step: f64,
    truncation: f64,
    drift: f64,
}

impl SubordinatorSpec {
    pub fn new(alpha: f64, step: f64, truncation: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("subordinator needs 0 < alpha < 1, got {alpha}")));
        }
        if !(step > 0.0) || !(truncation > 0.0) {
            return Err(domain("step and truncation must be positive"));
        }
        let mut spec = Self {
            alpha,
            killing_rate: (-lgamma(1.0 - alpha)).exp(),
            step,
            truncation,
            drift: 0.0,
        };
        spec.drift = small_jump_drift(&spec, truncation)?;
        Ok(spec)
    }

    /// Default discretization: step `10⁻²`, truncation `10⁻⁴`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1e-2, 1e-4)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn killing_rate(&self) -> f64 {
        self.killing_rate
    }

    /// Grid step of the trapezoid rule for the exponential functional.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Jumps below this size are replaced by their mean drift.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    fn y_of(&self, u: f64) -> f64 {
        -(-u / self.alpha).exp_m1()
    }
}

/// `ϱ(u)` for `u > 0`.
pub fn levy_density(s: &SubordinatorSpec, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(domain(format!("Levy density needs u > 0, got {u}")));
    }
    let a = s.alpha;
    let y = s.y_of(u);
    Ok(s.killing_rate * (-u / a).exp() / y.powf(a + 1.0))
}

/// `ϱ((ε, ∞)) = (y_ε^{-α} - 1)/Γ(1-α)`.
pub fn levy_tail_mass(s: &SubordinatorSpec, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(domain(format!("tail mass needs eps > 0, got {eps}")));
    }
    Ok(s.killing_rate * (s.y_of(eps).powf(-s.alpha) - 1.0))
}

/// Mean of the jumps below `ε`, `∫_0^ε u ϱ(du)`.
pub fn small_jump_drift(s: &SubordinatorSpec, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(domain(format!("drift needs eps > 0, got {eps}")));
    }
    let a = s.alpha;
    let y_eps = s.y_of(eps);
    // u ϱ(du) = α(-α ln(1-y)) y^{-α-1} dy / Γ(1-α); with y = w^{1/(1-α)} the
    // integrand becomes α² h(y)/(1-α) with h(y) = -ln(1-y)/y, which is smooth.
    let w_max = y_eps.powf(1.0 - a);
    let integrand = |w: f64| {
        let y = w.powf(1.0 / (1.0 - a));
        let h = if y < 1e-300 { 1.0 } else { -(-y).ln_1p() / y };
        a * a * h / (1.0 - a)
    };
    let est = integrate(integrand, 0.0, w_max, Tolerance::default())?;
    Ok(s.killing_rate * est.value)
}

/// `Φ(x) = Γ(1+αx)/Γ(1-α+αx)`.
pub fn laplace_exponent_closed(s: &SubordinatorSpec, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("Laplace exponent needs x >= 0, got {x}")));
    }
    let a = s.alpha;
    Ok(gamma_ratio(1.0 + a * x, 1.0 - a + a * x))
}

/// `Φ(x) = k + ∫_{(0,∞)} (1 - e^{-xu}) ϱ(du)` by adaptive quadrature.
///
/// In `y` the integrand is `(1-(1-y)^{αx}) α y^{-α-1}`; the further change
/// `y = w^{1/(1-α)}` removes the endpoint singularity at zero.
pub fn laplace_exponent_quadrature(s: &SubordinatorSpec, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("Laplace exponent needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(s.killing_rate);
    }
    let a = s.alpha;
    let ax = a * x;
    let p = 1.0 / (1.0 - a);
    let integrand = |w: f64| {
        if w <= 0.0 {
            // limit of (1-(1-y)^{αx}) / y as y → 0
            return ax * a * p;
        }
        let ln_w = w.ln();
        let y = (p * ln_w).exp();
        // ln(1-y) with 1-y computed without cancellation
        let ln_one_minus_y = if y < 0.5 { (-y).ln_1p() } else { (-(p * ln_w).exp_m1()).ln() };
        let numer = -(ax * ln_one_minus_y).exp_m1();
        // dy·y^{-α-1} = p w^{-p} dw, and w^{-p} = 1/y
        numer / y * a * p
    };
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-10,
        max_intervals: 4000,
    };
    let est = integrate(integrand, 0.0, 1.0, tol)?;
    Ok(s.killing_rate * (1.0 + est.value))
}

/// `E(I^m) = m!/(Φ(1)⋯Φ(m))` for integer `m`.
pub fn exponential_functional_moment(s: &SubordinatorSpec, m: u32) -> Result<f64> {
    let mut value = 1.0;
    for j in 1..=m {
        value *= j as f64 / laplace_exponent_closed(s, j as f64)?;
    }
    Ok(value)
}

/// Stop integrating once `e^{-S}` is below this.
const NEGLIGIBLE: f64 = 1e-18;

/// Simulate `I = ∫_0^ζ e^{-S_t} dt` up to the killing time `ζ`.
///
/// Jumps larger than `truncation` arrive as a Poisson process and are drawn
/// by inverting their distribution in `y`; smaller jumps are replaced by
/// their mean drift. The integral is the trapezoid rule on a grid of width
/// `step`, with the last cell cut at `ζ`.
pub fn exponential_functional_sample<R: Rng + ?Sized>(
    s: &SubordinatorSpec,
    rng: &mut R,
) -> Result<f64> {
    if s.step > 1e-2 || s.truncation > 1e-4 {
        return Err(Error::Domain(format!(
            "exponential functional needs step <= 1e-2 and truncation <= 1e-4, got {} and {}",
            s.step, s.truncation
        )));
    }
    let a = s.alpha;
    let y_eps = s.y_of(s.truncation);
    let top = y_eps.powf(-a);
    let jump_rate = s.killing_rate * (top - 1.0);
    let drift = s.drift;

    let zeta: f64 = Exp1.sample(rng);
    let zeta = zeta / s.killing_rate;
    let first: f64 = Exp1.sample(rng);
    let mut next_jump = first / jump_rate;
    let mut jumps_total = 0.0;
    let level = |t: f64, jumps: f64| drift * t + jumps;

    let mut t = 0.0;
    let mut f_prev = 1.0;
    let mut integral = 0.0;
    while t < zeta {
        let t_next = (t + s.step).min(zeta);
        while next_jump <= t_next {
            let v: f64 = rng.random();
            let y = (top - v * (top - 1.0)).powf(-1.0 / a);
            let u = -a * (-y).ln_1p();
            jumps_total += u;
            let gap: f64 = Exp1.sample(rng);
            next_jump += gap / jump_rate;
        }
        let f_next = (-level(t_next, jumps_total)).exp();
        integral += 0.5 * (f_prev + f_next) * (t_next - t);
        t = t_next;
        f_prev = f_next;
        if f_prev < NEGLIGIBLE {
            break;
        }
    }
    Ok(integral)
}
