use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{MLKernel, MLParameter};

/// Draw from the Mittag–Leffler law with parameter `α`.
///
/// For `0 < α < 1` this is `S^{-α}` with `S` positive `α`-stable
/// (`E e^{-λS} = e^{-λ^α}`), drawn by Kanter's representation
/// `S^{-α} = sin(U)/sin(αU)^α · (E/sin((1-α)U))^{1-α}` with `U` uniform on
/// `(0, π)` and `E` standard exponential. `α = 1` gives 1 and `α = 0` a
/// standard exponential.
pub fn ml_sample<R: Rng + ?Sized>(p: MLParameter, rng: &mut R) -> f64 {
    let alpha = p.alpha();
    if alpha == 1.0 {
        return 1.0;
    }
    let e: f64 = Exp1.sample(rng);
    if alpha == 0.0 {
        return e;
    }
    // (0, π]; sin stays positive at the right end in floating point
    let u = PI * (1.0 - rng.random::<f64>());
    let ln_value = u.sin().ln() - alpha * (alpha * u).sin().ln()
        + (1.0 - alpha) * (e.ln() - ((1.0 - alpha) * u).sin().ln());
    ln_value.exp()
}

/// Draw from `p(t, x, ·)`: `x^{e^{-t}}` times a Mittag–Leffler draw with
/// parameter `e^{-t}`.
pub fn kernel_sample<R: Rng + ?Sized>(k: MLKernel, rng: &mut R) -> f64 {
    if k.x() == 0.0 {
        return 0.0;
    }
    let a = (-k.t()).exp();
    let p = MLParameter::new(a).expect("e^{-t} lies in [0,1]");
    k.x().powf(a) * ml_sample(p, rng)
}
