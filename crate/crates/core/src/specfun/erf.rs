//! Complementary error function and its exponentially scaled form.

use std::f64::consts::PI;

use super::gamma::upper_gamma_scaled;

const SERIES_LIMIT_SQ: f64 = 1.5;

/// erf(x) for moderate |x| through the all-positive series
/// erf x = (2/√π) e^{-x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1)).
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// erfc(x) = Γ(1/2, x²)/√π evaluated through the continued fraction.
fn erfcx_cf(x: f64) -> f64 {
    x * upper_gamma_scaled(0.5, x * x) / PI.sqrt()
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x * x < SERIES_LIMIT_SQ {
        erf_series(x)
    } else {
        x.signum() * (1.0 - erfc(x.abs()))
    }
}

/// Complementary error function, accurate to ~1e-16 absolute.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x * x < SERIES_LIMIT_SQ {
        return 1.0 - erf_series(x);
    }
    if x > 27.3 {
        return 0.0;
    }
    (-x * x).exp() * erfcx_cf(x)
}

/// Scaled complementary error function e^{x²} erfc(x); finite for all x
/// below the overflow point of e^{x²}.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x * x < SERIES_LIMIT_SQ {
        return (x * x).exp() * (1.0 - erf_series(x));
    }
    if x > 1e8 {
        return 1.0 / (PI.sqrt() * x);
    }
    erfcx_cf(x)
}
