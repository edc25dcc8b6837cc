//! Modified Bessel function I₀.

use std::f64::consts::PI;

/// e^{-x} I₀(x) for x ≥ 0.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 20.0 {
        return (-x).exp() * i0_series(x);
    }
    // asymptotic series Σ ((2k-1)!!)² / (k! (8x)^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kk = (2 * k - 1) as f64;
        let next = term * kk * kk / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 20.0 {
        i0_series(x)
    } else {
        let s = bessel_i0_scaled(x);
        if x < 700.0 {
            s * x.exp()
        } else {
            // split the exponential to delay overflow
            s * (0.5 * x).exp() * (0.5 * x).exp()
        }
    }
}
