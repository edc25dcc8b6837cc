//! Gauss ₂F₁ and Kummer ₁F₁ hypergeometric functions on the real line.

use super::gamma::ln_gamma_sign;
use super::NeumaierSum;
use crate::error::{domain, Result};

const SERIES_CAP: usize = 100_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Direct ₂F₁ series. Returns the sum and Σ|term| (a cancellation gauge).
fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> (f64, f64) {
    let mut sum = NeumaierSum::new(1.0);
    let mut abs_sum = 1.0;
    let mut term = 1.0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum.add(term);
        abs_sum += term.abs();
        if term == 0.0 {
            break;
        }
        let ratio = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * z).abs();
        if ratio < 1.0 && term.abs() < 1e-17 * sum.value().abs() {
            break;
        }
    }
    (sum.value(), abs_sum)
}

/// ₂F₁ for 0 ≤ z ≤ 1/2: direct series, or Euler's transform when the
/// direct series cancels badly.
fn f21_small(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (v, gauge) = series_2f1(a, b, c, z);
    if gauge <= 1e3 * v.abs() {
        return v;
    }
    let (e, egauge) = series_2f1(c - a, c - b, c, z);
    let pre = (1.0 - z).powf(c - a - b);
    if egauge / e.abs() < gauge / v.abs() {
        pre * e
    } else {
        v
    }
}

/// sign · exp(Σ± ln|Γ|) for a ratio of gamma functions; zero if any
/// denominator argument sits on a pole.
fn gamma_ratio(num: &[f64], den: &[f64], extra_ln: f64) -> f64 {
    if den.iter().any(|&x| is_nonpositive_integer(x)) {
        return 0.0;
    }
    let mut l = extra_ln;
    let mut s = 1.0;
    for &x in num {
        let (lg, sg) = ln_gamma_sign(x);
        l += lg;
        s *= sg;
    }
    for &x in den {
        let (lg, sg) = ln_gamma_sign(x);
        l -= lg;
        s *= sg;
    }
    s * l.exp()
}

/// Connection formula z ↦ 1 − z, valid when c − a − b is not an integer.
/// `w` is 1 − z, passed separately so it keeps full relative precision.
fn f21_linear_transform(a: f64, b: f64, c: f64, w: f64) -> f64 {
    let s = c - a - b;
    let t1 = gamma_ratio(&[c, s], &[c - a, c - b], 0.0);
    let t2 = gamma_ratio(&[c, -s], &[a, b], s * w.ln());
    let f1 = if t1 != 0.0 {
        f21_small(a, b, 1.0 - s, w)
    } else {
        0.0
    };
    let f2 = if t2 != 0.0 {
        f21_small(c - a, c - b, 1.0 + s, w)
    } else {
        0.0
    };
    t1 * f1 + t2 * f2
}

/// Analytic continuation along [1/2, z] by Taylor steps of the
/// hypergeometric differential equation; used when c − a − b is (near) an
/// integer and the connection formula degenerates.
fn f21_ode(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut cur = 0.5;
    let mut f = f21_small(a, b, c, cur);
    let mut df = a * b / c * f21_small(a + 1.0, b + 1.0, c + 1.0, cur);
    let q1 = -(a + b + 1.0);
    let r = -a * b;
    while cur < z {
        let last = z - cur <= 0.5 * (1.0 - cur);
        let h = if last { z - cur } else { 0.5 * (1.0 - cur) };
        let p0 = cur * (1.0 - cur);
        let p1 = 1.0 - 2.0 * cur;
        let p2 = -1.0;
        let q0 = c - (a + b + 1.0) * cur;
        // work with d_k = c_k h^k so the coefficients stay bounded
        let (mut dk, mut dk1) = (f, df * h);
        let mut val = NeumaierSum::new(dk + dk1);
        let mut dval = NeumaierSum::new(dk1);
        for k in 0..2000 {
            let kf = k as f64;
            let dk2 = -((p1 * kf * (kf + 1.0) + q0 * (kf + 1.0)) * h * dk1
                + (p2 * kf * (kf - 1.0) + q1 * kf + r) * h * h * dk)
                / (p0 * (kf + 1.0) * (kf + 2.0));
            let dterm = (kf + 2.0) * dk2;
            val.add(dk2);
            dval.add(dterm);
            dk = dk1;
            dk1 = dk2;
            if k > 4
                && dk2.abs() < 1e-18 * val.value().abs()
                && dterm.abs() < 1e-18 * dval.value().abs()
            {
                break;
            }
        }
        f = val.value();
        df = dval.value() / h;
        cur += h;
        if last {
            break;
        }
    }
    f
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for 0 ≤ z < 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(domain("gauss_2f1", format!("z = {z} outside [0, 1)")));
    }
    if is_nonpositive_integer(c) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(domain("gauss_2f1", format!("invalid parameter c = {c}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok(series_2f1(a, b, c, z).0);
    }
    if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        return Ok((1.0 - z).powf(c - a - b) * series_2f1(c - a, c - b, c, z).0);
    }
    if z <= 0.5 {
        return Ok(f21_small(a, b, c, z));
    }
    let s = c - a - b;
    if (s - s.round()).abs() > 1e-3 {
        Ok(f21_linear_transform(a, b, c, 1.0 - z))
    } else {
        Ok(f21_ode(a, b, c, z))
    }
}

/// ₂F₁(a, b; c; 1 − w) for 0 < w ≤ 1, with the complement w given exactly.
///
/// Needed when z is so close to 1 that it rounds to 1 in `f64`. Requires
/// c − a − b > 0 once w drops below 1e-15, where the value is replaced by
/// its limit at z = 1 (the neglected part is O(w^min(1, c−a−b))).
pub(crate) fn gauss_2f1_complement(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    if !(w > 0.0 && w <= 1.0) {
        return Err(domain(
            "gauss_2f1",
            format!("complement w = {w} outside (0, 1]"),
        ));
    }
    if w >= 0.5 {
        return gauss_2f1(a, b, c, 1.0 - w);
    }
    if is_nonpositive_integer(a)
        || is_nonpositive_integer(b)
        || is_nonpositive_integer(c - a)
        || is_nonpositive_integer(c - b)
    {
        // finite sums; the leading cases of gauss_2f1 are accurate at any z < 1
        if 1.0 - w < 1.0 {
            return gauss_2f1(a, b, c, 1.0 - w);
        }
    }
    let s = c - a - b;
    if (s - s.round()).abs() > 1e-3 && !is_nonpositive_integer(c) {
        return Ok(f21_linear_transform(a, b, c, w));
    }
    if w > 1e-15 {
        return gauss_2f1(a, b, c, 1.0 - w);
    }
    if !(s > 0.0) {
        return Err(domain(
            "gauss_2f1",
            format!("divergent at z = 1 with c - a - b = {s}"),
        ));
    }
    Ok(gamma_ratio(&[c, s], &[c - a, c - b], 0.0))
}

/// Kummer confluent hypergeometric function ₁F₁(a; b; z).
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) || !b.is_finite() {
        return Err(domain("kummer_1f1", format!("invalid parameter b = {b}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        // Kummer's transformation keeps the series free of cancellation
        return Ok(z.exp() * kummer_1f1(b - a, b, -z)?);
    }
    let mut sum = NeumaierSum::new(1.0);
    let mut term = 1.0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * z;
        sum.add(term);
        if term == 0.0 {
            break;
        }
        let ratio = ((a + nf + 1.0) / ((b + nf + 1.0) * (nf + 2.0)) * z).abs();
        if ratio < 1.0 && term.abs() < 1e-17 * sum.value().abs() {
            break;
        }
    }
    Ok(sum.value())
}
