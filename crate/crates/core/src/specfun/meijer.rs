//! The Meijer-G class that appears in the closed-form interference term for
//! rational α/2 = α_N/α_D:
//!
//! U(z) = G^{α_D, α_N}_{α_N, α_D}(z | Δ(α_N, −ν) ; Δ(α_D, 0)),  ν = α/2 − 1.
//!
//! Three evaluation routes are combined. Residues at the poles of the
//! Γ(b_j − s) factors give an asymptotic series that is excellent for small
//! z; residues at the poles of Γ(1 − a_i + s) give a convergent series in 1/z
//! that is excellent for large z. In between, both suffer (truncation and
//! cancellation respectively), and the Mellin–Barnes contour integral itself
//! is integrated numerically along a vertical line.

use num_complex::Complex64;

use super::delta_list;
use super::gamma::{gamma, ln_gamma_complex};
use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive_finite;

/// Largest α_N / α_D handled by the series machinery.
pub const MAX_ALPHA_NUM: u32 = 10;
pub const MAX_ALPHA_DEN: u32 = 4;

/// Route accuracy accepted without trying the next one.
const GOOD_ENOUGH: f64 = 1e-13;
/// Above this estimated relative error the evaluation is refused.
const INSTABILITY_LIMIT: f64 = 1e-8;

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// α/2 written as a reduced fraction α_N/α_D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeijerRateParams {
    alpha_num: u32,
    alpha_den: u32,
}

impl MeijerRateParams {
    pub fn new(alpha_num: u32, alpha_den: u32) -> Result<Self> {
        if alpha_den == 0 || alpha_num <= alpha_den {
            return Err(invalid(format!(
                "alpha_num / alpha_den must exceed 1, got {alpha_num}/{alpha_den}"
            )));
        }
        if gcd(alpha_num, alpha_den) != 1 {
            return Err(invalid(format!(
                "alpha_num and alpha_den must be coprime, got {alpha_num}/{alpha_den}"
            )));
        }
        Ok(Self {
            alpha_num,
            alpha_den,
        })
    }

    /// Detects α/2 = α_N/α_D with α_D ≤ `max_den` to within 1e-9.
    pub fn from_alpha(alpha: f64, max_den: u32) -> Option<Self> {
        let half = alpha / 2.0;
        for den in 1..=max_den {
            let num = (half * den as f64).round();
            if num < 1.0 || num > u32::MAX as f64 {
                continue;
            }
            if (half - num / den as f64).abs() < 1e-9 {
                return Self::new(num as u32, den).ok();
            }
        }
        None
    }

    pub fn alpha_num(&self) -> u32 {
        self.alpha_num
    }

    pub fn alpha_den(&self) -> u32 {
        self.alpha_den
    }

    /// α = 2 α_N / α_D.
    pub fn alpha(&self) -> f64 {
        2.0 * self.alpha_num as f64 / self.alpha_den as f64
    }

    /// ν = α/2 − 1.
    pub fn nu(&self) -> f64 {
        self.alpha_num as f64 / self.alpha_den as f64 - 1.0
    }

    /// Upper parameters Δ(α_N, −ν) and lower parameters Δ(α_D, 0).
    pub fn parameter_lists(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.alpha_num as i64;
        let q = self.alpha_den as i64;
        // Δ(p, −ν)_i = (qi − p + q) / (pq), kept exact in the numerator
        let a = (0..p)
            .map(|i| (q * i - p + q) as f64 / (p * q) as f64)
            .collect();
        (a, delta_list(self.alpha_den as usize, 0.0))
    }

    fn in_supported_range(&self) -> bool {
        self.alpha_num <= MAX_ALPHA_NUM && self.alpha_den <= MAX_ALPHA_DEN
    }
}

struct Estimate {
    value: f64,
    rel_err: f64,
}

fn instability(msg: String) -> Error {
    Error::Instability {
        func: "meijer_g_rate",
        msg,
    }
}

fn check_simple_poles(a: &[f64], b: &[f64]) -> Result<()> {
    let near_int = |x: f64| (x - x.round()).abs() < 1e-12;
    for (j, &bj) in b.iter().enumerate() {
        for &br in &b[j + 1..] {
            if near_int(bj - br) {
                return Err(instability("coincident lower-parameter poles".into()));
            }
        }
    }
    for (i, &ai) in a.iter().enumerate() {
        for &al in &a[i + 1..] {
            if near_int(ai - al) {
                return Err(instability("coincident upper-parameter poles".into()));
            }
        }
    }
    Ok(())
}

/// Residues at s = b_j + k, optimally truncated.
fn lower_pole_series(a: &[f64], b: &[f64], z: f64) -> Estimate {
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut tail = 0.0;
    for (j, &bj) in b.iter().enumerate() {
        let mut t = z.powf(bj);
        for (r, &br) in b.iter().enumerate() {
            if r != j {
                t *= gamma(br - bj);
            }
        }
        for &ai in a {
            t *= gamma(1.0 - ai + bj);
        }
        let mut sum = t;
        abs_total += t.abs();
        let mut omitted = 0.0;
        for k in 0..10_000 {
            let kf = k as f64;
            let mut ratio = -z / (kf + 1.0);
            for (r, &br) in b.iter().enumerate() {
                if r != j {
                    ratio /= br - bj - kf - 1.0;
                }
            }
            for &ai in a {
                ratio *= 1.0 - ai + bj + kf;
            }
            let next = t * ratio;
            if next.abs() >= t.abs() {
                omitted = next.abs();
                break;
            }
            t = next;
            sum += t;
            abs_total += t.abs();
            if t.abs() < 1e-17 * sum.abs() {
                omitted = t.abs();
                break;
            }
        }
        total += sum;
        tail += omitted;
    }
    let rel_err = (tail + 4.0 * f64::EPSILON * abs_total) / total.abs();
    Estimate {
        value: total,
        rel_err: if rel_err.is_finite() {
            rel_err
        } else {
            f64::INFINITY
        },
    }
}

/// Residues at s = a_i − 1 − k; a convergent series in 1/z.
fn upper_pole_series(a: &[f64], b: &[f64], z: f64) -> Estimate {
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut converged = true;
    for (i, &ai) in a.iter().enumerate() {
        let mut t = z.powf(ai - 1.0);
        for &bj in b {
            t *= gamma(bj - ai + 1.0);
        }
        for (l, &al) in a.iter().enumerate() {
            if l != i {
                t *= gamma(ai - al);
            }
        }
        let mut sum = t;
        abs_total += t.abs();
        let mut done = false;
        for k in 0..5_000 {
            let kf = k as f64;
            let mut ratio = -1.0 / ((kf + 1.0) * z);
            for &bj in b {
                ratio *= bj - ai + 1.0 + kf;
            }
            for (l, &al) in a.iter().enumerate() {
                if l != i {
                    ratio /= ai - al - kf - 1.0;
                }
            }
            t *= ratio;
            sum += t;
            abs_total += t.abs();
            if !t.is_finite() {
                break;
            }
            if k > 5 && t.abs() < 1e-17 * sum.abs() {
                done = true;
                break;
            }
        }
        converged &= done;
        total += sum;
    }
    let rel_err = if converged {
        4.0 * f64::EPSILON * abs_total / total.abs()
    } else {
        f64::INFINITY
    };
    Estimate {
        value: total,
        rel_err: if rel_err.is_finite() {
            rel_err
        } else {
            f64::INFINITY
        },
    }
}

/// Numerical Mellin–Barnes integral along Re s = c between the two pole
/// families: U = (1/π) ∫₀^∞ Re F(c + it) dt.
fn contour_integral(a: &[f64], b: &[f64], z: f64) -> Result<Estimate> {
    let a_max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let b_min = b.iter().copied().fold(f64::INFINITY, f64::min);
    let c = 0.5 * ((a_max - 1.0) + b_min);
    let lz = z.ln();
    let log_integrand = |t: f64| {
        let s = Complex64::new(c, t);
        let mut v = s * lz;
        for &bj in b {
            v += ln_gamma_complex(-s + bj);
        }
        for &ai in a {
            v += ln_gamma_complex(s + (1.0 - ai));
        }
        v
    };
    let peak = log_integrand(0.0).re;
    // integrand decays like exp(−(p+q)πt/2); find where it is negligible
    let mut upper = 1.0;
    while log_integrand(upper).re > peak - 45.0 {
        upper *= 1.5;
        if upper > 1e4 {
            return Err(instability("contour integrand does not decay".into()));
        }
    }
    let f = |t: f64| log_integrand(t).exp().re;
    let abs_floor = 1e-18 * peak.exp() * upper;
    let res = adaptive_finite(&f, 0.0, upper, 5e-13, abs_floor, 400)
        .map_err(|e| instability(format!("contour quadrature: {e}")))?;
    let gauge = adaptive_finite(&|t: f64| f(t).abs(), 0.0, upper, 1e-6, abs_floor, 400)
        .map(|r| r.value)
        .unwrap_or(f64::INFINITY);
    let value = res.value / std::f64::consts::PI;
    let rel_err = (res.abs_err + 8.0 * f64::EPSILON * gauge) / res.value.abs();
    Ok(Estimate {
        value,
        rel_err: if rel_err.is_finite() {
            rel_err
        } else {
            f64::INFINITY
        },
    })
}

/// Evaluates U(z) for z > 0.
///
/// Fails with an instability error when no route meets its accuracy check
/// or the parameters fall outside α_N ≤ 10, α_D ≤ 4; callers are expected to
/// fall back to direct integration in that case.
pub fn meijer_g_rate(params: MeijerRateParams, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(crate::error::domain(
            "meijer_g_rate",
            format!("z = {z} must be positive and finite"),
        ));
    }
    if !params.in_supported_range() {
        return Err(instability(format!(
            "alpha_num/alpha_den = {}/{} outside the supported range",
            params.alpha_num, params.alpha_den
        )));
    }
    let (a, b) = params.parameter_lists();
    check_simple_poles(&a, &b)?;
    let small = lower_pole_series(&a, &b, z);
    if small.rel_err <= GOOD_ENOUGH {
        return Ok(small.value);
    }
    let large = upper_pole_series(&a, &b, z);
    if large.rel_err <= GOOD_ENOUGH {
        return Ok(large.value);
    }
    let mut best = if small.rel_err < large.rel_err {
        small
    } else {
        large
    };
    if let Ok(mb) = contour_integral(&a, &b, z) {
        if mb.rel_err < best.rel_err {
            best = mb;
        }
    }
    if best.rel_err <= INSTABILITY_LIMIT {
        Ok(best.value)
    } else {
        Err(instability(format!(
            "best estimated relative error {:.2e} at z = {z}",
            best.rel_err
        )))
    }
}

/// Small-argument asymptote of U: the leading residue of each lower pole
/// family, Σ_j z^{b_j} Π_{r≠j} Γ(b_r − b_j) Π_i Γ(1 + b_j − a_i).
pub fn meijer_g_asymptote(params: MeijerRateParams, z: f64) -> f64 {
    let (a, b) = params.parameter_lists();
    let mut total = 0.0;
    for (j, &bj) in b.iter().enumerate() {
        let mut t = if bj == 0.0 { 1.0 } else { z.powf(bj) };
        for (r, &br) in b.iter().enumerate() {
            if r != j {
                t *= gamma(br - bj);
            }
        }
        for &ai in &a {
            t *= gamma(1.0 + bj - ai);
        }
        total += t;
    }
    total
}
