//! Quadrature rules: the mapped Gauss–Chebyshev rule used for the outer
//! rate integral, Gauss–Hermite nodes for Log-Normal averages, and an
//! adaptive Gauss–Kronrod integrator for everything without a closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Gauss–Chebyshev nodes mapped onto (0, ∞) through s = tan(π(t+1)/4).
    GaussChebyshevMapped,
    /// Nodes and weights for ∫ e^{-x²} f(x) dx.
    GaussHermite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub weights: Vec<f64>,
    pub abscissas: Vec<f64>,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// (weight, abscissa) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights
            .iter()
            .copied()
            .zip(self.abscissas.iter().copied())
    }
}

/// N-point Gauss–Chebyshev rule on (0, ∞), so that ∫₀^∞ f(s) ds ≈ Σ wₙ f(sₙ):
///
/// wₙ = π² sin θₙ / (4N cos²(π/4 cos θₙ + π/4)),  sₙ = tan(π/4 cos θₙ + π/4),
/// θₙ = (2n − 1)π / (2N).
pub fn gcq_nodes(n_points: usize) -> QuadratureRule {
    let n = n_points.max(1);
    let nf = n as f64;
    let mut weights = Vec::with_capacity(n);
    let mut abscissas = Vec::with_capacity(n);
    for k in 1..=n {
        let theta = (2 * k - 1) as f64 * PI / (2.0 * nf);
        let arg = PI / 4.0 * theta.cos() + PI / 4.0;
        let c = arg.cos();
        weights.push(PI * PI * theta.sin() / (4.0 * nf * c * c));
        abscissas.push(arg.tan());
    }
    QuadratureRule {
        weights,
        abscissas,
        kind: RuleKind::GaussChebyshevMapped,
    }
}

/// Gauss–Hermite rule by Newton iteration on the orthonormal Hermite
/// recurrence. Abscissas are returned in increasing order.
pub fn ghq_nodes(n_points: usize) -> Result<QuadratureRule> {
    if !(1..=64).contains(&n_points) {
        return Err(Error::Invalid(format!(
            "Gauss-Hermite order must lie in 1..=64, got {n_points}"
        )));
    }
    let n = n_points;
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    x.reverse();
    w.reverse();
    Ok(QuadratureRule {
        weights: w,
        abscissas: x,
        kind: RuleKind::GaussHermite,
    })
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub evals: u64,
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_PANELS: usize = 2000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// One 15-point Kronrod panel with the usual error heuristic.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, err }
}

/// Globally adaptive Gauss–Kronrod integration on [a, b].
///
/// Stops when the summed error estimate drops below
/// max(abs_tol, rel_tol·|I|); fails after `max_panels` panels.
pub fn adaptive_finite(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let mut panels = vec![gk15(f, a, b)];
    let mut evals = 15u64;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergence {
                op: "adaptive_finite".into(),
                msg: "integrand produced a non-finite value".into(),
            });
        }
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                abs_err: err,
                evals,
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::NonConvergence {
                op: "adaptive_finite".into(),
                msg: format!(
                    "{max_panels} panels exhausted: value {value:e}, error estimate {err:e}"
                ),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.err > acc.1 {
                    (i, p.err)
                } else {
                    acc
                }
            });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::NonConvergence {
                op: "adaptive_finite".into(),
                msg: "panel width reached machine resolution".into(),
            });
        }
        panels.push(gk15(f, p.a, mid));
        panels.push(gk15(f, mid, p.b));
        evals += 30;
    }
}

/// ∫₀^∞ f with the substitution x = scale·u/(1 − u); `scale` should be of
/// the order of the integrand's decay length.
pub fn adaptive_semi_infinite(
    f: &dyn Fn(f64) -> f64,
    scale: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let g = |u: f64| {
        let om = 1.0 - u;
        let x = scale * u / om;
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * scale / (om * om)
        }
    };
    adaptive_finite(&g, 0.0, 1.0, rel_tol, 1e-300, max_panels)
}

/// ∫₀^∞ f(x) dx to relative tolerance `rel_tol` with the default budget.
pub fn integrate_semi_infinite(f: &dyn Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    adaptive_semi_infinite(f, 1.0, rel_tol, DEFAULT_MAX_PANELS).map(|r| r.value)
}
