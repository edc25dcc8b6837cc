//! Single-tier average rate.
//!
//! The rate in nats is R = ∫₀^∞ [1 − M₀(SNR·y)] G_I(y) dy / y, where
//!
//! G_I(y) = πλ_e ∫₀^∞ exp(−πλ_e Z(SNR·y) x − y x^{α/2}) dx,
//! Z(z) = (F_B − 1) + M_I(z) + T_I(z),  λ_e = λ / F_B.
//!
//! The outer integral uses the mapped Gauss–Chebyshev rule in the variable
//! z = SNR·y, which keeps the integrand's peak near z = 1 at every SNR. G_I
//! has an erfcx form at α = 4 and a Meijer-G form for rational α/2;
//! otherwise it is integrated numerically.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::fading::{FadingModel, SeriesControl};
use crate::quadrature::{
    adaptive_semi_infinite, gcq_nodes, ghq_nodes, QuadratureRule, DEFAULT_MAX_PANELS,
};
use crate::specfun::{
    erfcx, gamma, meijer_g_asymptote, meijer_g_rate, MeijerRateParams, MAX_ALPHA_DEN,
};

/// How G_I is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GiMode {
    /// Closed form when α/2 is a supported rational, integration otherwise
    /// or whenever the closed form reports an error.
    Auto,
    /// Closed form only; errors if none applies.
    Closed,
    /// Numerical integration of the inner integral.
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub n_gcq: usize,
    pub n_ghq: usize,
    /// Switch point of the Meijer-G form: below it the small-argument
    /// asymptote replaces the exact function.
    pub epsilon: f64,
    pub series: SeriesControl,
    pub g_i_mode: GiMode,
    /// Relative tolerance of the inner integral in integral mode.
    pub inner_rel_tol: f64,
    /// Diagnostic: below the switch point use G_I ≈ 1/Z instead of the
    /// asymptote. Discontinuous at the switch.
    pub drop_asymptote: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            n_gcq: 2000,
            n_ghq: 5,
            epsilon: 0.05,
            series: SeriesControl::default(),
            g_i_mode: GiMode::Auto,
            inner_rel_tol: 1e-8,
            drop_asymptote: false,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        if self.n_gcq < 1 {
            return Err(invalid("n_gcq must be at least 1"));
        }
        if !(1..=64).contains(&self.n_ghq) {
            return Err(invalid(format!(
                "n_ghq must lie in 1..=64, got {}",
                self.n_ghq
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.inner_rel_tol > 0.0 && self.inner_rel_tol < 1.0) {
            return Err(invalid(format!(
                "inner_rel_tol must lie in (0, 1), got {}",
                self.inner_rel_tol
            )));
        }
        self.series.validate()
    }

    pub(crate) fn rules(&self) -> Result<(QuadratureRule, QuadratureRule)> {
        Ok((gcq_nodes(self.n_gcq), ghq_nodes(self.n_ghq)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTierScenario {
    pub lambda: f64,
    pub power: f64,
    pub alpha: f64,
    pub noise_power: f64,
    pub freq_bands: u32,
    pub serving_fading: FadingModel,
    pub interferer_fading: FadingModel,
    pub numerics: Numerics,
}

impl SingleTierScenario {
    /// Unit-power scenario with default numerics and the given SNR in dB.
    pub fn with_snr_db(lambda: f64, alpha: f64, snr_db: f64, fading: FadingModel) -> Self {
        Self {
            lambda,
            power: 1.0,
            alpha,
            noise_power: 10f64.powf(-snr_db / 10.0),
            freq_bands: 1,
            serving_fading: fading,
            interferer_fading: fading,
            numerics: Numerics::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_tier_params(self.lambda, self.power, self.alpha, self.freq_bands)?;
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(invalid(format!(
                "noise_power must be finite and nonnegative, got {}",
                self.noise_power
            )));
        }
        self.serving_fading.validate()?;
        self.interferer_fading.validate()?;
        self.numerics.validate()
    }

    /// P / σ_N², infinite without noise.
    pub fn snr(&self) -> f64 {
        if self.noise_power == 0.0 {
            f64::INFINITY
        } else {
            self.power / self.noise_power
        }
    }

    /// Density of co-channel BSs, λ / F_B.
    pub fn effective_lambda(&self) -> f64 {
        self.lambda / f64::from(self.freq_bands)
    }
}

pub(crate) fn validate_tier_params(
    lambda: f64,
    power: f64,
    alpha: f64,
    freq_bands: u32,
) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(invalid(format!("power must be positive, got {power}")));
    }
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must exceed 2, got {alpha}")));
    }
    if freq_bands < 1 {
        return Err(invalid("freq_bands must be at least 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    Integral,
    ClosedForm,
    InterferenceLimited,
    HighSnrBound,
    DensityLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    /// Integrand evaluations spent on numerical inner integrals.
    pub inner_integral_evals: u64,
    /// Auto mode fell back from the closed form at least once.
    pub fallback_used: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub rate_nats: f64,
    pub method: RateMethod,
    pub diagnostics: Diagnostics,
}

/// Lower and upper high-SNR bounds, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBounds {
    pub lower: f64,
    pub upper: f64,
}

/// One evaluation of G_I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GiEval {
    pub value: f64,
    pub evals: u64,
    pub closed: bool,
    pub fallback: bool,
}

/// G_I by its Meijer-G form with the small-argument splice at `epsilon`.
///
/// `lambda_e` is the co-channel density and `z_val` the value of Z.
pub fn g_i_meijer(
    params: MeijerRateParams,
    lambda_e: f64,
    z_val: f64,
    y: f64,
    epsilon: f64,
    drop_asymptote: bool,
) -> Result<f64> {
    let p = f64::from(params.alpha_num());
    let q = f64::from(params.alpha_den());
    let nu = params.nu();
    let b = PI * lambda_e * z_val;
    let arg = p.powf(p) * y.powf(q) / (q.powf(q) * b.powf(p));
    let u = if arg >= epsilon {
        meijer_g_rate(params, arg)?
    } else if drop_asymptote {
        return Ok(1.0 / z_val);
    } else {
        meijer_g_asymptote(params, arg)
    };
    let k = q.sqrt() * p.powf(nu + 0.5) / (2.0 * PI).powf((p + q) / 2.0 - 1.0);
    let v = 1.0 / z_val - p / q * y / (b.powf(p / q) * z_val) * k * u;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Instability {
            func: "g_i_meijer",
            msg: format!("assembled value {v} at y = {y}"),
        })
    }
}

/// G_I at α = 4: (πλ_e/2) √(π/y) erfcx(πλ_e Z / (2√y)).
pub fn g_i_alpha4(lambda_e: f64, z_val: f64, y: f64) -> f64 {
    let b = PI * lambda_e * z_val;
    0.5 * PI * lambda_e * (PI / y).sqrt() * erfcx(b / (2.0 * y.sqrt()))
}

/// G_I by adaptive integration of the inner integral.
pub fn g_i_integral(
    lambda_e: f64,
    alpha: f64,
    z_val: f64,
    y: f64,
    rel_tol: f64,
) -> Result<(f64, u64)> {
    let b = PI * lambda_e * z_val;
    let h = alpha / 2.0;
    let f = |x: f64| (-b * x - y * x.powf(h)).exp();
    let scale = (1.0 / b).min(y.powf(-1.0 / h));
    let r = adaptive_semi_infinite(&f, scale, rel_tol, DEFAULT_MAX_PANELS)?;
    Ok((PI * lambda_e * r.value, r.evals))
}

/// Closed-form route for α, if one is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ClosedRoute {
    Alpha4,
    Meijer(MeijerRateParams),
    None,
}

pub(crate) fn closed_route(alpha: f64) -> ClosedRoute {
    match MeijerRateParams::from_alpha(alpha, MAX_ALPHA_DEN) {
        Some(p) if p.alpha_num() == 2 && p.alpha_den() == 1 => ClosedRoute::Alpha4,
        Some(p) => ClosedRoute::Meijer(p),
        None => ClosedRoute::None,
    }
}

pub(crate) fn g_i_eval(
    route: ClosedRoute,
    lambda_e: f64,
    alpha: f64,
    z_val: f64,
    y: f64,
    num: &Numerics,
) -> Result<GiEval> {
    let closed = || -> Result<f64> {
        match route {
            ClosedRoute::Alpha4 => Ok(g_i_alpha4(lambda_e, z_val, y)),
            ClosedRoute::Meijer(p) => {
                g_i_meijer(p, lambda_e, z_val, y, num.epsilon, num.drop_asymptote)
            }
            ClosedRoute::None => Err(invalid(format!(
                "no closed form of G_I for alpha = {alpha}"
            ))),
        }
    };
    let integral = |fallback: bool| -> Result<GiEval> {
        let (value, evals) = g_i_integral(lambda_e, alpha, z_val, y, num.inner_rel_tol)?;
        Ok(GiEval {
            value,
            evals,
            closed: false,
            fallback,
        })
    };
    match num.g_i_mode {
        GiMode::Closed => Ok(GiEval {
            value: closed()?,
            evals: 0,
            closed: true,
            fallback: false,
        }),
        GiMode::Integral => integral(false),
        GiMode::Auto => match (route, closed()) {
            (ClosedRoute::None, _) => integral(false),
            (_, Ok(value)) => Ok(GiEval {
                value,
                evals: 0,
                closed: true,
                fallback: false,
            }),
            (_, Err(_)) => integral(true),
        },
    }
}

/// Z^{(F_B)}(z) = (F_B − 1) + M_I(z) + T_I(z).
pub(crate) fn z_reuse(
    fading: &FadingModel,
    alpha: f64,
    freq_bands: u32,
    z: f64,
    ghq: &QuadratureRule,
    series: &SeriesControl,
) -> Result<f64> {
    Ok(f64::from(freq_bands) - 1.0 + fading.mgf(z, ghq) + fading.t_i(alpha, z, ghq, series)?)
}

/// Gauss–Chebyshev sum Σ (wₙ/sₙ)[1 − M₀(sₙ)] G_I(sₙ/SNR). The closure
/// receives z = sₙ and returns G_I at y = z/SNR.
pub(crate) fn outer_rate(
    gcq: &QuadratureRule,
    ghq: &QuadratureRule,
    serving: &FadingModel,
    mut g_at: impl FnMut(f64) -> Result<GiEval>,
) -> Result<RateResult> {
    let mut total = 0.0;
    let mut diag = Diagnostics::default();
    let mut all_closed = true;
    for (w, s) in gcq.iter() {
        let useful = serving.one_minus_mgf(s, ghq);
        if useful == 0.0 {
            continue;
        }
        let g = g_at(s)?;
        diag.inner_integral_evals += g.evals;
        diag.fallback_used |= g.fallback;
        all_closed &= g.closed;
        total += w / s * useful * g.value;
    }
    Ok(RateResult {
        rate_nats: total,
        method: if all_closed {
            RateMethod::ClosedForm
        } else {
            RateMethod::Integral
        },
        diagnostics: diag,
    })
}

/// Z^{(F_B)}_I(z) of the scenario.
pub fn z_i(scn: &SingleTierScenario, z: f64) -> Result<f64> {
    scn.validate()?;
    let ghq = ghq_nodes(scn.numerics.n_ghq)?;
    z_reuse(
        &scn.interferer_fading,
        scn.alpha,
        scn.freq_bands,
        z,
        &ghq,
        &scn.numerics.series,
    )
}

/// G_I(y) of the scenario, evaluated as `numerics.g_i_mode` prescribes.
pub fn g_i(scn: &SingleTierScenario, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(invalid(format!("g_i needs y > 0, got {y}")));
    }
    let zv = z_i(scn, scn.snr() * y)?;
    let route = closed_route(scn.alpha);
    Ok(g_i_eval(
        route,
        scn.effective_lambda(),
        scn.alpha,
        zv,
        y,
        &scn.numerics,
    )?
    .value)
}

/// Average rate in nats. Without noise this is the interference-limited rate.
pub fn average_rate(scn: &SingleTierScenario) -> Result<RateResult> {
    scn.validate()?;
    if scn.noise_power == 0.0 {
        return rate_interference_limited(scn);
    }
    let (gcq, ghq) = scn.numerics.rules()?;
    let snr = scn.snr();
    let route = closed_route(scn.alpha);
    let lambda_e = scn.effective_lambda();
    outer_rate(&gcq, &ghq, &scn.serving_fading, |z| {
        let zv = z_reuse(
            &scn.interferer_fading,
            scn.alpha,
            scn.freq_bands,
            z,
            &ghq,
            &scn.numerics.series,
        )?;
        g_i_eval(route, lambda_e, scn.alpha, zv, z / snr, &scn.numerics)
    })
}

/// Σ wₙ sₙ^{−e}[1 − M₀(sₙ)] / Z(sₙ)^{p}: the Gauss–Chebyshev form of
/// ∫ [1 − M₀(z)] z^{−e} Z(z)^{−p} dz.
pub(crate) fn limit_integral(
    gcq: &QuadratureRule,
    ghq: &QuadratureRule,
    serving: &FadingModel,
    z_power: f64,
    divide_by_z: bool,
    mut z_of: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let mut total = 0.0;
    for (w, s) in gcq.iter() {
        let useful = serving.one_minus_mgf(s, ghq);
        if useful == 0.0 {
            continue;
        }
        let zv = z_of(s)?;
        let mut t = w * useful / zv.powf(z_power);
        if divide_by_z {
            t /= s;
        }
        total += t;
    }
    Ok(total)
}

fn limit_value(scn: &SingleTierScenario) -> Result<f64> {
    scn.validate()?;
    let (gcq, ghq) = scn.numerics.rules()?;
    limit_integral(&gcq, &ghq, &scn.serving_fading, 1.0, true, |z| {
        z_reuse(
            &scn.interferer_fading,
            scn.alpha,
            scn.freq_bands,
            z,
            &ghq,
            &scn.numerics.series,
        )
    })
}

fn plain(rate_nats: f64, method: RateMethod) -> RateResult {
    RateResult {
        rate_nats,
        method,
        diagnostics: Diagnostics::default(),
    }
}

/// Rate without noise, ∫ [1 − M₀(z)] / Z^{(F_B)}(z) dz/z. Independent of λ
/// and P.
pub fn rate_interference_limited(scn: &SingleTierScenario) -> Result<RateResult> {
    Ok(plain(limit_value(scn)?, RateMethod::InterferenceLimited))
}

/// Limit of the rate as λ → ∞; the same integral as the noiseless rate.
pub fn rate_density_limit(scn: &SingleTierScenario) -> Result<RateResult> {
    Ok(plain(limit_value(scn)?, RateMethod::DensityLimit))
}

/// High-SNR sandwich: upper is the noiseless rate, lower subtracts
/// (πλ_e)^{−α/2} Γ(1+α/2) SNR⁻¹ ∫ [1 − M₀(z)] / Z^{1+α/2}(z) dz.
pub fn rate_high_snr_bound(scn: &SingleTierScenario) -> Result<SnrBounds> {
    scn.validate()?;
    if scn.noise_power == 0.0 {
        return Err(invalid("the high-SNR bound needs noise_power > 0"));
    }
    let (gcq, ghq) = scn.numerics.rules()?;
    let z_of = |z: f64| {
        z_reuse(
            &scn.interferer_fading,
            scn.alpha,
            scn.freq_bands,
            z,
            &ghq,
            &scn.numerics.series,
        )
    };
    let upper = limit_integral(&gcq, &ghq, &scn.serving_fading, 1.0, true, z_of)?;
    let h = scn.alpha / 2.0;
    let corr = limit_integral(&gcq, &ghq, &scn.serving_fading, 1.0 + h, false, z_of)?;
    let lower = upper - (PI * scn.effective_lambda()).powf(-h) * gamma(1.0 + h) / scn.snr() * corr;
    Ok(SnrBounds { lower, upper })
}

/// Average rate with equi-correlated Log-Normal shadowing of coefficient ρ:
/// the outer Gauss–Hermite average over the common shadowing variable of
/// the rate with μ ↦ μ + σ√ρ x and σ ↦ σ√(1−ρ).
pub fn average_rate_correlated(
    scn: &SingleTierScenario,
    rho: f64,
    outer_ghq: &QuadratureRule,
) -> Result<RateResult> {
    scn.validate()?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [0, 1], got {rho}")));
    }
    if scn.serving_fading.shadowing().is_none() && scn.interferer_fading.shadowing().is_none() {
        return Err(crate::error::domain(
            "average_rate_correlated",
            "neither fading model has a Log-Normal component",
        ));
    }
    let shift = |m: &FadingModel, x: f64| match m.shadowing() {
        Some((mu, sigma)) => m
            .with_shadowing(mu + sigma * rho.sqrt() * x, sigma * (1.0 - rho).sqrt())
            .expect("shadowed model accepts new shadowing"),
        None => *m,
    };
    let mut total = 0.0;
    let mut diag = Diagnostics::default();
    let mut method = RateMethod::ClosedForm;
    for (w, s) in outer_ghq.iter() {
        let x = std::f64::consts::SQRT_2 * s;
        let cond = SingleTierScenario {
            serving_fading: shift(&scn.serving_fading, x),
            interferer_fading: shift(&scn.interferer_fading, x),
            ..*scn
        };
        let r = average_rate(&cond)?;
        total += w * r.rate_nats;
        diag.inner_integral_evals += r.diagnostics.inner_integral_evals;
        diag.fallback_used |= r.diagnostics.fallback_used;
        if r.method != RateMethod::ClosedForm {
            method = r.method;
        }
    }
    Ok(RateResult {
        rate_nats: total / PI.sqrt(),
        method,
        diagnostics: diag,
    })
}
