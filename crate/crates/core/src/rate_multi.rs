//! Multi-tier average rate with biased association.
//!
//! A user served by tier t at squared distance x sees the tier-q interferers
//! outside squared radius ((P_qB_q)/(P_tB_t))^{2/α_q} x^{α_t/α_q}. With the
//! outer variable z = SNR_t·y the per-tier rate is
//!
//! R̃_t = π(λ_t/F_t) ∫₀^∞ [1 − M_{t,0}(z)] / z
//!        · ∫₀^∞ exp(−π Σ_q (λ_q/F_q) Z̃^{(t,q)}(z) x^{α_t/α_q} − (z/SNR_t) x^{α_t/2}) dx dz,
//!
//! Z̃^{(t,q)}(z) = (P_qB_q / P_tB_t)^{2/α_q} [(F_q − 1) + M_{q,I}(B_t z/B_q) + T_{q,I}(B_t z/B_q)].
//!
//! When all tiers share α the inner integral is the single-tier G_I with
//! density λ_t/F_t and Z̃^{(t)} = Σ_q [(λ_q/F_q)/(λ_t/F_t)] Z̃^{(t,q)}.
//!
//! Tier indices are 0-based in this API; messages report them 1-based.

use std::f64::consts::PI;

use crate::error::{domain, invalid, Error, Result};
use crate::fading::FadingModel;
use crate::quadrature::{adaptive_semi_infinite, QuadratureRule, DEFAULT_MAX_PANELS};
use crate::rate_single::{
    closed_route, g_i_eval, limit_integral, outer_rate, validate_tier_params, Diagnostics, GiEval,
    Numerics, RateMethod, RateResult, SingleTierScenario,
};
use crate::specfun::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierSpec {
    pub lambda: f64,
    pub power: f64,
    pub alpha: f64,
    pub bias: f64,
    pub freq_bands: u32,
    pub serving_fading: FadingModel,
    pub interferer_fading: FadingModel,
}

impl TierSpec {
    /// Unit-bias, single-band tier with the same fading on every link.
    pub fn new(lambda: f64, power: f64, alpha: f64, fading: FadingModel) -> Self {
        Self {
            lambda,
            power,
            alpha,
            bias: 1.0,
            freq_bands: 1,
            serving_fading: fading,
            interferer_fading: fading,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_tier_params(self.lambda, self.power, self.alpha, self.freq_bands)?;
        if !(self.bias > 0.0 && self.bias.is_finite()) {
            return Err(invalid(format!("bias must be positive, got {}", self.bias)));
        }
        self.serving_fading.validate()?;
        self.interferer_fading.validate()
    }

    /// Density of co-channel BSs, λ / F_B.
    pub fn effective_lambda(&self) -> f64 {
        self.lambda / f64::from(self.freq_bands)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub tiers: Vec<TierSpec>,
    pub noise_power: f64,
    pub numerics: Numerics,
}

impl From<&SingleTierScenario> for NetworkSpec {
    /// One-tier network with unit bias.
    fn from(s: &SingleTierScenario) -> Self {
        Self {
            tiers: vec![TierSpec {
                lambda: s.lambda,
                power: s.power,
                alpha: s.alpha,
                bias: 1.0,
                freq_bands: s.freq_bands,
                serving_fading: s.serving_fading,
                interferer_fading: s.interferer_fading,
            }],
            noise_power: s.noise_power,
            numerics: s.numerics,
        }
    }
}

impl NetworkSpec {
    pub fn new(tiers: Vec<TierSpec>, noise_power: f64) -> Self {
        Self {
            tiers,
            noise_power,
            numerics: Numerics::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(invalid("a network needs at least one tier"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            t.validate()
                .map_err(|e| invalid(format!("tier {}: {e}", i + 1)))?;
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(invalid(format!(
                "noise_power must be finite and nonnegative, got {}",
                self.noise_power
            )));
        }
        self.numerics.validate()
    }

    /// SNR_t = P_t / σ_N², infinite without noise.
    pub fn snr(&self, t: usize) -> f64 {
        if self.noise_power == 0.0 {
            f64::INFINITY
        } else {
            self.tiers[t].power / self.noise_power
        }
    }

    /// κ_t = λ_t / λ_1.
    pub fn kappa(&self, t: usize) -> f64 {
        self.tiers[t].lambda / self.tiers[0].lambda
    }

    /// χ_t = SNR_t / SNR_1 = P_t / P_1.
    pub fn chi(&self, t: usize) -> f64 {
        self.tiers[t].power / self.tiers[0].power
    }

    /// True when every tier has the same path-loss exponent.
    pub fn equal_alpha(&self) -> bool {
        let a = self.tiers[0].alpha;
        self.tiers.iter().all(|t| (t.alpha - a).abs() < 1e-12)
    }

    fn check_tier(&self, t: usize) -> Result<()> {
        if t >= self.tiers.len() {
            return Err(invalid(format!(
                "tier index {} out of range 1..={}",
                t + 1,
                self.tiers.len()
            )));
        }
        Ok(())
    }
}

/// Tags errors with the tier they came from.
fn in_tier(t: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonConvergence { op, msg } => Error::NonConvergence {
            op: format!("{op} (tier {})", t + 1),
            msg,
        },
        other => other,
    }
}

/// Z̃^{(t,q)} at normalised argument z = SNR_t·y.
fn z_tilde_at(net: &NetworkSpec, t: usize, q: usize, z: f64, ghq: &QuadratureRule) -> Result<f64> {
    let (tt, tq) = (&net.tiers[t], &net.tiers[q]);
    let ratio = (tq.power * tq.bias) / (tt.power * tt.bias);
    let arg = tt.bias / tq.bias * z;
    let f = &tq.interferer_fading;
    let inner = f64::from(tq.freq_bands) - 1.0
        + f.mgf(arg, ghq)
        + f.t_i(tq.alpha, arg, ghq, &net.numerics.series)?;
    Ok(ratio.powf(2.0 / tq.alpha) * inner)
}

/// Z̃^{(t,q)}(y) for the outer variable y of tier t. Without noise, y is
/// read as the normalised variable SNR_t·y.
pub fn z_tilde(net: &NetworkSpec, t: usize, q: usize, y: f64) -> Result<f64> {
    net.validate()?;
    net.check_tier(t)?;
    net.check_tier(q)?;
    let ghq = crate::quadrature::ghq_nodes(net.numerics.n_ghq)?;
    let snr = net.snr(t);
    let z = if snr.is_finite() { snr * y } else { y };
    z_tilde_at(net, t, q, z, &ghq)
}

/// Z̃^{(t)}(z) = Σ_q [(λ_q/F_q)/(λ_t/F_t)] Z̃^{(t,q)}(z), equal-α case.
fn z_total(net: &NetworkSpec, t: usize, z: f64, ghq: &QuadratureRule) -> Result<f64> {
    let lt = net.tiers[t].effective_lambda();
    let mut total = 0.0;
    for q in 0..net.tiers.len() {
        total += net.tiers[q].effective_lambda() / lt * z_tilde_at(net, t, q, z, ghq)?;
    }
    Ok(total)
}

fn tier_rate_equal_alpha(net: &NetworkSpec, t: usize) -> Result<RateResult> {
    let (gcq, ghq) = net.numerics.rules()?;
    let tier = &net.tiers[t];
    let route = closed_route(tier.alpha);
    let snr = net.snr(t);
    let lambda_e = tier.effective_lambda();
    outer_rate(&gcq, &ghq, &tier.serving_fading, |z| {
        let zv = z_total(net, t, z, &ghq)?;
        g_i_eval(route, lambda_e, tier.alpha, zv, z / snr, &net.numerics)
    })
}

/// Per-tier rate R̃_t. Equal path-loss exponents reuse the single-tier G_I;
/// otherwise the general two-fold integral is used. Without noise this is
/// [`tier_rate_limit`].
pub fn tier_rate(net: &NetworkSpec, t: usize) -> Result<RateResult> {
    net.validate()?;
    net.check_tier(t)?;
    if net.noise_power == 0.0 {
        return tier_rate_limit(net, t);
    }
    if net.equal_alpha() {
        tier_rate_equal_alpha(net, t).map_err(in_tier(t))
    } else {
        tier_rate_general(net, t)
    }
}

/// Per-tier rate by the general two-fold integral, for any mix of
/// path-loss exponents.
pub fn tier_rate_general(net: &NetworkSpec, t: usize) -> Result<RateResult> {
    net.validate()?;
    net.check_tier(t)?;
    if net.noise_power == 0.0 {
        return Err(invalid("the general tier rate needs noise_power > 0"));
    }
    let (gcq, ghq) = net.numerics.rules()?;
    let tier = &net.tiers[t];
    let snr = net.snr(t);
    let at = tier.alpha;
    let n = net.tiers.len();
    outer_rate(&gcq, &ghq, &tier.serving_fading, |z| {
        let y = z / snr;
        // coefficient c_q and exponent e_q of each π λ_q Z̃ x^{α_t/α_q} term
        let mut terms = Vec::with_capacity(n);
        for q in 0..n {
            let tq = &net.tiers[q];
            let c = PI * tq.effective_lambda() * z_tilde_at(net, t, q, z, &ghq)?;
            terms.push((c, at / tq.alpha));
        }
        let h = at / 2.0;
        let f = |x: f64| {
            let mut e = y * x.powf(h);
            for &(c, p) in &terms {
                e += c * x.powf(p);
            }
            (-e).exp()
        };
        let mut scale = y.powf(-1.0 / h);
        for &(c, p) in &terms {
            scale = scale.min(c.powf(-1.0 / p));
        }
        let r = adaptive_semi_infinite(&f, scale, net.numerics.inner_rel_tol, DEFAULT_MAX_PANELS)?;
        Ok(GiEval {
            value: PI * tier.effective_lambda() * r.value,
            evals: r.evals,
            closed: false,
            fallback: false,
        })
    })
    .map_err(in_tier(t))
}

/// Total rate Σ_t R̃_t.
pub fn network_rate(net: &NetworkSpec) -> Result<RateResult> {
    net.validate()?;
    let mut total = 0.0;
    let mut diag = Diagnostics::default();
    let mut method = None;
    for t in 0..net.tiers.len() {
        let r = tier_rate(net, t)?;
        total += r.rate_nats;
        diag.inner_integral_evals += r.diagnostics.inner_integral_evals;
        diag.fallback_used |= r.diagnostics.fallback_used;
        method = match (method, r.method) {
            (None, m) => Some(m),
            (Some(a), b) if a == b => Some(a),
            (Some(_), _) => Some(RateMethod::Integral),
        };
    }
    Ok(RateResult {
        rate_nats: total,
        method: method.unwrap_or(RateMethod::Integral),
        diagnostics: diag,
    })
}

fn require_equal_alpha(net: &NetworkSpec, op: &'static str) -> Result<()> {
    if net.equal_alpha() {
        Ok(())
    } else {
        Err(domain(
            op,
            "all tiers must share the same path-loss exponent",
        ))
    }
}

fn limit_parts(net: &NetworkSpec, t: usize, z_power: f64, divide_by_z: bool) -> Result<f64> {
    let (gcq, ghq) = net.numerics.rules()?;
    limit_integral(
        &gcq,
        &ghq,
        &net.tiers[t].serving_fading,
        z_power,
        divide_by_z,
        |z| z_total(net, t, z, &ghq),
    )
    .map_err(in_tier(t))
}

/// Noiseless (equivalently, dense-network) limit of R̃_t,
/// ∫ [1 − M_{t,0}(z)] / Z̃^{(t)}(z) dz/z. Depends on powers only through
/// their ratios.
pub fn tier_rate_limit(net: &NetworkSpec, t: usize) -> Result<RateResult> {
    net.validate()?;
    net.check_tier(t)?;
    require_equal_alpha(net, "tier_rate_limit")?;
    Ok(RateResult {
        rate_nats: limit_parts(net, t, 1.0, true)?,
        method: RateMethod::InterferenceLimited,
        diagnostics: Diagnostics::default(),
    })
}

/// High-SNR approximation of R̃_t: the limit minus
/// (πλ_t/F_t)^{−α/2} Γ(1+α/2) SNR_t⁻¹ ∫ [1 − M_{t,0}(z)] / Z̃^{(t)}(z)^{1+α/2} dz.
pub fn tier_rate_high_snr(net: &NetworkSpec, t: usize) -> Result<RateResult> {
    net.validate()?;
    net.check_tier(t)?;
    require_equal_alpha(net, "tier_rate_high_snr")?;
    if net.noise_power == 0.0 {
        return Err(invalid("the high-SNR approximation needs noise_power > 0"));
    }
    let tier = &net.tiers[t];
    let h = tier.alpha / 2.0;
    let upper = limit_parts(net, t, 1.0, true)?;
    let corr = limit_parts(net, t, 1.0 + h, false)?;
    let value =
        upper - (PI * tier.effective_lambda()).powf(-h) * gamma(1.0 + h) / net.snr(t) * corr;
    Ok(RateResult {
        rate_nats: value,
        method: RateMethod::HighSnrBound,
        diagnostics: Diagnostics::default(),
    })
}
