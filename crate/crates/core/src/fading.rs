//! Channel-gain distributions: MGF, moment-MGF E{g^{k+1}e^{−sg}}, the
//! exclusion-region term T_I and random sampling.
//!
//! Log-Normal shadowing is parameterised in dB: the mean power is
//! Y = 10^{X/10} with X ~ N(μ, σ²). Every average over Y is a Gauss–Hermite
//! sum whose rule is supplied by the caller.

use std::f64::consts::{LN_10, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureRule;
use crate::specfun::{gauss_2f1, gauss_2f1_complement, kummer_1f1, lgam, lower_incomplete_gamma};

/// Largest Rice K accepted; the Rice-LN moment uses ₁F₁(·; 1; ≤ K).
pub const MAX_K_FACTOR: f64 = 500.0;

/// Tail-ratio guard of the Rice-LN l-series: the geometric tail left after
/// `max_terms` must stay below this fraction of the partial sum.
const TAIL_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    Rayleigh {
        omega: f64,
    },
    Nakagami {
        m: f64,
        omega: f64,
    },
    LogNormal {
        mu_db: f64,
        sigma_db: f64,
    },
    NakagamiLogNormal {
        m: f64,
        mu_db: f64,
        sigma_db: f64,
    },
    RiceLogNormal {
        k_factor: f64,
        mu_db: f64,
        sigma_db: f64,
    },
}

/// Truncation policy for the series in T_I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_stop: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 100,
            rel_stop: 1e-12,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(invalid("series max_terms must be at least 1"));
        }
        if !(self.rel_stop > 0.0 && self.rel_stop < 1.0) {
            return Err(invalid(format!(
                "series rel_stop must lie in (0, 1), got {}",
                self.rel_stop
            )));
        }
        Ok(())
    }
}

/// Log-Normal mean in dB that makes E{10^{X/10}} = 1.
pub fn unit_mean_mu_db(sigma_db: f64) -> f64 {
    -LN_10 * sigma_db * sigma_db / 20.0
}

/// Nakagami m matching a Rice K factor: (1+K)²/(1+2K).
pub fn rice_to_nakagami_m(k_factor: f64) -> f64 {
    (1.0 + k_factor).powi(2) / (1.0 + 2.0 * k_factor)
}

/// Gauss–Hermite shadowing levels: pairs (w̃ₙ/√π, 10^{(√2σs̃ₙ+μ)/10}).
fn shadow_levels(
    mu_db: f64,
    sigma_db: f64,
    ghq: &QuadratureRule,
) -> impl Iterator<Item = (f64, f64)> + '_ {
    let norm = PI.sqrt().recip();
    ghq.iter().map(move |(w, x)| {
        let db = SQRT_2 * sigma_db * x + mu_db;
        (w * norm, 10f64.powf(db / 10.0))
    })
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
}

/// ln E{g^{k+1} e^{−sg}} for g ~ Gamma with shape m and mean Ω.
fn ln_gamma_moment(m: f64, omega: f64, k: u32, s: f64) -> f64 {
    let beta = m / omega;
    let kf = f64::from(k);
    m * beta.ln() + lgam(m + kf + 1.0) - lgam(m) - (m + kf + 1.0) * (s + beta).ln()
}

/// H(w) = (1−w)^{m+2−c} ₂F₁(m+1, 1; c; w), evaluated in the Euler-transformed
/// form ₂F₁(c−m−1, c−1; c; w) for w > 1/2 so that it stays bounded as w → 1.
fn nakagami_h(m: f64, c: f64, w: f64, w1: f64) -> Result<f64> {
    if w <= 0.5 {
        Ok(w1.powf(m + 2.0 - c) * gauss_2f1(m + 1.0, 1.0, c, w)?)
    } else {
        gauss_2f1_complement(c - m - 1.0, c - 1.0, c, w1)
    }
}

/// Closed-form T_I for Nakagami-m interferers with mean power Ω.
fn nakagami_t(m: f64, omega: f64, alpha: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 - 2.0 / alpha;
    let a = 1.0 - 2.0 / alpha;
    let beta = m / omega;
    let d = y + beta;
    let (w, w1) = (y / d, beta / d);
    let h = nakagami_h(m, c, w, w1)?;
    Ok(m * beta.powf(c - 2.0) / a * y * d.powf(1.0 - c) * h)
}

/// Closed-form T_I for Log-Normal interferers: E{(yY)^{2/α} γ(1−2/α, yY)}.
fn lognormal_t(mu_db: f64, sigma_db: f64, alpha: f64, y: f64, ghq: &QuadratureRule) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let a = 1.0 - 2.0 / alpha;
    let mut total = 0.0;
    for (w, g) in shadow_levels(mu_db, sigma_db, ghq) {
        let x = g * y;
        total += w * x.powf(2.0 / alpha) * lower_incomplete_gamma(a, x)?;
    }
    Ok(total)
}

/// Sum over l of (l+1)K^l/l! · G_l(w) for one shadowing level of the Rice-LN
/// closed form, with G_l(w) = (1−w)^{l+3−c} ₂F₁(l+2, 1; c; w).
fn rice_l_series(k: f64, c: f64, w: f64, w1: f64, ctl: &SeriesControl) -> Result<f64> {
    let mut sum = 0.0;
    let mut coef = 1.0;
    let mut prev = f64::NAN;
    let mut term = 0.0;
    for l in 0..ctl.max_terms {
        let lf = l as f64;
        if l > 0 {
            coef *= k / lf * (lf + 1.0) / lf;
        }
        let g = if w <= 0.5 {
            w1.powf(lf + 3.0 - c) * gauss_2f1(lf + 2.0, 1.0, c, w)?
        } else {
            gauss_2f1_complement(c - lf - 2.0, c - 1.0, c, w1)?
        };
        prev = term;
        term = coef * g;
        sum += term;
        if lf > k && term <= ctl.rel_stop * sum {
            return Ok(sum);
        }
    }
    if ctl.max_terms == 1 {
        return Ok(sum);
    }
    let ratio = term / prev;
    if !(ratio < 1.0) || term * ratio / (1.0 - ratio) > TAIL_GUARD * sum {
        return Err(Error::NonConvergence {
            op: "t_i (Rice-LN series)".into(),
            msg: format!(
                "{} terms leave a tail ratio {ratio:.3e} with last term {term:.3e} of sum {sum:.3e}",
                ctl.max_terms
            ),
        });
    }
    Ok(sum)
}

fn rice_lognormal_t(
    k: f64,
    mu_db: f64,
    sigma_db: f64,
    alpha: f64,
    y: f64,
    ghq: &QuadratureRule,
    ctl: &SeriesControl,
) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 - 2.0 / alpha;
    let a = 1.0 - 2.0 / alpha;
    let mut total = 0.0;
    for (wn, g) in shadow_levels(mu_db, sigma_db, ghq) {
        let om = 1.0 / g;
        let beta = (1.0 + k) * om;
        let d = y + beta;
        let (w, w1) = (y / d, beta / d);
        let cn = om * beta.powf(c - 3.0) * y * d.powf(1.0 - c);
        total += wn * cn * rice_l_series(k, c, w, w1, ctl)?;
    }
    Ok((1.0 + k) * (-k).exp() / a * total)
}

impl FadingModel {
    pub fn rayleigh() -> Self {
        FadingModel::Rayleigh { omega: 1.0 }
    }

    pub fn nakagami(m: f64) -> Self {
        FadingModel::Nakagami { m, omega: 1.0 }
    }

    /// Log-Normal shadowing with μ chosen so that E{g} = 1.
    pub fn lognormal_unit_mean(sigma_db: f64) -> Self {
        FadingModel::LogNormal {
            mu_db: unit_mean_mu_db(sigma_db),
            sigma_db,
        }
    }

    pub fn nakagami_lognormal_unit_mean(m: f64, sigma_db: f64) -> Self {
        FadingModel::NakagamiLogNormal {
            m,
            mu_db: unit_mean_mu_db(sigma_db),
            sigma_db,
        }
    }

    pub fn rice_lognormal_unit_mean(k_factor: f64, sigma_db: f64) -> Self {
        FadingModel::RiceLogNormal {
            k_factor,
            mu_db: unit_mean_mu_db(sigma_db),
            sigma_db,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_omega = |omega: f64| {
            if omega > 0.0 && omega.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("omega must be positive, got {omega}")))
            }
        };
        let check_m = |m: f64| {
            if m >= 0.5 && m.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("Nakagami m must be at least 0.5, got {m}")))
            }
        };
        let check_ln = |mu: f64, sigma: f64| {
            if !mu.is_finite() {
                Err(invalid(format!("mu_db must be finite, got {mu}")))
            } else if sigma >= 0.0 && sigma.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!(
                    "sigma_db must be nonnegative, got {sigma}"
                )))
            }
        };
        match *self {
            FadingModel::Rayleigh { omega } => check_omega(omega),
            FadingModel::Nakagami { m, omega } => check_m(m).and(check_omega(omega)),
            FadingModel::LogNormal { mu_db, sigma_db } => check_ln(mu_db, sigma_db),
            FadingModel::NakagamiLogNormal { m, mu_db, sigma_db } => {
                check_m(m).and(check_ln(mu_db, sigma_db))
            }
            FadingModel::RiceLogNormal {
                k_factor,
                mu_db,
                sigma_db,
            } => {
                if !(0.0..=MAX_K_FACTOR).contains(&k_factor) {
                    return Err(invalid(format!(
                        "Rice K must lie in [0, {MAX_K_FACTOR}], got {k_factor}"
                    )));
                }
                check_ln(mu_db, sigma_db)
            }
        }
    }

    /// (μ, σ) in dB of the shadowing component, if any.
    pub fn shadowing(&self) -> Option<(f64, f64)> {
        match *self {
            FadingModel::LogNormal { mu_db, sigma_db }
            | FadingModel::NakagamiLogNormal {
                mu_db, sigma_db, ..
            }
            | FadingModel::RiceLogNormal {
                mu_db, sigma_db, ..
            } => Some((mu_db, sigma_db)),
            _ => None,
        }
    }

    /// The same model with its shadowing parameters replaced; `None` for
    /// models without a Log-Normal component.
    pub fn with_shadowing(&self, mu_db: f64, sigma_db: f64) -> Option<Self> {
        match *self {
            FadingModel::LogNormal { .. } => Some(FadingModel::LogNormal { mu_db, sigma_db }),
            FadingModel::NakagamiLogNormal { m, .. } => {
                Some(FadingModel::NakagamiLogNormal { m, mu_db, sigma_db })
            }
            FadingModel::RiceLogNormal { k_factor, .. } => Some(FadingModel::RiceLogNormal {
                k_factor,
                mu_db,
                sigma_db,
            }),
            _ => None,
        }
    }

    /// Exact mean E{g}.
    pub fn mean(&self) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } | FadingModel::Nakagami { omega, .. } => omega,
            FadingModel::LogNormal { mu_db, sigma_db }
            | FadingModel::NakagamiLogNormal {
                mu_db, sigma_db, ..
            }
            | FadingModel::RiceLogNormal {
                mu_db, sigma_db, ..
            } => {
                let s = sigma_db * LN_10 / 10.0;
                (mu_db * LN_10 / 10.0 + 0.5 * s * s).exp()
            }
        }
    }

    /// M(s) = E{e^{−sg}}.
    pub fn mgf(&self, s: f64, ghq: &QuadratureRule) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } => 1.0 / (1.0 + s * omega),
            FadingModel::Nakagami { m, omega } => (1.0 + s * omega / m).powf(-m),
            FadingModel::LogNormal { mu_db, sigma_db } => shadow_levels(mu_db, sigma_db, ghq)
                .map(|(w, g)| w * (-g * s).exp())
                .sum(),
            FadingModel::NakagamiLogNormal { m, mu_db, sigma_db } => {
                shadow_levels(mu_db, sigma_db, ghq)
                    .map(|(w, g)| w * (1.0 + s * g / m).powf(-m))
                    .sum()
            }
            FadingModel::RiceLogNormal {
                k_factor: k,
                mu_db,
                sigma_db,
            } => shadow_levels(mu_db, sigma_db, ghq)
                .map(|(w, g)| {
                    let d = 1.0 + k + s * g;
                    w * (1.0 + k) / d * (-s * k * g / d).exp()
                })
                .sum(),
        }
    }

    /// 1 − M(s), computed without cancellation for small s.
    pub fn one_minus_mgf(&self, s: f64, ghq: &QuadratureRule) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } => s * omega / (1.0 + s * omega),
            FadingModel::Nakagami { m, omega } => -(-m * (s * omega / m).ln_1p()).exp_m1(),
            FadingModel::LogNormal { mu_db, sigma_db } => shadow_levels(mu_db, sigma_db, ghq)
                .map(|(w, g)| -w * (-g * s).exp_m1())
                .sum(),
            FadingModel::NakagamiLogNormal { m, mu_db, sigma_db } => {
                shadow_levels(mu_db, sigma_db, ghq)
                    .map(|(w, g)| -w * (-m * (s * g / m).ln_1p()).exp_m1())
                    .sum()
            }
            FadingModel::RiceLogNormal {
                k_factor: k,
                mu_db,
                sigma_db,
            } => shadow_levels(mu_db, sigma_db, ghq)
                .map(|(w, g)| {
                    let d = 1.0 + k + s * g;
                    -w * (-(s * g / (1.0 + k)).ln_1p() - s * k * g / d).exp_m1()
                })
                .sum(),
        }
    }

    /// ln E{g^{k+1} e^{−sg}}.
    pub fn ln_moment_mgf(&self, k: u32, s: f64, ghq: &QuadratureRule) -> f64 {
        match *self {
            FadingModel::Rayleigh { omega } => ln_gamma_moment(1.0, omega, k, s),
            FadingModel::Nakagami { m, omega } => ln_gamma_moment(m, omega, k, s),
            FadingModel::LogNormal { mu_db, sigma_db } => {
                let kf = f64::from(k) + 1.0;
                log_sum_exp(
                    shadow_levels(mu_db, sigma_db, ghq).map(|(w, g)| w.ln() + kf * g.ln() - g * s),
                )
            }
            FadingModel::NakagamiLogNormal { m, mu_db, sigma_db } => log_sum_exp(
                shadow_levels(mu_db, sigma_db, ghq)
                    .map(|(w, g)| w.ln() + ln_gamma_moment(m, g, k, s)),
            ),
            FadingModel::RiceLogNormal {
                k_factor: kk,
                mu_db,
                sigma_db,
            } => {
                let kf = f64::from(k);
                log_sum_exp(shadow_levels(mu_db, sigma_db, ghq).map(|(w, g)| {
                    let om = 1.0 / g;
                    let beta = (1.0 + kk) * om;
                    let d = s + beta;
                    let f = kummer_1f1(kf + 2.0, 1.0, kk * beta / d)
                        .expect("1F1 with b = 1 is always defined");
                    w.ln() + ((1.0 + kk) * om).ln() - kk + lgam(kf + 2.0) - (kf + 2.0) * d.ln()
                        + f.ln()
                }))
            }
        }
    }

    /// E{g^{k+1} e^{−sg}}, the k-th moment-MGF.
    pub fn moment_mgf(&self, k: u32, s: f64, ghq: &QuadratureRule) -> f64 {
        self.ln_moment_mgf(k, s, ghq).exp()
    }

    /// T_I(y) = E{(yg)^{2/α} γ(1−2/α, yg)} by the per-family closed forms.
    pub fn t_i(
        &self,
        alpha: f64,
        y: f64,
        ghq: &QuadratureRule,
        ctl: &SeriesControl,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        match *self {
            FadingModel::Rayleigh { omega } => nakagami_t(1.0, omega, alpha, y),
            FadingModel::Nakagami { m, omega } => nakagami_t(m, omega, alpha, y),
            FadingModel::LogNormal { mu_db, sigma_db } => {
                lognormal_t(mu_db, sigma_db, alpha, y, ghq)
            }
            FadingModel::NakagamiLogNormal { m, mu_db, sigma_db } => {
                nakagami_lognormal_t(m, mu_db, sigma_db, alpha, y, ghq)
            }
            FadingModel::RiceLogNormal {
                k_factor,
                mu_db,
                sigma_db,
            } => {
                if k_factor == 0.0 {
                    nakagami_lognormal_t(1.0, mu_db, sigma_db, alpha, y, ghq)
                } else {
                    rice_lognormal_t(k_factor, mu_db, sigma_db, alpha, y, ghq, ctl)
                }
            }
        }
    }

    /// T_I(y) by the distribution-free series
    /// Γ(1−2/α) Σ_k y^{k+1} E{g^{k+1}e^{−yg}} / Γ(k+2−2/α), summed in the log
    /// domain.
    pub fn t_i_generic(
        &self,
        alpha: f64,
        y: f64,
        ghq: &QuadratureRule,
        ctl: &SeriesControl,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        if y == 0.0 {
            return Ok(0.0);
        }
        let a = 1.0 - 2.0 / alpha;
        let lg_a = lgam(a);
        let ly = y.ln();
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        for k in 0..ctl.max_terms {
            let kf = k as f64;
            let ln_t =
                lg_a + (kf + 1.0) * ly + self.ln_moment_mgf(k as u32, y, ghq) - lgam(kf + 1.0 + a);
            let t = ln_t.exp();
            sum += t;
            if t < prev && t <= ctl.rel_stop * sum {
                return Ok(sum);
            }
            prev = t;
        }
        Err(Error::NonConvergence {
            op: "t_i_generic".into(),
            msg: format!(
                "series not converged after {} terms at y = {y}",
                ctl.max_terms
            ),
        })
    }

    pub fn sampler(&self) -> FadingSampler {
        FadingSampler::new(self)
    }

    /// One draw of g. Builds a sampler per call; use [`FadingSampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

fn nakagami_lognormal_t(
    m: f64,
    mu_db: f64,
    sigma_db: f64,
    alpha: f64,
    y: f64,
    ghq: &QuadratureRule,
) -> Result<f64> {
    let mut total = 0.0;
    for (w, g) in shadow_levels(mu_db, sigma_db, ghq) {
        total += w * nakagami_t(m, g, alpha, y)?;
    }
    Ok(total)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("alpha must exceed 2, got {alpha}")))
    }
}

#[derive(Debug, Clone)]
enum SmallScale {
    Exponential,
    Gamma(Gamma<f64>),
    Fixed,
    Rice { los: f64, sd: f64 },
}

/// Precomputed sampler for one fading model.
///
/// A composite draw is Y·h where h is the unit-mean small-scale gain and Y
/// the Log-Normal mean power (Y = Ω for the unshadowed models).
#[derive(Debug, Clone)]
pub struct FadingSampler {
    small: SmallScale,
    scale: f64,
    shadow: Option<(f64, f64)>,
}

impl FadingSampler {
    pub fn new(model: &FadingModel) -> Self {
        let gamma = |m: f64| {
            SmallScale::Gamma(Gamma::new(m, 1.0 / m).expect("m >= 0.5 is a valid Gamma shape"))
        };
        let (small, scale) = match *model {
            FadingModel::Rayleigh { omega } => (SmallScale::Exponential, omega),
            FadingModel::Nakagami { m, omega } => (gamma(m), omega),
            FadingModel::LogNormal { .. } => (SmallScale::Fixed, 1.0),
            FadingModel::NakagamiLogNormal { m, .. } => (gamma(m), 1.0),
            FadingModel::RiceLogNormal { k_factor, .. } => (
                SmallScale::Rice {
                    los: (k_factor / (k_factor + 1.0)).sqrt(),
                    sd: (0.5 / (k_factor + 1.0)).sqrt(),
                },
                1.0,
            ),
        };
        Self {
            small,
            scale,
            shadow: model.shadowing(),
        }
    }

    /// (μ, σ) in dB of the shadowing component, if any.
    pub fn shadowing(&self) -> Option<(f64, f64)> {
        self.shadow
    }

    /// Unit-mean small-scale gain.
    fn small_scale<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.small {
            SmallScale::Exponential => Exp1.sample(rng),
            SmallScale::Gamma(d) => d.sample(rng),
            SmallScale::Fixed => 1.0,
            SmallScale::Rice { los, sd } => {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                let re = los + sd * a;
                let im = sd * b;
                re * re + im * im
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_correlated(0.0, 1.0, rng)
    }

    /// Composite draw whose standardized shadowing Normal is
    /// `common + indep_weight·S` with S drawn here. `common = √ρ·S̄` and
    /// `indep_weight = √(1−ρ)` give equi-correlated shadowing; (0, 1) is
    /// the independent case. Unshadowed models ignore both.
    pub fn sample_correlated<R: Rng + ?Sized>(
        &self,
        common: f64,
        indep_weight: f64,
        rng: &mut R,
    ) -> f64 {
        let y = match self.shadow {
            Some((mu, sigma)) => {
                let n: f64 = StandardNormal.sample(rng);
                10f64.powf((mu + sigma * (common + indep_weight * n)) / 10.0)
            }
            None => self.scale,
        };
        y * self.small_scale(rng)
    }

    /// Draw the small-scale gain around a given mean power, replacing the
    /// model's own shadowing or Ω. Used for correlated shadowing.
    pub fn sample_given_mean<R: Rng + ?Sized>(&self, mean_power: f64, rng: &mut R) -> f64 {
        mean_power * self.small_scale(rng)
    }
}
