//! Monte Carlo point-process simulator for the downlink rate.
//!
//! A trial deploys every tier as a Poisson process on a disk centred on the
//! terminal, associates with the tier whose nearest BS gives the largest
//! biased received power, draws fading and frequency bands for every BS and
//! records (1/F_B) ln(1 + SINR). Trial `i` always runs on stream `i` of a
//! ChaCha8 generator keyed by the master seed and the per-chunk statistics
//! are merged in chunk order, so an estimate depends only on the seed and
//! the trial count, never on the thread count.
//!
//! [`estimate_rate_batch`] evaluates several networks that share densities,
//! band plans and fading on the same random draws. The networks may differ
//! in path-loss exponents, powers, biases and noise, which is how a whole
//! SNR or α sweep is simulated for the cost of one deployment per trial.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fading::FadingSampler;
use crate::rate_multi::NetworkSpec;

/// Smallest admissible BS distance from the terminal.
pub const MIN_DISTANCE: f64 = 1e-12;

/// Trials per reduction chunk. Fixed so the merge order never changes.
const CHUNK: u64 = 256;

/// Ceiling on consecutive empty-tier redraws within one trial.
const MAX_REDRAWS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_trials: u64,
    pub master_seed: u64,
    /// Disk radius; `None` applies [`simulation_radius`].
    pub radius_override: Option<f64>,
    /// Equi-correlation of the shadowing Normals across all BSs of a trial.
    pub correlation_rho: f64,
}

impl McConfig {
    pub fn new(n_trials: u64, master_seed: u64) -> Self {
        Self {
            n_trials,
            master_seed,
            radius_override: None,
            correlation_rho: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(invalid("n_trials must be at least 1"));
        }
        if let Some(r) = self.radius_override {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid(format!("radius must be positive, got {r}")));
            }
        }
        if !(0.0..=1.0).contains(&self.correlation_rho) {
            return Err(invalid(format!(
                "correlation_rho must lie in [0, 1], got {}",
                self.correlation_rho
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean_rate_nats: f64,
    pub std_error: f64,
    pub n_trials: u64,
    pub radius_used: f64,
    /// Deployments discarded because some tier was empty.
    pub redraws: u64,
}

/// Smallest power-of-ten radius R with λ_min R² ≥ 100.
pub fn simulation_radius(net: &NetworkSpec) -> f64 {
    let lambda_min = net
        .tiers
        .iter()
        .map(|t| t.lambda)
        .fold(f64::INFINITY, f64::min);
    let covers = |k: i32| lambda_min * 10f64.powi(2 * k) >= 100.0;
    let mut k = (0.5 * (100.0 / lambda_min).log10()).ceil() as i32;
    while !covers(k) {
        k += 1;
    }
    while covers(k - 1) {
        k -= 1;
    }
    10f64.powi(k)
}

/// One BS in polar coordinates around the terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsSite {
    pub dist2: f64,
    pub angle: f64,
}

impl BsSite {
    pub fn at_distance(d: f64) -> Self {
        Self {
            dist2: d * d,
            angle: 0.0,
        }
    }

    pub fn distance(&self) -> f64 {
        self.dist2.sqrt()
    }

    pub fn position(&self) -> (f64, f64) {
        let r = self.distance();
        (r * self.angle.cos(), r * self.angle.sin())
    }
}

/// Per-tier BS sites of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    tiers: Vec<Vec<BsSite>>,
    nearest: Vec<Option<usize>>,
}

impl Deployment {
    pub fn from_sites(tiers: Vec<Vec<BsSite>>) -> Self {
        let nearest = tiers
            .iter()
            .map(|sites| {
                sites
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.dist2.total_cmp(&b.1.dist2))
                    .map(|(i, _)| i)
            })
            .collect();
        Self { tiers, nearest }
    }

    pub fn tiers(&self) -> &[Vec<BsSite>] {
        &self.tiers
    }

    /// Index of the nearest BS of tier `t`, `None` if the tier is empty.
    pub fn nearest(&self, t: usize) -> Option<usize> {
        self.nearest[t]
    }

    pub fn is_complete(&self) -> bool {
        self.nearest.iter().all(Option::is_some)
    }
}

/// Poisson(λ_t πR²) sites per tier, uniform on the disk of radius `radius`.
pub fn draw_deployment<R: Rng + ?Sized>(net: &NetworkSpec, radius: f64, rng: &mut R) -> Deployment {
    let r2 = radius * radius;
    let min_d2 = MIN_DISTANCE * MIN_DISTANCE;
    let tiers = net
        .tiers
        .iter()
        .map(|t| {
            let mean = t.lambda * PI * r2;
            let count = Poisson::new(mean)
                .expect("positive density and radius")
                .sample(rng) as usize;
            (0..count)
                .map(|_| {
                    let dist2 = loop {
                        let u: f64 = rng.random();
                        let d2 = r2 * u;
                        if d2 >= min_d2 {
                            break d2;
                        }
                    };
                    let angle = 2.0 * PI * rng.random::<f64>();
                    BsSite { dist2, angle }
                })
                .collect()
        })
        .collect();
    Deployment::from_sites(tiers)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Association {
    pub tier: usize,
    /// Index of the serving BS within its tier.
    pub index: usize,
}

/// d^{−α} from d², avoiding `powf` for integer α.
fn path_loss(dist2: f64, alpha: f64) -> f64 {
    if alpha == alpha.round() && alpha <= 12.0 {
        let n = alpha as i32;
        if n % 2 == 0 {
            return dist2.powi(-n / 2);
        }
        return 1.0 / (dist2.powi(n / 2) * dist2.sqrt());
    }
    dist2.powf(-0.5 * alpha)
}

/// Biased received power P_t d_t^{−α_t} B_t of each tier's nearest BS;
/// the largest wins, ties to the lowest tier. `None` if a tier is empty.
pub fn associate(net: &NetworkSpec, dep: &Deployment) -> Option<Association> {
    let mut best: Option<(f64, Association)> = None;
    for (t, spec) in net.tiers.iter().enumerate() {
        let index = dep.nearest(t)?;
        let v = spec.power * path_loss(dep.tiers[t][index].dist2, spec.alpha) * spec.bias;
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, Association { tier: t, index }));
        }
    }
    best.map(|(_, a)| a)
}

/// Fading and band draws of one trial.
///
/// `serving_gain[t]` is the gain of tier t's nearest BS should it serve.
/// `gain[t][b]` is BS b's gain towards the terminal when it transmits on the
/// reference band and 0 otherwise; the reference band is the serving band.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraws {
    pub serving_gain: Vec<f64>,
    pub gain: Vec<Vec<f64>>,
}

impl LinkDraws {
    /// Number of tier-t BSs on the reference band.
    pub fn co_channel(&self, t: usize) -> usize {
        self.gain[t].iter().filter(|&&g| g > 0.0).count()
    }
}

/// Per-tier samplers, built once per run.
struct Samplers {
    serving: Vec<FadingSampler>,
    interferer: Vec<FadingSampler>,
}

impl Samplers {
    fn new(net: &NetworkSpec) -> Self {
        Self {
            serving: net
                .tiers
                .iter()
                .map(|t| t.serving_fading.sampler())
                .collect(),
            interferer: net
                .tiers
                .iter()
                .map(|t| t.interferer_fading.sampler())
                .collect(),
        }
    }
}

fn draw_links_with<R: Rng + ?Sized>(
    net: &NetworkSpec,
    samplers: &Samplers,
    dep: &Deployment,
    rho: f64,
    rng: &mut R,
) -> LinkDraws {
    let common = if rho > 0.0 {
        let s: f64 = StandardNormal.sample(rng);
        rho.sqrt() * s
    } else {
        0.0
    };
    let w = (1.0 - rho).sqrt();
    let mut serving_gain = Vec::with_capacity(net.tiers.len());
    let mut gain = Vec::with_capacity(net.tiers.len());
    for (t, spec) in net.tiers.iter().enumerate() {
        serving_gain.push(samplers.serving[t].sample_correlated(common, w, rng));
        let bands = spec.freq_bands;
        let inter = &samplers.interferer[t];
        let g = dep.tiers[t]
            .iter()
            .map(|_| {
                if bands > 1 && rng.random_range(0..bands) != 0 {
                    0.0
                } else {
                    inter.sample_correlated(common, w, rng)
                }
            })
            .collect();
        gain.push(g);
    }
    LinkDraws { serving_gain, gain }
}

/// Draws fading for every BS (serving candidates from `serving_fading`,
/// the rest from `interferer_fading`) and a uniform band per BS.
/// `rho` correlates the shadowing Normals of all BSs.
pub fn draw_links<R: Rng + ?Sized>(
    net: &NetworkSpec,
    dep: &Deployment,
    rho: f64,
    rng: &mut R,
) -> LinkDraws {
    draw_links_with(net, &Samplers::new(net), dep, rho, rng)
}

/// Interference sums of one tier for one α: all co-channel BSs except the
/// nearest, and the nearest alone.
#[derive(Clone, Copy)]
struct TierSum {
    alpha: f64,
    others: f64,
    nearest: f64,
}

fn tier_sum(sites: &[BsSite], gains: &[f64], nearest: usize, alpha: f64) -> TierSum {
    let mut others = 0.0;
    for (b, (s, &g)) in sites.iter().zip(gains).enumerate() {
        if g > 0.0 && b != nearest {
            others += g * path_loss(s.dist2, alpha);
        }
    }
    let g = gains[nearest];
    let near = if g > 0.0 {
        g * path_loss(sites[nearest].dist2, alpha)
    } else {
        0.0
    };
    TierSum {
        alpha,
        others,
        nearest: near,
    }
}

/// Caches tier sums across networks that share one trial's draws.
struct SumCache {
    per_tier: Vec<Vec<TierSum>>,
}

impl SumCache {
    fn new(tiers: usize) -> Self {
        Self {
            per_tier: vec![Vec::new(); tiers],
        }
    }

    fn get(&mut self, dep: &Deployment, draws: &LinkDraws, t: usize, alpha: f64) -> TierSum {
        if let Some(s) = self.per_tier[t].iter().find(|s| s.alpha == alpha) {
            return *s;
        }
        let nearest = dep.nearest(t).expect("complete deployment");
        let s = tier_sum(&dep.tiers[t], &draws.gain[t], nearest, alpha);
        self.per_tier[t].push(s);
        s
    }
}

fn rate_from_draws(
    net: &NetworkSpec,
    dep: &Deployment,
    assoc: Association,
    draws: &LinkDraws,
    cache: &mut SumCache,
) -> f64 {
    let t = assoc.tier;
    let serving = &net.tiers[t];
    let useful = serving.power
        * draws.serving_gain[t]
        * path_loss(dep.tiers[t][assoc.index].dist2, serving.alpha);
    let mut interference = 0.0;
    for (q, spec) in net.tiers.iter().enumerate() {
        let s = cache.get(dep, draws, q, spec.alpha);
        let sum = if q == t {
            s.others
        } else {
            s.others + s.nearest
        };
        interference += spec.power * sum;
    }
    let sinr = useful / (net.noise_power + interference);
    sinr.ln_1p() / f64::from(serving.freq_bands)
}

/// (1/F_B) ln(1 + SINR) of one trial given its deployment and association.
///
/// Without noise and without co-channel interferers the SINR, and so the
/// returned rate, is infinite.
pub fn trial_rate<R: Rng + ?Sized>(
    net: &NetworkSpec,
    dep: &Deployment,
    assoc: Association,
    rho: f64,
    rng: &mut R,
) -> f64 {
    let draws = draw_links(net, dep, rho, rng);
    rate_from_draws(net, dep, assoc, &draws, &mut SumCache::new(net.tiers.len()))
}

/// Outcome of one trial of [`replay_trial`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Rate per network, in the order given.
    pub rates: Vec<f64>,
    pub associations: Vec<Association>,
    pub redraws: u64,
}

/// Validated, shared state of one batch run.
struct Plan<'a> {
    nets: &'a [NetworkSpec],
    samplers: Samplers,
    radius: f64,
    rho: f64,
    seed: u64,
}

impl<'a> Plan<'a> {
    fn new(nets: &'a [NetworkSpec], cfg: &McConfig) -> Result<Self> {
        cfg.validate()?;
        let first = nets
            .first()
            .ok_or_else(|| invalid("no network to simulate"))?;
        for (i, net) in nets.iter().enumerate() {
            net.validate()
                .map_err(|e| invalid(format!("network {}: {e}", i + 1)))?;
            if !shares_randomness(first, net) {
                return Err(invalid(format!(
                    "network {} differs from network 1 in tier count, density, band plan or fading",
                    i + 1
                )));
            }
        }
        Ok(Self {
            nets,
            samplers: Samplers::new(first),
            radius: cfg
                .radius_override
                .unwrap_or_else(|| simulation_radius(first)),
            rho: cfg.correlation_rho,
            seed: cfg.master_seed,
        })
    }

    fn trial(&self, trial: u64) -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let layout = &self.nets[0];
        let mut redraws = 0;
        let dep = loop {
            let d = draw_deployment(layout, self.radius, &mut rng);
            if d.is_complete() {
                break d;
            }
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return Err(Error::NonConvergence {
                    op: "estimate_rate".into(),
                    msg: format!("trial {trial}: {redraws} deployments with an empty tier; enlarge the radius"),
                });
            }
        };
        let draws = draw_links_with(layout, &self.samplers, &dep, self.rho, &mut rng);
        let mut cache = SumCache::new(layout.tiers.len());
        let mut rates = Vec::with_capacity(self.nets.len());
        let mut associations = Vec::with_capacity(self.nets.len());
        for net in self.nets {
            let a = associate(net, &dep).expect("complete deployment");
            rates.push(rate_from_draws(net, &dep, a, &draws, &mut cache));
            associations.push(a);
        }
        Ok(TrialOutcome {
            rates,
            associations,
            redraws,
        })
    }
}

/// True when two networks draw identical deployments and fading, so that
/// [`estimate_rate_batch`] accepts them together.
pub fn shares_randomness(a: &NetworkSpec, b: &NetworkSpec) -> bool {
    a.tiers.len() == b.tiers.len()
        && a.tiers.iter().zip(&b.tiers).all(|(x, y)| {
            x.lambda == y.lambda
                && x.freq_bands == y.freq_bands
                && x.serving_fading == y.serving_fading
                && x.interferer_fading == y.interferer_fading
        })
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
        self.n = n;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        }
    }
}

/// Re-runs trial `trial` of a batch exactly as the estimator does.
pub fn replay_trial(nets: &[NetworkSpec], cfg: &McConfig, trial: u64) -> Result<TrialOutcome> {
    Plan::new(nets, cfg)?.trial(trial)
}

/// Sample mean and standard error of the trial rate.
pub fn estimate_rate(net: &NetworkSpec, cfg: &McConfig) -> Result<McEstimate> {
    let mut v = estimate_rate_batch(std::slice::from_ref(net), cfg)?;
    Ok(v.remove(0))
}

/// Estimates for several networks on common random numbers.
///
/// Every network must match the first in tier count and, per tier, in
/// density, band count and fading models. Each estimate equals what
/// [`estimate_rate`] returns for that network alone with the same config.
pub fn estimate_rate_batch(nets: &[NetworkSpec], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    let plan = Plan::new(nets, cfg)?;
    let n_chunks = cfg.n_trials.div_ceil(CHUNK);
    let chunks: Vec<Result<(Vec<Moments>, u64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = vec![Moments::default(); nets.len()];
            let mut redraws = 0;
            let end = ((c + 1) * CHUNK).min(cfg.n_trials);
            for trial in c * CHUNK..end {
                let out = plan.trial(trial)?;
                for (mk, r) in m.iter_mut().zip(&out.rates) {
                    mk.push(*r);
                }
                redraws += out.redraws;
            }
            Ok((m, redraws))
        })
        .collect();
    let mut total = vec![Moments::default(); nets.len()];
    let mut redraws = 0;
    for chunk in chunks {
        let (m, r) = chunk?;
        for (t, c) in total.iter_mut().zip(&m) {
            t.merge(c);
        }
        redraws += r;
    }
    Ok(total
        .iter()
        .map(|m| McEstimate {
            mean_rate_nats: m.mean,
            std_error: m.std_error(),
            n_trials: m.n,
            radius_used: plan.radius,
            redraws,
        })
        .collect())
}

/// Equi-correlated Log-Normal mean powers Y_b = 10^{X_b/10} with
/// X_b = μ + σ√ρ S̄ + σ√(1−ρ) S_b, one shared S̄ per call.
pub fn draw_correlated_shadowing<R: Rng + ?Sized>(
    n: usize,
    mu_db: f64,
    sigma_db: f64,
    rho: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [0, 1], got {rho}")));
    }
    if !(sigma_db >= 0.0 && sigma_db.is_finite() && mu_db.is_finite()) {
        return Err(invalid(format!(
            "shadowing needs finite mu_db and sigma_db >= 0, got ({mu_db}, {sigma_db})"
        )));
    }
    let s_bar: f64 = StandardNormal.sample(rng);
    let common = sigma_db * rho.sqrt() * s_bar;
    let w = sigma_db * (1.0 - rho).sqrt();
    Ok((0..n)
        .map(|_| {
            let s: f64 = StandardNormal.sample(rng);
            10f64.powf((mu_db + common + w * s) / 10.0)
        })
        .collect())
}
