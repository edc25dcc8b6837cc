//! Scenario file parser.
//!
//! The format is line oriented. Sections are `[network]`, `[tier]` (one per
//! tier, in tier order), `[mc]`, `[sweep]` and `[output]`; entries are
//! `key = value` and `#` starts a comment.
//!
//! ```text
//! [network]
//! noise_power = 0.1          # or noise_floor_w with path_loss_l0
//!
//! [tier]
//! lambda = 0.25
//! alpha = 4
//! snr_db = 10                # with power, or instead of it
//! fading = nakagami_lognormal m=2.5 sigma_db=6
//!
//! [mc]
//! n_trials = 100000
//! master_seed = 1
//!
//! [sweep]
//! variable = snr_db
//! values = 0:40:5            # start:stop:step, or a comma list
//!
//! [output]
//! path = rates.csv
//! ```
//!
//! The noise power comes from `noise_power`, from `noise_floor_w /
//! path_loss_l0`, or else from the first tier that gives `snr_db`. A tier
//! that gives both `power` and `snr_db` must agree with the noise power
//! within [`SNR_TOLERANCE_DB`].

use std::path::PathBuf;

use hetnet_core::fading::{unit_mean_mu_db, FadingModel, SeriesControl};
use hetnet_core::mcsim::McConfig;
use hetnet_core::rate_multi::{NetworkSpec, TierSpec};
use hetnet_core::rate_single::{GiMode, Numerics};

use crate::error::{CliError, CliResult};

/// Largest accepted mismatch between a stated and a derived SNR.
pub const SNR_TOLERANCE_DB: f64 = 0.01;

/// Default Monte Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Default relative tolerance of `compare`: single tier, then multi-tier.
pub const DEFAULT_TOLERANCE_SINGLE: f64 = 0.03;
pub const DEFAULT_TOLERANCE_MULTI: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// SNR of tier 1 in dB; the noise power follows.
    SnrDb,
    /// Density of tier 1; other tiers keep their ratio to it.
    Lambda,
    /// Shadowing correlation coefficient.
    Rho,
    /// Band count of every tier.
    FreqBands,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::SnrDb => "snr_db",
            SweepVar::Lambda => "lambda",
            SweepVar::Rho => "rho",
            SweepVar::FreqBands => "freq_bands",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            SweepVar::SnrDb,
            SweepVar::Lambda,
            SweepVar::Rho,
            SweepVar::FreqBands,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }

    fn check(self, v: f64) -> Result<(), String> {
        let ok = match self {
            SweepVar::SnrDb => v.is_finite(),
            SweepVar::Lambda => v > 0.0 && v.is_finite(),
            SweepVar::Rho => (0.0..=1.0).contains(&v),
            SweepVar::FreqBands => v >= 1.0 && v == v.round() && v <= f64::from(u32::MAX),
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "sweep value {v} is outside the domain of {}",
                self.name()
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    /// `correlation_rho` is filled per sweep point from the network section.
    pub config: McConfig,
    /// Relative tolerance used by `compare`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub network: NetworkSpec,
    pub correlation_rho: f64,
    pub sweep: Option<Sweep>,
    pub mc: Option<McSettings>,
    pub output: Option<PathBuf>,
}

impl ScenarioFile {
    /// SNR of tier `t` in dB as derived from power and noise.
    pub fn snr_db(&self, t: usize) -> f64 {
        10.0 * self.network.snr(t).log10()
    }
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    fn real(&mut self, key: &str) -> CliResult<Option<f64>> {
        self.take(key).map(|e| parse_real(&e)).transpose()
    }

    fn count(&mut self, key: &str) -> CliResult<Option<u64>> {
        self.take(key).map(|e| parse_count(&e)).transpose()
    }

    /// Rejects whatever keys nobody consumed.
    fn finish(self) -> CliResult<()> {
        match self.entries.first() {
            Some(e) => Err(CliError::Parse {
                line: e.line,
                msg: format!("unknown key '{}' in [{}]", e.key, self.name),
            }),
            None => Ok(()),
        }
    }
}

fn parse_real(e: &Entry) -> CliResult<f64> {
    e.value.parse::<f64>().map_err(|_| CliError::Parse {
        line: e.line,
        msg: format!("{}: expected a number, got '{}'", e.key, e.value),
    })
}

fn parse_count(e: &Entry) -> CliResult<u64> {
    let v = parse_real(e)?;
    if v >= 0.0 && v == v.round() && v <= 2f64.powi(53) {
        Ok(v as u64)
    } else {
        Err(CliError::Parse {
            line: e.line,
            msg: format!(
                "{}: expected a nonnegative integer, got '{}'",
                e.key, e.value
            ),
        })
    }
}

fn parse_bool(e: &Entry) -> CliResult<bool> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Parse {
            line: e.line,
            msg: format!("{}: expected true or false, got '{}'", e.key, e.value),
        }),
    }
}

fn split_sections(text: &str) -> CliResult<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| CliError::Parse {
                line,
                msg: format!("malformed section header '{body}'"),
            })?;
            let name = name.trim();
            if !["network", "tier", "mc", "sweep", "output"].contains(&name) {
                return Err(CliError::Parse {
                    line,
                    msg: format!("unknown section [{name}]"),
                });
            }
            if name != "tier" && sections.iter().any(|s| s.name == name) {
                return Err(CliError::Parse {
                    line,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| CliError::Parse {
            line,
            msg: format!("expected 'key = value', got '{body}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Parse {
                line,
                msg: format!("expected 'key = value', got '{body}'"),
            });
        }
        let section = sections.last_mut().ok_or_else(|| CliError::Parse {
            line,
            msg: "entry before the first section header".into(),
        })?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(CliError::Parse {
                line,
                msg: format!("duplicate key '{key}' in [{}]", section.name),
            });
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(sections)
}

/// Parses a fading declaration such as `nakagami_lognormal m=2.5 sigma_db=6`.
///
/// Families: `rayleigh [omega]`, `nakagami m [omega]`, `lognormal sigma_db
/// [mu_db]`, `nakagami_lognormal m sigma_db [mu_db]` and `rice_lognormal
/// k_factor sigma_db [mu_db]`. `omega` defaults to 1 and `mu_db` to the
/// unit-mean value for the given σ.
pub fn parse_fading(text: &str) -> Result<FadingModel, String> {
    let mut words = text.split_whitespace();
    let family = words.next().ok_or("empty fading declaration")?;
    let mut params: Vec<(&str, f64)> = Vec::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| format!("fading parameter '{w}' is not key=value"))?;
        let v: f64 = v
            .parse()
            .map_err(|_| format!("fading parameter {k}: expected a number, got '{v}'"))?;
        if params.iter().any(|p| p.0 == k) {
            return Err(format!("fading parameter {k} given twice"));
        }
        params.push((k, v));
    }
    let allowed: &[&str] = match family {
        "rayleigh" => &["omega"],
        "nakagami" => &["m", "omega"],
        "lognormal" => &["sigma_db", "mu_db"],
        "nakagami_lognormal" => &["m", "sigma_db", "mu_db"],
        "rice_lognormal" => &["k_factor", "sigma_db", "mu_db"],
        _ => return Err(format!("unknown fading family '{family}'")),
    };
    if let Some((k, _)) = params.iter().find(|p| !allowed.contains(&p.0)) {
        return Err(format!("{family} does not take parameter {k}"));
    }
    let get = |k: &str| params.iter().find(|p| p.0 == k).map(|p| p.1);
    let need = |k: &str| get(k).ok_or_else(|| format!("{family} needs parameter {k}"));
    let omega = get("omega").unwrap_or(1.0);
    let model = match family {
        "rayleigh" => FadingModel::Rayleigh { omega },
        "nakagami" => FadingModel::Nakagami {
            m: need("m")?,
            omega,
        },
        _ => {
            let sigma_db = need("sigma_db")?;
            let mu_db = get("mu_db").unwrap_or_else(|| unit_mean_mu_db(sigma_db));
            match family {
                "lognormal" => FadingModel::LogNormal { mu_db, sigma_db },
                "nakagami_lognormal" => FadingModel::NakagamiLogNormal {
                    m: need("m")?,
                    mu_db,
                    sigma_db,
                },
                _ => FadingModel::RiceLogNormal {
                    k_factor: need("k_factor")?,
                    mu_db,
                    sigma_db,
                },
            }
        }
    };
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

fn fading_entry(e: &Entry) -> CliResult<FadingModel> {
    parse_fading(&e.value).map_err(|msg| CliError::Parse {
        line: e.line,
        msg: format!("{}: {msg}", e.key),
    })
}

fn parse_values(e: &Entry) -> CliResult<Vec<f64>> {
    let bad = |msg: String| CliError::Parse { line: e.line, msg };
    if e.value.contains(':') {
        let parts: Vec<&str> = e.value.split(':').map(str::trim).collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad(format!("range '{}' is not start:stop:step", e.value)));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(format!("'{s}' is not a number")))
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0 && stop >= start && ((stop - start) / step) < 1e6) {
            return Err(bad(format!(
                "range '{}' needs step > 0 and stop >= start",
                e.value
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    e.value
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| bad(format!("'{s}' is not a number")))
        })
        .collect()
}

fn parse_numerics(sec: &mut Section) -> CliResult<Numerics> {
    let mut num = Numerics::default();
    let mut series = SeriesControl::default();
    if let Some(v) = sec.count("n_gcq")? {
        num.n_gcq = v as usize;
    }
    if let Some(v) = sec.count("n_ghq")? {
        num.n_ghq = v as usize;
    }
    if let Some(v) = sec.real("epsilon")? {
        num.epsilon = v;
    }
    if let Some(v) = sec.count("max_terms")? {
        series.max_terms = v as usize;
    }
    if let Some(v) = sec.real("rel_stop")? {
        series.rel_stop = v;
    }
    num.series = series;
    if let Some(v) = sec.real("inner_rel_tol")? {
        num.inner_rel_tol = v;
    }
    if let Some(e) = sec.take("drop_asymptote") {
        num.drop_asymptote = parse_bool(&e)?;
    }
    if let Some(e) = sec.take("g_i_mode") {
        num.g_i_mode = match e.value.as_str() {
            "auto" => GiMode::Auto,
            "closed" => GiMode::Closed,
            "integral" => GiMode::Integral,
            _ => {
                return Err(CliError::Parse {
                    line: e.line,
                    msg: format!(
                        "g_i_mode: expected auto, closed or integral, got '{}'",
                        e.value
                    ),
                })
            }
        };
    }
    Ok(num)
}

/// Tier entries before the noise power is known.
struct RawTier {
    line: usize,
    lambda: f64,
    alpha: f64,
    bias: f64,
    freq_bands: u32,
    power: Option<f64>,
    snr_db: Option<f64>,
    serving_fading: FadingModel,
    interferer_fading: FadingModel,
}

fn parse_tier(mut sec: Section, index: usize) -> CliResult<RawTier> {
    let line = sec.line;
    let missing = |key: &str| CliError::Parse {
        line,
        msg: format!("tier {index}: missing key '{key}'"),
    };
    let lambda = sec.real("lambda")?.ok_or_else(|| missing("lambda"))?;
    let alpha = sec.real("alpha")?.ok_or_else(|| missing("alpha"))?;
    let bias = sec.real("bias")?.unwrap_or(1.0);
    let freq_bands = match sec.take("freq_bands") {
        Some(e) => {
            let v = parse_count(&e)?;
            u32::try_from(v).map_err(|_| CliError::Parse {
                line: e.line,
                msg: format!("freq_bands: {v} is too large"),
            })?
        }
        None => 1,
    };
    let power = sec.real("power")?;
    let snr_db = sec.real("snr_db")?;
    let common = sec.take("fading").map(|e| fading_entry(&e)).transpose()?;
    let serving = sec
        .take("serving_fading")
        .map(|e| fading_entry(&e))
        .transpose()?;
    let interferer = sec
        .take("interferer_fading")
        .map(|e| fading_entry(&e))
        .transpose()?;
    let serving_fading = serving.or(common).ok_or_else(|| missing("fading"))?;
    let interferer_fading = interferer.or(common).ok_or_else(|| missing("fading"))?;
    sec.finish()?;
    Ok(RawTier {
        line,
        lambda,
        alpha,
        bias,
        freq_bands,
        power,
        snr_db,
        serving_fading,
        interferer_fading,
    })
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Noise power from the network section or, failing that, the first tier
/// that states its SNR.
fn resolve_noise(
    explicit: Option<f64>,
    floor: Option<(f64, f64)>,
    tiers: &[RawTier],
) -> CliResult<f64> {
    let from_floor = floor.map(|(w, l0)| w / l0);
    if let (Some(a), Some(b)) = (explicit, from_floor) {
        if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
            return Err(CliError::Validation(format!(
                "noise_power = {a} disagrees with noise_floor_w / path_loss_l0 = {b}"
            )));
        }
    }
    if let Some(n) = explicit.or(from_floor) {
        return Ok(n);
    }
    tiers
        .iter()
        .find_map(|t| t.snr_db.map(|s| t.power.unwrap_or(1.0) / db_to_linear(s)))
        .ok_or_else(|| {
            CliError::Validation(
                "noise is unspecified: give noise_power, noise_floor_w with path_loss_l0, or a tier snr_db".into(),
            )
        })
}

pub fn parse_scenario(text: &str) -> CliResult<ScenarioFile> {
    let sections = split_sections(text)?;
    let mut network_sec = None;
    let mut tier_secs = Vec::new();
    let mut mc_sec = None;
    let mut sweep_sec = None;
    let mut output_sec = None;
    for s in sections {
        match s.name.as_str() {
            "network" => network_sec = Some(s),
            "tier" => tier_secs.push(s),
            "mc" => mc_sec = Some(s),
            "sweep" => sweep_sec = Some(s),
            _ => output_sec = Some(s),
        }
    }
    if tier_secs.is_empty() {
        return Err(CliError::Validation(
            "at least one [tier] section is required".into(),
        ));
    }
    let tiers = tier_secs
        .into_iter()
        .enumerate()
        .map(|(i, s)| parse_tier(s, i + 1))
        .collect::<CliResult<Vec<_>>>()?;

    let (numerics, explicit_noise, floor, correlation_rho) = match network_sec {
        Some(mut sec) => {
            let numerics = parse_numerics(&mut sec)?;
            let explicit = sec.real("noise_power")?;
            let w = sec.real("noise_floor_w")?;
            let l0 = sec.real("path_loss_l0")?;
            let floor = match (w, l0) {
                (Some(w), Some(l0)) => Some((w, l0)),
                (None, None) => None,
                _ => {
                    return Err(CliError::Parse {
                        line: sec.line,
                        msg: "noise_floor_w and path_loss_l0 must be given together".into(),
                    })
                }
            };
            let rho = sec.real("correlation_rho")?.unwrap_or(0.0);
            sec.finish()?;
            (numerics, explicit, floor, rho)
        }
        None => (Numerics::default(), None, None, 0.0),
    };
    if !(0.0..=1.0).contains(&correlation_rho) {
        return Err(CliError::Validation(format!(
            "correlation_rho must lie in [0, 1], got {correlation_rho}"
        )));
    }
    let noise_power = resolve_noise(explicit_noise, floor, &tiers)?;

    let mut specs = Vec::with_capacity(tiers.len());
    for (i, t) in tiers.iter().enumerate() {
        let power = match (t.power, t.snr_db) {
            (Some(p), Some(s)) => {
                let derived = 10.0 * (p / noise_power).log10();
                if !((derived - s).abs() <= SNR_TOLERANCE_DB) {
                    return Err(CliError::Validation(format!(
                        "tier {} (line {}): snr_db = {s} but power / noise gives {derived:.4} dB",
                        i + 1,
                        t.line
                    )));
                }
                p
            }
            (Some(p), None) => p,
            (None, Some(s)) => {
                if noise_power == 0.0 {
                    return Err(CliError::Validation(format!(
                        "tier {}: snr_db cannot be combined with zero noise",
                        i + 1
                    )));
                }
                noise_power * db_to_linear(s)
            }
            (None, None) => 1.0,
        };
        specs.push(TierSpec {
            lambda: t.lambda,
            power,
            alpha: t.alpha,
            bias: t.bias,
            freq_bands: t.freq_bands,
            serving_fading: t.serving_fading,
            interferer_fading: t.interferer_fading,
        });
    }
    let network = NetworkSpec {
        tiers: specs,
        noise_power,
        numerics,
    };
    network
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let sweep = match sweep_sec {
        Some(mut sec) => {
            let var_entry = sec.take("variable").ok_or_else(|| CliError::Parse {
                line: sec.line,
                msg: "[sweep] needs 'variable'".into(),
            })?;
            let variable = SweepVar::parse(&var_entry.value).ok_or_else(|| CliError::Parse {
                line: var_entry.line,
                msg: format!(
                    "variable: expected snr_db, lambda, rho or freq_bands, got '{}'",
                    var_entry.value
                ),
            })?;
            let values_entry = sec.take("values").ok_or_else(|| CliError::Parse {
                line: sec.line,
                msg: "[sweep] needs 'values'".into(),
            })?;
            let values = parse_values(&values_entry)?;
            for &v in &values {
                variable.check(v).map_err(|msg| CliError::Parse {
                    line: values_entry.line,
                    msg,
                })?;
            }
            if variable == SweepVar::SnrDb && network.noise_power == 0.0 {
                return Err(CliError::Validation(
                    "an snr_db sweep needs a nonzero noise power".into(),
                ));
            }
            sec.finish()?;
            Some(Sweep { variable, values })
        }
        None => None,
    };

    let mc = match mc_sec {
        Some(mut sec) => {
            let mut config = McConfig::new(sec.count("n_trials")?.unwrap_or(DEFAULT_TRIALS), 1);
            if let Some(s) = sec.count("master_seed")? {
                config.master_seed = s;
            }
            config.radius_override = sec.real("radius_override")?;
            let default_tol = if network.tiers.len() == 1 {
                DEFAULT_TOLERANCE_SINGLE
            } else {
                DEFAULT_TOLERANCE_MULTI
            };
            let tolerance = sec.real("tolerance")?.unwrap_or(default_tol);
            if !(tolerance > 0.0 && tolerance.is_finite()) {
                return Err(CliError::Validation(format!(
                    "tolerance must be positive, got {tolerance}"
                )));
            }
            sec.finish()?;
            config
                .validate()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            Some(McSettings { config, tolerance })
        }
        None => None,
    };

    let output = match output_sec {
        Some(mut sec) => {
            let path = sec.take("path").map(|e| PathBuf::from(e.value));
            sec.finish()?;
            path
        }
        None => None,
    };

    Ok(ScenarioFile {
        network,
        correlation_rho,
        sweep,
        mc,
        output,
    })
}
