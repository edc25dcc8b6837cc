//! Commands: analytic rates, Monte Carlo estimates and their comparison
//! over the sweep points of a scenario, rendered as CSV.

use rayon::prelude::*;

use hetnet_core::mcsim::{
    estimate_rate, estimate_rate_batch, shares_randomness, McConfig, McEstimate,
};
use hetnet_core::quadrature::ghq_nodes;
use hetnet_core::rate_multi::{network_rate, NetworkSpec};
use hetnet_core::rate_single::{average_rate_correlated, SingleTierScenario};

use crate::csv::{fmt_sig, Table};
use crate::error::{CliError, CliResult};
use crate::scenario::{ScenarioFile, SweepVar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Analytic rate per sweep point.
    Rate,
    /// Monte Carlo mean and standard error per sweep point.
    Mc,
    /// Both, with the relative gap and a pass flag.
    Compare,
    /// Requires a sweep; runs `compare` when an [mc] section exists and
    /// `rate` otherwise.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rate => "rate",
            Command::Mc => "mc",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Replaces the scenario's master seed.
    pub seed: Option<u64>,
    /// Report rates in bits instead of nats.
    pub bits: bool,
}

/// One evaluated sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    /// Sweep value, `None` without a sweep.
    pub value: Option<f64>,
    pub rate_nats: Option<f64>,
    pub mc: Option<McEstimate>,
    /// |analytic − mc| / analytic, when both exist.
    pub rel_gap: Option<f64>,
    pub pass: Option<bool>,
}

/// Network and shadowing correlation at one sweep point.
pub fn point(scn: &ScenarioFile, value: Option<f64>) -> (NetworkSpec, f64) {
    let mut net = scn.network.clone();
    let mut rho = scn.correlation_rho;
    if let (Some(sw), Some(v)) = (&scn.sweep, value) {
        match sw.variable {
            SweepVar::SnrDb => net.noise_power = net.tiers[0].power / 10f64.powf(v / 10.0),
            SweepVar::Lambda => {
                let scale = v / net.tiers[0].lambda;
                for t in &mut net.tiers {
                    t.lambda *= scale;
                }
                net.tiers[0].lambda = v;
            }
            SweepVar::Rho => rho = v,
            SweepVar::FreqBands => {
                for t in &mut net.tiers {
                    t.freq_bands = v as u32;
                }
            }
        }
    }
    (net, rho)
}

fn point_label(scn: &ScenarioFile, value: Option<f64>) -> String {
    match (&scn.sweep, value) {
        (Some(sw), Some(v)) => format!("{} = {}", sw.variable.name(), fmt_sig(v)),
        _ => "scenario".into(),
    }
}

/// Analytic average rate for a network and shadowing correlation.
///
/// Correlated shadowing is supported for single-tier networks.
pub fn analytic_rate(net: &NetworkSpec, rho: f64) -> hetnet_core::Result<f64> {
    if rho == 0.0 {
        return Ok(network_rate(net)?.rate_nats);
    }
    if net.tiers.len() != 1 {
        return Err(hetnet_core::Error::Invalid(
            "correlated shadowing is implemented for single-tier networks".into(),
        ));
    }
    let t = &net.tiers[0];
    let scn = SingleTierScenario {
        lambda: t.lambda,
        power: t.power,
        alpha: t.alpha,
        noise_power: net.noise_power,
        freq_bands: t.freq_bands,
        serving_fading: t.serving_fading,
        interferer_fading: t.interferer_fading,
        numerics: net.numerics,
    };
    let outer = ghq_nodes(net.numerics.n_ghq)?;
    Ok(average_rate_correlated(&scn, rho, &outer)?.rate_nats)
}

fn points(scn: &ScenarioFile) -> Vec<Option<f64>> {
    match &scn.sweep {
        Some(sw) => sw.values.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

fn analytic_rows(scn: &ScenarioFile, pts: &[Option<f64>]) -> CliResult<Vec<f64>> {
    let results: Vec<CliResult<f64>> = pts
        .par_iter()
        .map(|&v| {
            let (net, rho) = point(scn, v);
            analytic_rate(&net, rho).map_err(|e| {
                CliError::from_core(&format!("analytic rate at {}", point_label(scn, v)), e)
            })
        })
        .collect();
    results.into_iter().collect()
}

fn mc_rows(scn: &ScenarioFile, pts: &[Option<f64>], base: McConfig) -> CliResult<Vec<McEstimate>> {
    let setups: Vec<(NetworkSpec, McConfig)> = pts
        .iter()
        .map(|&v| {
            let (net, rho) = point(scn, v);
            (
                net,
                McConfig {
                    correlation_rho: rho,
                    ..base
                },
            )
        })
        .collect();
    let ctx = |v: Option<f64>| format!("Monte Carlo at {}", point_label(scn, v));
    // Points that differ only in powers, exponents or noise share draws.
    let shared = setups
        .iter()
        .all(|(n, c)| c == &setups[0].1 && shares_randomness(n, &setups[0].0));
    if shared {
        let cfg = setups[0].1;
        let nets: Vec<NetworkSpec> = setups.into_iter().map(|(n, _)| n).collect();
        return estimate_rate_batch(&nets, &cfg).map_err(|e| CliError::from_core(&ctx(pts[0]), e));
    }
    setups
        .iter()
        .zip(pts)
        .map(|((net, cfg), &v)| {
            estimate_rate(net, cfg).map_err(|e| CliError::from_core(&ctx(v), e))
        })
        .collect()
}

/// Evaluates a command into rows, in sweep order.
pub fn evaluate(cmd: Command, scn: &ScenarioFile, opts: &RunOptions) -> CliResult<Vec<Row>> {
    let cmd = match cmd {
        Command::Sweep => {
            if scn.sweep.is_none() {
                return Err(CliError::Validation(
                    "the sweep command needs a [sweep] section".into(),
                ));
            }
            if scn.mc.is_some() {
                Command::Compare
            } else {
                Command::Rate
            }
        }
        c => c,
    };
    let pts = points(scn);
    let want_rate = matches!(cmd, Command::Rate | Command::Compare);
    let want_mc = matches!(cmd, Command::Mc | Command::Compare);
    let mc_settings = if want_mc {
        Some(scn.mc.ok_or_else(|| {
            CliError::Validation(format!("the {} command needs an [mc] section", cmd.name()))
        })?)
    } else {
        None
    };
    let rates = if want_rate {
        Some(analytic_rows(scn, &pts)?)
    } else {
        None
    };
    let mcs = match mc_settings {
        Some(s) => {
            let mut cfg = s.config;
            if let Some(seed) = opts.seed {
                cfg.master_seed = seed;
            }
            Some(mc_rows(scn, &pts, cfg)?)
        }
        None => None,
    };
    Ok(pts
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let rate_nats = rates.as_ref().map(|r| r[i]);
            let mc = mcs.as_ref().map(|m| m[i]);
            let (rel_gap, pass) = match (rate_nats, mc, mc_settings) {
                (Some(a), Some(m), Some(s)) => {
                    let gap = (a - m.mean_rate_nats).abs() / a;
                    (
                        Some(gap),
                        Some(gap <= s.tolerance.max(3.0 * m.std_error / a)),
                    )
                }
                _ => (None, None),
            };
            Row {
                value,
                rate_nats,
                mc,
                rel_gap,
                pass,
            }
        })
        .collect())
}

/// Runs a command and renders its CSV.
pub fn run(cmd: Command, scn: &ScenarioFile, opts: &RunOptions) -> CliResult<String> {
    let rows = evaluate(cmd, scn, opts)?;
    let sweep_var = scn.sweep.as_ref().map_or("none", |s| s.variable.name());
    let unit = if opts.bits {
        std::f64::consts::LOG2_E
    } else {
        1.0
    };
    let first = rows[0];
    let mut header = vec!["sweep_var", "value"];
    if first.rate_nats.is_some() {
        header.push("rate_nats");
    }
    if first.mc.is_some() {
        header.extend(["mc_mean", "mc_se"]);
    }
    if first.rel_gap.is_some() {
        header.extend(["rel_gap", "pass"]);
    }
    let mut table = Table::new(&header);
    for r in &rows {
        let mut cells = vec![
            sweep_var.to_string(),
            r.value.map_or(String::new(), fmt_sig),
        ];
        if let Some(a) = r.rate_nats {
            cells.push(fmt_sig(a * unit));
        }
        if let Some(m) = r.mc {
            cells.push(fmt_sig(m.mean_rate_nats * unit));
            cells.push(fmt_sig(m.std_error * unit));
        }
        if let (Some(g), Some(p)) = (r.rel_gap, r.pass) {
            cells.push(fmt_sig(g));
            cells.push(p.to_string());
        }
        table.push(cells);
    }
    Ok(table.render())
}
