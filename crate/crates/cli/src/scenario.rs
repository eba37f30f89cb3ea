//! Scenario runs and their summary reports.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crowlase_core::crow::{critical_coupling, crow_spectrum};
use crowlase_core::lasing::{classify_regime, growth_rate_curve, threshold_crow, threshold_sweep, GrowthCurve};
use crowlase_core::lattice_sim::{boundary_guard, evolve, power_balance_residual, GuardStatus};
use crowlase_core::reservoir::{markov_rates, memory_time};
use crowlase_core::spectral::{exponential_rate, resonance_pole, DecayIntegrator};
use crowlase_core::{Complex64, ComplexPole, CrowParams, LatticeState, LossPlacement, Regime, SimConfig, TimeSeries};

use crate::config::{RunKind, Scenario};
use crate::csv::Table;
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command-line settings that take precedence over files and presets.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub sites: Option<usize>,
    pub t_max: Option<f64>,
    pub seed_pole: Option<Complex64>,
    pub no_boundary_guard: bool,
}

impl Overrides {
    pub fn sim_config(&self, kappa: f64, t_max: f64, stride: usize, guard: bool, placement: LossPlacement) -> SimConfig {
        let t_max = self.t_max.unwrap_or(t_max);
        let mut cfg = SimConfig::new(kappa, t_max)
            .with_stride(stride)
            .with_guard(guard && !self.no_boundary_guard)
            .with_loss_placement(placement);
        if let Some(dt) = self.dt {
            cfg = cfg.with_dt(dt);
        }
        if let Some(n) = self.sites {
            cfg = cfg.with_sites(n);
        }
        cfg
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        if let Some(v) = self.dt {
            s.push_str(&format!(" override_dt={v}"));
        }
        if let Some(v) = self.sites {
            s.push_str(&format!(" override_sites={v}"));
        }
        if let Some(v) = self.t_max {
            s.push_str(&format!(" override_tmax={v}"));
        }
        if let Some(v) = self.seed_pole {
            s.push_str(&format!(" seed_pole={},{}", v.re, v.im));
        }
        if self.no_boundary_guard {
            s.push_str(" no_boundary_guard");
        }
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub kind: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_th: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_th_over_2kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_osc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_osc_over_2kappa: Option<f64>,
    /// Gains with neither growth nor decay at the resonant critical point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neutral_gain_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_sheet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_residue_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_residue_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_decay_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_balance_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_guard: Option<String>,
    /// Largest `|c_a|` gap between the lattice and spectral routes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_max_deviation: Option<f64>,
    /// Gap between the fitted lattice rate and the pole growth rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_rate_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_ratio_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_g_th_over_2kappa: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub untracked_gains: Vec<f64>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
}

impl Summary {
    fn new(s: &Scenario) -> Self {
        Summary {
            scenario: s.name.clone(),
            kind: s.kind.label().to_string(),
            version: VERSION.to_string(),
            ..Default::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("summary fields serialise")
    }

    fn set_pole(&mut self, pole: &ComplexPole) {
        self.pole_re = Some(pole.s_p.re);
        self.pole_im = Some(pole.s_p.im);
        self.pole_sheet = Some(format!("{:?}", pole.sheet).to_lowercase());
        self.pole_residue_re = Some(pole.residue.re);
        self.pole_residue_im = Some(pole.residue.im);
    }

    fn set_regime(&mut self, params: &CrowParams, regime: Regime, gamma_i: f64) -> Result<()> {
        self.regime = Some(regime.label().to_string());
        self.critical_ratio = Some(critical_coupling(params)?);
        match regime {
            Regime::BelowCritical => {
                let th = threshold_crow(params, gamma_i)?;
                let k2 = 2.0 * params.kappa;
                self.g_th = Some(th.g_th);
                self.g_th_over_2kappa = Some(th.g_th / k2);
                self.omega_osc = Some(th.omega_osc);
                self.omega_osc_over_2kappa = Some(th.omega_osc / k2);
            }
            Regime::CriticalDetuned => self
                .notes
                .push("critical coupling with detuning: the field grows for every positive net gain".into()),
            Regime::CriticalResonant => {
                self.neutral_gain_interval = Some([gamma_i, gamma_i + 2.0 * params.kappa]);
                self.notes.push(
                    "resonant critical coupling: no single threshold, neutral oscillation for net gain in (0, 2 kappa)"
                        .into(),
                );
            }
        }
        Ok(())
    }

    fn set_guard(&mut self, series: &TimeSeries, cfg: &SimConfig) {
        self.boundary_guard = Some(match boundary_guard(series, cfg) {
            GuardStatus::Pass => "pass".to_string(),
            GuardStatus::Warning { first_time } => format!("warning: edge reached at t = {first_time}"),
        });
        if series.overflow {
            self.notes.push(format!("run stopped at t = {} on overflow", series.t.last().copied().unwrap_or(0.0)));
        }
    }
}

/// Result of one scenario: CSV tables keyed by file name plus the summary.
pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub summary: Summary,
}

impl Outcome {
    /// Writes every table and `<name>.summary.toml` under `out`.
    pub fn write(mut self, out: &Path) -> Result<Summary> {
        for (name, _) in &self.tables {
            self.summary.outputs.push(name.clone());
        }
        for (name, table) in &self.tables {
            table.write(&out.join(name))?;
        }
        let path = out.join(format!("{}.summary.toml", self.summary.scenario));
        crate::csv::write_atomic(&path, self.summary.to_toml().as_bytes())?;
        Ok(self.summary)
    }
}

/// Rows of `series` kept in the CSV: every `stride`-th sample plus the last.
fn output_rows(series: &TimeSeries, stride: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..series.len()).step_by(stride).collect();
    if !series.is_empty() && rows.last() != Some(&(series.len() - 1)) {
        rows.push(series.len() - 1);
    }
    rows
}

fn series_table(comment: String, series: &TimeSeries, rows: &[usize], spectral: Option<&[Complex64]>) -> Table {
    let mut header = vec!["2kappa_t", "abs_c_a", "re_c_a", "im_c_a", "total_power"];
    if spectral.is_some() {
        header.extend(["abs_c_a_spectral", "route_deviation"]);
    }
    let mut table = Table::new(comment, &header);
    let tn = series.normalized_time();
    for (j, &k) in rows.iter().enumerate() {
        let c = series.c_a[k];
        let mut row = vec![tn[k], c.norm(), c.re, c.im, series.total_power[k]];
        if let Some(sp) = spectral {
            row.push(sp[j].norm());
            row.push((sp[j] - c).norm());
        }
        table.push(row);
    }
    table
}

fn csv_name(s: &Scenario) -> String {
    s.output.clone().unwrap_or_else(|| format!("{}.csv", s.name))
}

fn comment(s: &Scenario, o: &Overrides, cfg: Option<&SimConfig>) -> String {
    let mut c = format!("crowlase {VERSION} {}", s.describe());
    if let Some(cfg) = cfg {
        c.push_str(&format!(
            " dt={} sites={} t_max={} stride={} boundary_guard={}",
            cfg.dt, cfg.n_sites, cfg.t_max, s.stride, cfg.boundary_guard
        ));
    }
    c.push_str(&o.describe());
    c
}

pub fn run(s: &Scenario, o: &Overrides) -> Result<Outcome> {
    match s.kind {
        RunKind::Decay => run_decay(s, o),
        RunKind::GainDynamics => run_gain(s, o),
        RunKind::ThresholdSweep => run_threshold_sweep(s),
        RunKind::GrowthRateTrack => run_growth_track(s, o),
        RunKind::RegimeReport => run_regime_report(s, o),
    }
}

fn simulate(s: &Scenario, params: &CrowParams, cfg: &SimConfig) -> Result<TimeSeries> {
    Ok(evolve(params, s.gain, s.intrinsic_loss, cfg, &LatticeState::initial(cfg.n_sites))?)
}

fn pole_for(s: &Scenario, params: &CrowParams, o: &Overrides, summary: &mut Summary) -> Option<ComplexPole> {
    let g_prime = s.gain - s.intrinsic_loss;
    let found = match o.seed_pole {
        Some(seed) => resonance_pole(&crow_spectrum(params), params.omega_a, g_prime, Some(seed)).map_err(CliError::from),
        None => growth_rate_curve(params, s.intrinsic_loss, &[s.gain])
            .map_err(CliError::from)
            .and_then(|c: GrowthCurve| {
                c.points
                    .first()
                    .map(|p| p.1)
                    .ok_or_else(|| CliError::Numeric("the tracked pole left the admissible region".into()))
            }),
    };
    match found {
        Ok(p) => {
            summary.set_pole(&p);
            Some(p)
        }
        Err(e) => {
            summary.notes.push(format!("no resonance pole found at net gain {g_prime}: {e}"));
            None
        }
    }
}

fn run_decay(s: &Scenario, o: &Overrides) -> Result<Outcome> {
    let params = s.params()?;
    let regime = classify_regime(&params)?;
    let mut summary = Summary::new(s);
    summary.set_regime(&params, regime, s.intrinsic_loss)?;
    let spec = crow_spectrum(&params);
    let markov = markov_rates(&spec, params.omega_a)?;
    summary.markov_rate = Some(markov.gamma_r);
    summary.markov_shift = Some(markov.delta_r);
    let pole = pole_for(s, &params, o, &mut summary);

    let k = params.kappa;
    let rate_scale = pole.map(|p| p.gamma_p).filter(|g| *g > 0.0).unwrap_or(markov.gamma_r);
    let default_t = if rate_scale > 0.0 { (5.0 / rate_scale).clamp(20.0 / k, 500.0 / k) } else { 20.0 / k };
    let cfg = o.sim_config(k, s.t_max.unwrap_or(default_t), 1, s.boundary_guard, s.loss_placement.into());
    let series = simulate(s, &params, &cfg)?;
    let rows = output_rows(&series, s.stride);

    // Spectral route: passive cavity, lossless or with the loss on every resonator.
    let passive = s.gain == s.intrinsic_loss;
    let spectral_ok = passive && (params.gamma_loss == 0.0 || cfg.loss_placement == LossPlacement::Global);
    let spectral = if spectral_ok {
        let gl = params.gamma_loss;
        let route = DecayIntegrator::new(&spec, params.omega_a).and_then(|integ| {
            rows.par_iter()
                .map(|&k| {
                    let t = series.t[k];
                    integ.at(t).map(|c| c * (-gl * t).exp())
                })
                .collect::<std::result::Result<Vec<Complex64>, _>>()
        });
        match route {
            Ok(v) => Some(v),
            Err(e) => {
                summary.notes.push(format!("spectral route unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    if let Some(sp) = &spectral {
        let dev = sp.iter().zip(&rows).map(|(a, &k)| (a - series.c_a[k]).norm()).fold(0.0, f64::max);
        summary.route_max_deviation = Some(dev);
    }

    let t_end = series.t.last().copied().unwrap_or(0.0);
    let (lo, hi) = if rate_scale > 0.0 {
        ((1.0 / rate_scale).min(0.5 * t_end), (5.0 / rate_scale).min(t_end))
    } else {
        (0.5 * t_end, t_end)
    };
    match exponential_rate(&series.t, &series.abs_c_a(), (lo, hi)) {
        Ok(r) => {
            let fitted = -r;
            summary.fitted_decay_rate = Some(fitted);
            let expected = markov.gamma_r + params.gamma_loss + s.intrinsic_loss - s.gain;
            if expected > 0.0 && (fitted / expected - 1.0).abs() < 0.1 {
                summary
                    .notes
                    .push("Markovian regime: fitted decay rate within 10% of the Weisskopf-Wigner rate".into());
            } else {
                summary.notes.push("non-Markovian regime: decay departs from the Weisskopf-Wigner rate".into());
            }
        }
        Err(e) => summary.notes.push(format!("no exponential fit: {e}")),
    }
    summary.power_balance_residual =
        Some(power_balance_residual(&series, s.gain, s.intrinsic_loss, params.gamma_loss, cfg.loss_placement)?);
    summary.set_guard(&series, &cfg);
    let table = series_table(comment(s, o, Some(&cfg)), &series, &rows, spectral.as_deref());
    Ok(Outcome {
        tables: vec![(csv_name(s), table)],
        summary,
    })
}

fn run_gain(s: &Scenario, o: &Overrides) -> Result<Outcome> {
    let params = s.params()?;
    let regime = classify_regime(&params)?;
    let mut summary = Summary::new(s);
    summary.set_regime(&params, regime, s.intrinsic_loss)?;
    let pole = pole_for(s, &params, o, &mut summary);
    let k = params.kappa;
    let cfg = o.sim_config(k, s.t_max.unwrap_or(100.0 / k), 1, s.boundary_guard, s.loss_placement.into());
    let series = simulate(s, &params, &cfg)?;
    let t_end = series.t.last().copied().unwrap_or(0.0);
    match exponential_rate(&series.t, &series.abs_c_a(), (0.5 * t_end, t_end)) {
        Ok(r) => {
            summary.fitted_rate = Some(r);
            if let Some(p) = pole {
                let shift = match cfg.loss_placement {
                    LossPlacement::Global => params.gamma_loss,
                    LossPlacement::CrowOnly => 0.0,
                };
                if cfg.loss_placement == LossPlacement::Global || params.gamma_loss == 0.0 {
                    summary.route_rate_deviation = Some((r - (p.s_p.re - shift)).abs());
                }
            }
        }
        Err(e) => summary.notes.push(format!("no exponential fit: {e}")),
    }
    summary.power_balance_residual =
        Some(power_balance_residual(&series, s.gain, s.intrinsic_loss, params.gamma_loss, cfg.loss_placement)?);
    summary.set_guard(&series, &cfg);
    let table = series_table(comment(s, o, Some(&cfg)), &series, &output_rows(&series, s.stride), None);
    Ok(Outcome {
        tables: vec![(csv_name(s), table)],
        summary,
    })
}

fn run_threshold_sweep(s: &Scenario) -> Result<Outcome> {
    let detuning = s.omega_a() / (2.0 * s.kappa);
    let grid = match &s.ratio_sq_grid {
        Some(g) => g.clone(),
        None => {
            let crit = 1.0 - detuning.abs();
            (0..=200).map(|k| crit * k as f64 / 200.0).collect()
        }
    };
    let curve = threshold_sweep(detuning, &grid)?;
    let mut summary = Summary::new(s);
    summary.peak_ratio_sq = Some(curve.peak.0);
    summary.peak_g_th_over_2kappa = Some(curve.peak.1);
    let mut table = Table::new(format!("crowlase {VERSION} {} detuning={detuning}", s.describe()), &["ratio_sq", "g_th_over_2kappa"]);
    for (x, g) in &curve.points {
        table.push(vec![*x, *g]);
    }
    Ok(Outcome {
        tables: vec![(csv_name(s), table)],
        summary,
    })
}

fn growth_table(comment: String, kappa: f64, curve: &GrowthCurve) -> Table {
    let k2 = 2.0 * kappa;
    let mut table = Table::new(comment, &["g_over_2kappa", "sigma_over_2kappa", "frequency_over_2kappa"]);
    for (g, pole) in &curve.points {
        table.push(vec![g / k2, pole.s_p.re / k2, -pole.s_p.im / k2]);
    }
    table
}

fn run_growth_track(s: &Scenario, o: &Overrides) -> Result<Outcome> {
    let params = s.params()?;
    let regime = classify_regime(&params)?;
    let mut summary = Summary::new(s);
    summary.set_regime(&params, regime, s.intrinsic_loss)?;
    let gains = s.gains.clone().unwrap_or_default();
    let curve = growth_rate_curve(&params, s.intrinsic_loss, &gains)?;
    summary.untracked_gains = curve.missing.clone();
    if o.seed_pole.is_some() {
        summary.notes.push("seed_pole is not used by pole tracks; they start from the threshold pole".into());
    }
    let table = growth_table(comment(s, o, None), params.kappa, &curve);
    Ok(Outcome {
        tables: vec![(csv_name(s), table)],
        summary,
    })
}

fn run_regime_report(s: &Scenario, o: &Overrides) -> Result<Outcome> {
    let params = s.params()?;
    let regime = classify_regime(&params)?;
    let mut summary = Summary::new(s);
    summary.set_regime(&params, regime, s.intrinsic_loss)?;
    let spec = crow_spectrum(&params);
    let markov = markov_rates(&spec, params.omega_a)?;
    summary.markov_rate = Some(markov.gamma_r);
    summary.markov_shift = Some(markov.delta_r);
    if params.kappa0 > 0.0 {
        match memory_time(&spec, params.omega_a) {
            Ok(t) => summary.memory_time = Some(t),
            Err(e) => summary.notes.push(format!("memory time unavailable: {e}")),
        }
    }
    pole_for(s, &params, o, &mut summary);
    Ok(Outcome {
        tables: Vec::new(),
        summary,
    })
}

/// Runs every sweep point concurrently. Returns the per-point outcomes in
/// input order; each point either succeeded or carries its error.
pub fn sweep(s: &Scenario, o: &Overrides) -> Result<Vec<(f64, Result<Outcome>)>> {
    let (param, values) = match (s.sweep_param, &s.sweep_values) {
        (Some(p), Some(v)) => (p, v.clone()),
        _ => return Err(CliError::Config("sweep needs sweep_param and sweep_values".into())),
    };
    Ok(values
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut point = s.with_value(param, v);
            point.name = format!("{}_{k:03}", s.name);
            point.output = None;
            (v, point.params().and_then(|_| run(&point, o)))
        })
        .collect())
}

pub fn sweep_table(s: &Scenario, o: &Overrides, points: &[(f64, &Summary)]) -> Table {
    let label = s.sweep_param.map(|p| p.label()).unwrap_or("value");
    let mut table = Table::new(
        format!("crowlase {VERSION} {} sweep={label}{}", s.describe(), o.describe()),
        &[label, "g_th", "pole_re", "pole_im", "fitted_rate", "power_balance_residual", "route_max_deviation"],
    );
    let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
    for (value, sm) in points {
        table.push(vec![
            *value,
            v(sm.g_th),
            v(sm.pole_re),
            v(sm.pole_im),
            v(sm.fitted_rate.or(sm.fitted_decay_rate.map(|r| -r))),
            v(sm.power_balance_residual),
            v(sm.route_max_deviation),
        ]);
    }
    table
}
