//! Figure presets. Every panel is one CSV with a fixed grid, so repeated
//! runs give identical bytes.

use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;

use crowlase_core::lasing::{growth_rate_curve, resonant_critical_solution, threshold_sweep};
use crowlase_core::lattice_sim::evolve;
use crowlase_core::{CrowParams, LatticeState, LossPlacement, TimeSeries};

use crate::csv::Table;
use crate::error::Result;
use crate::scenario::{Overrides, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig6,
    Fig7,
    Fig8a,
    Fig8b,
    Fig9a,
    Fig9b,
    Fig11,
    Fig12,
}

const KAPPA: f64 = 1.0;
const FIG6_RATIOS: [f64; 3] = [0.2, 0.707, 1.0];
const FIG7_DETUNINGS: [f64; 3] = [0.0, 0.2, 0.5];
const FIG7_POINTS: usize = 401;
/// `(ratio², detuning)` for the below-critical and critical-detuned panels.
const FIG8: (f64, f64) = (0.8, 0.18);
const FIG9: (f64, f64) = (0.8, 0.2);
const FIG8_GAINS: [f64; 3] = [0.3, 0.3487119154832539, 0.5];
const FIG9_GAINS: [f64; 3] = [0.0, 0.05, 0.2];
const GROWTH_POINTS: usize = 101;
const FIG11_GAINS: [f64; 5] = [0.0, 0.2, 0.95, 1.0, 1.1];
const FIG12_LOSS: f64 = 0.01;

/// One panel: a file name and its table.
type Panel = (String, Table);

/// One panel job; jobs run in parallel.
enum Job {
    Decay { panel: char, ratio: f64 },
    Threshold { detuning: f64 },
    Gains { name: &'static str, preset: (f64, f64), gains: &'static [f64] },
    Growth { name: &'static str, preset: (f64, f64), from: f64 },
    Resonant { prefix: &'static str, panel: char, gain: f64, gamma_loss: f64 },
}

fn panel_letter(k: usize) -> char {
    (b'a' + k as u8) as char
}

fn jobs(fig: Figure) -> Vec<Job> {
    match fig {
        Figure::Fig6 => FIG6_RATIOS
            .iter()
            .enumerate()
            .map(|(k, &ratio)| Job::Decay { panel: panel_letter(k), ratio })
            .collect(),
        Figure::Fig7 => FIG7_DETUNINGS.iter().map(|&detuning| Job::Threshold { detuning }).collect(),
        Figure::Fig8a => vec![Job::Gains { name: "fig8a", preset: FIG8, gains: &FIG8_GAINS }],
        Figure::Fig8b => vec![Job::Growth { name: "fig8b", preset: FIG8, from: 0.0 }],
        Figure::Fig9a => vec![Job::Gains { name: "fig9a", preset: FIG9, gains: &FIG9_GAINS }],
        Figure::Fig9b => vec![Job::Growth { name: "fig9b", preset: FIG9, from: 0.01 }],
        Figure::Fig11 | Figure::Fig12 => {
            let (prefix, gamma_loss) = if fig == Figure::Fig11 { ("fig11", 0.0) } else { ("fig12", FIG12_LOSS * KAPPA) };
            FIG11_GAINS
                .iter()
                .enumerate()
                .map(|(k, &g)| Job::Resonant { prefix, panel: panel_letter(k), gain: g, gamma_loss })
                .collect()
        }
    }
}

fn simulate(params: &CrowParams, gain: f64, t_max: f64, stride: usize, o: &Overrides) -> Result<(TimeSeries, String)> {
    let cfg = o.sim_config(params.kappa, t_max, stride, true, LossPlacement::Global);
    let series = evolve(params, gain, 0.0, &cfg, &LatticeState::initial(cfg.n_sites))?;
    let desc = format!(
        "dt={} sites={} t_max={} stride={} loss_placement=global{}",
        cfg.dt,
        cfg.n_sites,
        cfg.t_max,
        cfg.record_stride,
        o.describe()
    );
    Ok((series, desc))
}

fn normalized(ratio_sq: f64, detuning: f64) -> Result<CrowParams> {
    Ok(CrowParams::normalized(ratio_sq, detuning)?)
}

fn run_job(job: &Job, o: &Overrides) -> Result<Vec<Panel>> {
    match *job {
        Job::Decay { panel, ratio } => {
            let params = CrowParams::new(KAPPA, ratio * KAPPA, 0.0)?;
            let (series, desc) = simulate(&params, 0.0, 20.0 / KAPPA, 1, o)?;
            let mut table = Table::new(
                format!("crowlase {VERSION} fig6{panel} kappa={KAPPA} kappa0={} omega_a=0 gain=0 gamma_loss=0 {desc}", params.kappa0),
                &["2kappa_t", "abs_c_a"],
            );
            for (t, c) in series.normalized_time().iter().zip(&series.c_a) {
                table.push(vec![*t, c.norm()]);
            }
            Ok(vec![(format!("fig6{panel}.csv"), table)])
        }
        Job::Threshold { detuning } => {
            let crit = 1.0 - detuning.abs();
            let grid: Vec<f64> = (0..FIG7_POINTS).map(|k| crit * k as f64 / (FIG7_POINTS - 1) as f64).collect();
            let curve = threshold_sweep(detuning, &grid)?;
            let mut table = Table::new(
                format!("crowlase {VERSION} fig7 detuning={detuning} points={FIG7_POINTS} intrinsic_loss=0"),
                &["ratio_sq", "g_th_over_2kappa"],
            );
            for (x, g) in &curve.points {
                table.push(vec![*x, *g]);
            }
            Ok(vec![(format!("fig7_detuning_{detuning}.csv"), table)])
        }
        Job::Gains { name, preset, gains } => {
            let params = normalized(preset.0, preset.1)?;
            let k2 = 2.0 * params.kappa;
            let runs: Vec<(TimeSeries, String)> = gains
                .par_iter()
                .map(|g| simulate(&params, g * k2, 100.0 / params.kappa, 5, o))
                .collect::<Result<_>>()?;
            let labels: Vec<String> = gains.iter().map(|g| format!("abs_c_a_g{g}")).collect();
            let mut header = vec!["2kappa_t"];
            header.extend(labels.iter().map(String::as_str));
            let mut table = Table::new(
                format!(
                    "crowlase {VERSION} {name} ratio_sq={} detuning={} gains_over_2kappa={gains:?} {}",
                    preset.0, preset.1, runs[0].1
                ),
                &header,
            );
            let tn = runs[0].0.normalized_time();
            let len = runs.iter().map(|r| r.0.len()).min().unwrap_or(0);
            for (k, t) in tn.iter().enumerate().take(len) {
                let mut row = vec![*t];
                row.extend(runs.iter().map(|r| r.0.c_a[k].norm()));
                table.push(row);
            }
            Ok(vec![(format!("{name}.csv"), table)])
        }
        Job::Growth { name, preset, from } => {
            let params = normalized(preset.0, preset.1)?;
            let k2 = 2.0 * params.kappa;
            let gains: Vec<f64> = (0..GROWTH_POINTS)
                .map(|k| k2 * (from + (1.0 - from) * k as f64 / (GROWTH_POINTS - 1) as f64))
                .collect();
            let curve = growth_rate_curve(&params, 0.0, &gains)?;
            let mut table = Table::new(
                format!(
                    "crowlase {VERSION} {name} ratio_sq={} detuning={} gain_over_2kappa=[{from},1] points={GROWTH_POINTS} untracked={}",
                    preset.0,
                    preset.1,
                    curve.missing.len()
                ),
                &["g_over_2kappa", "sigma_over_2kappa", "frequency_over_2kappa"],
            );
            for (g, pole) in &curve.points {
                table.push(vec![g / k2, pole.s_p.re / k2, -pole.s_p.im / k2]);
            }
            Ok(vec![(format!("{name}.csv"), table)])
        }
        Job::Resonant { prefix, panel, gain, gamma_loss } => {
            let params = CrowParams::new(KAPPA, KAPPA, 0.0)?.with_loss(gamma_loss)?;
            let k2 = 2.0 * KAPPA;
            let (t_max, stride) = if gamma_loss > 0.0 { (400.0 / KAPPA, 5) } else { (30.0 / KAPPA, 1) };
            let (series, desc) = simulate(&params, gain * k2, t_max, stride, o)?;
            let mut table = Table::new(
                format!(
                    "crowlase {VERSION} {prefix}{panel} kappa={KAPPA} kappa0={KAPPA} omega_a=0 gain_over_2kappa={gain} gamma_loss={gamma_loss} {desc}"
                ),
                &["2kappa_t", "abs_c_a", "re_c_a", "im_c_a", "abs_dominant_term"],
            );
            for ((&t, tn), c) in series.t.iter().zip(series.normalized_time()).zip(&series.c_a) {
                let term = resonant_critical_solution(KAPPA, gain * k2, t)?.value * (-gamma_loss * t).exp();
                table.push(vec![tn, c.norm(), c.re, c.im, term.abs()]);
            }
            Ok(vec![(format!("{prefix}{panel}.csv"), table)])
        }
    }
}

/// Computes every panel of `fig` and writes them under `out`. Returns the
/// written file names.
pub fn run_figure(fig: Figure, out: &Path, o: &Overrides) -> Result<Vec<String>> {
    let panels: Vec<Vec<Panel>> = jobs(fig).par_iter().map(|j| run_job(j, o)).collect::<Result<_>>()?;
    let mut names = Vec::new();
    for (name, table) in panels.into_iter().flatten() {
        table.write(&out.join(&name))?;
        names.push(name);
    }
    Ok(names)
}
