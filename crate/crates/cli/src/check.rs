//! Short invariant checks, one PASS/FAIL line each.

use rayon::prelude::*;

use crowlase_core::crow::{crow_self_energy_at_cut, crow_spectrum};
use crowlase_core::lasing::{threshold_crow, threshold_generic, threshold_sweep};
use crowlase_core::lattice_sim::evolve;
use crowlase_core::numerics::bessel_j;
use crowlase_core::reservoir::bound_modes;
use crowlase_core::spectral::DecayIntegrator;
use crowlase_core::{Complex64, CrowParams, LatticeState, Side, SimConfig, TimeSeries};

use crate::error::Result;

pub struct CheckLine {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn render(&self) -> String {
        format!("{} {}: {}", if self.ok { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

type Check = fn() -> Result<CheckLine>;

const CHECKS: [Check; 7] = [
    bessel_oracle,
    conservation,
    route_agreement,
    threshold_fixed_point,
    threshold_curve_resonant,
    cut_discontinuity,
    bound_mode_boundary,
];

fn sim(params: &CrowParams, cfg: &SimConfig) -> Result<TimeSeries> {
    Ok(evolve(params, 0.0, 0.0, cfg, &LatticeState::initial(cfg.n_sites))?)
}

fn bessel_oracle() -> Result<CheckLine> {
    let p = CrowParams::new(1.0, 1.0, 0.0)?;
    let s = sim(&p, &SimConfig::new(1.0, 20.0))?;
    let dev = s.t.iter().zip(&s.c_a).map(|(t, c)| (c - bessel_j(0, 2.0 * t)).norm()).fold(0.0, f64::max);
    Ok(CheckLine {
        name: "lattice decay at critical coupling follows J0(2 kappa t)",
        ok: dev < 1e-3,
        detail: format!("max error {dev:.3e} < 1e-3"),
    })
}

fn conservation() -> Result<CheckLine> {
    let p = CrowParams::new(1.0, 0.6, 0.3)?;
    let s = sim(&p, &SimConfig::new(1.0, 20.0).with_dt(0.005))?;
    let drift = s.total_power.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
    Ok(CheckLine {
        name: "total power conserved without gain or loss",
        ok: drift < 1e-8,
        detail: format!("max |P - 1| {drift:.3e} < 1e-8"),
    })
}

fn route_agreement() -> Result<CheckLine> {
    let p = CrowParams::new(1.0, 0.5, 0.4)?;
    let s = sim(&p, &SimConfig::new(1.0, 20.0).with_stride(10))?;
    let spec = crow_spectrum(&p);
    let integ = DecayIntegrator::new(&spec, p.omega_a)?;
    let spectral: Vec<Complex64> = s.t.par_iter().map(|&t| integ.at(t)).collect::<std::result::Result<_, _>>()?;
    let dev = spectral.iter().zip(&s.c_a).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(CheckLine {
        name: "spectral and lattice routes agree",
        ok: dev < 2e-3,
        detail: format!("max deviation {dev:.3e} < 2e-3"),
    })
}

fn threshold_fixed_point() -> Result<CheckLine> {
    let p = CrowParams::normalized(0.8, 0.18)?;
    let closed = threshold_crow(&p, 0.0)?;
    let fixed = threshold_generic(&crow_spectrum(&p), p.omega_a, 0.0)?;
    let gap = (fixed.g_th - closed.g_th).abs();
    let norm = closed.g_th / 2.0;
    Ok(CheckLine {
        name: "threshold closed form matches the fixed-point solver",
        ok: gap < 1e-8 && (norm - 0.34871).abs() < 1e-5,
        detail: format!("g_th/2kappa {norm:.6}, solver gap {gap:.3e} < 1e-8"),
    })
}

fn threshold_curve_resonant() -> Result<CheckLine> {
    let grid: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
    let curve = threshold_sweep(0.0, &grid)?;
    let dev = curve.points.iter().map(|(x, g)| (g - x).abs()).fold(0.0, f64::max);
    Ok(CheckLine {
        name: "resonant threshold curve equals the coupling ratio squared",
        ok: dev < 1e-10,
        detail: format!("max deviation {dev:.3e} < 1e-10"),
    })
}

fn cut_discontinuity() -> Result<CheckLine> {
    let p = CrowParams::new(1.0, 0.9, 0.0)?;
    let spec = crow_spectrum(&p);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let w = -1.98 + 3.96 * k as f64 / 49.0;
        let jump = crow_self_energy_at_cut(&p, w, Side::Right)? - crow_self_energy_at_cut(&p, w, Side::Left)?;
        let want = Complex64::new(0.0, -2.0 * std::f64::consts::PI * spec.density(w));
        worst = worst.max((jump - want).norm());
    }
    Ok(CheckLine {
        name: "self-energy jump across the cut equals -2 pi i D",
        ok: worst < 1e-8,
        detail: format!("max error {worst:.3e} < 1e-8"),
    })
}

fn bound_mode_boundary() -> Result<CheckLine> {
    let mut mismatches = 0;
    for i in 0..20 {
        for j in 0..20 {
            let a = -1.2 + 2.4 * i as f64 / 19.0;
            let r = 1.3 * j as f64 / 19.0;
            let p = CrowParams::new(1.0, r, 2.0 * a)?;
            let empty = bound_modes(&crow_spectrum(&p), p.omega_a)?.is_empty();
            if empty != ((r * r - 1.0) <= a && a <= 1.0 - r * r) {
                mismatches += 1;
            }
        }
    }
    Ok(CheckLine {
        name: "bound modes appear exactly outside the no-bound-mode region",
        ok: mismatches == 0,
        detail: format!("{mismatches} mismatches on a 20x20 grid"),
    })
}

/// Runs every check. A check that errors counts as a failure.
pub fn run_checks() -> Vec<CheckLine> {
    CHECKS
        .par_iter()
        .map(|c| {
            c().unwrap_or_else(|e| CheckLine {
                name: "check aborted",
                ok: false,
                detail: e.to_string(),
            })
        })
        .collect()
}
