//! Acceptance criteria. Each test prints one PASS/FAIL line with the
//! measured quantity and the pinned tolerance, then asserts.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use crowlase_core::crow::{crow_self_energy_at_cut, crow_spectrum, no_bound_mode_region};
use crowlase_core::lasing::{growth_rate_curve, threshold_crow, threshold_generic, threshold_sweep, Regime};
use crowlase_core::lattice_sim::evolve;
use crowlase_core::numerics::bessel_j;
use crowlase_core::reservoir::{bound_modes, self_energy_at_cut, ShapeFn};
use crowlase_core::spectral::{classify_tail, envelope_peaks, exponential_rate, DecayIntegrator, TailRegime};
use crowlase_core::{Complex64, CrowParams, LatticeState, ReservoirSpectrum, Side, SimConfig, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, label: &str, ok: bool, detail: String) {
    println!("{} criterion {id:2} ({label}): {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn simulate(params: &CrowParams, g: f64, cfg: &SimConfig) -> TimeSeries {
    evolve(params, g, 0.0, cfg, &LatticeState::initial(cfg.n_sites)).unwrap()
}

fn semicircle_by_quadrature(ratio: f64) -> ReservoirSpectrum {
    ReservoirSpectrum::new(
        -2.0,
        2.0,
        (0.5, 0.5),
        ratio,
        Arc::new(ShapeFn(|w: f64| 2.0 / PI * (1.0 - w * w / 4.0).max(0.0).sqrt())),
    )
    .unwrap()
}

fn max_dev(s: &TimeSeries, oracle: impl Fn(f64) -> f64) -> f64 {
    s.t.iter()
        .zip(&s.c_a)
        .map(|(t, c)| (c - Complex64::new(oracle(*t), 0.0)).norm())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_bessel_j0() {
    let p = CrowParams::new(1.0, 1.0, 0.0).unwrap();
    let cfg = SimConfig::new(1.0, 20.0).with_sites(200).with_dt(0.02);
    let err = max_dev(&simulate(&p, 0.0, &cfg), |t| bessel_j(0, 2.0 * t));
    verdict(1, "lattice vs J0(2kt), 2kt in [0,40]", err < 1e-3, format!("max error {err:.3e} < 1e-3"));
}

#[test]
fn criterion_02_bessel_j1_over_t() {
    let p = CrowParams::new(1.0, 0.5f64.sqrt(), 0.0).unwrap();
    let cfg = SimConfig::new(1.0, 20.0).with_sites(200).with_dt(0.02);
    let oracle = |t: f64| if t == 0.0 { 1.0 } else { bessel_j(1, 2.0 * t) / t };
    let err = max_dev(&simulate(&p, 0.0, &cfg), oracle);
    verdict(2, "lattice vs J1(2kt)/(kt), 2kt in [0,40]", err < 1e-3, format!("max error {err:.3e} < 1e-3"));
}

#[test]
fn criterion_03_route_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a: f64 = rng.gen_range(-0.9..0.9);
        let x = (1.0 - a.abs()) * rng.gen_range(0.05..0.98);
        let p = CrowParams::normalized(x, a).unwrap();
        assert!(no_bound_mode_region(&p));
        let cfg = SimConfig::new(1.0, 20.0).with_stride(4);
        let s = simulate(&p, 0.0, &cfg);
        let spec = crow_spectrum(&p);
        let d = DecayIntegrator::new(&spec, p.omega_a).unwrap();
        for (t, c) in s.t.iter().zip(&s.c_a) {
            worst = worst.max((d.at(*t).unwrap() - c).norm());
        }
    }
    verdict(3, "spectral vs lattice, 10 random sets", worst < 2e-3, format!("max deviation {worst:.3e} < 2e-3"));
}

#[test]
fn criterion_04_conservation() {
    let mut worst: f64 = 0.0;
    for (k0, wa) in [(1.0, 0.0), (0.8, 0.6), (1.3, -1.5)] {
        let p = CrowParams::new(1.0, k0, wa).unwrap();
        // RK4 loses (|H| dt)^6/72 of the norm per step.
        let cfg = SimConfig::new(1.0, 45.0).with_sites(100).with_dt(0.005);
        assert!(cfg.t_max <= cfg.horizon(1.0));
        let s = simulate(&p, 0.0, &cfg);
        worst = worst.max(s.total_power.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max));
    }
    verdict(4, "|P(t) - 1| over the validity horizon", worst < 1e-8, format!("max drift {worst:.3e} < 1e-8"));
}

#[test]
fn criterion_05_markov_limit() {
    let p = CrowParams::new(1.0, 0.1, 0.0).unwrap();
    let cfg = SimConfig::new(1.0, 250.0).with_stride(10);
    let s = simulate(&p, 0.0, &cfg);
    let rate = -exponential_rate(&s.t, &s.abs_c_a(), (50.0, 250.0)).unwrap();
    let markov = 2.0 * 0.01;
    let rel = (rate / markov - 1.0).abs();
    verdict(5, "fitted decay rate vs 2k0^2/k", rel < 0.05, format!("rate {rate:.5} vs {markov}, rel. dev {rel:.3} < 0.05"));
}

#[test]
fn criterion_06_threshold() {
    let p = CrowParams::normalized(0.8, 0.18).unwrap();
    let closed = threshold_crow(&p, 0.0).unwrap();
    let norm = closed.g_th / 2.0;
    let want = 0.8 * (1.0f64 - 0.81).sqrt();
    let fixed = threshold_generic(&crow_spectrum(&p), p.omega_a, 0.0).unwrap();
    let quad = threshold_generic(&semicircle_by_quadrature(p.ratio()), p.omega_a, 0.0).unwrap();
    let solver_gap = (fixed.g_th - closed.g_th).abs().max((quad.g_th - closed.g_th).abs());
    let rate = |f: f64| {
        let cfg = SimConfig::new(1.0, 500.0).with_stride(25);
        let s = simulate(&p, f * closed.g_th, &cfg);
        exponential_rate(&s.t, &s.abs_c_a(), (250.0, 500.0)).unwrap()
    };
    let (below, above) = (rate(0.95), rate(1.05));
    let ok = (norm - want).abs() < 1e-12
        && (norm - 0.34871).abs() < 1e-5
        && (closed.omega_osc / 2.0 - 0.9).abs() < 1e-12
        && solver_gap < 1e-8
        && below < 0.0
        && above > 0.0;
    verdict(
        6,
        "threshold closed form, fixed point, time domain",
        ok,
        format!(
            "g_th/2k = {norm:.6} (0.34871), fixed-point gap {solver_gap:.1e} < 1e-8, rates {below:.2e} at 0.95 g_th / {above:.2e} at 1.05 g_th"
        ),
    );
}

#[test]
fn criterion_07_threshold_curve() {
    let grid: Vec<f64> = (0..=400).map(|k| 0.8 * k as f64 / 400.0).collect();
    let c = threshold_sweep(0.2, &grid).unwrap();
    let start = c.points[0].1;
    let end = c.points.last().unwrap().1;
    let (x_max, g_max) = c.max_point;
    let interior = x_max > 0.0 && x_max < 0.8 && g_max > start.max(end);
    let rises = c.points.windows(2).take_while(|w| w[0].0 < x_max).all(|w| w[1].1 > w[0].1);
    let falls = c.points.windows(2).skip_while(|w| w[1].0 <= x_max).all(|w| w[1].1 < w[0].1);
    let flat_grid: Vec<f64> = (0..=400).map(|k| k as f64 / 400.0).collect();
    let flat = threshold_sweep(0.0, &flat_grid).unwrap();
    let flat_err = flat.points.iter().map(|(x, g)| (g - x).abs()).fold(0.0, f64::max);
    let ok = start.abs() < 1e-6 && end.abs() < 1e-6 && interior && rises && falls && flat_err < 1e-10;
    verdict(
        7,
        "threshold curve shape",
        ok,
        format!("a=0.2: ends {start:.1e}/{end:.1e} < 1e-6, interior max {g_max:.4} at {x_max:.3}; a=0: max |g-x| {flat_err:.1e} < 1e-10"),
    );
}

#[test]
fn criterion_08_critical_detuned() {
    let p = CrowParams::normalized(0.8, 0.2).unwrap();
    let gains: Vec<f64> = (2..=50).map(|k| 2.0 * 0.01 * k as f64).collect();
    let curve = growth_rate_curve(&p, 0.0, &gains).unwrap();
    let min = curve.points.iter().map(|(_, pole)| pole.s_p.re).fold(f64::INFINITY, f64::min);
    let ok = curve.regime == Regime::CriticalDetuned && curve.missing.is_empty() && curve.points.len() == gains.len() && min > 0.0;
    verdict(
        8,
        "sigma(g) > 0 for g/2k in [0.02, 0.5]",
        ok,
        format!("{} gains, min sigma {min:.3e} > 0, untracked {}", curve.points.len(), curve.missing.len()),
    );
}

#[test]
fn criterion_09_neutral_interval() {
    let p = CrowParams::new(1.0, 1.0, 0.0).unwrap();
    // g/2k = 0.2: late-time oscillation.
    let s = simulate(&p, 0.4, &SimConfig::new(1.0, 300.0));
    let (pt, py) = envelope_peaks(&s.normalized_time(), &s.abs_c_a(), 400.0, 600.0);
    let amp = py.iter().sum::<f64>() / py.len() as f64;
    // Peaks of |c_a| are half a period apart; convert 2kt spacing to t.
    let spacing = (pt.last().unwrap() - pt[0]) / (pt.len() - 1) as f64 / 2.0;
    let freq = PI / spacing;
    let amp_dev = (amp / 0.4082 - 1.0).abs();
    let freq_dev = (freq / 1.9596 - 1.0).abs();
    // g/2k = 1: secular growth.
    let s = simulate(&p, 2.0, &SimConfig::new(1.0, 30.0));
    let secular = s
        .t
        .iter()
        .zip(&s.c_a)
        .filter(|(t, _)| **t >= 15.0)
        .map(|(t, c)| (c.norm() / (4.0 * t) - 1.0).abs())
        .fold(0.0, f64::max);
    // g/2k = 1.1: exponential growth.
    let s = simulate(&p, 2.2, &SimConfig::new(1.0, 30.0));
    let rate = exponential_rate(&s.t, &s.abs_c_a(), (10.0, 30.0)).unwrap();
    let rate_dev = (rate / 0.9165 - 1.0).abs();
    let ok = amp_dev < 0.02 && freq_dev < 0.01 && secular < 0.02 && rate_dev < 0.01;
    verdict(
        9,
        "resonant critical neutral interval",
        ok,
        format!(
            "amplitude {amp:.4} (dev {amp_dev:.3} < 0.02), frequency {freq:.4} (dev {freq_dev:.4} < 0.01), |c/4kt - 1| {secular:.4} < 0.02, rate {rate:.4} (dev {rate_dev:.4} < 0.01)"
        ),
    );
}

#[test]
fn criterion_10_tails() {
    let fit = |k0: f64| {
        let p = CrowParams::new(1.0, k0, 0.0).unwrap();
        let s = simulate(&p, 0.0, &SimConfig::new(1.0, 100.0));
        classify_tail(&s.normalized_time(), &s.abs_c_a(), (20.0, 200.0)).unwrap()
    };
    let crit = fit(1.0);
    let below = fit(0.5f64.sqrt());
    let ok = (crit.exponent + 0.5).abs() < 0.1
        && (below.exponent + 1.5).abs() < 0.1
        && crit.regime == TailRegime::Critical
        && below.regime == TailRegime::BelowCritical;
    verdict(
        10,
        "asymptotic tail exponents",
        ok,
        format!("critical {:.3} (-0.5 +- 0.1), below {:.3} (-1.5 +- 0.1)", crit.exponent, below.exponent),
    );
}

#[test]
fn criterion_11_transient_amplification() {
    let p = CrowParams::new(1.0, 1.0, 0.0).unwrap().with_loss(0.01).unwrap();
    let s = simulate(&p, 2.0, &SimConfig::new(1.0, 400.0).with_stride(5));
    let y = s.abs_c_a();
    let (k, peak) = y.iter().enumerate().fold((0, 0.0), |acc, (k, v)| if *v > acc.1 { (k, *v) } else { acc });
    let want = 4.0 / (0.01 * E);
    let dev = (peak / want - 1.0).abs();
    let last = *y.last().unwrap();
    let decays = k + 1 < y.len() && last < 0.5 * peak;
    verdict(
        11,
        "transient peak of |c_a| with CROW loss",
        dev < 0.1 && decays,
        format!("peak {peak:.2} at t = {:.1} vs {want:.2} (dev {dev:.3} < 0.1), final {last:.2}", s.t[k]),
    );
}

#[test]
fn criterion_12_cut_discontinuity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let r = 0.9;
    let p = CrowParams::new(1.0, r, 0.0).unwrap();
    let quad = semicircle_by_quadrature(r);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let w = rng.gen_range(-2.0..2.0);
        let want = Complex64::new(0.0, -2.0 * PI * quad.density(w));
        let closed = crow_self_energy_at_cut(&p, w, Side::Right).unwrap() - crow_self_energy_at_cut(&p, w, Side::Left).unwrap();
        let numeric = self_energy_at_cut(&quad, w, Side::Right).unwrap() - self_energy_at_cut(&quad, w, Side::Left).unwrap();
        worst = worst.max((closed - want).norm()).max((numeric - want).norm());
    }
    verdict(12, "cut discontinuity, closed form and quadrature", worst < 1e-8, format!("max error {worst:.3e} < 1e-8"));
}

#[test]
fn criterion_13_bound_mode_boundary() {
    let mut mismatches = 0;
    for i in 0..20 {
        for j in 0..20 {
            let a = -1.2 + 2.4 * i as f64 / 19.0;
            let r = 1.3 * j as f64 / 19.0;
            let p = CrowParams::new(1.0, r, 2.0 * a).unwrap();
            let empty = bound_modes(&crow_spectrum(&p), p.omega_a).unwrap().is_empty();
            let region = (r * r - 1.0) <= a && a <= 1.0 - r * r;
            if empty != region {
                mismatches += 1;
            }
        }
    }
    verdict(13, "bound-mode phase boundary on 20x20 grid", mismatches == 0, format!("{mismatches} mismatches of 400"));
}
