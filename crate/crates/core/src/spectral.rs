//! Laplace-domain route to the cavity amplitude.
//!
//! With `ĉ(s) = i / F(s)` and `F(s) = is - ω_a - ig' - Σ(s)`, the passive
//! decay is the real-axis spectral integral
//! `c(t) = ∫ D(ω) e^{-iωt} / {[ω - ω_a - Δ(ω)]² + π²D(ω)²} dω`, and the
//! resonance is the zero of `F` on the sheet reached through the cut.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::numerics::fit::{fit_power_law, linear_fit, FitError};
use crate::numerics::quadrature::QuadratureError;
use crate::numerics::roots::{derivative, find_root_with, RootError, RootOptions};
use crate::reservoir::{bound_modes, continued_self_energy, ReservoirError, ReservoirSpectrum, Sheet};

/// Tolerance of the spectral integral.
pub const DECAY_TOL: f64 = 1e-10;
/// Largest continuation step in `g'`, as a fraction of the band half-width.
pub const MAX_TRACK_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("bound modes at {modes:?}: the decay is incomplete and the spectral integral does not apply")]
    BoundModes { modes: Vec<f64> },
    #[error("no admissible resonance pole found for g' = {g_prime}")]
    NoPole { g_prime: f64 },
    #[error("pole continuation stalled at g' = {g_prime} (last pole {last})")]
    TrackFailed { g_prime: f64, last: Complex64 },
    #[error("the spectrum has no analytic continuation; resonance poles are unavailable")]
    NoContinuation,
    #[error("tail fit needs at least 10 samples in the window, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Reservoir(#[from] ReservoirError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Resonance pole `s_p = -γ_p - i(ω_a + Δ_p)` and its residue in `ĉ(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPole {
    pub s_p: Complex64,
    pub sheet: Sheet,
    pub gamma_p: f64,
    pub delta_p: f64,
    pub residue: Complex64,
    /// `|F(s_p)|` at the returned point.
    pub residual: f64,
}

impl ComplexPole {
    /// `Re s_p`, the growth rate.
    pub fn growth_rate(&self) -> f64 {
        self.s_p.re
    }

    /// `Z e^{s_p t}`.
    pub fn term(&self, t: f64) -> Complex64 {
        self.residue * (self.s_p * t).exp()
    }
}

/// `F(s) = is - ω_a - ig' - Σ(s)` with the self-energy continued through
/// the cut.
pub fn pole_function(spec: &ReservoirSpectrum, omega_a: f64, g_prime: f64, s: Complex64) -> Result<Complex64, ReservoirError> {
    let sigma = continued_self_energy(spec, s)?;
    Ok(Complex64::i() * s - omega_a - Complex64::new(0.0, g_prime) - sigma)
}

fn admissible(spec: &ReservoirSpectrum, s: Complex64) -> bool {
    s.re.is_finite() && s.im.is_finite() && (s.re >= 0.0 || spec.in_band(-s.im))
}

fn can_continue(spec: &ReservoirSpectrum) -> bool {
    spec.shape().continued_self_energy(Complex64::new(1.0, 0.0)).is_some() || spec.has_continuation()
}

fn newton(spec: &ReservoirSpectrum, omega_a: f64, g_prime: f64, seed: Complex64) -> Result<Complex64, SpectralError> {
    let scale = spec.half_width();
    let mut opts = RootOptions::new(1e-12 * scale);
    opts.scale = scale;
    opts.max_iterations = 60;
    let mut failure = None;
    let f = |s: Complex64| match pole_function(spec, omega_a, g_prime, s) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let root = find_root_with(f, seed, &opts);
    if let Some(e) = failure {
        if root.is_err() {
            return Err(e.into());
        }
    }
    Ok(root?)
}

fn finish(spec: &ReservoirSpectrum, omega_a: f64, g_prime: f64, s: Complex64) -> Result<ComplexPole, SpectralError> {
    let h = 1e-6 * spec.half_width();
    let mut err = None;
    let mut f = |z: Complex64| match pole_function(spec, omega_a, g_prime, z) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let residual = f(s).norm();
    let slope = derivative(&mut f, s, h);
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(ComplexPole {
        s_p: s,
        sheet: if s.re >= 0.0 { Sheet::First } else { Sheet::Second },
        gamma_p: -s.re,
        delta_p: -s.im - omega_a,
        residue: Complex64::i() / slope,
        residual,
    })
}

/// Weisskopf-Wigner estimate `g' - γ_R - i(ω_a + Δ_R)` of the pole.
pub fn markov_seed(spec: &ReservoirSpectrum, omega_a: f64, g_prime: f64) -> Result<Complex64, ReservoirError> {
    let gamma_r = PI * spec.density(omega_a);
    let delta_r = spec.delta(omega_a)?;
    Ok(Complex64::new(g_prime - gamma_r, -(omega_a + delta_r)))
}

/// Resonance pole of `ĉ(s)` for net gain `g'`. Tries `seed` (or the
/// Markovian estimate) first, then a grid of seeds over the cut region,
/// keeping the admissible root with the largest real part.
pub fn resonance_pole(
    spec: &ReservoirSpectrum,
    omega_a: f64,
    g_prime: f64,
    seed: Option<Complex64>,
) -> Result<ComplexPole, SpectralError> {
    if !can_continue(spec) {
        return Err(SpectralError::NoContinuation);
    }
    let first = match seed {
        Some(s) => s,
        None => markov_seed(spec, omega_a, g_prime)?,
    };
    if let Ok(s) = newton(spec, omega_a, g_prime, first) {
        if admissible(spec, s) {
            return finish(spec, omega_a, g_prime, s);
        }
    }

    let hw = spec.half_width();
    let n = 16;
    let re_lo = -hw;
    let re_hi = g_prime.max(0.0) + 0.5 * hw;
    let im_lo = -spec.omega2();
    let im_hi = -spec.omega1();
    let mut seeds: Vec<(f64, Complex64)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let s = Complex64::new(
                re_lo + (re_hi - re_lo) * (i as f64 + 0.5) / n as f64,
                im_lo + (im_hi - im_lo) * (j as f64 + 0.5) / n as f64,
            );
            if let Ok(v) = pole_function(spec, omega_a, g_prime, s) {
                if v.norm().is_finite() {
                    seeds.push((v.norm(), s));
                }
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<Complex64> = None;
    for &(_, s0) in seeds.iter().take(12) {
        if let Ok(s) = newton(spec, omega_a, g_prime, s0) {
            if admissible(spec, s) && best.is_none_or(|b| s.re > b.re) {
                best = Some(s);
            }
        }
    }
    match best {
        Some(s) => finish(spec, omega_a, g_prime, s),
        None => Err(SpectralError::NoPole { g_prime }),
    }
}

/// Follows a pole from `(g_start, s_start)` through the requested `g'`
/// values in order, with steps of at most [`MAX_TRACK_STEP`] times the
/// band half-width, halving the step whenever Newton fails or the root
/// leaves the admissible region.
pub fn track_pole(
    spec: &ReservoirSpectrum,
    omega_a: f64,
    g_start: f64,
    s_start: Complex64,
    targets: &[f64],
) -> Result<Vec<ComplexPole>, SpectralError> {
    if !can_continue(spec) {
        return Err(SpectralError::NoContinuation);
    }
    let hw = spec.half_width();
    let max_step = MAX_TRACK_STEP * hw;
    let mut g = g_start;
    let mut s = newton(spec, omega_a, g, s_start)?;
    let mut slope = Complex64::default();
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        while g != target {
            let mut step = (target - g).clamp(-max_step, max_step);
            loop {
                let g_next = if (target - g).abs() <= step.abs() { target } else { g + step };
                let predicted = s + slope * (g_next - g);
                let attempt = newton(spec, omega_a, g_next, predicted)
                    .ok()
                    .filter(|z| admissible(spec, *z) && (z - s).norm() <= 0.5 * hw);
                if let Some(z) = attempt {
                    slope = (z - s) / (g_next - g);
                    s = z;
                    g = g_next;
                    break;
                }
                step *= 0.5;
                if step.abs() < 1e-9 * hw {
                    return Err(SpectralError::TrackFailed { g_prime: g, last: s });
                }
            }
        }
        out.push(finish(spec, omega_a, g, s)?);
    }
    Ok(out)
}

/// Spectral-integral evaluator for a passive cavity without bound modes.
#[derive(Debug, Clone)]
pub struct DecayIntegrator<'a> {
    spec: &'a ReservoirSpectrum,
    omega_a: f64,
}

impl<'a> DecayIntegrator<'a> {
    pub fn new(spec: &'a ReservoirSpectrum, omega_a: f64) -> Result<Self, SpectralError> {
        let modes = bound_modes(spec, omega_a)?;
        if !modes.is_empty() {
            return Err(SpectralError::BoundModes { modes });
        }
        Ok(Self { spec, omega_a })
    }

    /// `c(t)`, integrated in the band variable `Q` with `ω = c - h cos Q`.
    pub fn at(&self, t: f64) -> Result<Complex64, SpectralError> {
        let spec = self.spec;
        let mut err = None;
        let r = spec.band_integral(
            |w| {
                let d = spec.density(w);
                if d == 0.0 {
                    return Complex64::default();
                }
                let delta = match spec.delta(w) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        return Complex64::new(f64::NAN, 0.0);
                    }
                };
                let detune = w - self.omega_a - delta;
                let weight = d / (detune * detune + PI * PI * d * d);
                Complex64::from_polar(weight, -w * t)
            },
            0.0,
            PI,
            DECAY_TOL,
        );
        if let Some(e) = err {
            return Err(e.into());
        }
        Ok(r?.value)
    }
}

/// Passive decay `c(t)` from the spectral integral.
pub fn decay_integral(spec: &ReservoirSpectrum, omega_a: f64, t: f64) -> Result<Complex64, SpectralError> {
    DecayIntegrator::new(spec, omega_a)?.at(t)
}

/// Splits the passive decay into the resonance-pole term and the
/// remainder carried by the branch cut.
#[derive(Debug, Clone)]
pub struct PoleCutDecomposition<'a> {
    integrator: DecayIntegrator<'a>,
    pub pole: ComplexPole,
}

impl<'a> PoleCutDecomposition<'a> {
    pub fn new(spec: &'a ReservoirSpectrum, omega_a: f64) -> Result<Self, SpectralError> {
        let integrator = DecayIntegrator::new(spec, omega_a)?;
        let pole = resonance_pole(spec, omega_a, 0.0, None)?;
        Ok(Self { integrator, pole })
    }

    /// `(pole_term, cut_term)` at time `t`.
    pub fn at(&self, t: f64) -> Result<(Complex64, Complex64), SpectralError> {
        let total = self.integrator.at(t)?;
        let pole = self.pole.term(t);
        Ok((pole, total - pole))
    }
}

pub fn pole_plus_cut(spec: &ReservoirSpectrum, omega_a: f64, t: f64) -> Result<(Complex64, Complex64), SpectralError> {
    PoleCutDecomposition::new(spec, omega_a)?.at(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailRegime {
    /// `|c| ~ t^{-1/2}`.
    Critical,
    /// `|c| ~ t^{-3/2}`.
    BelowCritical,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub exponent: f64,
    pub regime: TailRegime,
    /// Number of envelope maxima used; zero when the fit fell back to all samples.
    pub peaks: usize,
}

/// Local maxima of `y` inside `[lo, hi]`, refined by a parabola through
/// the three neighbouring samples.
pub fn envelope_peaks(t: &[f64], y: &[f64], lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let mut pt = Vec::new();
    let mut py = Vec::new();
    for k in 1..t.len().saturating_sub(1) {
        if t[k] < lo || t[k] > hi {
            continue;
        }
        let (a, b, c) = (y[k - 1], y[k], y[k + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let h = t[k + 1] - t[k];
            let (shift, peak) = if denom < 0.0 {
                let x = 0.5 * (a - c) / denom;
                (x * h, b - 0.25 * (a - c) * x)
            } else {
                (0.0, b)
            };
            pt.push(t[k] + shift);
            py.push(peak);
        }
    }
    (pt, py)
}

/// Power-law exponent of the envelope of `|c|` over `window` and the tail
/// regime it indicates: `-1/2 ± 1/4` critical, `-3/2 ± 1/4` below critical.
pub fn classify_tail(t: &[f64], values: &[f64], window: (f64, f64)) -> Result<TailFit, SpectralError> {
    let (lo, hi) = window;
    let (pt, py) = envelope_peaks(t, values, lo, hi);
    let (exponent, peaks) = if pt.len() >= 10 {
        (fit_power_law(&pt, &py)?, pt.len())
    } else {
        let (wt, wy): (Vec<f64>, Vec<f64>) = t
            .iter()
            .zip(values)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(x, v)| (*x, *v))
            .unzip();
        if wt.len() < 10 {
            return Err(SpectralError::TooFewSamples(wt.len()));
        }
        (fit_power_law(&wt, &wy)?, 0)
    };
    let regime = if (exponent + 0.5).abs() <= 0.25 {
        TailRegime::Critical
    } else if (exponent + 1.5).abs() <= 0.25 {
        TailRegime::BelowCritical
    } else {
        TailRegime::Unclassified
    };
    Ok(TailFit { exponent, regime, peaks })
}

/// Exponential rate `σ` of `|c| ~ e^{σt}` from a straight-line fit of
/// `ln |c|` over the samples inside `window`.
pub fn exponential_rate(t: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64, SpectralError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (x, v) in t.iter().zip(values) {
        if *x >= window.0 && *x <= window.1 {
            if !(*v > 0.0) {
                return Err(FitError::BadSample { index: xs.len() }.into());
            }
            xs.push(*x);
            ys.push(v.ln());
        }
    }
    if xs.len() < 10 {
        return Err(SpectralError::TooFewSamples(xs.len()));
    }
    Ok(linear_fit(&xs, &ys)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crow::{crow_spectrum, CrowParams};
    use crate::numerics::bessel_j;

    #[test]
    fn completeness_at_t_zero() {
        let p = CrowParams::new(1.0, 0.6, 0.3).unwrap();
        let spec = crow_spectrum(&p);
        let c0 = decay_integral(&spec, p.omega_a, 0.0).unwrap();
        assert!((c0 - 1.0).norm() < 1e-6);
    }

    #[test]
    fn critical_resonant_is_j0() {
        let p = CrowParams::new(1.0, 1.0, 0.0).unwrap();
        let spec = crow_spectrum(&p);
        let c = decay_integral(&spec, 0.0, 3.75).unwrap();
        assert!((c.re - bessel_j(0, 7.5)).abs() < 1e-6 && c.im.abs() < 1e-6);
    }

    #[test]
    fn bound_modes_are_rejected() {
        let p = CrowParams::new(1.0, 1.2, 0.0).unwrap();
        let spec = crow_spectrum(&p);
        assert!(matches!(decay_integral(&spec, 0.0, 1.0), Err(SpectralError::BoundModes { .. })));
    }

    #[test]
    fn weak_coupling_pole_near_markov() {
        let p = CrowParams::new(1.0, 0.2, 0.0).unwrap();
        let spec = crow_spectrum(&p);
        let pole = resonance_pole(&spec, 0.0, 0.0, None).unwrap();
        assert!((pole.gamma_p / 0.08 - 1.0).abs() < 0.1);
        assert!(pole.delta_p.abs() < 0.008);
        assert!(pole.residual < 1e-9 * 2.0);
        assert!((pole.residue - 1.0).norm() < 0.1);
    }

    #[test]
    fn exponential_input_is_unclassified() {
        let t: Vec<f64> = (0..400).map(|k| 1.0 + k as f64 * 0.05).collect();
        let y: Vec<f64> = t.iter().map(|x| (-x).exp()).collect();
        let fit = classify_tail(&t, &y, (1.0, 20.0)).unwrap();
        assert_eq!(fit.regime, TailRegime::Unclassified);
    }

    #[test]
    fn rate_of_pure_exponential() {
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|x| 2.0 * (0.3 * x).exp()).collect();
        assert!((exponential_rate(&t, &y, (0.0, 10.0)).unwrap() - 0.3).abs() < 1e-12);
    }
}
