//! Lasing threshold and instability of the gain-loaded microcavity.
//!
//! Below critical coupling the threshold is where the resonance pole
//! crosses the imaginary axis inside the cut. At critical coupling there is
//! no such crossing: detuned cavities grow for any gain, while the
//! band-centre cavity has a whole interval of neutral gains.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::crow::{crow_spectrum, CrowError, CrowParams, CRITICAL_TOL};
use crate::numerics::bessel::bessel_j;
use crate::numerics::roots::bisect;
use crate::reservoir::{bound_modes, ReservoirError, ReservoirSpectrum};
use crate::spectral::{resonance_pole, track_pole, ComplexPole, SpectralError};

/// Sign-scan resolution used by [`threshold_generic`].
pub const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BelowCritical,
    CriticalDetuned,
    CriticalResonant,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::BelowCritical => "below_critical",
            Regime::CriticalDetuned => "critical_detuned",
            Regime::CriticalResonant => "critical_resonant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LasingError {
    #[error(
        "coupling ratio {ratio} exceeds the critical value {critical}: bound modes exist and \
         this regime is not covered"
    )]
    BoundModeRegime { ratio: f64, critical: f64 },
    #[error("cavity detuning omega_a/2kappa = {detuning} lies outside the band")]
    OutsideBand { detuning: f64 },
    #[error("bound modes at {modes:?}; the threshold analysis needs a sub-critical coupling")]
    BoundModes { modes: Vec<f64> },
    #[error("no solution of Omega - omega_a = Delta(Omega) inside the band")]
    NoFixedPoint,
    #[error("no conventional threshold in the {} regime", .0.label())]
    NoThreshold(Regime),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Crow(#[from] CrowError),
    #[error(transparent)]
    Reservoir(#[from] ReservoirError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub omega: f64,
    pub g_th: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub g_th: f64,
    pub omega_osc: f64,
    pub regime: Regime,
    pub all_fixed_points: Vec<FixedPoint>,
}

/// Regime of a CROW-coupled cavity from `r = κ0/κ` against
/// `r_crit = sqrt(1 - |ω_a|/2κ)`, with relative tolerance [`CRITICAL_TOL`].
pub fn classify_regime(params: &CrowParams) -> Result<Regime, LasingError> {
    let a = params.detuning();
    if a.abs() > 1.0 {
        return Err(LasingError::OutsideBand { detuning: a });
    }
    let r = params.ratio();
    let r_crit = (1.0 - a.abs()).sqrt();
    let slack = CRITICAL_TOL * r_crit.max(f64::MIN_POSITIVE);
    if r > r_crit + slack {
        return Err(LasingError::BoundModeRegime { ratio: r, critical: r_crit });
    }
    if r < r_crit - slack {
        return Ok(Regime::BelowCritical);
    }
    if a.abs() <= CRITICAL_TOL {
        Ok(Regime::CriticalResonant)
    } else {
        Ok(Regime::CriticalDetuned)
    }
}

/// Threshold from the fixed points `Ω - ω_a = Δ(Ω)` inside the band, each
/// giving a candidate `γ_i + πD(Ω)`; the smallest candidate wins.
pub fn threshold_generic(spec: &ReservoirSpectrum, omega_a: f64, gamma_i: f64) -> Result<ThresholdResult, LasingError> {
    let modes = bound_modes(spec, omega_a)?;
    if !modes.is_empty() {
        return Err(LasingError::BoundModes { modes });
    }
    let mut failure = None;
    let mut h = |w: f64| match spec.delta(w) {
        Ok(d) => w - omega_a - d,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let n = SCAN_POINTS;
    let nodes: Vec<f64> = (0..n)
        .map(|k| spec.omega1() + spec.width() * (k as f64 + 0.5) / n as f64)
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&w| h(w)).collect();
    let mut roots = Vec::new();
    for k in 0..n {
        if values[k] == 0.0 {
            roots.push(nodes[k]);
        } else if k + 1 < n && values[k] * values[k + 1] < 0.0 {
            roots.push(bisect(&mut h, nodes[k], nodes[k + 1], 0.0).unwrap_or(0.5 * (nodes[k] + nodes[k + 1])));
        }
    }
    if let Some(e) = failure {
        return Err(e.into());
    }
    let all: Vec<FixedPoint> = roots
        .into_iter()
        .map(|omega| FixedPoint {
            omega,
            g_th: gamma_i + PI * spec.density(omega),
        })
        .collect();
    let best = all
        .iter()
        .copied()
        .min_by(|a, b| a.g_th.total_cmp(&b.g_th))
        .ok_or(LasingError::NoFixedPoint)?;
    Ok(ThresholdResult {
        g_th: best.g_th,
        omega_osc: best.omega,
        regime: Regime::BelowCritical,
        all_fixed_points: all,
    })
}

/// `g_th/(2κ)` at zero intrinsic loss as a function of `ω_a/(2κ)` and
/// `(κ0/κ)²`, continuous up to and including the critical coupling.
pub fn normalized_threshold(detuning: f64, ratio_sq: f64) -> Result<f64, LasingError> {
    let a = detuning.abs();
    if a > 1.0 {
        return Err(LasingError::OutsideBand { detuning });
    }
    if !(ratio_sq >= 0.0) {
        return Err(LasingError::InvalidInput("ratio_sq must be non-negative"));
    }
    let crit_sq = 1.0 - a;
    if ratio_sq > crit_sq + CRITICAL_TOL {
        return Err(LasingError::BoundModeRegime {
            ratio: ratio_sq.sqrt(),
            critical: crit_sq.sqrt(),
        });
    }
    let free = 1.0 - ratio_sq;
    let x = if a == 0.0 { 0.0 } else { a / free };
    Ok(ratio_sq * (1.0 - x * x).max(0.0).sqrt())
}

/// Closed-form threshold below critical coupling:
/// `Ω_osc = ω_a/(1 - r²)` and `g_th = γ_i + 2κr² sqrt(1 - [(ω_a/2κ)/(1 - r²)]²)`.
pub fn threshold_crow(params: &CrowParams, gamma_i: f64) -> Result<ThresholdResult, LasingError> {
    let regime = classify_regime(params)?;
    if regime != Regime::BelowCritical {
        return Err(LasingError::NoThreshold(regime));
    }
    let r2 = params.ratio_sq();
    let omega_osc = params.omega_a / (1.0 - r2);
    let g_th = gamma_i + 2.0 * params.kappa * normalized_threshold(params.detuning(), r2)?;
    Ok(ThresholdResult {
        g_th,
        omega_osc,
        regime,
        all_fixed_points: alloc::vec![FixedPoint { omega: omega_osc, g_th }],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub detuning: f64,
    /// `((κ0/κ)², g_th/2κ)` per grid point.
    pub points: Vec<(f64, f64)>,
    /// Largest sampled point.
    pub max_point: (f64, f64),
    /// Exact maximiser over `[0, critical²]`: `1 - |a|^{2/3}` for `a ≠ 0`,
    /// the critical end point for `a = 0`.
    pub peak: (f64, f64),
}

/// `g_th/(2κ)` versus `(κ0/κ)²` on `grid` at fixed `ω_a/(2κ)`.
pub fn threshold_sweep(detuning: f64, grid: &[f64]) -> Result<ThresholdCurve, LasingError> {
    if grid.is_empty() {
        return Err(LasingError::InvalidInput("empty grid"));
    }
    let points = grid
        .iter()
        .map(|&x| normalized_threshold(detuning, x).map(|g| (x, g)))
        .collect::<Result<Vec<_>, _>>()?;
    let max_point = points
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let a = detuning.abs();
    let x_star = if a == 0.0 { 1.0 } else { 1.0 - a.powf(2.0 / 3.0) };
    let peak = (x_star, normalized_threshold(detuning, x_star)?);
    Ok(ThresholdCurve {
        detuning,
        points,
        max_point,
        peak,
    })
}

/// Pole data along a gain sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurve {
    pub regime: Regime,
    /// `(g, pole)` for each gain where the pole could be followed, sorted by `g`.
    pub points: Vec<(f64, ComplexPole)>,
    /// Gains for which no admissible pole was found.
    pub missing: Vec<f64>,
}

/// Resonance-pole growth rates `σ(g) = Re s_p` over `gains`.
///
/// Below critical coupling each track starts from the exact threshold pole
/// `(g_th, -iΩ_osc)` and is continued up and down in `g`. At detuned
/// critical coupling the track starts from the largest gain. At the
/// resonant critical point the poles `±i sqrt(4κ² - g'²)` and
/// `sqrt(g'² - 4κ²)` are used directly.
pub fn growth_rate_curve(params: &CrowParams, gamma_i: f64, gains: &[f64]) -> Result<GrowthCurve, LasingError> {
    let regime = classify_regime(params)?;
    let spec = crow_spectrum(params);
    let mut sorted: Vec<f64> = gains.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut points = Vec::with_capacity(sorted.len());
    let mut missing = Vec::new();
    let omega_a = params.omega_a;

    let follow = |start_g: f64, start_s: Complex64, targets: &[f64], points: &mut Vec<(f64, ComplexPole)>, missing: &mut Vec<f64>| {
        let mut g0 = start_g;
        let mut s0 = start_s;
        for (k, &g) in targets.iter().enumerate() {
            match track_pole(&spec, omega_a, g0, s0, &[g - gamma_i]) {
                Ok(poles) => {
                    let pole = poles[0];
                    points.push((g, pole));
                    g0 = g - gamma_i;
                    s0 = pole.s_p;
                }
                Err(_) => {
                    missing.extend_from_slice(&targets[k..]);
                    return;
                }
            }
        }
    };

    match regime {
        Regime::BelowCritical => {
            let th = threshold_crow(params, 0.0)?;
            let anchor_g = th.g_th;
            let anchor_s = Complex64::new(0.0, -th.omega_osc);
            let upper: Vec<f64> = sorted.iter().copied().filter(|g| g - gamma_i >= anchor_g).collect();
            let mut lower: Vec<f64> = sorted.iter().copied().filter(|g| g - gamma_i < anchor_g).collect();
            lower.reverse();
            follow(anchor_g, anchor_s, &upper, &mut points, &mut missing);
            follow(anchor_g, anchor_s, &lower, &mut points, &mut missing);
        }
        Regime::CriticalDetuned => {
            let mut desc = sorted.clone();
            desc.reverse();
            let mut anchor = None;
            while let Some(&g) = desc.first() {
                match resonance_pole(&spec, omega_a, g - gamma_i, None) {
                    Ok(p) => {
                        anchor = Some((g, p));
                        break;
                    }
                    Err(_) => {
                        missing.push(g);
                        desc.remove(0);
                    }
                }
            }
            if let Some((g, p)) = anchor {
                follow(g - gamma_i, p.s_p, &desc, &mut points, &mut missing);
            }
        }
        Regime::CriticalResonant => {
            let two_k = 2.0 * params.kappa;
            for &g in &sorted {
                let gp = g - gamma_i;
                let seed = if gp <= 0.0 {
                    missing.push(g);
                    continue;
                } else if gp < two_k {
                    Complex64::new(0.0, -(two_k * two_k - gp * gp).sqrt())
                } else {
                    Complex64::new((gp * gp - two_k * two_k).sqrt(), 0.0)
                };
                match resonance_pole(&spec, omega_a, gp, Some(seed)) {
                    Ok(p) => points.push((g, p)),
                    Err(_) => missing.push(g),
                }
            }
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    missing.sort_by(f64::total_cmp);
    Ok(GrowthCurve { regime, points, missing })
}

/// `σ(g) = Re s_p` at a single gain (see [`growth_rate_curve`]).
pub fn growth_rate(params: &CrowParams, gamma_i: f64, g: f64) -> Result<f64, LasingError> {
    if !(g >= 0.0) {
        return Err(LasingError::InvalidInput("gain must be non-negative"));
    }
    let curve = growth_rate_curve(params, gamma_i, &[g])?;
    match curve.points.first() {
        Some((_, pole)) => Ok(pole.s_p.re),
        None => Err(SpectralError::NoPole { g_prime: g - gamma_i }.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResonantCase {
    /// `g = 0`: `J0(2κt)`.
    DecayJ0,
    /// `0 < g < 2κ`: undamped oscillation plus a decaying remainder that is
    /// not included.
    Oscillation,
    /// `g = 2κ`: `4κt` plus a decaying remainder.
    Secular,
    /// `g > 2κ`: the unstable pole term.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantCritical {
    pub value: f64,
    pub case: ResonantCase,
}

/// Dominant analytic term of `c_a(t)` for `ω_a = 0`, `κ0 = κ` and gain `g`:
/// `J0(2κt)`, `[2g/ν] sin(νt)` with `ν = sqrt(4κ² - g²)`, `4κt`, or
/// `[g/μ] e^{μt}` with `μ = sqrt(g² - 4κ²)`.
pub fn resonant_critical_solution(kappa: f64, g: f64, t: f64) -> Result<ResonantCritical, LasingError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(LasingError::InvalidInput("kappa must be positive"));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(LasingError::InvalidInput("gain must be non-negative"));
    }
    let two_k = 2.0 * kappa;
    let (value, case) = if g == 0.0 {
        (bessel_j(0, two_k * t), ResonantCase::DecayJ0)
    } else if (g - two_k).abs() <= CRITICAL_TOL * two_k {
        (2.0 * two_k * t, ResonantCase::Secular)
    } else if g < two_k {
        let nu = ((two_k - g) * (two_k + g)).sqrt();
        (2.0 * g / nu * (nu * t).sin(), ResonantCase::Oscillation)
    } else {
        let mu = ((g - two_k) * (g + two_k)).sqrt();
        (g / mu * (mu * t).exp(), ResonantCase::Exponential)
    };
    Ok(ResonantCritical { value, case })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossyEnvelope {
    /// `4κt e^{-γ_loss t}`.
    pub value: f64,
    /// `4κ/(e γ_loss)`.
    pub peak_value: f64,
    /// `1/γ_loss`.
    pub peak_time: f64,
    /// Order-of-magnitude amplification `2κ/γ_loss`.
    pub scale: f64,
}

/// Secular envelope of the resonant critical cavity at `g = 2κ` damped by a
/// uniform loss.
pub fn lossy_envelope(kappa: f64, gamma_loss: f64, t: f64) -> Result<LossyEnvelope, LasingError> {
    if !(gamma_loss > 0.0 && gamma_loss.is_finite()) {
        return Err(LasingError::InvalidInput("gamma_loss must be positive"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(LasingError::InvalidInput("kappa must be positive"));
    }
    Ok(LossyEnvelope {
        value: 4.0 * kappa * t * (-gamma_loss * t).exp(),
        peak_value: 4.0 * kappa / (E * gamma_loss),
        peak_time: 1.0 / gamma_loss,
        scale: 2.0 * kappa / gamma_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_examples() {
        let p = |x: f64, a: f64| CrowParams::normalized(x, a).unwrap();
        assert_eq!(classify_regime(&p(0.8, 0.18)).unwrap(), Regime::BelowCritical);
        assert_eq!(classify_regime(&p(0.8, 0.2)).unwrap(), Regime::CriticalDetuned);
        assert_eq!(classify_regime(&p(1.0, 0.0)).unwrap(), Regime::CriticalResonant);
        assert!(matches!(classify_regime(&p(0.9, 0.2)), Err(LasingError::BoundModeRegime { .. })));
    }

    #[test]
    fn threshold_examples() {
        let t = threshold_crow(&CrowParams::normalized(0.5, 0.0).unwrap(), 0.0).unwrap();
        assert_eq!(t.omega_osc, 0.0);
        assert!((t.g_th - 1.0).abs() < 1e-15);
        let t = threshold_crow(&CrowParams::normalized(0.8, 0.18).unwrap(), 0.0).unwrap();
        assert!((t.omega_osc / 2.0 - 0.9).abs() < 1e-12);
        assert!((t.g_th / 2.0 - 0.8 * 0.19f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            threshold_crow(&CrowParams::normalized(1.0, 0.0).unwrap(), 0.0),
            Err(LasingError::NoThreshold(Regime::CriticalResonant))
        ));
    }

    #[test]
    fn threshold_vanishes_at_detuned_critical_point() {
        let g = normalized_threshold(0.2, 0.8 - 1e-9).unwrap();
        assert!(g < 1e-3);
        assert_eq!(normalized_threshold(0.2, 0.8).unwrap(), 0.0);
    }

    #[test]
    fn resonant_cases() {
        let r = resonant_critical_solution(1.0, 0.0, 2.5).unwrap();
        assert_eq!(r.case, ResonantCase::DecayJ0);
        assert!((r.value - bessel_j(0, 5.0)).abs() < 1e-15);
        let r = resonant_critical_solution(1.0, 2.0, 3.0).unwrap();
        assert_eq!((r.case, r.value), (ResonantCase::Secular, 12.0));
        let r = resonant_critical_solution(1.0, 2.2, 0.0).unwrap();
        assert_eq!(r.case, ResonantCase::Exponential);
        assert!(resonant_critical_solution(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn lossy_envelope_values() {
        let e = lossy_envelope(1.0, 0.01, 100.0).unwrap();
        assert!((e.value - e.peak_value).abs() < 1e-12);
        assert!((e.peak_value - 147.151_776_468_666).abs() < 1e-9);
        assert_eq!(e.scale, 200.0);
        assert_eq!(lossy_envelope(1.0, 0.01, 0.0).unwrap().value, 0.0);
        assert!(lossy_envelope(1.0, 0.0, 1.0).is_err());
    }
}
