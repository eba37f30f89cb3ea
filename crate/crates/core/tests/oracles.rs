//! Reference values computed independently at 30 digits and frozen here.

use crowlase_core::crow::crow_spectrum;
use crowlase_core::lasing::{lossy_envelope, resonant_critical_solution, threshold_crow, threshold_sweep};
use crowlase_core::reservoir::bound_modes;
use crowlase_core::spectral::resonance_pole;
use crowlase_core::{CrowParams, Sheet};

const THRESHOLD_08_018: f64 = 0.348_711_915_483_253_9;
const NEUTRAL_AMPLITUDE_02: f64 = 0.408_248_290_463_863_0;
const NEUTRAL_FREQUENCY_02: f64 = 1.959_591_794_226_542_5;
const UNSTABLE_RATE_11: f64 = 0.916_515_138_991_168_0;
const TRANSIENT_PEAK: f64 = 147.151_776_468_576_93;
const BOUND_MODE_R12: f64 = 2.100_455_877_569_681_6;
const SWEEP_PEAK_02: (f64, f64) = (0.658_004_810_664_660_6, 0.533_757_023_915_869_2);
const PASSIVE_POLE_R02: f64 = -0.083_405_765_622_829_905;

#[test]
fn threshold_of_the_strong_coupling_preset() {
    let th = threshold_crow(&CrowParams::normalized(0.8, 0.18).unwrap(), 0.0).unwrap();
    assert!((th.g_th / 2.0 - THRESHOLD_08_018).abs() < 1e-15);
}

#[test]
fn resonant_critical_constants() {
    let g = 0.4;
    let nu = (4.0f64 - g * g).sqrt();
    assert!((nu - NEUTRAL_FREQUENCY_02).abs() < 1e-15);
    // Amplitude from the peak of the oscillation term.
    let t_peak = std::f64::consts::FRAC_PI_2 / nu;
    let v = resonant_critical_solution(1.0, g, t_peak).unwrap().value;
    assert!((v - NEUTRAL_AMPLITUDE_02).abs() < 1e-15);
    let grow = |t: f64| resonant_critical_solution(1.0, 2.2, t).unwrap().value.ln();
    assert!(((grow(3.0) - grow(1.0)) / 2.0 - UNSTABLE_RATE_11).abs() < 1e-13);
}

#[test]
fn transient_peak_constant() {
    assert!((lossy_envelope(1.0, 0.01, 100.0).unwrap().peak_value - TRANSIENT_PEAK).abs() < 1e-12);
}

#[test]
fn bound_mode_above_the_band() {
    let modes = bound_modes(&crow_spectrum(&CrowParams::new(1.0, 1.2, 0.0).unwrap()), 0.0).unwrap();
    assert!((modes[1] - BOUND_MODE_R12).abs() < 1e-10);
}

#[test]
fn sweep_peak_location() {
    let c = threshold_sweep(0.2, &[0.0, 0.8]).unwrap();
    assert!((c.peak.0 - SWEEP_PEAK_02.0).abs() < 1e-15);
    assert!((c.peak.1 - SWEEP_PEAK_02.1).abs() < 1e-15);
}

#[test]
fn passive_pole_at_band_centre() {
    // For ω_a = 0 and r² < 1/2 the pole is real: s = -2r²/sqrt(1 - 2r²).
    let p = resonance_pole(&crow_spectrum(&CrowParams::new(1.0, 0.2, 0.0).unwrap()), 0.0, 0.0, None).unwrap();
    assert!((p.s_p.re - PASSIVE_POLE_R02).abs() < 1e-11);
    assert!(p.s_p.im.abs() < 1e-11);
    assert_eq!(p.sheet, Sheet::Second);
    for r in [0.1f64, 0.3, 0.5, 0.6] {
        let r2 = r * r;
        let p = resonance_pole(&crow_spectrum(&CrowParams::new(1.0, r, 0.0).unwrap()), 0.0, 0.0, None).unwrap();
        assert!((p.gamma_p - 2.0 * r2 / (1.0 - 2.0 * r2).sqrt()).abs() < 1e-10, "r = {r}");
    }
}
