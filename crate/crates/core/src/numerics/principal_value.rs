//! Cauchy principal value of `PV ∫_a^b f(ω) / (x0 - ω) dω`.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::quadrature::{integrate_real, QuadratureError, QuadratureResult};

/// Principal value with a simple pole at `x0`, by singularity subtraction:
///
/// `PV ∫ f/(x0-ω) = ∫ [f(ω) - f(x0)]/(x0-ω) dω + f(x0) ln|(x0-a)/(b-x0)|`.
///
/// The regular part is integrated separately on each side of `x0`. When
/// `x0` is not strictly inside `(a, b)` the integral is ordinary and this
/// function refuses it; use [`integrate_real`] instead.
pub fn principal_value<F>(f: F, a: f64, b: f64, x0: f64, tol: f64) -> Result<QuadratureResult<f64>, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if !(x0 > a && x0 < b) {
        return Err(QuadratureError::PoleOutsideInterval { x0, a, b });
    }

    let f0 = f(x0);
    let regular = |w: f64| {
        let d = x0 - w;
        if d == 0.0 {
            0.0
        } else {
            (f(w) - f0) / d
        }
    };
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 1;
    for (lo, hi) in [(a, x0), (x0, b)] {
        let r = integrate_real(regular, lo, hi, tol)?;
        value += r.value;
        error += r.error_estimate;
        evaluations += r.evaluations;
    }
    if !f0.is_finite() {
        return Err(QuadratureError::NonFinite { x: x0 });
    }
    value += f0 * ((x0 - a) / (b - x0)).ln();
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn constant_density_gives_log() {
        let r = principal_value(|_| 1.0, -1.0, 1.0, 0.5, 1e-10).unwrap();
        assert!((r.value - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn semicircle_inside_band_is_linear() {
        // (2/π) sqrt(1 - ω²/4) on (-2, 2), value at x0 = 1 is 1.
        let d = |w: f64| 2.0 / PI * (1.0 - w * w / 4.0).max(0.0).sqrt();
        for &x0 in &[1.0, -1.3, 0.0, 1.9] {
            let r = principal_value(d, -2.0, 2.0, x0, 1e-10).unwrap();
            assert!((r.value - x0).abs() < 1e-9, "x0={x0}: {}", r.value);
        }
    }

    #[test]
    fn linear_numerator_matches_antiderivative() {
        let (a, b, x0) = (-1.0, 1.0, 0.5);
        let r = principal_value(|w| w, a, b, x0, 1e-12).unwrap();
        let want = -(b - a) + x0 * ((x0 - a) / (b - x0)).ln();
        assert!((r.value - want).abs() < 1e-12);
    }

    #[test]
    fn odd_kernel_vanishes() {
        let r = principal_value(|_| 1.0, -1.0, 1.0, 0.0, 1e-12).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn pole_outside_or_on_edge_is_rejected() {
        assert!(principal_value(|_| 1.0, 0.0, 1.0, 2.0, 1e-10).is_err());
        assert!(principal_value(|_| 1.0, 0.0, 1.0, 1.0, 1e-10).is_err());
    }
}
