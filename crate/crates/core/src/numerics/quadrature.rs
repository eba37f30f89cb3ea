//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands on
//! finite intervals.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value, error estimate and number of integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("principal-value pole {x0} is not inside ({a}, {b})")]
    PoleOutsideInterval { x0: f64, a: f64, b: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error(
        "quadrature did not converge after {intervals} subintervals \
         (partial value {partial}, error estimate {error_estimate:.3e})"
    )]
    NotConverged {
        partial: Complex64,
        error_estimate: f64,
        intervals: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadratureOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_intervals: 2000,
        }
    }
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self::new(1e-10)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64), QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<Complex64, QuadratureError> {
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut samples = [(Complex64::default(), Complex64::default()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }

    let habs = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * habs;
    let res_asc = res_asc * habs;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if roundoff > err {
        err = roundoff;
    }
    Ok((value, err))
}

/// Integrates `f` over `[a, b]` to `max(tol, tol * |I|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult<Complex64>, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_with(f, a, b, &QuadratureOptions::new(tol))
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult<f64>, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok(QuadratureResult {
        value: r.value.re,
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
    })
}

pub fn integrate_with<F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<Complex64>, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadratureError::InvalidInterval { a, b });
    }

    let (v0, e0) = kronrod(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v0, error: e0 });
    // Panels too narrow to split further are parked here.
    let mut frozen_value = Complex64::default();
    let mut frozen_error = 0.0;
    let mut total = v0;
    let mut total_error = e0;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_error <= target {
            break;
        }
        if heap.len() + 1 > opts.max_intervals {
            return Err(QuadratureError::NotConverged {
                partial: total,
                error_estimate: total_error,
                intervals: heap.len(),
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadratureError::NotConverged {
                partial: total,
                error_estimate: total_error,
                intervals: 0,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if worst.b - worst.a <= 1e3 * f64::EPSILON * scale || mid <= worst.a || mid >= worst.b {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod(&mut f, mid, worst.b)?;
        evaluations += 30;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });

        total = frozen_value;
        total_error = frozen_error;
        for p in heap.iter() {
            total += p.value;
            total_error += p.error;
        }
    }

    Ok(QuadratureResult {
        value: total,
        error_estimate: total_error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        for k in 0..=22 {
            let r = integrate_real(|x| x.powi(k), 0.0, 1.0, 1e-13).unwrap();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((r.value - exact).abs() < 1e-14, "k={k}: {}", r.value);
        }
    }

    #[test]
    fn semicircle_area() {
        // Square-root endpoint behaviour on both sides.
        let r = integrate_real(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-10).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10);
        assert!(r.error_estimate < 1e-9);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // Integral of exp(i 40 x) over [0, 1].
        let r = integrate(|x| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoint_converges() {
        let r = integrate_real(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-8).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(matches!(
            integrate_real(|x| x, 1.0, 0.0, 1e-10),
            Err(QuadratureError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_reports_partial_value() {
        let opts = QuadratureOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_intervals: 4,
        };
        let err = integrate_with(|x| Complex64::new((1.0 / x).sin(), 0.0), 1e-3, 1.0, &opts).unwrap_err();
        match err {
            QuadratureError::NotConverged { partial, .. } => assert!(partial.re.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate_real(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }
}
