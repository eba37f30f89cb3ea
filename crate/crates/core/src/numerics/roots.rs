//! Damped Newton iteration for analytic functions of one complex variable,
//! and real bisection.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no convergence after {iterations} iterations (last iterate {last}, |F| = {residual:.3e})")]
    NotConverged {
        last: Complex64,
        residual: f64,
        iterations: usize,
    },
    #[error("function is not finite at {at}")]
    NonFinite { at: Complex64 },
    #[error("no sign change on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Converged once `|F(s)| <= tol`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Length scale for the finite-difference derivative.
    pub scale: f64,
}

impl RootOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iterations: 100,
            scale: 1.0,
        }
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Central-difference derivative of an analytic function.
pub fn derivative<F>(f: &mut F, s: Complex64, h: f64) -> Complex64
where
    F: FnMut(Complex64) -> Complex64,
{
    let dh = Complex64::new(h, 0.0);
    (f(s + dh) - f(s - dh)) / (2.0 * h)
}

/// Newton iteration with step halving. Converges when `|F(s)| <= tol`.
pub fn find_root_complex<F>(f: F, seed: Complex64, tol: f64) -> Result<Complex64, RootError>
where
    F: FnMut(Complex64) -> Complex64,
{
    find_root_with(f, seed, &RootOptions::new(tol))
}

pub fn find_root_with<F>(mut f: F, seed: Complex64, opts: &RootOptions) -> Result<Complex64, RootError>
where
    F: FnMut(Complex64) -> Complex64,
{
    let mut s = seed;
    let mut fs = f(s);
    if !finite(fs) {
        return Err(RootError::NonFinite { at: s });
    }
    for it in 0..opts.max_iterations {
        if fs.norm() <= opts.tol {
            return Ok(s);
        }
        let h = 1e-7 * opts.scale.max(s.norm() * 1e-2);
        let d = derivative(&mut f, s, h);
        if !finite(d) || d.norm() == 0.0 {
            return Err(RootError::NotConverged {
                last: s,
                residual: fs.norm(),
                iterations: it,
            });
        }
        let step = fs / d;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = s - step * lambda;
            let ft = f(trial);
            if finite(ft) && ft.norm() < fs.norm() {
                s = trial;
                fs = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fs.norm() <= opts.tol {
        return Ok(s);
    }
    Err(RootError::NotConverged {
        last: s,
        residual: fs.norm(),
        iterations: opts.max_iterations,
    })
}

/// Root of a real function bracketed by `[a, b]`, to an interval width of `tol`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(RootError::NoBracket { a, b });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_roots_of_unity() {
        let f = |z: Complex64| z * z * z - 1.0;
        let r = find_root_complex(f, Complex64::new(-0.4, 0.8), 1e-13).unwrap();
        let want = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        assert!((r - want).norm() < 1e-12);
    }

    #[test]
    fn exponential_fixed_point() {
        // z = exp(-z) has the real root W(1).
        let r = find_root_complex(|z| z - (-z).exp(), Complex64::new(1.0, 0.0), 1e-14).unwrap();
        assert!((r.re - 0.567_143_290_409_783_8).abs() < 1e-13);
    }

    #[test]
    fn reports_failure_without_root() {
        // Real seed and real derivative keep the iterate on the real axis.
        let e = find_root_complex(|z| z * z + 1.0, Complex64::new(0.5, 0.0), 1e-12).unwrap_err();
        assert!(matches!(e, RootError::NotConverged { .. }));
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-10).is_err());
    }
}
