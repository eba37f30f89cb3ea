//! Least-squares fits of straight lines and power laws.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample {index} is not usable (non-positive or not finite)")]
    BadSample { index: usize },
    #[error("abscissae are degenerate")]
    Degenerate,
    #[error("length mismatch: {0} abscissae, {1} ordinates")]
    LengthMismatch(usize, usize),
}

/// Ordinary least squares `y ≈ slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64), FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(FitError::TooFewSamples { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || !sxx.is_finite() {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Exponent `e` of `y ≈ C t^e`, from a straight-line fit in log-log space.
/// Requires at least ten strictly positive samples.
pub fn fit_power_law(t: &[f64], y: &[f64]) -> Result<f64, FitError> {
    if t.len() != y.len() {
        return Err(FitError::LengthMismatch(t.len(), y.len()));
    }
    if t.len() < 10 {
        return Err(FitError::TooFewSamples { needed: 10, got: t.len() });
    }
    let mut lx = alloc::vec::Vec::with_capacity(t.len());
    let mut ly = alloc::vec::Vec::with_capacity(t.len());
    for (i, (&a, &b)) in t.iter().zip(y).enumerate() {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(FitError::BadSample { index: i });
        }
        lx.push(a.ln());
        ly.push(b.ln());
    }
    linear_fit(&lx, &ly).map(|(slope, _)| slope)
}
