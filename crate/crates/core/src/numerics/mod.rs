//! Numerical building blocks: adaptive quadrature, principal values,
//! integer-order Bessel functions, complex root finding and log-log fits.

pub mod bessel;
pub mod fit;
pub mod principal_value;
pub mod quadrature;
pub mod roots;

pub use bessel::bessel_j;
pub use fit::{fit_power_law, linear_fit, FitError};
pub use principal_value::principal_value;
pub use quadrature::{integrate, integrate_real, integrate_with, QuadratureError, QuadratureOptions, QuadratureResult};
pub use roots::{bisect, find_root_complex, RootError, RootOptions};

use num_complex::Complex64;

/// Principal square root with the branch cut on the negative real axis.
///
/// For values sitting exactly on the cut the sign of the imaginary zero
/// selects the side, so `-x + 0i` and `-x - 0i` give `+i sqrt(x)` and
/// `-i sqrt(x)` respectively.
#[inline]
pub fn psqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}
