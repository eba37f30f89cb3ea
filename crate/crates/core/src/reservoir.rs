//! Discrete mode coupled to a band-limited continuum.
//!
//! A reservoir is described by its structure function `D(ω) = λ² S(ω)` on
//! the band `(ω1, ω2)`, where `S` is the coupling shape and `λ` a
//! dimensionless coupling scale. Everything else (Lamb shift, self-energy,
//! memory kernel, bound modes) is derived from it by quadrature, with
//! closed forms used where the shape supplies them.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::numerics::quadrature::{integrate, QuadratureError, QuadratureResult};
use crate::numerics::roots::bisect;

/// Default absolute/relative tolerance for reservoir integrals.
pub const QUAD_TOL: f64 = 1e-11;

/// Coupling shape `S(ω) = Σ_μ |κ_μ(ω)|²` at unit coupling scale.
///
/// Only [`value`](Self::value) is required. The remaining methods are
/// optional capabilities; returning `None` makes the generic quadrature
/// route take over, or (for the continuation) makes second-sheet queries
/// fail explicitly.
pub trait CouplingShape: Send + Sync {
    fn value(&self, omega: f64) -> f64;

    /// Analytic continuation of `S` to complex frequency.
    fn continued(&self, _z: Complex64) -> Option<Complex64> {
        None
    }

    /// Closed-form principal-value transform of `S`.
    fn lamb_shift(&self, _omega: f64) -> Option<f64> {
        None
    }

    /// Closed-form self-energy continued through the cut: first sheet for
    /// `Re s > 0`, second sheet for `Re s < 0`.
    fn continued_self_energy(&self, _s: Complex64) -> Option<Complex64> {
        None
    }
}

/// Wraps a plain closure as a coupling shape without extra capabilities.
pub struct ShapeFn<F>(pub F);

impl<F> CouplingShape for ShapeFn<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, omega: f64) -> f64 {
        (self.0)(omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    First,
    Second,
}

/// Side of the cut, in the `s` plane: `Right` is `Re s = 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReservoirError {
    #[error("band edges must satisfy omega1 < omega2 (got {omega1}, {omega2})")]
    InvalidBand { omega1: f64, omega2: f64 },
    #[error("edge exponents must be finite and positive (got {0}, {1})")]
    InvalidEdgeExponents(f64, f64),
    #[error("coupling scale must be finite and non-negative (got {0})")]
    InvalidCoupling(f64),
    #[error("density is not strictly positive at omega = {omega} (value {value})")]
    DensityNotPositive { omega: f64, value: f64 },
    #[error("density near edge {edge} does not vanish with exponent {expected} (measured {measured:.3})")]
    EdgeExponentMismatch { edge: f64, expected: f64, measured: f64 },
    #[error("s = {s} lies on the branch cut; a side must be specified")]
    OnCut { s: Complex64 },
    #[error("omega = {omega} is outside the band ({omega1}, {omega2})")]
    OutsideBand { omega: f64, omega1: f64, omega2: f64 },
    #[error("the spectrum provides no analytic continuation of its density")]
    NoContinuation,
    #[error("non-positive squared critical coupling {value} at edge {edge}")]
    InconsistentCritical { edge: f64, value: f64 },
    #[error("memory kernel does not fall below 1/e within tau = {tau_max}")]
    NoMemoryTime { tau_max: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Microcavity resonance, modal gain and intrinsic loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub omega_a: f64,
    pub gain: f64,
    pub intrinsic_loss: f64,
}

impl CavityParams {
    pub fn new(omega_a: f64, gain: f64, intrinsic_loss: f64) -> Self {
        Self {
            omega_a,
            gain,
            intrinsic_loss,
        }
    }

    /// Net gain `g' = g - γ_i`.
    pub fn effective_gain(&self) -> f64 {
        self.gain - self.intrinsic_loss
    }
}

/// Band-limited structure function `D(ω) = λ² S(ω)` on `(ω1, ω2)`.
#[derive(Clone)]
pub struct ReservoirSpectrum {
    omega1: f64,
    omega2: f64,
    edge_exponents: (f64, f64),
    coupling: f64,
    shape: Arc<dyn CouplingShape>,
}

impl fmt::Debug for ReservoirSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReservoirSpectrum")
            .field("omega1", &self.omega1)
            .field("omega2", &self.omega2)
            .field("edge_exponents", &self.edge_exponents)
            .field("coupling", &self.coupling)
            .finish_non_exhaustive()
    }
}

impl ReservoirSpectrum {
    /// Builds and validates a spectrum: positive shape strictly inside the
    /// band (sampled) and the declared power-law vanishing at both edges.
    pub fn new(
        omega1: f64,
        omega2: f64,
        edge_exponents: (f64, f64),
        coupling: f64,
        shape: Arc<dyn CouplingShape>,
    ) -> Result<Self, ReservoirError> {
        if !(omega1.is_finite() && omega2.is_finite() && omega1 < omega2) {
            return Err(ReservoirError::InvalidBand { omega1, omega2 });
        }
        let (d1, d2) = edge_exponents;
        if !(d1.is_finite() && d2.is_finite() && d1 > 0.0 && d2 > 0.0) {
            return Err(ReservoirError::InvalidEdgeExponents(d1, d2));
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(ReservoirError::InvalidCoupling(coupling));
        }
        let spec = Self {
            omega1,
            omega2,
            edge_exponents,
            coupling,
            shape,
        };
        spec.validate_shape()?;
        Ok(spec)
    }

    fn validate_shape(&self) -> Result<(), ReservoirError> {
        let width = self.width();
        let samples = 64;
        for k in 1..samples {
            let w = self.omega1 + width * k as f64 / samples as f64;
            let v = self.shape.value(w);
            if !(v.is_finite() && v > 0.0) {
                return Err(ReservoirError::DensityNotPositive { omega: w, value: v });
            }
        }
        let eps = 1e-6 * width;
        let checks = [
            (self.omega1, self.edge_exponents.0, 1.0),
            (self.omega2, self.edge_exponents.1, -1.0),
        ];
        for (edge, expected, dir) in checks {
            let near = self.shape.value(edge + dir * eps);
            let far = self.shape.value(edge + dir * 2.0 * eps);
            let measured = (far / near).log2();
            if !(measured.is_finite() && (measured - expected).abs() <= 0.05) {
                return Err(ReservoirError::EdgeExponentMismatch { edge, expected, measured });
            }
        }
        Ok(())
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn edge_exponents(&self) -> (f64, f64) {
        self.edge_exponents
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn shape(&self) -> &Arc<dyn CouplingShape> {
        &self.shape
    }

    pub fn width(&self) -> f64 {
        self.omega2 - self.omega1
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width()
    }

    /// Same shape, different coupling scale.
    pub fn with_coupling(&self, coupling: f64) -> Result<Self, ReservoirError> {
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(ReservoirError::InvalidCoupling(coupling));
        }
        Ok(Self {
            coupling,
            ..self.clone()
        })
    }

    pub fn in_band(&self, omega: f64) -> bool {
        omega > self.omega1 && omega < self.omega2
    }

    /// `D(ω)`, zero outside the open band.
    pub fn density(&self, omega: f64) -> f64 {
        if self.in_band(omega) {
            self.coupling * self.coupling * self.shape.value(omega)
        } else {
            0.0
        }
    }

    pub fn has_continuation(&self) -> bool {
        self.shape.continued(Complex64::new(self.center(), 0.0)).is_some()
    }

    /// Continued density `D(z)` at complex frequency.
    pub fn density_continued(&self, z: Complex64) -> Result<Complex64, ReservoirError> {
        self.shape
            .continued(z)
            .map(|v| v * (self.coupling * self.coupling))
            .ok_or(ReservoirError::NoContinuation)
    }

    /// `Δ(ω)`: closed form when the shape has one, quadrature otherwise.
    pub fn delta(&self, omega: f64) -> Result<f64, ReservoirError> {
        match self.shape.lamb_shift(omega) {
            Some(v) => Ok(self.coupling * self.coupling * v),
            None => lamb_shift(self, omega),
        }
    }

    /// Band frequency for the substitution `ω = c - h cos Q`, `Q ∈ [0, π]`.
    pub(crate) fn omega_of(&self, q: f64) -> f64 {
        self.center() - self.half_width() * q.cos()
    }

    pub(crate) fn q_of(&self, omega: f64) -> f64 {
        ((self.center() - omega) / self.half_width()).clamp(-1.0, 1.0).acos()
    }

    /// `∫ f(ω) dω` over the band, taken in the variable `Q`, which removes
    /// power-law endpoint behaviour of the density.
    pub(crate) fn band_integral<F>(&self, mut f: F, q_lo: f64, q_hi: f64, tol: f64) -> Result<QuadratureResult<Complex64>, QuadratureError>
    where
        F: FnMut(f64) -> Complex64,
    {
        let h = self.half_width();
        integrate(|q| f(self.omega_of(q)) * (h * q.sin()), q_lo, q_hi, tol)
    }

    /// `∫ D(ω) / (z - ω) dω` with the pole subtracted at `x0` and the log
    /// term supplied by `log_term = ln(z - ω1) - ln(z - ω2)`.
    fn cauchy_subtracted(&self, z: Complex64, x0: f64, log_term: Complex64) -> Result<Complex64, ReservoirError> {
        let d0 = self.density(x0);
        let kernel = |w: f64| {
            let num = self.density(w) - d0;
            if num == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(num, 0.0) / (z - w)
            }
        };
        let q0 = self.q_of(x0);
        let mut total = Complex64::default();
        for (lo, hi) in [(0.0, q0), (q0, PI)] {
            if hi > lo {
                total += self.band_integral(kernel, lo, hi, QUAD_TOL)?.value;
            }
        }
        if d0 != 0.0 {
            total += log_term * d0;
        }
        Ok(total)
    }

    /// First-sheet Cauchy transform `∫ D(ω)/(z - ω) dω` for `z` off the band.
    fn cauchy(&self, z: Complex64) -> Result<Complex64, ReservoirError> {
        let hw = self.half_width();
        let near = z.im.abs() < 0.5 * hw && z.re > self.omega1 - 0.5 * hw && z.re < self.omega2 + 0.5 * hw;
        if near {
            let x0 = z.re.clamp(self.omega1, self.omega2);
            let log_term = (z - self.omega1).ln() - (z - self.omega2).ln();
            self.cauchy_subtracted(z, x0, log_term)
        } else {
            let r = self.band_integral(|w| Complex64::new(self.density(w), 0.0) / (z - w), 0.0, PI, QUAD_TOL)?;
            Ok(r.value)
        }
    }

    /// Boundary value of the Cauchy transform at real `omega` in the band.
    fn cauchy_at_cut(&self, omega: f64, side: Side) -> Result<Complex64, ReservoirError> {
        let z = Complex64::new(omega, 0.0);
        let re = ((omega - self.omega1) / (self.omega2 - omega)).ln();
        // Right of the cut in s means z = ω + i0.
        let im = match side {
            Side::Right => -PI,
            Side::Left => PI,
        };
        self.cauchy_subtracted(z, omega, Complex64::new(re, im))
    }
}

/// `Δ(ω) = P∫ D(ω')/(ω - ω') dω'`, by quadrature. Inside the band the
/// pole is removed by subtraction; outside the integral is ordinary.
pub fn lamb_shift(spec: &ReservoirSpectrum, omega: f64) -> Result<f64, ReservoirError> {
    let z = Complex64::new(omega, 0.0);
    if spec.in_band(omega) {
        let log_term = Complex64::new(((omega - spec.omega1) / (spec.omega2 - omega)).ln(), 0.0);
        return Ok(spec.cauchy_subtracted(z, omega, log_term)?.re);
    }
    // At the edges D vanishes and the subtraction reduces to the plain integral.
    Ok(spec.cauchy_subtracted(z, omega.clamp(spec.omega1, spec.omega2), Complex64::default())?.re)
}

/// Whether `s` sits on the cut `{Re s = 0, -ω2 < Im s < -ω1}`.
pub fn on_cut(spec: &ReservoirSpectrum, s: Complex64) -> bool {
    s.re == 0.0 && spec.in_band(-s.im)
}

/// `Σ(s) = ∫ D(ω)/(is - ω) dω` by quadrature on the requested sheet.
///
/// The second sheet is `Σ(s) - 2πi D(is)` with the continued density;
/// exactly on the cut it takes the value continuous from the right edge.
pub fn self_energy(spec: &ReservoirSpectrum, s: Complex64, sheet: Sheet) -> Result<Complex64, ReservoirError> {
    let z = Complex64::i() * s;
    match sheet {
        Sheet::First => {
            if on_cut(spec, s) {
                return Err(ReservoirError::OnCut { s });
            }
            spec.cauchy(z)
        }
        Sheet::Second => {
            let dc = spec.density_continued(z)?;
            let first = if on_cut(spec, s) {
                spec.cauchy_at_cut(-s.im, Side::Left)?
            } else {
                spec.cauchy(z)?
            };
            Ok(first - Complex64::new(0.0, 2.0 * PI) * dc)
        }
    }
}

/// First-sheet boundary values `Σ(-iω ± 0⁺) = Δ(ω) ∓ iπD(ω)`, by quadrature.
pub fn self_energy_at_cut(spec: &ReservoirSpectrum, omega: f64, side: Side) -> Result<Complex64, ReservoirError> {
    if !spec.in_band(omega) {
        return Err(ReservoirError::OutsideBand {
            omega,
            omega1: spec.omega1,
            omega2: spec.omega2,
        });
    }
    spec.cauchy_at_cut(omega, side)
}

/// Self-energy continued through the cut, as needed by pole searches:
/// first sheet for `Re s > 0`, second sheet for `Re s < 0`, and the
/// right boundary value on the cut itself.
pub fn continued_self_energy(spec: &ReservoirSpectrum, s: Complex64) -> Result<Complex64, ReservoirError> {
    let l2 = spec.coupling * spec.coupling;
    if let Some(v) = spec.shape.continued_self_energy(s) {
        return Ok(v * l2);
    }
    if on_cut(spec, s) {
        return spec.cauchy_at_cut(-s.im, Side::Right);
    }
    if s.re >= 0.0 {
        return spec.cauchy(Complex64::i() * s);
    }
    self_energy(spec, s, Sheet::Second)
}

/// Memory kernel `G(τ) = ∫ D(ω) exp[-i(ω - ω_a)τ] dω`.
pub fn memory_kernel(spec: &ReservoirSpectrum, omega_a: f64, tau: f64) -> Result<Complex64, ReservoirError> {
    let r = spec.band_integral(
        |w| Complex64::from_polar(spec.density(w), -(w - omega_a) * tau),
        0.0,
        PI,
        QUAD_TOL,
    )?;
    Ok(r.value)
}

/// First `τ` with `|G(τ)| < |G(0)|/e`; a diagnostic reservoir memory time.
pub fn memory_time(spec: &ReservoirSpectrum, omega_a: f64) -> Result<f64, ReservoirError> {
    let g0 = memory_kernel(spec, omega_a, 0.0)?.norm();
    let level = g0 / core::f64::consts::E;
    let step = PI / spec.width() / 8.0;
    let tau_max = 2000.0 / spec.width();
    let mut prev = 0.0;
    let mut tau = step;
    while tau <= tau_max {
        if memory_kernel(spec, omega_a, tau)?.norm() < level {
            let found = bisect(
                |t| memory_kernel(spec, omega_a, t).map(|g| g.norm() - level).unwrap_or(f64::NAN),
                prev,
                tau,
                1e-12 * tau,
            );
            return found.map_err(|_| ReservoirError::NoMemoryTime { tau_max });
        }
        prev = tau;
        tau += step;
    }
    Err(ReservoirError::NoMemoryTime { tau_max })
}

/// Weisskopf-Wigner rates at the cavity frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovRates {
    /// `γ_R = π D(ω_a)`.
    pub gamma_r: f64,
    /// `Δ_R = Δ(ω_a)`.
    pub delta_r: f64,
    /// False when `ω_a` lies outside the open band (no resonant channel).
    pub resonant: bool,
}

pub fn markov_rates(spec: &ReservoirSpectrum, omega_a: f64) -> Result<MarkovRates, ReservoirError> {
    let resonant = spec.in_band(omega_a);
    Ok(MarkovRates {
        gamma_r: PI * spec.density(omega_a),
        delta_r: lamb_shift(spec, omega_a)?,
        resonant,
    })
}

/// Markovian threshold `γ_i + π D(ω_a)`.
pub fn markov_threshold(spec: &ReservoirSpectrum, cavity: &CavityParams) -> f64 {
    cavity.intrinsic_loss + PI * spec.density(cavity.omega_a)
}

/// Real solutions of `Ω - ω_a = Δ(Ω)` strictly outside the band, in
/// increasing order (at most one per side).
pub fn bound_modes(spec: &ReservoirSpectrum, omega_a: f64) -> Result<Vec<f64>, ReservoirError> {
    let width = spec.width();
    let margin = 0.5e-12 * width;
    let mut h_err = None;
    let mut h = |w: f64| match spec.delta(w) {
        Ok(d) => w - omega_a - d,
        Err(e) => {
            h_err.get_or_insert(e);
            f64::NAN
        }
    };
    let mut modes = Vec::new();

    let at_lower = h(spec.omega1);
    if at_lower > margin {
        let mut far = spec.omega1 - 10.0 * width;
        while h(far) >= 0.0 && far.is_finite() {
            far = spec.omega1 - 2.0 * (spec.omega1 - far);
        }
        if let Ok(root) = bisect(&mut h, far, spec.omega1, 0.0) {
            modes.push(root.min(spec.omega1 - f64::EPSILON * spec.omega1.abs().max(width)));
        }
    }
    let at_upper = h(spec.omega2);
    if at_upper < -margin {
        let mut far = spec.omega2 + 10.0 * width;
        while h(far) <= 0.0 && far.is_finite() {
            far = spec.omega2 + 2.0 * (far - spec.omega2);
        }
        if let Ok(root) = bisect(&mut h, spec.omega2, far, 0.0) {
            modes.push(root.max(spec.omega2 + f64::EPSILON * spec.omega2.abs().max(width)));
        }
    }
    if let Some(e) = h_err {
        return Err(e);
    }
    Ok(modes)
}

/// Coupling scales at which a bound mode appears below (`lower`) and above
/// (`upper`) the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCouplings {
    pub lower: f64,
    pub upper: f64,
}

impl CriticalCouplings {
    /// The first critical coupling, `min(lower, upper)`.
    pub fn first(&self) -> f64 {
        self.lower.min(self.upper)
    }
}

/// `λ² = (ω_edge - ω_a) / ∫ S(ω)/(ω_edge - ω) dω` at each band edge,
/// evaluated on the shape only (the spectrum's own coupling is ignored).
pub fn critical_couplings(spec: &ReservoirSpectrum, omega_a: f64) -> Result<CriticalCouplings, ReservoirError> {
    if !spec.in_band(omega_a) {
        return Err(ReservoirError::OutsideBand {
            omega: omega_a,
            omega1: spec.omega1,
            omega2: spec.omega2,
        });
    }
    let unit = spec.with_coupling(1.0)?;
    let mut out = [0.0; 2];
    for (slot, edge) in out.iter_mut().zip([spec.omega1, spec.omega2]) {
        let integral = lamb_shift(&unit, edge)?;
        let l2 = (edge - omega_a) / integral;
        if !(l2.is_finite() && l2 > 0.0) {
            return Err(ReservoirError::InconsistentCritical { edge, value: l2 });
        }
        *slot = l2.sqrt();
    }
    Ok(CriticalCouplings {
        lower: out[0],
        upper: out[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semicircle(coupling: f64) -> ReservoirSpectrum {
        ReservoirSpectrum::new(
            -2.0,
            2.0,
            (0.5, 0.5),
            coupling,
            Arc::new(ShapeFn(|w: f64| 2.0 / PI * (1.0 - w * w / 4.0).max(0.0).sqrt())),
        )
        .unwrap()
    }

    fn flat(d0: f64) -> ReservoirSpectrum {
        // Flat top with short linear ramps so the edges vanish with exponent 1.
        ReservoirSpectrum::new(
            -1.0,
            1.0,
            (1.0, 1.0),
            1.0,
            Arc::new(ShapeFn(move |w: f64| d0 * ((1.0 - w.abs()) / 0.01).clamp(0.0, 1.0))),
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_input() {
        let s: Arc<dyn CouplingShape> = Arc::new(ShapeFn(|_| 1.0));
        assert!(ReservoirSpectrum::new(1.0, 0.0, (0.5, 0.5), 1.0, s.clone()).is_err());
        assert!(ReservoirSpectrum::new(0.0, 1.0, (0.0, 0.5), 1.0, s.clone()).is_err());
        // A constant does not vanish at the edges.
        assert!(matches!(
            ReservoirSpectrum::new(0.0, 1.0, (0.5, 0.5), 1.0, s),
            Err(ReservoirError::EdgeExponentMismatch { .. })
        ));
        let gapped: Arc<dyn CouplingShape> = Arc::new(ShapeFn(|w: f64| (w * (1.0 - w)).sqrt() * (w - 0.5).abs().min(0.1) * if (w - 0.5).abs() < 0.05 { 0.0 } else { 1.0 }));
        assert!(matches!(
            ReservoirSpectrum::new(0.0, 1.0, (0.5, 0.5), 1.0, gapped),
            Err(ReservoirError::DensityNotPositive { .. })
        ));
    }

    #[test]
    fn lamb_shift_of_semicircle() {
        let s = semicircle(1.0);
        assert!((lamb_shift(&s, 1.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((lamb_shift(&s, 3.0).unwrap() - (3.0 - 5f64.sqrt())).abs() < 1e-9);
        assert!((lamb_shift(&s, -3.0).unwrap() + (3.0 - 5f64.sqrt())).abs() < 1e-9);
        assert!((lamb_shift(&s, 2.0).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn flat_spectrum_centre_shift_vanishes() {
        let s = flat(0.3);
        assert!(lamb_shift(&s, 0.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn boundary_values_at_band_centre() {
        let s = semicircle(1.0);
        let right = self_energy_at_cut(&s, 0.0, Side::Right).unwrap();
        assert!((right - Complex64::new(0.0, -2.0)).norm() < 1e-9);
        let left = self_energy_at_cut(&s, 0.0, Side::Left).unwrap();
        assert!((left - Complex64::new(0.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn cut_requires_side() {
        let s = semicircle(1.0);
        assert!(matches!(
            self_energy(&s, Complex64::new(0.0, -0.5), Sheet::First),
            Err(ReservoirError::OnCut { .. })
        ));
        assert!(matches!(
            self_energy(&s, Complex64::new(-0.1, -0.5), Sheet::Second),
            Err(ReservoirError::NoContinuation)
        ));
    }

    #[test]
    fn large_real_argument_decays_like_mass_over_s() {
        let s = semicircle(1.0);
        let big = 1e4;
        let v = self_energy(&s, Complex64::new(big, 0.0), Sheet::First).unwrap();
        // ∫D = 2, Σ ≈ 2/(i s).
        assert!((v * Complex64::new(0.0, big) - 2.0).norm() < 1e-3);
    }

    #[test]
    fn memory_kernel_at_zero_is_total_mass() {
        let s = semicircle(0.5);
        let g0 = memory_kernel(&s, 0.0, 0.0).unwrap();
        assert!((g0.re - 0.5).abs() < 1e-10 && g0.im.abs() < 1e-14);
    }

    #[test]
    fn markov_threshold_at_band_edge_is_loss_only() {
        let s = semicircle(1.0);
        let c = CavityParams::new(2.0, 0.0, 0.5);
        assert_eq!(markov_threshold(&s, &c), 0.5);
        assert!(markov_threshold(&s, &CavityParams::new(0.3, 0.0, 0.1)) >= 0.1);
    }

    #[test]
    fn flat_spectrum_has_symmetric_critical_couplings() {
        let s = flat(1.0);
        let c = critical_couplings(&s, 0.0).unwrap();
        assert!((c.lower - c.upper).abs() < 1e-8);
    }

    #[test]
    fn bound_modes_outside_band() {
        let s = flat(1.0).with_coupling(3.0).unwrap();
        let modes = bound_modes(&s, 0.0).unwrap();
        assert_eq!(modes.len(), 2);
        for m in modes {
            assert!(m > 1.0 || m < -1.0);
            assert!((m - s.delta(m).unwrap()).abs() < 1e-8 * s.width());
        }
        assert!(bound_modes(&flat(1.0).with_coupling(0.1).unwrap(), 0.0).unwrap().is_empty());
    }
}
