//! Microcavity side-coupled to a coupled-resonator optical waveguide.
//!
//! In the frame rotating at the band centre the CROW band is `(-2κ, 2κ)`
//! and the reservoir has the semicircular structure function
//! `D(ω) = (2κ0²/πκ) sqrt(1 - (ω/2κ)²)`. Self-energy and Lamb shift are
//! known in closed form, which this module provides alongside the
//! lattice-to-continuum map.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::lattice_sim::LatticeState;
use crate::reservoir::{CouplingShape, ReservoirSpectrum, Sheet, Side};

/// Relative slack used when comparing against the critical boundary.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrowError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("s = {s} lies on the branch cut; use the boundary-value form with a side")]
    OnCut { s: Complex64 },
    #[error("cavity detuning omega_a/2kappa = {detuning} lies outside the band, no critical coupling")]
    NoCriticalCoupling { detuning: f64 },
    #[error("lattice state is not inversion symmetric (defect {defect:.3e})")]
    Asymmetric { defect: f64 },
    #[error("frequency grid of {grid} points cannot resolve {sites} sites")]
    GridTooCoarse { grid: usize, sites: usize },
    #[error("omega = {omega} is outside the band")]
    OutsideBand { omega: f64 },
}

/// CROW hopping `κ`, microcavity coupling `κ0`, detuning `ω_a` of the
/// microcavity from the band centre, uniform loss `γ_loss`. `omega0` and
/// `d` (band centre and unit-cell length) only enter the dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrowParams {
    pub kappa: f64,
    pub kappa0: f64,
    pub omega_a: f64,
    pub gamma_loss: f64,
    pub omega0: f64,
    pub d: f64,
}

impl CrowParams {
    pub fn new(kappa: f64, kappa0: f64, omega_a: f64) -> Result<Self, CrowError> {
        let p = Self {
            kappa,
            kappa0,
            omega_a,
            gamma_loss: 0.0,
            omega0: 0.0,
            d: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// `κ = 1`, `(κ0/κ)² = ratio_sq`, `ω_a/(2κ) = detuning`.
    pub fn normalized(ratio_sq: f64, detuning: f64) -> Result<Self, CrowError> {
        if !(ratio_sq.is_finite() && ratio_sq >= 0.0) {
            return Err(CrowError::InvalidParameter {
                name: "ratio_sq",
                value: ratio_sq,
            });
        }
        Self::new(1.0, ratio_sq.sqrt(), 2.0 * detuning)
    }

    pub fn with_loss(mut self, gamma_loss: f64) -> Result<Self, CrowError> {
        self.gamma_loss = gamma_loss;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CrowError> {
        let checks: [(&'static str, f64, bool); 6] = [
            ("kappa", self.kappa, self.kappa > 0.0),
            ("kappa0", self.kappa0, self.kappa0 >= 0.0),
            ("omega_a", self.omega_a, true),
            ("gamma_loss", self.gamma_loss, self.gamma_loss >= 0.0),
            ("omega0", self.omega0, true),
            ("d", self.d, self.d > 0.0),
        ];
        for (name, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(CrowError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// `r = κ0/κ`.
    pub fn ratio(&self) -> f64 {
        self.kappa0 / self.kappa
    }

    pub fn ratio_sq(&self) -> f64 {
        self.ratio() * self.ratio()
    }

    /// `ω_a/(2κ)`.
    pub fn detuning(&self) -> f64 {
        self.omega_a / (2.0 * self.kappa)
    }
}

/// `ω(k) = ω0 - 2κ cos(k d)`.
pub fn dispersion(params: &CrowParams, k: f64) -> f64 {
    params.omega0 - 2.0 * params.kappa * (k * params.d).cos()
}

/// Semicircle shape `(2κ/π) sqrt(1 - (ω/2κ)²)`, whose coupling scale is
/// `κ0/κ`. Supplies every closed-form capability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrowShape {
    pub kappa: f64,
}

impl CrowShape {
    /// `s - W(s)` with `W(s) = 2κ sqrt(1 + s²/4κ²)`.
    fn s_minus_w(&self, s: Complex64) -> Complex64 {
        let k2 = 2.0 * self.kappa;
        let w = (Complex64::new(1.0, 0.0) + s * s / (k2 * k2)).sqrt() * k2;
        let sum = s + w;
        let diff = s - w;
        if sum.norm() > diff.norm() {
            -(k2 * k2) / sum
        } else {
            diff
        }
    }
}

impl CouplingShape for CrowShape {
    fn value(&self, omega: f64) -> f64 {
        let x = omega / (2.0 * self.kappa);
        if x.abs() >= 1.0 {
            0.0
        } else {
            2.0 * self.kappa / PI * (1.0 - x * x).sqrt()
        }
    }

    fn continued(&self, z: Complex64) -> Option<Complex64> {
        let x = z / (2.0 * self.kappa);
        Some((Complex64::new(1.0, 0.0) - x * x).sqrt() * (2.0 * self.kappa / PI))
    }

    fn lamb_shift(&self, omega: f64) -> Option<f64> {
        Some(unit_lamb_shift(self.kappa, omega))
    }

    fn continued_self_energy(&self, s: Complex64) -> Option<Complex64> {
        Some(Complex64::i() * self.s_minus_w(s))
    }
}

fn unit_lamb_shift(kappa: f64, omega: f64) -> f64 {
    let k2 = 2.0 * kappa;
    if omega.abs() < k2 {
        omega
    } else {
        let root = ((omega - k2) * (omega + k2)).sqrt();
        if omega > 0.0 {
            omega - root
        } else {
            omega + root
        }
    }
}

/// Reservoir spectrum of the CROW with coupling scale `κ0/κ`.
pub fn crow_spectrum(params: &CrowParams) -> ReservoirSpectrum {
    let k2 = 2.0 * params.kappa;
    ReservoirSpectrum::new(
        -k2,
        k2,
        (0.5, 0.5),
        params.ratio(),
        Arc::new(CrowShape { kappa: params.kappa }),
    )
    .expect("semicircle shape satisfies the spectrum invariants")
}

/// `(s - R(s), s + R(s))` with `R(s) = s sqrt(1 + (2κ/s)²)`, whose cut is
/// the segment `(-2iκ, 2iκ)` and which behaves as `s` at infinity. The
/// difference is formed without cancellation.
fn minus_plus_r(kappa: f64, s: Complex64) -> (Complex64, Complex64) {
    let q = Complex64::new(2.0 * kappa, 0.0) / s;
    let root = (Complex64::new(1.0, 0.0) + q * q).sqrt();
    let plus = s * (root + 1.0);
    let minus = -(4.0 * kappa * kappa) / plus;
    (minus, plus)
}

fn on_crow_cut(kappa: f64, s: Complex64) -> bool {
    s.re == 0.0 && s.im.abs() < 2.0 * kappa
}

/// Closed-form self-energy `i r²[s ∓ R(s)]` on the first (`-`) or second
/// (`+`) sheet.
pub fn crow_self_energy(params: &CrowParams, s: Complex64, sheet: Sheet) -> Result<Complex64, CrowError> {
    if on_crow_cut(params.kappa, s) {
        return match sheet {
            Sheet::First => Err(CrowError::OnCut { s }),
            // The second sheet joins the first continuously across the
            // right edge of the cut.
            Sheet::Second => crow_self_energy_at_cut(params, -s.im, Side::Right),
        };
    }
    let (minus, plus) = minus_plus_r(params.kappa, s);
    let inner = match sheet {
        Sheet::First => minus,
        Sheet::Second => plus,
    };
    Ok(Complex64::i() * inner * params.ratio_sq())
}

/// First-sheet boundary values `Σ(-iω ± 0⁺) = r²ω ∓ 2iκr² sqrt(1 - (ω/2κ)²)`.
pub fn crow_self_energy_at_cut(params: &CrowParams, omega: f64, side: Side) -> Result<Complex64, CrowError> {
    let x = omega / (2.0 * params.kappa);
    if !(x.abs() < 1.0) {
        return Err(CrowError::OutsideBand { omega });
    }
    let r2 = params.ratio_sq();
    let im = 2.0 * params.kappa * r2 * (1.0 - x * x).sqrt();
    let im = match side {
        Side::Right => -im,
        Side::Left => im,
    };
    Ok(Complex64::new(r2 * omega, im))
}

/// `i r²[s - W(s)]` with `W(s) = 2κ sqrt(1 + s²/4κ²)`: the self-energy
/// continued through the cut (first sheet for `Re s > 0`, second for
/// `Re s < 0`) as a single expression analytic across the cut.
pub fn crow_continued_self_energy(params: &CrowParams, s: Complex64) -> Complex64 {
    let shape = CrowShape { kappa: params.kappa };
    Complex64::i() * shape.s_minus_w(s) * params.ratio_sq()
}

/// Piecewise closed-form Lamb shift: `r²ω` inside the band,
/// `r²(ω ∓ sqrt(ω² - 4κ²))` above/below it.
pub fn crow_lamb_shift(params: &CrowParams, omega: f64) -> f64 {
    params.ratio_sq() * unit_lamb_shift(params.kappa, omega)
}

/// True iff `r² - 1 ≤ ω_a/(2κ) ≤ 1 - r²` (no bound modes), with a relative
/// slack of [`CRITICAL_TOL`] so that the marginal case counts as inside.
pub fn no_bound_mode_region(params: &CrowParams) -> bool {
    params.detuning().abs() <= 1.0 - params.ratio_sq() + CRITICAL_TOL
}

/// `(κ0/κ)_crit = sqrt(1 - |ω_a|/2κ)`.
pub fn critical_coupling(params: &CrowParams) -> Result<f64, CrowError> {
    let a = params.detuning();
    if a.abs() > 1.0 {
        return Err(CrowError::NoCriticalCoupling { detuning: a });
    }
    Ok((1.0 - a.abs()).sqrt())
}

/// Sine-series field `φ(Q)` and continuum amplitude `c(ω)` on a grid of
/// `Q_j = (j + 1/2)π/M`, with `ω_j = -2κ cos Q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumField {
    pub kappa: f64,
    pub q: Vec<f64>,
    pub omega: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

/// `φ(Q) = Σ_{n≥1} a_n sin(nQ)`.
pub fn sine_series(a: &[Complex64], q: f64) -> Complex64 {
    a.iter()
        .enumerate()
        .map(|(k, an)| an * ((k + 1) as f64 * q).sin())
        .sum()
}

/// Maps an inversion-symmetric lattice state to the continuum amplitude
/// `c(ω) = -sqrt(2/πκ) φ(Q) [1 - (ω/2κ)²]^{-1/4}`.
pub fn lattice_to_continuum(params: &CrowParams, state: &LatticeState, grid: usize) -> Result<ContinuumField, CrowError> {
    let n = state.n_sites();
    if grid <= n {
        return Err(CrowError::GridTooCoarse { grid, sites: n });
    }
    let scale = state.right().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = state.symmetry_defect();
    if defect > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(CrowError::Asymmetric { defect });
    }
    let kappa = params.kappa;
    let pref = -(2.0 / (PI * kappa)).sqrt();
    let mut field = ContinuumField {
        kappa,
        q: Vec::with_capacity(grid),
        omega: Vec::with_capacity(grid),
        phi: Vec::with_capacity(grid),
        c: Vec::with_capacity(grid),
    };
    for j in 0..grid {
        let q = (j as f64 + 0.5) * PI / grid as f64;
        let phi = sine_series(state.right(), q);
        let omega = -2.0 * kappa * q.cos();
        let sin_q = q.sin();
        field.q.push(q);
        field.omega.push(omega);
        field.phi.push(phi);
        field.c.push(phi * (pref / sin_q.sqrt()));
    }
    Ok(field)
}

/// Inverse map `a_n = (2/π) ∫_0^π φ(Q) sin(nQ) dQ` for `n = 1..=n_max`.
/// The midpoint grid makes this exact for `n_max` below the grid size.
pub fn continuum_to_lattice(field: &ContinuumField, n_max: usize) -> Vec<Complex64> {
    let m = field.q.len() as f64;
    (1..=n_max)
        .map(|n| {
            field
                .q
                .iter()
                .zip(&field.phi)
                .map(|(q, phi)| phi * (n as f64 * q).sin())
                .sum::<Complex64>()
                * (2.0 / m)
        })
        .collect()
}

/// `(2/π) ∫_0^π |φ(Q)|² dQ` on the field's midpoint grid.
pub fn continuum_norm(field: &ContinuumField) -> f64 {
    2.0 / field.q.len() as f64 * field.phi.iter().map(|z| z.norm_sqr()).sum::<f64>()
}
