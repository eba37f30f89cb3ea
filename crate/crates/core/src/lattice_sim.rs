//! Time-domain integration of the truncated microcavity-CROW lattice.
//!
//! Sites run from `-N` to `N`; site 0 is the microcavity and the others are
//! CROW resonators. The lattice is closed by hard (zero-amplitude) walls,
//! so results are exact only until the wavefront, travelling at the
//! maximum group velocity `2κ` sites per unit time, reaches the edge.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::crow::CrowParams;

/// Fraction of the wall-arrival time `N/(2κ)` a run may cover with the
/// boundary guard on.
pub const HORIZON_FRACTION: f64 = 0.9;
/// `|a_{±N}|² / P` level at which the boundary alarm fires.
pub const EDGE_ALARM_LEVEL: f64 = 1e-8;

/// Where the uniform CROW loss `γ_loss` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LossPlacement {
    /// CROW resonators only.
    CrowOnly,
    /// Every resonator including the microcavity; with this choice the
    /// loss factors out as `exp(-γ_loss t)`.
    #[default]
    Global,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation setting: {0}")]
    InvalidConfig(&'static str),
    #[error(
        "t_max = {t_max} exceeds the validity horizon {horizon} for N = {n_sites} \
         (raise --sites or disable the boundary guard)"
    )]
    HorizonExceeded { t_max: f64, horizon: f64, n_sites: usize },
    #[error("initial state has {got} sites per side, configuration expects {expected}")]
    StateSizeMismatch { got: usize, expected: usize },
    #[error("time step {dt} is outside the stability region (dt·|H| = {product:.3})")]
    Unstable { dt: f64, product: f64 },
    #[error("time series too short for the power balance ({0} samples)")]
    SeriesTooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Sites per side, `N`.
    pub n_sites: usize,
    pub dt: f64,
    pub t_max: f64,
    pub record_stride: usize,
    pub boundary_guard: bool,
    pub loss_placement: LossPlacement,
}

impl SimConfig {
    /// Default setup for a run to `t_max`: `dt = 0.02/κ`, every step
    /// recorded, guard on, global loss, and the default lattice size.
    pub fn new(kappa: f64, t_max: f64) -> Self {
        Self {
            n_sites: Self::default_sites(kappa, t_max),
            dt: 0.02 / kappa,
            t_max,
            record_stride: 1,
            boundary_guard: true,
            loss_placement: LossPlacement::Global,
        }
    }

    /// `2⌈κ t_max⌉ + 50`, enlarged when needed so that `t_max` stays inside
    /// the validity horizon.
    pub fn default_sites(kappa: f64, t_max: f64) -> usize {
        let kt = (kappa * t_max).max(0.0);
        let base = 2 * kt.ceil() as usize + 50;
        let needed = (2.0 * kt / HORIZON_FRACTION).ceil() as usize + 1;
        base.max(needed).max(8)
    }

    pub fn with_sites(mut self, n_sites: usize) -> Self {
        self.n_sites = n_sites;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_guard(mut self, on: bool) -> Self {
        self.boundary_guard = on;
        self
    }

    pub fn with_loss_placement(mut self, placement: LossPlacement) -> Self {
        self.loss_placement = placement;
        self
    }

    /// Latest time for which the truncated lattice is certified exact.
    pub fn horizon(&self, kappa: f64) -> f64 {
        HORIZON_FRACTION * self.n_sites as f64 / (2.0 * kappa)
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    fn validate(&self, kappa: f64) -> Result<(), SimError> {
        if self.n_sites < 8 {
            return Err(SimError::InvalidConfig("need at least 8 sites per side"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::InvalidConfig("time step must be positive"));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(SimError::InvalidConfig("t_max must be finite and non-negative"));
        }
        if self.record_stride == 0 {
            return Err(SimError::InvalidConfig("record stride must be at least 1"));
        }
        let horizon = self.horizon(kappa);
        if self.boundary_guard && self.t_max > horizon * (1.0 + 1e-12) {
            return Err(SimError::HorizonExceeded {
                t_max: self.t_max,
                horizon,
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }
}

/// Lattice amplitudes at one instant. Index `N + n` holds site `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub t: f64,
    sites: Vec<Complex64>,
}

impl LatticeState {
    /// `c_a = 1`, all CROW amplitudes zero, `t = 0`.
    pub fn initial(n_sites: usize) -> Self {
        let mut sites = vec![Complex64::default(); 2 * n_sites + 1];
        sites[n_sites] = Complex64::new(1.0, 0.0);
        Self { t: 0.0, sites }
    }

    /// From the microcavity amplitude and the two CROW halves, each listed
    /// outward from the microcavity (`a_{-1}, a_{-2}, …` and `a_1, a_2, …`).
    pub fn from_parts(c_a: Complex64, left: &[Complex64], right: &[Complex64], t: f64) -> Result<Self, SimError> {
        if left.len() != right.len() {
            return Err(SimError::StateSizeMismatch {
                got: left.len(),
                expected: right.len(),
            });
        }
        let n = right.len();
        let mut sites = Vec::with_capacity(2 * n + 1);
        sites.extend(left.iter().rev().copied());
        sites.push(c_a);
        sites.extend_from_slice(right);
        Ok(Self { t, sites })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len() / 2
    }

    pub fn c_a(&self) -> Complex64 {
        self.sites[self.n_sites()]
    }

    /// Amplitude on site `n` (`n = 0` is the microcavity).
    pub fn site(&self, n: isize) -> Complex64 {
        let idx = self.n_sites() as isize + n;
        self.sites[idx as usize]
    }

    /// `a_1, …, a_N`.
    pub fn right(&self) -> &[Complex64] {
        &self.sites[self.n_sites() + 1..]
    }

    /// `a_{-1}, …, a_{-N}`.
    pub fn left(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.sites[..self.n_sites()].iter().rev().copied()
    }

    pub fn total_power(&self) -> f64 {
        self.sites.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn crow_power(&self) -> f64 {
        self.total_power() - self.c_a().norm_sqr()
    }

    /// `max_n |a_n - a_{-n}|`.
    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.sites)
    }
}

fn symmetry_defect(sites: &[Complex64]) -> f64 {
    let m = sites.len();
    (0..m / 2).map(|i| (sites[i] - sites[m - 1 - i]).norm()).fold(0.0, f64::max)
}

/// Sampled output of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub kappa: f64,
    pub t: Vec<f64>,
    pub c_a: Vec<Complex64>,
    pub total_power: Vec<f64>,
    pub crow_power: Vec<f64>,
    /// `max(|a_N|², |a_{-N}|²)`.
    pub edge_power: Vec<f64>,
    /// `dP/dt` minus the power-balance right-hand side, per sample.
    pub balance_residual: Vec<f64>,
    /// Largest `max_n |a_n - a_{-n}|` over the recorded samples.
    pub max_symmetry_defect: f64,
    /// First step time at which the edge power exceeded the alarm level.
    pub boundary_alarm: Option<f64>,
    /// Set when the run was cut short by a non-finite or overflowing state.
    pub overflow: bool,
    pub final_state: LatticeState,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Time axis as `2κt`.
    pub fn normalized_time(&self) -> Vec<f64> {
        self.t.iter().map(|t| 2.0 * self.kappa * t).collect()
    }

    pub fn abs_c_a(&self) -> Vec<f64> {
        self.c_a.iter().map(|z| z.norm()).collect()
    }
}

struct Lattice {
    n: usize,
    kappa: f64,
    kappa0: f64,
    cavity_diag: Complex64,
    crow_diag: Complex64,
}

impl Lattice {
    fn hop(&self, left: usize) -> f64 {
        if left == self.n || left + 1 == self.n {
            self.kappa0
        } else {
            self.kappa
        }
    }

    // out = -i H y
    fn apply(&self, y: &[Complex64], out: &mut [Complex64]) {
        let m = y.len();
        for i in 0..m {
            let right = if i + 1 < m { y[i + 1] * self.hop(i) } else { Complex64::default() };
            let left = if i > 0 { y[i - 1] * self.hop(i - 1) } else { Complex64::default() };
            let diag = if i == self.n { self.cavity_diag } else { self.crow_diag };
            let v = diag * y[i] - (right + left);
            out[i] = Complex64::new(v.im, -v.re);
        }
    }
}

fn balance_residual(
    t: &[f64],
    total: &[f64],
    c_a: &[Complex64],
    crow: &[f64],
    net_gain: f64,
    gamma_loss: f64,
    placement: LossPlacement,
) -> Vec<f64> {
    let n = t.len();
    if n < 3 {
        return Vec::new();
    }
    let h = t[1] - t[0];
    let p = total;
    (0..n)
        .map(|k| {
            let dp = if n < 5 {
                if k == 0 {
                    (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h)
                } else if k == n - 1 {
                    (3.0 * p[k] - 4.0 * p[k - 1] + p[k - 2]) / (2.0 * h)
                } else {
                    (p[k + 1] - p[k - 1]) / (2.0 * h)
                }
            } else {
                // Fourth-order stencils, one-sided near the ends.
                let (j, sign) = match k {
                    0 | 1 => (k, 1.0),
                    _ if k + 2 >= n => (n - 1 - k, -1.0),
                    _ => (usize::MAX, 0.0),
                };
                let f = |i: usize| if sign > 0.0 { p[i] } else { p[n - 1 - i] };
                match j {
                    0 => sign * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h),
                    1 => sign * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h),
                    _ => (p[k - 2] - 8.0 * p[k - 1] + 8.0 * p[k + 1] - p[k + 2]) / (12.0 * h),
                }
            };
            let cav = c_a[k].norm_sqr();
            let lossy = match placement {
                LossPlacement::CrowOnly => crow[k],
                LossPlacement::Global => crow[k] + cav,
            };
            dp - (2.0 * net_gain * cav - 2.0 * gamma_loss * lossy)
        })
        .collect()
}

/// Integrates the lattice equations with classical fourth-order Runge-Kutta
/// at fixed step:
///
/// * `i ȧ_n = -κ (a_{n+1} + a_{n-1}) - i γ_loss a_n` on CROW sites, with the
///   bonds to the microcavity carrying `κ0`;
/// * `i ċ_a = -κ0 (a_{-1} + a_1) + (ω_a + i(g - γ_i)) c_a`, plus
///   `-i γ_loss c_a` when the loss is global.
pub fn evolve(
    params: &CrowParams,
    gain: f64,
    intrinsic_loss: f64,
    config: &SimConfig,
    initial: &LatticeState,
) -> Result<TimeSeries, SimError> {
    config.validate(params.kappa)?;
    if initial.n_sites() != config.n_sites {
        return Err(SimError::StateSizeMismatch {
            got: initial.n_sites(),
            expected: config.n_sites,
        });
    }
    let net_gain = gain - intrinsic_loss;
    let gl = params.gamma_loss;
    // A loss shared by every resonator commutes with the hopping and is
    // applied exactly as a per-step factor.
    let (crow_loss, uniform_decay) = match config.loss_placement {
        LossPlacement::CrowOnly => (gl, 1.0),
        LossPlacement::Global => (0.0, (-gl * config.dt).exp()),
    };
    let lattice = Lattice {
        n: config.n_sites,
        kappa: params.kappa,
        kappa0: params.kappa0,
        cavity_diag: Complex64::new(params.omega_a, net_gain),
        crow_diag: Complex64::new(0.0, -crow_loss),
    };
    let norm_bound = 2.0 * params.kappa + 2.0 * params.kappa0 + params.omega_a.abs() + net_gain.abs() + gl;
    let product = config.dt * norm_bound;
    if product > 2.5 {
        return Err(SimError::Unstable { dt: config.dt, product });
    }

    let steps = config.steps();
    let capacity = steps / config.record_stride + 1;
    let mut series = TimeSeries {
        kappa: params.kappa,
        t: Vec::with_capacity(capacity),
        c_a: Vec::with_capacity(capacity),
        total_power: Vec::with_capacity(capacity),
        crow_power: Vec::with_capacity(capacity),
        edge_power: Vec::with_capacity(capacity),
        balance_residual: Vec::new(),
        max_symmetry_defect: 0.0,
        boundary_alarm: None,
        overflow: false,
        final_state: LatticeState::initial(0),
    };

    let m = initial.sites.len();
    let mut y = initial.sites.clone();
    let mut k1 = vec![Complex64::default(); m];
    let mut k2 = vec![Complex64::default(); m];
    let mut k3 = vec![Complex64::default(); m];
    let mut k4 = vec![Complex64::default(); m];
    let mut tmp = vec![Complex64::default(); m];
    let dt = config.dt;
    let t0 = initial.t;

    let edge = |v: &[Complex64]| v[0].norm_sqr().max(v[m - 1].norm_sqr());
    let mut power: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let mut t = t0;
    for step in 0..=steps {
        t = t0 + step as f64 * dt;
        if series.boundary_alarm.is_none() && edge(&y) > EDGE_ALARM_LEVEL * power {
            series.boundary_alarm = Some(t);
        }
        if step % config.record_stride == 0 {
            let cav = y[config.n_sites];
            series.t.push(t);
            series.c_a.push(cav);
            series.total_power.push(power);
            series.crow_power.push(power - cav.norm_sqr());
            series.edge_power.push(edge(&y));
            series.max_symmetry_defect = series.max_symmetry_defect.max(symmetry_defect(&y));
        }
        if step == steps {
            break;
        }

        lattice.apply(&y, &mut k1);
        for i in 0..m {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        lattice.apply(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        lattice.apply(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = y[i] + k3[i] * dt;
        }
        lattice.apply(&tmp, &mut k4);
        for i in 0..m {
            tmp[i] = (y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0)) * uniform_decay;
        }
        let next_power: f64 = tmp.iter().map(|z| z.norm_sqr()).sum();
        if !next_power.is_finite() || next_power > 1e300 {
            series.overflow = true;
            break;
        }
        core::mem::swap(&mut y, &mut tmp);
        power = next_power;
    }
    series.final_state = LatticeState { t, sites: y };

    series.balance_residual = balance_residual(
        &series.t,
        &series.total_power,
        &series.c_a,
        &series.crow_power,
        net_gain,
        gl,
        config.loss_placement,
    );
    Ok(series)
}

/// Largest `|dP/dt - 2(g - γ_i)|c_a|² + 2γ_loss L|` over the samples, with
/// `L` the power in the lossy resonators and `dP/dt` from finite differences.
pub fn power_balance_residual(
    series: &TimeSeries,
    gain: f64,
    intrinsic_loss: f64,
    gamma_loss: f64,
    placement: LossPlacement,
) -> Result<f64, SimError> {
    if series.len() < 3 {
        return Err(SimError::SeriesTooShort(series.len()));
    }
    let r = balance_residual(
        &series.t,
        &series.total_power,
        &series.c_a,
        &series.crow_power,
        gain - intrinsic_loss,
        gamma_loss,
        placement,
    );
    Ok(r.iter().fold(0.0, |acc, v| acc.max(v.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuardStatus {
    Pass,
    /// Edge power crossed the alarm level at this time.
    Warning { first_time: f64 },
}

/// Whether any wave reached the lattice ends during the run, and whether
/// the requested span exceeded the validity horizon.
pub fn boundary_guard(series: &TimeSeries, config: &SimConfig) -> GuardStatus {
    match series.boundary_alarm {
        Some(t) if t <= config.t_max + series.t.first().copied().unwrap_or(0.0) => GuardStatus::Warning { first_time: t },
        _ => GuardStatus::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel_j;

    fn params(kappa0: f64, omega_a: f64) -> CrowParams {
        CrowParams::new(1.0, kappa0, omega_a).unwrap()
    }

    #[test]
    fn initial_sample() {
        let p = params(1.0, 0.0);
        let cfg = SimConfig::new(1.0, 1.0);
        let s = evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(cfg.n_sites)).unwrap();
        assert_eq!(s.t[0], 0.0);
        assert_eq!(s.c_a[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.total_power[0], 1.0);
    }

    #[test]
    fn resonant_critical_follows_j0() {
        let p = params(1.0, 0.0);
        let cfg = SimConfig::new(1.0, 5.0).with_sites(100);
        let s = evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(100)).unwrap();
        let last = *s.c_a.last().unwrap();
        assert!((last.re - bessel_j(0, 10.0)).abs() < 1e-3);
        assert!(last.im.abs() < 1e-3);
    }

    #[test]
    fn horizon_is_enforced_only_with_guard() {
        let p = params(1.0, 0.0);
        let cfg = SimConfig::new(1.0, 20.0).with_sites(20);
        assert!(matches!(
            evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(20)),
            Err(SimError::HorizonExceeded { .. })
        ));
        let cfg = cfg.with_guard(false);
        let s = evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(20)).unwrap();
        match boundary_guard(&s, &cfg) {
            GuardStatus::Warning { first_time } => assert!(first_time < 20.0),
            GuardStatus::Pass => panic!("edge never reached"),
        }
    }

    #[test]
    fn guard_passes_well_inside_horizon() {
        let p = params(1.0, 0.0);
        let cfg = SimConfig::new(1.0, 50.0).with_sites(200);
        let s = evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(200)).unwrap();
        assert_eq!(boundary_guard(&s, &cfg), GuardStatus::Pass);
    }

    #[test]
    fn uncoupled_cavity_never_leaks() {
        let p = params(0.0, 0.3);
        let cfg = SimConfig::new(1.0, 30.0).with_sites(20).with_guard(false);
        let s = evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(20)).unwrap();
        assert_eq!(boundary_guard(&s, &cfg), GuardStatus::Pass);
        assert!(s.crow_power.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn strong_gain_overflow_is_truncated() {
        let p = params(0.1, 0.0);
        let cfg = SimConfig::new(1.0, 1.0).with_sites(8).with_dt(0.02);
        let mut cfg = cfg;
        cfg.t_max = 3.5;
        cfg.boundary_guard = false;
        let s = evolve(&p, 120.0, 0.0, &cfg, &LatticeState::initial(8)).unwrap();
        assert!(s.overflow);
        assert!(s.c_a.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        assert!(s.len() < cfg.steps() + 1);
    }

    #[test]
    fn default_sites_respects_horizon() {
        for &t in &[1.0, 10.0, 100.0, 250.0, 600.0] {
            let cfg = SimConfig::new(1.0, t);
            assert!(t <= cfg.horizon(1.0));
            assert!(cfg.n_sites >= 2 * (t as usize) + 50);
        }
    }

    #[test]
    fn mismatched_initial_state_is_rejected() {
        let p = params(1.0, 0.0);
        let cfg = SimConfig::new(1.0, 1.0);
        assert!(matches!(
            evolve(&p, 0.0, 0.0, &cfg, &LatticeState::initial(cfg.n_sites + 1)),
            Err(SimError::StateSizeMismatch { .. })
        ));
    }
}
