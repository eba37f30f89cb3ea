//! Scenario files: flat TOML, unknown keys rejected.
//!
//! ```toml
//! name = "weak-decay"
//! kind = "decay"          # decay | gain_dynamics | threshold_sweep | growth_rate_track | regime_report
//! kappa = 1.0
//! kappa0 = 0.2            # or ratio_sq = (kappa0/kappa)^2
//! omega_a = 0.0           # or detuning = omega_a/(2 kappa)
//! t_max = 40.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crowlase_core::{CrowParams, LossPlacement};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Decay,
    GainDynamics,
    ThresholdSweep,
    GrowthRateTrack,
    RegimeReport,
}

impl RunKind {
    pub fn label(&self) -> &'static str {
        match self {
            RunKind::Decay => "decay",
            RunKind::GainDynamics => "gain_dynamics",
            RunKind::ThresholdSweep => "threshold_sweep",
            RunKind::GrowthRateTrack => "growth_rate_track",
            RunKind::RegimeReport => "regime_report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Global,
    CrowOnly,
}

impl From<Placement> for LossPlacement {
    fn from(p: Placement) -> Self {
        match p {
            Placement::Global => LossPlacement::Global,
            Placement::CrowOnly => LossPlacement::CrowOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: RunKind,
    #[serde(default = "one")]
    pub kappa: f64,
    pub kappa0: Option<f64>,
    pub ratio_sq: Option<f64>,
    pub omega_a: Option<f64>,
    pub detuning: Option<f64>,
    #[serde(default)]
    pub gamma_loss: f64,
    #[serde(default)]
    pub gain: f64,
    #[serde(default)]
    pub intrinsic_loss: f64,
    /// End time `t`, in units of `1/κ` when `κ = 1`.
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub sites: Option<usize>,
    #[serde(default = "one_usize")]
    pub stride: usize,
    #[serde(default = "yes")]
    pub boundary_guard: bool,
    #[serde(default = "global")]
    pub loss_placement: Placement,
    /// Gains for `growth_rate_track`.
    pub gains: Option<Vec<f64>>,
    /// `(κ0/κ)²` grid for `threshold_sweep`; defaults to 201 points up to
    /// the critical value.
    pub ratio_sq_grid: Option<Vec<f64>>,
    /// Parameter varied by the `sweep` subcommand and its values.
    pub sweep_param: Option<SweepParam>,
    pub sweep_values: Option<Vec<f64>>,
    /// CSV file name; defaults to `<name>.csv` inside the output directory.
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gain,
    Kappa0,
    RatioSq,
    OmegaA,
    Detuning,
    GammaLoss,
    IntrinsicLoss,
}

impl SweepParam {
    pub fn label(&self) -> &'static str {
        match self {
            SweepParam::Gain => "gain",
            SweepParam::Kappa0 => "kappa0",
            SweepParam::RatioSq => "ratio_sq",
            SweepParam::OmegaA => "omega_a",
            SweepParam::Detuning => "detuning",
            SweepParam::GammaLoss => "gamma_loss",
            SweepParam::IntrinsicLoss => "intrinsic_loss",
        }
    }
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn global() -> Placement {
    Placement::Global
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.check()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a non-empty file stem");
        }
        match (self.kappa0, self.ratio_sq) {
            (Some(_), Some(_)) => return bad("give either kappa0 or ratio_sq, not both"),
            (None, None) if self.kind != RunKind::ThresholdSweep => {
                return bad("one of kappa0 or ratio_sq is required")
            }
            _ => {}
        }
        if self.omega_a.is_some() && self.detuning.is_some() {
            return bad("give either omega_a or detuning, not both");
        }
        if self.stride == 0 {
            return bad("stride must be at least 1");
        }
        for (key, v) in [
            ("kappa", Some(self.kappa)),
            ("gamma_loss", Some(self.gamma_loss)),
            ("gain", Some(self.gain)),
            ("intrinsic_loss", Some(self.intrinsic_loss)),
            ("t_max", self.t_max),
            ("dt", self.dt),
        ] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(CliError::Config(format!("{key} must be finite and non-negative, got {v}")));
                }
            }
        }
        if self.kind == RunKind::GrowthRateTrack && self.gains.as_ref().is_none_or(|g| g.is_empty()) {
            return bad("growth_rate_track needs a non-empty gains list");
        }
        if self.sweep_param.is_some() != self.sweep_values.is_some() {
            return bad("sweep_param and sweep_values go together");
        }
        if let Some(v) = &self.sweep_values {
            if v.is_empty() {
                return bad("sweep_values is empty");
            }
        }
        Ok(())
    }

    pub fn omega_a(&self) -> f64 {
        match (self.omega_a, self.detuning) {
            (Some(w), _) => w,
            (None, Some(a)) => 2.0 * self.kappa * a,
            (None, None) => 0.0,
        }
    }

    pub fn kappa0(&self) -> f64 {
        match (self.kappa0, self.ratio_sq) {
            (Some(k0), _) => k0,
            (None, Some(x)) => self.kappa * x.max(0.0).sqrt(),
            (None, None) => 0.0,
        }
    }

    pub fn params(&self) -> Result<CrowParams> {
        Ok(CrowParams::new(self.kappa, self.kappa0(), self.omega_a())?.with_loss(self.gamma_loss)?)
    }

    /// Copy with `param` set to `value`, clearing the alternative spelling.
    pub fn with_value(&self, param: SweepParam, value: f64) -> Scenario {
        let mut s = self.clone();
        match param {
            SweepParam::Gain => s.gain = value,
            SweepParam::Kappa0 => {
                s.kappa0 = Some(value);
                s.ratio_sq = None;
            }
            SweepParam::RatioSq => {
                s.ratio_sq = Some(value);
                s.kappa0 = None;
            }
            SweepParam::OmegaA => {
                s.omega_a = Some(value);
                s.detuning = None;
            }
            SweepParam::Detuning => {
                s.detuning = Some(value);
                s.omega_a = None;
            }
            SweepParam::GammaLoss => s.gamma_loss = value,
            SweepParam::IntrinsicLoss => s.intrinsic_loss = value,
        }
        s.sweep_param = None;
        s.sweep_values = None;
        s
    }

    /// All parameters on one line, for CSV comment lines.
    pub fn describe(&self) -> String {
        format!(
            "scenario={} kind={} kappa={} kappa0={} omega_a={} gamma_loss={} gain={} intrinsic_loss={} loss_placement={:?}",
            self.name,
            self.kind.label(),
            self.kappa,
            self.kappa0(),
            self.omega_a(),
            self.gamma_loss,
            self.gain,
            self.intrinsic_loss,
            self.loss_placement
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "name = \"x\"\nkind = \"decay\"\nkappa0 = 0.2\n";

    #[test]
    fn minimal_file_parses_with_defaults() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.kappa, 1.0);
        assert_eq!(s.omega_a(), 0.0);
        assert_eq!(s.loss_placement, Placement::Global);
        assert!(s.boundary_guard);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = Scenario::parse(&format!("{BASE}kapa = 2.0\n")).unwrap_err();
        assert!(matches!(e, CliError::Config(ref m) if m.contains("kapa")));
    }

    #[test]
    fn alternative_spellings_are_exclusive() {
        assert!(Scenario::parse(&format!("{BASE}ratio_sq = 0.5\n")).is_err());
        let s = Scenario::parse("name = \"x\"\nkind = \"regime_report\"\nratio_sq = 0.8\ndetuning = 0.18\n").unwrap();
        assert!((s.kappa0() - 0.8f64.sqrt()).abs() < 1e-15);
        assert!((s.omega_a() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn negative_rates_are_rejected() {
        assert!(Scenario::parse(&format!("{BASE}gamma_loss = -0.1\n")).is_err());
    }
}
