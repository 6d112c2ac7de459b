//! Declarative sweep configuration, read from a single JSON document.

use std::path::{Path, PathBuf};

use noon_core::atmosphere::BeamParams;
use noon_core::channels::{
    apply_constant_loss, apply_dephasing, apply_fluctuating_loss, ConstantLossSpec, DephasingSpec,
    FluctuatingLossSpec,
};
use noon_core::NoisyNoonState;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// φ-sweep of Δφ for N00N/vacuum mixtures.
    #[serde(alias = "fig1")]
    MixedPhaseError,
    /// M-sweep of the minimal error under constant loss.
    #[serde(alias = "fig2")]
    LossyMinError,
    /// δ-sweep of the minimal error under Gaussian phase noise.
    #[serde(alias = "fig3")]
    DephasingMinError,
    /// p-sweep of τ and the minimal error for the vacuum mixture.
    #[serde(alias = "fig4")]
    VacuumMixCombined,
    /// Distance sweep of τ through beam-wandering turbulence.
    #[serde(alias = "fig5")]
    TurbulenceTau,
    /// φ-sweep of Δφ for an arbitrary state and channel chain.
    Custom,
}

impl Scenario {
    pub fn default_name(self) -> &'static str {
        match self {
            Scenario::MixedPhaseError => "fig1",
            Scenario::LossyMinError => "fig2",
            Scenario::DephasingMinError => "fig3",
            Scenario::VacuumMixCombined => "fig4",
            Scenario::TurbulenceTau => "fig5",
            Scenario::Custom => "custom",
        }
    }

    fn sweep_variable(self) -> &'static str {
        match self {
            Scenario::MixedPhaseError | Scenario::Custom => "phi",
            Scenario::LossyMinError => "m",
            Scenario::DephasingMinError => "delta",
            Scenario::VacuumMixCombined => "p",
            Scenario::TurbulenceTau => "distance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    PureNoon { n: usize },
    MixedNoon { weights: Vec<f64> },
    VacuumMix { p: f64, n: usize },
    Explicit { state: NoisyNoonState },
}

impl StateSpec {
    pub fn build(&self) -> Result<NoisyNoonState> {
        Ok(match self {
            StateSpec::PureNoon { n } => NoisyNoonState::pure_noon(*n)?,
            StateSpec::MixedNoon { weights } => NoisyNoonState::mixed_noon(weights)?,
            StateSpec::VacuumMix { p, n } => NoisyNoonState::vacuum_mix(*p, *n)?,
            StateSpec::Explicit { state } => {
                state.validate(noon_core::VALIDATION_TOL)?;
                state.clone()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Co,
    Counter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Loss {
        kappa: f64,
        theta: f64,
    },
    Dephase {
        delta: f64,
        #[serde(default)]
        phi0: f64,
    },
    /// Beam-wandering turbulence. For `counter`, `distance` is the
    /// separation of the two receivers and each arm has length
    /// `distance / 2`; for `co` both modes share one link of length
    /// `distance`.
    Atmosphere {
        geometry: GeometryKind,
        #[serde(flatten)]
        beam: BeamParams,
    },
}

impl ChannelSpec {
    pub fn apply(&self, state: &NoisyNoonState) -> Result<NoisyNoonState> {
        Ok(match self {
            ChannelSpec::Loss { kappa, theta } => {
                apply_constant_loss(state, &ConstantLossSpec::new(*kappa, *theta)?)
            }
            ChannelSpec::Dephase { delta, phi0 } => {
                apply_dephasing(state, &DephasingSpec::gaussian(*delta, *phi0)?)?
            }
            ChannelSpec::Atmosphere { geometry, beam } => {
                apply_fluctuating_loss(state, &turbulence_spec(*geometry, beam)?)?
            }
        })
    }
}

/// Fluctuating-loss channel for a link; see [`ChannelSpec::Atmosphere`]
/// for the distance convention.
pub fn turbulence_spec(geometry: GeometryKind, beam: &BeamParams) -> Result<FluctuatingLossSpec> {
    use noon_core::atmosphere::BeamWanderingMoments;
    use std::sync::Arc;
    Ok(match geometry {
        GeometryKind::Co => FluctuatingLossSpec::co(Arc::new(BeamWanderingMoments::from_beam(beam)?)),
        GeometryKind::Counter => {
            let arm = Arc::new(BeamWanderingMoments::from_beam(&beam.at_distance(0.5 * beam.distance))?);
            FluctuatingLossSpec::counter(arm.clone(), arm)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn linear(name: &str, start: f64, stop: f64, count: usize) -> Self {
        Self {
            name: name.into(),
            start,
            stop,
            count,
            spacing: Spacing::Linear,
        }
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.count - 1 {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => (self.start.ln() + (self.stop / self.start).ln() * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Output file stem; defaults to the scenario's figure name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelSpec>,
    pub sweep: SweepSpec,
    /// Probed interference order (and N00N photon number where the
    /// scenario builds its own state).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Weights `p_M` of the N00N component, one curve each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixtures: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Link parameters; `distance` is replaced by the sweep value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamParams>,
    /// `|τ|` below which entanglement counts as practically lost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survival_threshold: Option<f64>,
    /// Mean transmission to calibrate the wavelength against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSpec>,
    /// Monte-Carlo cross-check samples per sweep point (turbulence only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpec {
    pub target: f64,
    pub distance: f64,
    /// Wavelength search range in meters.
    pub range: (f64, f64),
}

fn require<T: Clone>(v: &Option<T>, field: &str, scenario: Scenario) -> Result<T> {
    v.clone()
        .ok_or_else(|| CliError::config(field, format!("required by scenario {scenario:?}")))
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn stem(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.scenario.default_name().to_string())
    }

    pub fn order(&self) -> Result<usize> {
        let m = require(&self.m, "m", self.scenario)?;
        if m == 0 {
            return Err(CliError::config("m", "must be ≥ 1"));
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let sw = &self.sweep;
        if !(sw.start.is_finite() && sw.stop.is_finite()) {
            return Err(CliError::config("sweep", "bounds must be finite"));
        }
        if sw.count < 2 {
            return Err(CliError::config("sweep.count", "must be ≥ 2"));
        }
        if sw.spacing == Spacing::Log && !(sw.start > 0.0 && sw.stop > 0.0) {
            return Err(CliError::config("sweep", "log spacing needs positive bounds"));
        }
        let want = self.scenario.sweep_variable();
        if sw.name != want {
            return Err(CliError::config(
                "sweep.name",
                format!("scenario {:?} sweeps `{want}`, got `{}`", self.scenario, sw.name),
            ));
        }
        let (lo, hi) = (sw.start.min(sw.stop), sw.start.max(sw.stop));
        match self.scenario {
            Scenario::MixedPhaseError => {
                let m = self.order()?;
                let mix = require(&self.mixtures, "mixtures", self.scenario)?;
                if mix.is_empty() || mix.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(CliError::config("mixtures", "need one or more weights in [0, 1]"));
                }
                if m < 1 {
                    return Err(CliError::config("m", "must be ≥ 1"));
                }
            }
            Scenario::LossyMinError => {
                for (field, v) in [("kappa", self.kappa), ("theta", self.theta)] {
                    let v = v.ok_or_else(|| CliError::config(field, "required by scenario LossyMinError"))?;
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(CliError::config(field, "must lie in (0, 1]"));
                    }
                }
                if sw.spacing != Spacing::Linear || lo < 1.0 || sw.start.fract() != 0.0 || sw.stop.fract() != 0.0 {
                    return Err(CliError::config("sweep", "M sweep needs linear spacing over integers ≥ 1"));
                }
                let ms = self.integer_orders();
                if ms.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CliError::config("sweep.count", "M grid must consist of distinct integers"));
                }
            }
            Scenario::DephasingMinError => {
                if self.order()? < 2 {
                    return Err(CliError::config("m", "dephasing threshold needs M ≥ 2"));
                }
                if lo < 0.0 {
                    return Err(CliError::config("sweep", "delta must be ≥ 0"));
                }
            }
            Scenario::VacuumMixCombined => {
                self.order()?;
                if lo < 0.0 || hi > 1.0 {
                    return Err(CliError::config("sweep", "p must lie in [0, 1]"));
                }
            }
            Scenario::TurbulenceTau => {
                self.order()?;
                let beam = require(&self.beam, "beam", self.scenario)?;
                beam.at_distance(1.0).validate()?;
                if lo <= 0.0 {
                    return Err(CliError::config("sweep", "distance must be > 0"));
                }
                let t = require(&self.survival_threshold, "survival_threshold", self.scenario)?;
                if !(t > 0.0) {
                    return Err(CliError::config("survival_threshold", "must be > 0"));
                }
                if let Some(c) = &self.calibration {
                    if !(c.target > 0.0 && c.target < 1.0 && c.distance > 0.0 && c.range.0 > 0.0 && c.range.1 > c.range.0) {
                        return Err(CliError::config("calibration", "need target in (0,1), distance > 0, 0 < lo < hi"));
                    }
                }
                if self.mc_samples == Some(0) || self.mc_samples == Some(1) {
                    return Err(CliError::config("mc_samples", "need at least 2 samples"));
                }
            }
            Scenario::Custom => {
                let state = require(&self.state, "state", self.scenario)?.build()?;
                let m = self.order()?;
                if m > state.cutoff() {
                    return Err(CliError::config(
                        "m",
                        format!("order {m} exceeds the state cutoff {}", state.cutoff()),
                    ));
                }
                for (i, ch) in self.channels.iter().enumerate() {
                    let field = format!("channels[{i}]");
                    match ch {
                        ChannelSpec::Loss { kappa, theta } => {
                            ConstantLossSpec::new(*kappa, *theta).map_err(|e| CliError::config(&field, e.to_string()))?;
                        }
                        ChannelSpec::Dephase { delta, phi0 } => {
                            DephasingSpec::gaussian(*delta, *phi0).map_err(|e| CliError::config(&field, e.to_string()))?;
                        }
                        ChannelSpec::Atmosphere { beam, .. } => {
                            beam.validate().map_err(|e| CliError::config(&field, e.to_string()))?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Sweep grid rounded to integers (M sweeps).
    pub fn integer_orders(&self) -> Vec<usize> {
        self.sweep.values().iter().map(|v| v.round() as usize).collect()
    }
}
