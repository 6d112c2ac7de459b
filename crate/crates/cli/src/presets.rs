//! Ready-made configurations for the five figure datasets.

use std::f64::consts::PI;

use noon_core::atmosphere::{Aperture, BeamParams, DEFAULT_WAVELENGTH};

use crate::config::{CalibrationSpec, Scenario, SweepConfig, SweepSpec};

fn base(scenario: Scenario, sweep: SweepSpec) -> SweepConfig {
    SweepConfig {
        scenario,
        name: None,
        state: None,
        channels: Vec::new(),
        sweep,
        m: None,
        mixtures: None,
        kappa: None,
        theta: None,
        beam: None,
        survival_threshold: None,
        calibration: None,
        mc_samples: None,
        seed: 0,
        output: None,
    }
}

/// Δφ(φ) at M = 2 for p_M ∈ {0.4, 0.5, 0.9}.
pub fn fig1() -> SweepConfig {
    SweepConfig {
        m: Some(2),
        mixtures: Some(vec![0.4, 0.5, 0.9]),
        ..base(Scenario::MixedPhaseError, SweepSpec::linear("phi", 0.0, PI, 1001))
    }
}

/// Δφ_min over M = 1..100 for 5 % loss in both modes.
pub fn fig2() -> SweepConfig {
    SweepConfig {
        kappa: Some(0.95),
        theta: Some(0.95),
        ..base(Scenario::LossyMinError, SweepSpec::linear("m", 1.0, 100.0, 100))
    }
}

/// Δφ_min over the Gaussian noise width for N = 3.
pub fn fig3() -> SweepConfig {
    SweepConfig {
        m: Some(3),
        ..base(Scenario::DephasingMinError, SweepSpec::linear("delta", 0.0, 0.6, 601))
    }
}

/// τ and Δφ_min for the N = 4 vacuum mixture.
pub fn fig4() -> SweepConfig {
    SweepConfig {
        m: Some(4),
        ..base(Scenario::VacuumMixCombined, SweepSpec::linear("p", 0.0, 1.0, 1001))
    }
}

/// Link parameters of the urban free-space scenario (a = W).
pub fn urban_link() -> BeamParams {
    BeamParams {
        w0: 0.98e-3,
        wavelength: DEFAULT_WAVELENGTH,
        cn2: 1e-17,
        aperture: Aperture::MatchBeam,
        distance: 200.0,
    }
}

/// τ(d) for N = 2 over 100..4000 m in both geometries.
pub fn fig5() -> SweepConfig {
    SweepConfig {
        m: Some(2),
        beam: Some(urban_link()),
        survival_threshold: Some(1e-4),
        calibration: Some(CalibrationSpec {
            target: 0.843,
            distance: 200.0,
            range: (500e-9, 1600e-9),
        }),
        ..base(Scenario::TurbulenceTau, SweepSpec::linear("distance", 100.0, 4000.0, 40))
    }
}

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

pub fn preset(name: &str) -> Option<SweepConfig> {
    match name {
        "fig1" => Some(fig1()),
        "fig2" => Some(fig2()),
        "fig3" => Some(fig3()),
        "fig4" => Some(fig4()),
        "fig5" => Some(fig5()),
        _ => None,
    }
}
