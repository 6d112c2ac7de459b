//! Phase estimation with the `Â_M = |0,M⟩⟨M,0| + |M,0⟩⟨0,M|` observable.
//!
//! Sign convention: the interferometer phase acts on mode 2 so that
//! `⟨Â_M⟩(φ) = 2 Re(e^{iφM} ρ_{0M,M0})`, with `ρ_{0M,M0} = conj(coh(M))`.
//! This is the same as measuring `Â_M` on
//! [`apply_phase_shift`](crate::channels::apply_phase_shift)`(ρ, φ)`.
//!
//! Error propagation gives
//!
//! ```text
//! Δφ = (1/M) sqrt[(S - (2 Re w)²) / (2 Im w)²],   w = e^{iφM} ρ_{0M,M0},
//! ```
//!
//! with `S = ρ_{M0,M0} + ρ_{0M,0M}`. Writing `w = r e^{iϑ}` this is
//! `f² = 1 + (S - 4r²)/(4r² sin²ϑ)`, minimal at `sin²ϑ = 1` where
//! `Δφ_min = √S / (2rM)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, NoisyNoonState, Result};

/// `|Im w| / |w|` below which a phase counts as insensitive.
pub const PHASE_INSENSITIVE_TOL: f64 = 1e-12;

/// Relative margin by which `|coh|²` must exceed `S/(4M)`; keeps the
/// boundary `p_M = 1/M` out of the supersensitive set despite rounding.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Standard quantum limit `1/√M`.
pub fn sql(m: usize) -> f64 {
    1.0 / (m as f64).sqrt()
}

/// Heisenberg limit `1/M`.
pub fn heisenberg_limit(m: usize) -> f64 {
    1.0 / m as f64
}

// ρ_{0M,M0}
fn reverse_coherence(state: &NoisyNoonState, m: usize) -> Complex64 {
    state.coh(m).conj()
}

fn populations(state: &NoisyNoonState, m: usize) -> f64 {
    state.diag_a(m) + state.diag_b(m)
}

/// `⟨Â_M⟩` at phase `phi`.
pub fn expectation_a(state: &NoisyNoonState, m: usize, phi: f64) -> Result<f64> {
    state.check_order(m)?;
    let w = Complex64::from_polar(1.0, phi * m as f64) * reverse_coherence(state, m);
    Ok(2.0 * w.re)
}

/// Phase-dependent estimation error `Δφ(φ)` at order `M`.
pub fn phase_error(state: &NoisyNoonState, m: usize, phi: f64) -> Result<f64> {
    state.check_order(m)?;
    let z = reverse_coherence(state, m);
    let w = Complex64::from_polar(1.0, phi * m as f64) * z;
    if z.norm() == 0.0 || w.im.abs() <= PHASE_INSENSITIVE_TOL * z.norm() {
        return Err(Error::PhaseInsensitive { m, phi });
    }
    let var = (populations(state, m) - 4.0 * w.re * w.re).max(0.0);
    let slope = 2.0 * w.im;
    Ok((var / (slope * slope)).sqrt() / m as f64)
}

/// `(Δφ_min, φ*)`, with `φ*` reduced into `[0, π/M)`.
pub fn min_phase_error(state: &NoisyNoonState, m: usize) -> Result<(f64, f64)> {
    state.check_order(m)?;
    let z = reverse_coherence(state, m);
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::NoPhaseSensitivity(m));
    }
    let mf = m as f64;
    let dphi = populations(state, m).sqrt() / (2.0 * r * mf);
    // φM + arg z = π/2 (mod π)
    let phi_star = ((0.5 * PI - z.arg()) / mf).rem_euclid(PI / mf);
    Ok((dphi, phi_star))
}

/// Whether some phase beats the standard quantum limit at order `M`:
/// `|ρ_{0M,M0}|² > S/(4M)`.
pub fn supersensitivity_condition(state: &NoisyNoonState, m: usize) -> bool {
    if m == 0 {
        return false;
    }
    let r2 = state.coh(m).norm_sqr();
    let bound = populations(state, m) / (4.0 * m as f64);
    r2 - bound > BOUNDARY_TOL * bound
}

pub fn supersensitivity_omega(state: &NoisyNoonState, m: usize) -> Option<f64> {
    if m < 2 {
        return None;
    }
    let r2 = state.coh(m).norm_sqr();
    if r2 == 0.0 {
        return None;
    }
    let excess = (populations(state, m) - 4.0 * r2).max(0.0);
    Some((excess / (4.0 * r2 * (m as f64 - 1.0))).sqrt())
}

/// Phase window `(lo, hi)` in which `Δφ < 1/√M`, repeating with period
/// `π/M`. `lo` lies in `[0, π/M)`; `hi` may exceed `π/M`.
///
/// `M = 1` never beats the standard quantum limit for a valid state
/// (`S ≥ 4r²`), so the window is absent unless the condition holds.
pub fn supersensitivity_interval(state: &NoisyNoonState, m: usize) -> Result<Option<(f64, f64)>> {
    state.check_order(m)?;
    let mf = m as f64;
    let period = PI / mf;
    let arg = reverse_coherence(state, m).arg();
    if !supersensitivity_condition(state, m) {
        return Ok(None);
    }
    if m == 1 {
        let lo = (-arg).rem_euclid(period);
        return Ok(Some((lo, lo + period)));
    }
    let omega = supersensitivity_omega(state, m).expect("condition implies r > 0");
    assert!(omega < 1.0, "ω = {omega} ≥ 1 while the supersensitivity condition holds");
    let edge = omega.asin();
    let lo = ((edge - arg) / mf).rem_euclid(period);
    Ok(Some((lo, lo + (PI - 2.0 * edge) / mf)))
}

/// Closed-form error for a N00N state through equal constant loss
/// `κ = θ`; unequal losses must go through the channel and
/// [`phase_error`].
pub fn constant_loss_error(kappa: f64, theta: f64, m: usize, phi: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::param("M", "must be ≥ 1"));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::param("kappa", format!("must lie in (0, 1], got {kappa}")));
    }
    if (kappa - theta).abs() > 1e-12 {
        return Err(Error::param(
            "theta",
            "closed form requires kappa = theta; apply the loss channel and use phase_error",
        ));
    }
    let t = (kappa * theta).sqrt().powi(m as i32);
    let (s, c) = (phi * m as f64).sin_cos();
    if s.abs() <= PHASE_INSENSITIVE_TOL {
        return Err(Error::PhaseInsensitive { m, phi });
    }
    Ok((((1.0 - t * c * c) / (t * s * s)).max(0.0)).sqrt() / m as f64)
}

/// `Δφ_min(M) = (κθ)^{-M/4} / M` for a N00N state under constant loss.
pub fn lossy_min_error(kappa: f64, theta: f64, m: usize) -> f64 {
    (kappa * theta).powf(-(m as f64) / 4.0) / m as f64
}

/// Integer `M` minimizing [`lossy_min_error`], with that minimum.
pub fn optimal_m(kappa: f64, theta: f64) -> Result<(usize, f64)> {
    let prod = kappa * theta;
    if !(prod > 0.0 && prod < 1.0) {
        return Err(Error::param(
            "kappa*theta",
            format!("must lie in (0, 1) for a finite optimum, got {prod}"),
        ));
    }
    let continuous = -2.0 / prod.sqrt().ln();
    let lo = (continuous.floor() as usize).max(1);
    let best = [lo, lo + 1]
        .into_iter()
        .map(|m| (m, lossy_min_error(kappa, theta, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two candidates");
    Ok(best)
}

/// Gaussian phase width at which `|λ_M|² = e^{-δ²M²}` drops to `1/M`,
/// i.e. `δ* = √(ln M)/M`.
pub fn dephasing_threshold(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::param("M", "threshold exists only for M ≥ 2"));
    }
    let mf = m as f64;
    Ok(mf.ln().sqrt() / mf)
}

/// The alternative bound `ln(M)/M`, which does not coincide with the
/// `|λ|² = 1/M` crossing; kept so outputs can report both.
pub fn dephasing_bound_ln_over_m(m: usize) -> f64 {
    let mf = m as f64;
    mf.ln() / mf
}

/// `Δφ` over a phase grid plus its summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseErrorProfile {
    pub m: usize,
    pub phi_grid: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Grid phases where `Δφ` is undefined.
    pub singular: Vec<f64>,
    pub dphi_min: Option<f64>,
    pub phi_star: Option<f64>,
    pub sql: f64,
    pub hl: f64,
    pub interval: Option<(f64, f64)>,
    pub condition: bool,
}

pub fn phase_error_profile(
    state: &NoisyNoonState,
    m: usize,
    phis: &[f64],
) -> Result<PhaseErrorProfile> {
    state.check_order(m)?;
    let mut phi_grid = Vec::with_capacity(phis.len());
    let mut dphi = Vec::with_capacity(phis.len());
    let mut singular = Vec::new();
    for &phi in phis {
        match phase_error(state, m, phi) {
            Ok(d) => {
                phi_grid.push(phi);
                dphi.push(d);
            }
            Err(Error::PhaseInsensitive { .. }) => singular.push(phi),
            Err(e) => return Err(e),
        }
    }
    let (dphi_min, phi_star) = match min_phase_error(state, m) {
        Ok((d, p)) => (Some(d), Some(p)),
        Err(Error::NoPhaseSensitivity(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(PhaseErrorProfile {
        m,
        phi_grid,
        dphi,
        singular,
        dphi_min,
        phi_star,
        sql: sql(m),
        hl: heisenberg_limit(m),
        interval: supersensitivity_interval(state, m)?,
        condition: supersensitivity_condition(state, m),
    })
}
