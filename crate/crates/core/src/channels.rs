//! Loss, dephasing and fluctuating-loss channels on [`NoisyNoonState`].
//!
//! Every channel here maps the noisy-N00N family into itself: coherences
//! are rescaled and populations are redistributed down the photon-number
//! ladder of their own mode.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;

use crate::special::{binomial, binomial_pmf};
use crate::{Error, NoisyNoonState, Result};

/// Above this cutoff the alternating binomial sum over moments loses too
/// many digits; fluctuating loss switches to per-entry quadrature.
pub const DIRECT_LOSS_WEIGHT_CUTOFF: usize = 50;

/// Slack on `|λ_N| ≤ 1` for numerically integrated phase densities.
const LAMBDA_TOL: f64 = 1e-12;

/// Intensity transmissions of the two modes (amplitude `√κ`, `√θ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLossSpec {
    kappa: f64,
    theta: f64,
}

impl ConstantLossSpec {
    pub fn new(kappa: f64, theta: f64) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("theta", theta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self { kappa, theta })
    }

    pub fn symmetric(kappa: f64) -> Result<Self> {
        Self::new(kappa, kappa)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

pub fn apply_constant_loss(state: &NoisyNoonState, spec: &ConstantLossSpec) -> NoisyNoonState {
    let amp = (spec.kappa * spec.theta).sqrt();
    let (vac_a, diag_a) = redistribute(state.diag_a_ladder(), |k, j| {
        Ok(binomial_pmf(k as u32, j as u32, spec.kappa))
    })
    .expect("closed-form weights are infallible");
    let (vac_b, diag_b) = redistribute(state.diag_b_ladder(), |k, j| {
        Ok(binomial_pmf(k as u32, j as u32, spec.theta))
    })
    .expect("closed-form weights are infallible");
    let coh = state
        .coh_ladder()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * amp.powi(i as i32 + 1))
        .collect();
    NoisyNoonState::from_parts_unchecked(state.vac() + vac_a + vac_b, diag_a, diag_b, coh)
}

/// Pushes each population at level `k` down to levels `j ≤ k` with weight
/// `w(k, j)`; returns the vacuum share and the new ladder.
fn redistribute(
    ladder: &[f64],
    weight: impl Fn(usize, usize) -> Result<f64>,
) -> Result<(f64, Vec<f64>)> {
    let mut out = vec![0.0; ladder.len()];
    let mut vac = 0.0;
    for (idx, &pop) in ladder.iter().enumerate() {
        if pop == 0.0 {
            continue;
        }
        let k = idx + 1;
        vac += pop * weight(k, 0)?;
        for j in 1..=k {
            out[j - 1] += pop * weight(k, j)?;
        }
    }
    Ok((vac, out))
}

/// Multiplies each coherence `ρ_{N0,0N}` by `λ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSpec {
    kind: DephasingKind,
}

#[derive(Debug, Clone, PartialEq)]
enum DephasingKind {
    Gaussian { delta: f64, phi0: f64 },
    /// λ_1, λ_2, ...
    Table(Vec<Complex64>),
}

impl DephasingSpec {
    /// Wrapped Gaussian phase noise: `λ_N = e^{iφ0 N} e^{-δ²N²/2}`.
    pub fn gaussian(delta: f64, phi0: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::param("delta", format!("must be ≥ 0, got {delta}")));
        }
        if !phi0.is_finite() {
            return Err(Error::param("phi0", "must be finite"));
        }
        Ok(Self {
            kind: DephasingKind::Gaussian { delta, phi0 },
        })
    }

    /// Explicit `λ_1..λ_K`; orders above `K` are rejected when applied.
    pub fn from_table(lambdas: Vec<Complex64>) -> Result<Self> {
        if let Some((i, l)) = lambdas
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.norm() <= 1.0 + LAMBDA_TOL))
        {
            return Err(Error::param(
                "lambda",
                format!("|λ_{}| = {} exceeds 1", i + 1, l.norm()),
            ));
        }
        Ok(Self {
            kind: DephasingKind::Table(lambdas),
        })
    }

    /// Uniform phase: all coherences vanish.
    pub fn complete(max_n: usize) -> Self {
        Self {
            kind: DephasingKind::Table(vec![Complex64::new(0.0, 0.0); max_n]),
        }
    }

    /// `λ_N = ∫₀^{2π} p(φ) e^{iφN} dφ` for `N ≤ max_n`, by the periodic
    /// trapezoid rule on `points` nodes.
    pub fn from_phase_density(
        density: impl Fn(f64) -> f64,
        max_n: usize,
        points: usize,
    ) -> Result<Self> {
        if points < 2 * max_n + 1 {
            return Err(Error::param(
                "points",
                format!("need at least {} nodes for order {max_n}", 2 * max_n + 1),
            ));
        }
        let h = TAU / points as f64;
        let samples: Vec<f64> = (0..points).map(|i| density(i as f64 * h)).collect();
        if samples.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::param("density", "must be finite and nonnegative"));
        }
        let lambdas = (1..=max_n)
            .map(|n| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p * Complex64::from_polar(1.0, i as f64 * h * n as f64))
                    .sum::<Complex64>()
                    * h
            })
            .collect();
        Self::from_table(lambdas)
    }

    pub fn lambda(&self, n: usize) -> Result<Complex64> {
        match &self.kind {
            DephasingKind::Gaussian { delta, phi0 } => {
                let nf = n as f64;
                Ok(Complex64::from_polar(
                    (-0.5 * delta * delta * nf * nf).exp(),
                    phi0 * nf,
                ))
            }
            DephasingKind::Table(t) => {
                if n == 0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                t.get(n - 1).copied().ok_or(Error::CutoffExceeded {
                    requested: n,
                    cutoff: t.len(),
                })
            }
        }
    }
}

/// Same as [`DephasingSpec::gaussian`].
pub fn gaussian_dephasing_spec(delta: f64, phi0: f64) -> Result<DephasingSpec> {
    DephasingSpec::gaussian(delta, phi0)
}

/// Wrapped Gaussian density on `[0, 2π)`, summing images `|k| ≤ terms`.
pub fn wrapped_gaussian_density(phi: f64, delta: f64, phi0: f64, terms: i32) -> f64 {
    let norm = 1.0 / (TAU * delta * delta).sqrt();
    (-terms..=terms)
        .map(|k| {
            let x = phi - phi0 + TAU * f64::from(k);
            norm * (-x * x / (2.0 * delta * delta)).exp()
        })
        .sum()
}

pub fn apply_dephasing(state: &NoisyNoonState, spec: &DephasingSpec) -> Result<NoisyNoonState> {
    let lambdas = (1..=state.cutoff())
        .map(|n| spec.lambda(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(state.map_coherences(|n, c| lambdas[n - 1] * c))
}

/// Interferometer phase on mode 2: `ρ_{N0,0N} → e^{-iφN} ρ_{N0,0N}`.
pub fn apply_phase_shift(state: &NoisyNoonState, phi: f64) -> NoisyNoonState {
    state.map_coherences(|n, c| c * Complex64::from_polar(1.0, -phi * n as f64))
}

/// Moments of a random amplitude transmission `t ∈ [0, 1]`.
///
/// Implementations may memoize internally but must be callable from many
/// threads without external coordination.
pub trait MomentProvider: Send + Sync + fmt::Debug {
    /// `E[t^n]`.
    fn moment(&self, n: u32) -> Result<f64>;

    /// `E[κ^j (1-κ)^r]` with `κ = t²`, evaluated without going through
    /// the moment sequence. Providers lacking a direct route fall back to
    /// the alternating sum.
    fn loss_weight_direct(&self, j: u32, r: u32) -> Result<f64> {
        loss_weight_from_moments(self, j, r)
    }
}

/// `E[κ^j (1-κ)^r] = Σ_m C(r,m) (-1)^m E[t^{2(j+m)}]`.
pub fn loss_weight_from_moments<P: MomentProvider + ?Sized>(p: &P, j: u32, r: u32) -> Result<f64> {
    let mut acc = 0.0;
    for m in 0..=r {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(r, m) * p.moment(2 * (j + m))?;
    }
    Ok(acc)
}

/// A discrete transmission distribution: delta, mixtures, or empirical
/// samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMoments {
    points: Vec<(f64, f64)>,
}

impl DiscreteMoments {
    /// `(t, weight)` pairs; weights must be nonnegative and sum to one.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "empty distribution"));
        }
        for &(t, w) in &points {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::param("t", format!("transmission {t} outside [0, 1]")));
            }
            if !(w >= 0.0) {
                return Err(Error::param("weight", format!("negative weight {w}")));
            }
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("weight", format!("weights sum to {total}")));
        }
        Ok(Self { points })
    }

    /// Deterministic transmission `t0`.
    pub fn delta(t0: f64) -> Result<Self> {
        Self::new(vec![(t0, 1.0)])
    }

    /// Empirical distribution of equally weighted samples.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let w = 1.0 / samples.len() as f64;
        Self::new(samples.iter().map(|&t| (t, w)).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

impl MomentProvider for DiscreteMoments {
    fn moment(&self, n: u32) -> Result<f64> {
        Ok(self.points.iter().map(|&(t, w)| w * t.powi(n as i32)).sum())
    }

    fn loss_weight_direct(&self, j: u32, r: u32) -> Result<f64> {
        Ok(self
            .points
            .iter()
            .map(|&(t, w)| {
                let k = t * t;
                w * k.powi(j as i32) * (1.0 - k).powi(r as i32)
            })
            .sum())
    }
}

/// How the two modes share the turbulent medium.
#[derive(Debug, Clone)]
pub enum Geometry {
    /// Modes travel in opposite directions through independent media;
    /// the joint distribution factorizes.
    CounterPropagation {
        arm_a: Arc<dyn MomentProvider>,
        arm_b: Arc<dyn MomentProvider>,
    },
    /// Both modes see the same realization, `√κ = √θ`.
    CoPropagation { arm: Arc<dyn MomentProvider> },
}

#[derive(Debug, Clone)]
pub struct FluctuatingLossSpec {
    pub geometry: Geometry,
}

impl FluctuatingLossSpec {
    pub fn counter(arm_a: Arc<dyn MomentProvider>, arm_b: Arc<dyn MomentProvider>) -> Self {
        Self {
            geometry: Geometry::CounterPropagation { arm_a, arm_b },
        }
    }

    pub fn co(arm: Arc<dyn MomentProvider>) -> Self {
        Self {
            geometry: Geometry::CoPropagation { arm },
        }
    }

    /// Factor multiplying `ρ_{N0,0N}`: `E[(√κθ)^N]`.
    pub fn coherence_scale(&self, n: u32) -> Result<f64> {
        match &self.geometry {
            Geometry::CounterPropagation { arm_a, arm_b } => {
                Ok(arm_a.moment(n)? * arm_b.moment(n)?)
            }
            Geometry::CoPropagation { arm } => arm.moment(2 * n),
        }
    }

    fn arms(&self) -> (&dyn MomentProvider, &dyn MomentProvider) {
        match &self.geometry {
            Geometry::CounterPropagation { arm_a, arm_b } => (arm_a.as_ref(), arm_b.as_ref()),
            Geometry::CoPropagation { arm } => (arm.as_ref(), arm.as_ref()),
        }
    }
}

/// Average of [`apply_constant_loss`] over the transmission distribution.
///
/// Every entry of the constant-loss output is a polynomial in `√κ`, `√θ`,
/// so averaging only needs moments. Populations of mode 1 involve `κ`
/// alone and those of mode 2 `θ` alone, so even the co-propagating case
/// needs only single-arm expectations.
pub fn apply_fluctuating_loss(
    state: &NoisyNoonState,
    spec: &FluctuatingLossSpec,
) -> Result<NoisyNoonState> {
    let direct = state.cutoff() > DIRECT_LOSS_WEIGHT_CUTOFF;
    if direct {
        warn!(
            "cutoff {} > {}: using per-entry quadrature for loss weights",
            state.cutoff(),
            DIRECT_LOSS_WEIGHT_CUTOFF
        );
    }
    let (arm_a, arm_b) = spec.arms();
    let weight = |arm: &dyn MomentProvider, k: usize, j: usize| -> Result<f64> {
        let (j32, r32) = (j as u32, (k - j) as u32);
        let e = if direct {
            arm.loss_weight_direct(j32, r32)?
        } else {
            loss_weight_from_moments(arm, j32, r32)?
        };
        Ok(binomial(k as u32, j as u32) * e)
    };
    let (vac_a, diag_a) = redistribute(state.diag_a_ladder(), |k, j| weight(arm_a, k, j))?;
    let (vac_b, diag_b) = redistribute(state.diag_b_ladder(), |k, j| weight(arm_b, k, j))?;
    let scales = (1..=state.cutoff())
        .map(|n| spec.coherence_scale(n as u32))
        .collect::<Result<Vec<_>>>()?;
    let coh = state
        .coh_ladder()
        .iter()
        .zip(&scales)
        .map(|(&c, &s)| c * s)
        .collect();
    Ok(NoisyNoonState::from_parts_unchecked(
        state.vac() + vac_a + vac_b,
        diag_a,
        diag_b,
        coh,
    ))
}
