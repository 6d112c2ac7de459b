//! Beam-wandering transmission statistics.
//!
//! A Gaussian beam whose centroid jitters over a circular aperture has an
//! amplitude transmission `T ∈ [0, T0]` following the log-negative Weibull
//! law
//!
//! ```text
//! P(T) = 2S²/(σ²ζT) · (2 ln(T0/T))^{2/ζ-1} · exp[-S²/(2σ²) · (2 ln(T0/T))^{2/ζ}]
//! ```
//!
//! Writing `u = S²/(2σ²) · (2 ln(T0/T))^{2/ζ}` turns `u` into a unit
//! exponential variate, so `T = T0 exp(-(2σ²u/S²)^{ζ/2} / 2)`. Moments,
//! sampling and the CDF all go through that map.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::MomentProvider;
use crate::quadrature::{self, REL_TOL};
use crate::special::{bessel_i0e, bessel_i1e};
use crate::{Error, Result};

/// Beam-wander variance prefactor in `σ² ≈ 1.919 C_n² z³ (2W0)^{-1/3}`.
pub const BEAM_WANDER_PREFACTOR: f64 = 1.919;

/// Wavelength used when a configuration does not specify one (meters).
pub const DEFAULT_WAVELENGTH: f64 = 810e-9;

/// Receiver aperture radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ApertureDoc", into = "ApertureDoc")]
pub enum Aperture {
    /// Fixed radius in meters.
    Radius(f64),
    /// Radius equal to the beam-spot radius at the receiver.
    MatchBeam,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ApertureDoc {
    Radius(f64),
    Symbol(String),
}

impl TryFrom<ApertureDoc> for Aperture {
    type Error = String;

    fn try_from(d: ApertureDoc) -> std::result::Result<Self, String> {
        match d {
            ApertureDoc::Radius(r) => Ok(Aperture::Radius(r)),
            ApertureDoc::Symbol(s) if s == "W" => Ok(Aperture::MatchBeam),
            ApertureDoc::Symbol(s) => Err(format!("aperture must be a radius or \"W\", got {s:?}")),
        }
    }
}

impl From<Aperture> for ApertureDoc {
    fn from(a: Aperture) -> Self {
        match a {
            Aperture::Radius(r) => ApertureDoc::Radius(r),
            Aperture::MatchBeam => ApertureDoc::Symbol("W".into()),
        }
    }
}

/// Physical link parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// Beam-spot radius at the source.
    pub w0: f64,
    pub wavelength: f64,
    /// Index-of-refraction structure constant `C_n²` (m^{-2/3}).
    pub cn2: f64,
    pub aperture: Aperture,
    /// Propagation distance.
    pub distance: f64,
}

impl BeamParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("w0", self.w0),
            ("wavelength", self.wavelength),
            ("cn2", self.cn2),
            ("distance", self.distance),
        ];
        for (name, v) in checks {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Aperture::Radius(a) = self.aperture {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::param("aperture", format!("must be finite and > 0, got {a}")));
            }
        }
        Ok(())
    }

    pub fn at_distance(&self, distance: f64) -> Self {
        Self { distance, ..*self }
    }

    pub fn with_wavelength(&self, wavelength: f64) -> Self {
        Self { wavelength, ..*self }
    }
}

/// Parameters of the log-negative Weibull transmission distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    /// Maximal amplitude transmission.
    pub t0: f64,
    /// Shape ζ.
    pub zeta: f64,
    /// Scale S (meters).
    pub s: f64,
    /// Beam-centroid variance σ² (m²).
    pub sigma2: f64,
    /// Beam-spot radius at the aperture (meters).
    pub w: f64,
}

impl WeibullParams {
    pub fn new(t0: f64, zeta: f64, s: f64, sigma2: f64, w: f64) -> Result<Self> {
        let wp = Self {
            t0,
            zeta,
            s,
            sigma2,
            w,
        };
        wp.validate()?;
        Ok(wp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0 <= 1.0) {
            return Err(Error::param("t0", format!("must lie in (0, 1], got {}", self.t0)));
        }
        for (name, v) in [("zeta", self.zeta), ("s", self.s), ("sigma2", self.sigma2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `(2σ²/S²)^{ζ/2}`: the deflection `2 ln(T0/T)` equals this times
    /// `u^{ζ/2}` for a unit exponential `u`.
    pub fn stretch(&self) -> f64 {
        (2.0 * self.sigma2 / (self.s * self.s)).powf(0.5 * self.zeta)
    }

    /// Transmission as a function of the exponential variate `u`.
    pub fn transmission_at(&self, u: f64) -> f64 {
        self.t0 * (-0.5 * self.stretch() * u.powf(0.5 * self.zeta)).exp()
    }
}

fn finite_positive(v: f64, expr: &'static str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonFinite { expr })
    }
}

/// Beam-wandering distribution parameters from the link geometry.
pub fn derive_weibull(params: &BeamParams) -> Result<WeibullParams> {
    params.validate()?;
    let BeamParams {
        w0,
        wavelength,
        cn2,
        aperture,
        distance: z,
    } = *params;
    let rayleigh = z * wavelength / (PI * w0 * w0);
    let w = finite_positive(w0 * (1.0 + rayleigh * rayleigh).sqrt(), "W")?;
    let a = match aperture {
        Aperture::Radius(a) => a,
        Aperture::MatchBeam => w,
    };
    let r2 = a * a / (w * w);
    let t0_sq = finite_positive(-(-2.0 * r2).exp_m1(), "T0^2")?;
    let x = 4.0 * r2;
    // 1 - e^{-x} I0(x)
    let denom = finite_positive(1.0 - bessel_i0e(x), "1 - exp(-4a^2/W^2) I0(4a^2/W^2)")?;
    let log_term = finite_positive((2.0 * t0_sq / denom).ln(), "ln(2 T0^2 / (1 - exp(-4a^2/W^2) I0))")?;
    let zeta = finite_positive(2.0 * x * bessel_i1e(x) / denom / log_term, "zeta")?;
    let s = finite_positive(a * log_term.powf(-1.0 / zeta), "S")?;
    let sigma2 = finite_positive(
        BEAM_WANDER_PREFACTOR * cn2 * z.powi(3) * (2.0 * w0).powf(-1.0 / 3.0),
        "sigma^2",
    )?;
    WeibullParams::new(t0_sq.sqrt(), zeta, s, sigma2, w)
}

/// Density of the amplitude transmission; zero outside `(0, T0]`.
pub fn pdtc_density(wp: &WeibullParams, t: f64) -> f64 {
    if !(t > 0.0) || t > wp.t0 {
        return 0.0;
    }
    let x = 2.0 * (wp.t0 / t).ln();
    let ratio = wp.s * wp.s / wp.sigma2;
    let expo = 2.0 / wp.zeta;
    let val = 2.0 * ratio / (wp.zeta * t) * x.powf(expo - 1.0) * (-0.5 * ratio * x.powf(expo)).exp();
    if val.is_nan() {
        0.0
    } else {
        val
    }
}

/// `P(T ≤ t)`.
pub fn pdtc_cdf(wp: &WeibullParams, t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    if t >= wp.t0 {
        return 1.0;
    }
    let x = 2.0 * (wp.t0 / t).ln();
    (-0.5 * wp.s * wp.s / wp.sigma2 * x.powf(2.0 / wp.zeta)).exp()
}

/// `E[T^n]` by Gauss–Laguerre quadrature in the exponential variate.
pub fn moment(wp: &WeibullParams, n: u32) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let k = 0.5 * f64::from(n) * wp.stretch();
    let laplace = quadrature::stretched_exp_laplace(k, 0.5 * wp.zeta)?;
    Ok(wp.t0.powi(n as i32) * laplace)
}

/// `E[f(T)]` for a general bounded `f`, by exp-sinh quadrature in the
/// exponential variate.
pub fn expectation(wp: &WeibullParams, f: impl Fn(f64) -> f64) -> Result<f64> {
    quadrature::exp_sinh(|u| (-u).exp() * f(wp.transmission_at(u)), REL_TOL)
}

/// Inverse-CDF sample from a uniform deviate in `(0, 1)`.
pub fn sample_transmission(wp: &WeibullParams, u01: f64) -> f64 {
    wp.transmission_at(-u01.ln())
}

pub fn sample_transmissions<R: Rng + ?Sized>(wp: &WeibullParams, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| {
            // open interval (0, 1)
            let u: f64 = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            sample_transmission(wp, u)
        })
        .collect()
}

/// Moment provider for one beam-wandering arm; moments are memoized.
#[derive(Debug)]
pub struct BeamWanderingMoments {
    params: WeibullParams,
    memo: RwLock<HashMap<u32, f64>>,
}

impl BeamWanderingMoments {
    pub fn new(params: WeibullParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn from_beam(beam: &BeamParams) -> Result<Self> {
        Self::new(derive_weibull(beam)?)
    }

    pub fn params(&self) -> &WeibullParams {
        &self.params
    }
}

impl MomentProvider for BeamWanderingMoments {
    fn moment(&self, n: u32) -> Result<f64> {
        if let Some(&v) = self.memo.read().expect("moment memo poisoned").get(&n) {
            return Ok(v);
        }
        let v = moment(&self.params, n)?;
        self.memo.write().expect("moment memo poisoned").insert(n, v);
        Ok(v)
    }

    fn loss_weight_direct(&self, j: u32, r: u32) -> Result<f64> {
        expectation(&self.params, |t| {
            let k = t * t;
            k.powi(j as i32) * (1.0 - k).powi(r as i32)
        })
    }
}

/// Which statistic "mean transmission" refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionMeasure {
    /// `E[T]`, amplitude.
    Amplitude,
    /// `E[T²]`, intensity.
    Intensity,
}

impl TransmissionMeasure {
    pub fn evaluate(self, wp: &WeibullParams) -> Result<f64> {
        match self {
            TransmissionMeasure::Amplitude => moment(wp, 1),
            TransmissionMeasure::Intensity => moment(wp, 2),
        }
    }
}

/// Outcome of a wavelength search for a target mean transmission.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavelengthCalibration {
    pub measure: TransmissionMeasure,
    pub target: f64,
    /// Smallest and largest value of the measure seen over the range.
    pub achievable: (f64, f64),
    /// Wavelength hitting the target, if the range brackets it.
    pub wavelength: Option<f64>,
}

/// Searches `[lo, hi]` (meters) for a wavelength at which the chosen mean
/// transmission equals `target`. The range is scanned on a log grid and
/// any sign change is refined by bisection.
pub fn calibrate_wavelength(
    base: &BeamParams,
    target: f64,
    measure: TransmissionMeasure,
    lo: f64,
    hi: f64,
) -> Result<WavelengthCalibration> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::param("wavelength range", format!("invalid [{lo}, {hi}]")));
    }
    let eval = |lambda: f64| -> Result<f64> {
        measure.evaluate(&derive_weibull(&base.with_wavelength(lambda))?)
    };
    const SCAN: usize = 200;
    let grid: Vec<f64> = (0..=SCAN)
        .map(|i| lo * (hi / lo).powf(i as f64 / SCAN as f64))
        .collect();
    let values = grid.iter().map(|&l| eval(l)).collect::<Result<Vec<_>>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut wavelength = None;
    for i in 0..SCAN {
        let (fa, fb) = (values[i] - target, values[i + 1] - target);
        if fa == 0.0 {
            wavelength = Some(grid[i]);
            break;
        }
        if fa * fb < 0.0 {
            let (mut a, mut b, mut fa) = (grid[i], grid[i + 1], fa);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = eval(m)? - target;
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
                if b - a <= 1e-15 * b {
                    break;
                }
            }
            wavelength = Some(0.5 * (a + b));
            break;
        }
    }
    Ok(WavelengthCalibration {
        measure,
        target,
        achievable: (min, max),
        wavelength,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erlangen(z: f64) -> BeamParams {
        BeamParams {
            w0: 0.98e-3,
            wavelength: DEFAULT_WAVELENGTH,
            cn2: 1e-17,
            aperture: Aperture::MatchBeam,
            distance: z,
        }
    }

    #[test]
    fn t0_for_matched_aperture() {
        let wp = derive_weibull(&erlangen(200.0)).unwrap();
        // 1 - e^{-2}, independently: 0.864664716763387...
        assert!((wp.t0 * wp.t0 - 0.8646647167633873).abs() < 1e-15);
        assert!((wp.t0 - 0.92987).abs() < 5e-6);
    }

    #[test]
    fn sigma2_formula() {
        let wp = derive_weibull(&erlangen(200.0)).unwrap();
        let expected = 1.919 * 1e-17 * 200f64.powi(3) * (1.96e-3f64).powf(-1.0 / 3.0);
        assert!((wp.sigma2 - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn short_link_limit() {
        let wp = derive_weibull(&erlangen(1e-6)).unwrap();
        assert!((wp.w - 0.98e-3).abs() < 1e-12);
        assert!(wp.sigma2 < 1e-30);
        assert!((moment(&wp, 4).unwrap() - wp.t0.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn invalid_beam_params() {
        let mut b = erlangen(200.0);
        b.cn2 = 0.0;
        assert!(derive_weibull(&b).is_err());
        let mut b = erlangen(200.0);
        b.aperture = Aperture::Radius(-1.0);
        assert!(derive_weibull(&b).is_err());
    }

    #[test]
    fn vanishing_aperture_reports_failing_expression() {
        let mut b = erlangen(200.0);
        b.aperture = Aperture::Radius(1e-12);
        match derive_weibull(&b) {
            Err(Error::NonFinite { expr }) => assert!(!expr.is_empty()),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn density_outside_support() {
        let wp = derive_weibull(&erlangen(200.0)).unwrap();
        assert_eq!(pdtc_density(&wp, wp.t0 * 1.0001), 0.0);
        assert_eq!(pdtc_density(&wp, 0.0), 0.0);
        assert_eq!(pdtc_density(&wp, -0.5), 0.0);
    }

    #[test]
    fn sample_upper_limit() {
        let wp = WeibullParams::new(0.9, 2.3, 0.05, 1e-4, 0.05).unwrap();
        let t = sample_transmission(&wp, 1.0 - 1e-15);
        assert!((t - 0.9).abs() < 1e-9);
        assert!(sample_transmission(&wp, 0.5) < 0.9);
    }

    #[test]
    fn moment_zero_is_one() {
        let wp = WeibullParams::new(0.9, 2.3, 0.05, 1e-4, 0.05).unwrap();
        assert_eq!(moment(&wp, 0).unwrap(), 1.0);
    }

    #[test]
    fn aperture_json() {
        let a: Aperture = serde_json::from_str("\"W\"").unwrap();
        assert_eq!(a, Aperture::MatchBeam);
        let a: Aperture = serde_json::from_str("0.01").unwrap();
        assert_eq!(a, Aperture::Radius(0.01));
        assert!(serde_json::from_str::<Aperture>("\"X\"").is_err());
    }
}
