use noon_core::atmosphere::{
    derive_weibull, moment, pdtc_cdf, pdtc_density, sample_transmission, sample_transmissions,
    Aperture, BeamParams, WeibullParams, DEFAULT_WAVELENGTH,
};
use noon_core::test_util::{mean_and_se, pdtc_moment_by_density};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn erlangen(z: f64) -> BeamParams {
    BeamParams {
        w0: 0.98e-3,
        wavelength: DEFAULT_WAVELENGTH,
        cn2: 1e-17,
        aperture: Aperture::MatchBeam,
        distance: z,
    }
}

fn strong() -> WeibullParams {
    WeibullParams::new(0.95, 2.5, 0.03, 4e-4, 0.05).unwrap()
}

fn weak_shape() -> WeibullParams {
    WeibullParams::new(0.9, 1.2, 0.02, 2.5e-4, 0.04).unwrap()
}

fn density_moment(wp: &WeibullParams, n: i32, tol: f64) -> f64 {
    pdtc_moment_by_density(wp, n, tol)
}

fn normalization(wp: &WeibullParams) -> f64 {
    density_moment(wp, 0, 1e-10)
}

#[test]
fn matched_aperture_transmission_ceiling() {
    let wp = derive_weibull(&erlangen(200.0)).unwrap();
    let want = (1.0 - (-2.0f64).exp()).sqrt();
    assert!((wp.t0 - want).abs() < 1e-15);
    assert!((wp.t0 - 0.92987).abs() < 5e-6);
    // ζ and S from the table values of e^{-4} I_{0,1}(4)
    let (i0e4, i1e4) = (0.207001921223986697895, 0.178750839502435327014);
    let denom = 1.0 - i0e4;
    let log_term = (2.0 * want * want / denom).ln();
    let zeta = 8.0 * i1e4 / denom / log_term;
    assert!((wp.zeta - zeta).abs() < 1e-12 * zeta);
    assert!((wp.s - wp.w * log_term.powf(-1.0 / zeta)).abs() < 1e-12 * wp.s);
}

#[test]
fn beam_wander_variance_from_paper_parameters() {
    let wp = derive_weibull(&erlangen(200.0)).unwrap();
    let want = 1.919 * 1e-17 * 200f64.powi(3) * (1.96e-3f64).powf(-1.0 / 3.0);
    assert!((wp.sigma2 - want).abs() < 1e-14 * want);
    let rayleigh = 200.0 * DEFAULT_WAVELENGTH / (std::f64::consts::PI * 0.98e-3 * 0.98e-3);
    assert!((wp.w - 0.98e-3 * (1.0 + rayleigh * rayleigh).sqrt()).abs() < 1e-15);
}

#[test]
fn short_link_limit() {
    let wp = derive_weibull(&erlangen(1e-6)).unwrap();
    assert!((wp.w - 0.98e-3).abs() < 1e-12);
    assert!(wp.sigma2 < 1e-30);
    assert!((moment(&wp, 1).unwrap() - wp.t0).abs() < 1e-12);
}

#[test]
fn density_normalizes() {
    for wp in [strong(), weak_shape(), derive_weibull(&erlangen(200.0)).unwrap(), derive_weibull(&erlangen(4000.0)).unwrap()] {
        let total = normalization(&wp);
        assert!((total - 1.0).abs() < 1e-6, "{wp:?}: {total}");
    }
}

#[test]
fn density_support_and_sign() {
    let wp = strong();
    assert_eq!(pdtc_density(&wp, wp.t0 * 1.001), 0.0);
    assert_eq!(pdtc_density(&wp, -0.1), 0.0);
    assert_eq!(pdtc_density(&wp, 0.0), 0.0);
    for i in 0..10_000 {
        let t = wp.t0 * i as f64 / 10_000.0;
        assert!(pdtc_density(&wp, t) >= 0.0);
    }
}

#[test]
fn moments_are_normalized_monotone_and_convex() {
    for wp in [strong(), weak_shape(), derive_weibull(&erlangen(1000.0)).unwrap()] {
        assert_eq!(moment(&wp, 0).unwrap(), 1.0);
        let mu: Vec<f64> = (0..=16).map(|n| moment(&wp, n).unwrap()).collect();
        for n in 1..=16 {
            assert!(mu[n] <= mu[n - 1]);
            assert!((0.0..=1.0).contains(&mu[n]));
        }
        for n in 1..=8 {
            assert!(mu[2 * n] >= mu[n] * mu[n]);
        }
    }
}

#[test]
fn quadrature_moments_match_independent_integration() {
    // E[T^n] = ∫ T^n dF(T), via the same log-space oracle as the normalization
    for wp in [strong(), weak_shape()] {
        for n in [1, 2, 3, 4, 8] {
            let oracle = density_moment(&wp, n, 1e-13);
            let q = moment(&wp, n as u32).unwrap();
            assert!((q - oracle).abs() < 1e-9 * oracle, "n={n}: {q} vs {oracle}");
        }
    }
}

#[test]
fn sampler_limits() {
    let wp = strong();
    assert!((sample_transmission(&wp, 1.0 - 1e-15) - wp.t0).abs() < 1e-6);
    assert!(sample_transmission(&wp, 1e-300) < wp.t0);
}

fn mc_moment(samples: &[f64], n: i32) -> (f64, f64) {
    let powers: Vec<f64> = samples.iter().map(|t| t.powi(n)).collect();
    mean_and_se(&powers)
}

#[test]
fn monte_carlo_moments_within_four_standard_errors() {
    let cases = [
        strong(),
        weak_shape(),
        derive_weibull(&erlangen(200.0)).unwrap(),
        derive_weibull(&erlangen(4000.0)).unwrap(),
    ];
    for (i, wp) in cases.iter().enumerate() {
        let samples = sample_transmissions(wp, 1_000_000, &mut ChaCha8Rng::seed_from_u64(100 + i as u64));
        for n in [1, 2, 4, 8] {
            let (mean, se) = mc_moment(&samples, n);
            let q = moment(wp, n as u32).unwrap();
            assert!((q - mean).abs() <= 4.0 * se, "case {i} n={n}: {q} vs {mean} ± {se}");
            if n == 1 {
                assert!((q - mean).abs() <= 3.0 * se);
            }
        }
    }
}

#[test]
fn empirical_cdf_within_ks_bound() {
    for (i, wp) in [strong(), weak_shape(), derive_weibull(&erlangen(2000.0)).unwrap()].iter().enumerate() {
        let mut samples = sample_transmissions(wp, 1_000_000, &mut ChaCha8Rng::seed_from_u64(7 + i as u64));
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let ks = samples
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let f = pdtc_cdf(wp, t);
                (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "case {i}: KS = {ks}");
    }
}

#[test]
fn moments_decrease_with_distance() {
    for n in [1, 2, 4, 8] {
        let mut prev = f64::INFINITY;
        for i in 0..=78 {
            let z = 100.0 + 50.0 * i as f64;
            let m = moment(&derive_weibull(&erlangen(z)).unwrap(), n).unwrap();
            assert!(m < prev, "n={n} z={z}");
            prev = m;
        }
    }
}
