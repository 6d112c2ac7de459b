use approx::assert_abs_diff_eq;
use noon_core::entanglement::dense_min_eigenvalue;
use noon_core::test_util::{random_state, random_state_with_cutoff};
use noon_core::{Complex64, NoisyNoonState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_valid(s: &NoisyNoonState) {
    s.validate(1e-12).unwrap();
    assert_abs_diff_eq!(s.trace(), 1.0, epsilon = 1e-12);
}

#[test]
fn pure_noon_family() {
    for n in 1..=10 {
        let s = NoisyNoonState::pure_noon(n).unwrap();
        assert_valid(&s);
        assert_eq!(s.cutoff(), n);
        assert_eq!(s.diag_a(n), 0.5);
        assert_eq!(s.diag_b(n), 0.5);
        assert_eq!(s.coh(n), Complex64::new(0.5, 0.0));
        for i in 1..n {
            assert_eq!(s.diag_a(i), 0.0);
            assert_eq!(s.coh(i), Complex64::new(0.0, 0.0));
        }
        assert_abs_diff_eq!(s.fidelity_with_noon(n).unwrap(), 1.0, epsilon = 1e-15);
    }
    assert!(NoisyNoonState::pure_noon(0).is_err());
}

#[test]
fn mixtures_and_vacuum_mix() {
    assert_eq!(
        NoisyNoonState::mixed_noon(&[0.0, 0.0, 1.0]).unwrap(),
        NoisyNoonState::pure_noon(2).unwrap()
    );
    let s = NoisyNoonState::mixed_noon(&[0.5, 0.5]).unwrap();
    assert_eq!(s.vac(), 0.5);
    assert_eq!(s.diag_a(1), 0.25);
    assert_eq!(s.coh(1), Complex64::new(0.25, 0.0));
    assert_eq!(
        NoisyNoonState::vacuum_mix(1.0, 4).unwrap(),
        NoisyNoonState::pure_noon(4).unwrap()
    );
    let v = NoisyNoonState::vacuum_mix(0.0, 3).unwrap();
    assert_eq!(v.vac(), 1.0);
    assert_eq!(v.fidelity_with_noon(3).unwrap(), 0.0);
    let h = NoisyNoonState::vacuum_mix(0.5, 4).unwrap();
    assert_eq!(
        (h.vac(), h.diag_a(4), h.diag_b(4), h.coh(4).re),
        (0.5, 0.25, 0.25, 0.25)
    );
    assert_eq!(h, NoisyNoonState::mixed_noon(&[0.5, 0.0, 0.0, 0.0, 0.5]).unwrap());
    let m = NoisyNoonState::mixed_noon(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_abs_diff_eq!(m.fidelity_with_noon(2).unwrap(), 0.3, epsilon = 1e-15);
    assert!(m.fidelity_with_noon(4).is_err());
    assert!(NoisyNoonState::mixed_noon(&[0.5, 0.6]).is_err());
    assert!(NoisyNoonState::mixed_noon(&[1.2, -0.2]).is_err());
    assert!(NoisyNoonState::vacuum_mix(1.5, 2).is_err());
}

#[test]
fn invalid_states_rejected() {
    let c = |x: f64| Complex64::new(x, 0.0);
    assert!(NoisyNoonState::new(0.5, vec![0.25], vec![0.25], vec![c(0.3)]).is_err());
    assert!(NoisyNoonState::new(0.6, vec![0.25], vec![0.25], vec![c(0.1)]).is_err());
    assert!(NoisyNoonState::new(0.6, vec![-0.1], vec![0.5], vec![c(0.0)]).is_err());
    assert!(NoisyNoonState::new(0.5, vec![0.25], vec![0.25, 0.0], vec![c(0.1)]).is_err());
}

#[test]
fn dense_export_is_psd_with_matching_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let s = random_state(&mut rng, 6);
        let d = s.to_dense();
        assert_eq!(d.dim(), 1 + 3 * s.cutoff());
        assert_abs_diff_eq!(d.trace(), s.trace(), epsilon = 1e-14);
        assert!(dense_min_eigenvalue(&d).unwrap() >= -1e-10);
    }
    let d = NoisyNoonState::pure_noon(1).unwrap().to_dense();
    assert_eq!(d.get(1, 2), Complex64::new(0.5, 0.0));
    assert_eq!(d.get(2, 1), Complex64::new(0.5, 0.0));
    assert_eq!(d.get(1, 1).re, 0.5);
}

#[test]
fn json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for cutoff in 1..=5 {
        let s = random_state_with_cutoff(&mut rng, cutoff);
        let text = serde_json::to_string(&s).unwrap();
        let back: NoisyNoonState = serde_json::from_str(&text).unwrap();
        assert!(s.max_abs_diff(&back) <= 1e-15);
    }
}

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("nonzero mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
    })
}

proptest! {
    #[test]
    fn mixed_noon_is_linear(p in weights(6), q in weights(6), alpha in 0.0f64..1.0) {
        let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        let lhs = NoisyNoonState::mixed_noon(&mix).unwrap();
        let sp = NoisyNoonState::mixed_noon(&p).unwrap();
        let sq = NoisyNoonState::mixed_noon(&q).unwrap();
        prop_assert!((lhs.vac() - (alpha * sp.vac() + (1.0 - alpha) * sq.vac())).abs() < 1e-14);
        for i in 1..=5 {
            let want_a = alpha * sp.diag_a(i) + (1.0 - alpha) * sq.diag_a(i);
            let want_c = sp.coh(i) * alpha + sq.coh(i) * (1.0 - alpha);
            prop_assert!((lhs.diag_a(i) - want_a).abs() < 1e-14);
            prop_assert!((lhs.diag_b(i) - want_a).abs() < 1e-14);
            prop_assert!((lhs.coh(i) - want_c).norm() < 1e-14);
        }
    }

    #[test]
    fn constructors_satisfy_invariants(p in weights(9)) {
        let s = NoisyNoonState::mixed_noon(&p).unwrap();
        prop_assert!(s.validate(1e-12).is_ok());
        for i in 1..=s.cutoff() {
            prop_assert!(s.coh(i).norm_sqr() <= s.diag_a(i) * s.diag_b(i) + 1e-12);
        }
    }

    #[test]
    fn random_states_are_valid(seed in any::<u64>()) {
        let s = random_state(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        prop_assert!(s.validate(1e-12).is_ok());
    }
}
