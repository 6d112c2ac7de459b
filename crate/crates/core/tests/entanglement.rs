use approx::assert_abs_diff_eq;
use noon_core::dense::{embed_in_product_basis, DenseHermitian};
use noon_core::entanglement::{
    dense_min_eigenvalue, dense_pt_min_eigenvalue, min_pt_eigenvalue, partial_transpose_dense,
};
use noon_core::test_util::{kron, random_density_matrix, random_state};
use noon_core::{Complex64, NoisyNoonState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_form_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let s = random_state(&mut rng, 8);
        let closed = min_pt_eigenvalue(&s).tau;
        let dense = dense_pt_min_eigenvalue(&s).unwrap();
        assert!((closed - dense).abs() < 1e-10, "cutoff {}: {closed} vs {dense}", s.cutoff());
    }
}

#[test]
fn pt_is_trace_preserving_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let s = random_state(&mut rng, 4);
        let n = s.cutoff();
        let full = embed_in_product_basis(&s.to_dense(), n).unwrap();
        let pt = partial_transpose_dense(&full, (n + 1, n + 1)).unwrap();
        assert_abs_diff_eq!(pt.trace(), full.trace(), epsilon = 1e-14);
        let back = partial_transpose_dense(&pt, (n + 1, n + 1)).unwrap();
        assert!(back.max_abs_diff(&full) == 0.0);
    }
}

#[test]
fn product_states_stay_positive_under_pt() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (da, db) in [(2, 2), (2, 3), (3, 3), (4, 2)] {
        for _ in 0..5 {
            let a = random_density_matrix(&mut rng, da);
            let b = random_density_matrix(&mut rng, db);
            let m = DenseHermitian::from_rows(da * db, kron(&a, da, &b, db)).unwrap();
            let pt = partial_transpose_dense(&m, (da, db)).unwrap();
            assert!(dense_min_eigenvalue(&pt).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn vacuum_mixture_endpoints_and_sign() {
    assert_eq!(min_pt_eigenvalue(&NoisyNoonState::vacuum_mix(0.0, 2).unwrap()).tau, 0.0);
    assert_abs_diff_eq!(
        min_pt_eigenvalue(&NoisyNoonState::vacuum_mix(1.0, 2).unwrap()).tau,
        -0.5,
        epsilon = 1e-15
    );
    let mut prev = 0.0;
    for i in 1..=1000 {
        let p = i as f64 / 1000.0;
        let r = min_pt_eigenvalue(&NoisyNoonState::vacuum_mix(p, 4).unwrap());
        assert!(r.entangled && r.tau < 0.0);
        assert!(r.tau < prev);
        // continuity: increments shrink with the step
        assert!((r.tau - prev).abs() < 2e-3);
        prev = r.tau;
    }
}

#[test]
fn separable_iff_no_coherence() {
    let s = NoisyNoonState::new(0.2, vec![0.1, 0.3], vec![0.25, 0.15], vec![Complex64::new(0.0, 0.0); 2])
        .unwrap();
    let r = min_pt_eigenvalue(&s);
    assert_eq!(r.tau, 0.0);
    assert!(!r.entangled);
    assert!(dense_pt_min_eigenvalue(&s).unwrap().abs() < 1e-14);
}

fn scaled(s: &NoisyNoonState, f: &[f64]) -> NoisyNoonState {
    let coh = s.coh_ladder().iter().zip(f).map(|(c, x)| c * x).collect();
    NoisyNoonState::new(s.vac(), s.diag_a_ladder().to_vec(), s.diag_b_ladder().to_vec(), coh).unwrap()
}

proptest! {
    #[test]
    fn tau_monotone_in_coherence_moduli(seed in any::<u64>(), idx in 0usize..8, lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
        let s = random_state(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let i = idx % s.cutoff();
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut f_lo = vec![1.0; s.cutoff()];
        let mut f_hi = f_lo.clone();
        f_lo[i] = lo;
        f_hi[i] = hi;
        let t_lo = min_pt_eigenvalue(&scaled(&s, &f_lo)).tau;
        let t_hi = min_pt_eigenvalue(&scaled(&s, &f_hi)).tau;
        prop_assert!(t_hi <= t_lo);
        prop_assert!(t_lo <= 0.0);
    }

    #[test]
    fn entangled_iff_some_coherence(seed in any::<u64>()) {
        let s = random_state(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let r = min_pt_eigenvalue(&s);
        prop_assert_eq!(r.tau < 0.0, s.coherence_norm2() > 0.0);
    }
}
