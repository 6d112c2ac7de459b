use noon_core::special::{bessel_i0e, bessel_i1e, binomial, binomial_pmf, ln_binomial};

fn reference_table() -> Vec<(f64, f64, f64)> {
    include_str!("data/bessel_reference.csv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.trim().parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

#[test]
fn scaled_bessel_matches_reference_table() {
    let table = reference_table();
    assert!(table.len() >= 15);
    for (x, i0, i1) in table {
        assert!(rel_err(bessel_i0e(x), i0) < 1e-12, "i0e({x}) = {} vs {i0}", bessel_i0e(x));
        assert!(rel_err(bessel_i1e(x), i1) < 1e-12, "i1e({x}) = {} vs {i1}", bessel_i1e(x));
    }
}

#[test]
fn binomials_agree_across_exact_and_log_paths() {
    // Pascal's rule builds an independent exact table up to n = 60.
    let mut row = vec![1.0f64];
    for n in 1..=60u32 {
        let mut next = vec![1.0; n as usize + 1];
        for k in 1..n as usize {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for k in 0..=n {
            let want = row[k as usize];
            assert!(rel_err(binomial(n, k), want) < 1e-12, "C({n},{k})");
            assert!((ln_binomial(n, k) - want.ln()).abs() < 1e-11);
        }
    }
}

#[test]
fn binomial_pmf_sums_to_one() {
    for &n in &[1u32, 5, 20, 21, 45, 80] {
        for &p in &[0.0, 0.03, 0.5, 0.95, 1.0] {
            let s: f64 = (0..=n).map(|k| binomial_pmf(n, k, p)).sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n} p={p} sum={s}");
        }
    }
}
