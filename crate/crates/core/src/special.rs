//! Special functions: exponentially scaled modified Bessel functions and
//! binomial weights.

use statrs::function::gamma::ln_gamma;

/// Switch point between the power series and the large-argument expansion.
const SERIES_LIMIT: f64 = 30.0;

/// `e^{-x} I0(x)` for `x ≥ 0`.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        bessel_series(0, x) * (-x).exp()
    } else {
        bessel_asymptotic(0, x)
    }
}

/// `e^{-x} I1(x)` for `x ≥ 0`.
pub fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        bessel_series(1, ax) * (-ax).exp()
    } else {
        bessel_asymptotic(1, ax)
    };
    v.copysign(x)
}

// I_n(x) = (x/2)^n Σ_k (x²/4)^k / (k! (k+n)!)
fn bessel_series(order: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    for j in 1..=order {
        term *= 0.5 * x / f64::from(j);
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + f64::from(order)));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    sum
}

// e^{-x} I_n(x) ~ (2πx)^{-1/2} Σ_k (-1)^k Π_{j≤k} (4n² - (2j-1)²) / (k! (8x)^k)
fn bessel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = f64::from(k);
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Natural log of the binomial coefficient `C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(f64::from(n) + 1.0) - ln_gamma(f64::from(k) + 1.0) - ln_gamma(f64::from(n - k) + 1.0)
}

/// Binomial coefficient in floating point; exact product form up to n = 20,
/// log-gamma above.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 20 {
        let k = k.min(n - k);
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * u64::from(n - i) / u64::from(i + 1);
        }
        c as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// Binomial probability `C(n,k) p^k (1-p)^(n-k)` with exact handling of
/// `p ∈ {0, 1}`.
pub fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if n <= 20 {
        binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    } else {
        (ln_binomial(n, k) + f64::from(k) * p.ln() + f64::from(n - k) * (-p).ln_1p()).exp()
    }
}
