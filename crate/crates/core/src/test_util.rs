//! Helpers for tests: random valid states and an adaptive quadrature that
//! shares no code with the library's Gauss–Laguerre path.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::atmosphere::{pdtc_density, WeibullParams};
use crate::NoisyNoonState;

/// Random valid state with the given cutoff. Populations are normalized
/// exponential draws (a flat Dirichlet); each coherence has a uniform
/// fraction of its maximal modulus `sqrt(a b)` and a uniform phase.
pub fn random_state_with_cutoff<R: Rng + ?Sized>(rng: &mut R, cutoff: usize) -> NoisyNoonState {
    let mut draw = || -> f64 { -(1.0 - rng.random::<f64>()).ln() };
    let vac = draw();
    let mut a: Vec<f64> = (0..cutoff).map(|_| draw()).collect();
    let mut b: Vec<f64> = (0..cutoff).map(|_| draw()).collect();
    let total = vac + a.iter().sum::<f64>() + b.iter().sum::<f64>();
    a.iter_mut().chain(b.iter_mut()).for_each(|x| *x /= total);
    let coh = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let frac: f64 = rng.random();
            let phase: f64 = rng.random::<f64>() * TAU;
            Complex64::from_polar(frac * (x * y).sqrt(), phase)
        })
        .collect();
    // Re-derive vac so the trace is 1 to rounding.
    let vac = 1.0 - a.iter().sum::<f64>() - b.iter().sum::<f64>();
    NoisyNoonState::new(vac.max(0.0), a, b, coh).expect("generator produces valid states")
}

/// Random valid state with cutoff uniform in `1..=max_cutoff`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, max_cutoff: usize) -> NoisyNoonState {
    let cutoff = rng.random_range(1..=max_cutoff);
    random_state_with_cutoff(rng, cutoff)
}

// 15-point Kronrod nodes/weights and the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]`, bisecting the interval with
/// the largest error estimate until the total estimate is below `tol` or
/// the bisection budget runs out. Optional interior `breaks` seed the
/// initial partition.
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    const MAX_BISECTIONS: usize = 20_000;
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let piece = |lo: f64, hi: f64| {
        let (value, err) = gk15(&f, lo, hi);
        Piece { lo, hi, value, err }
    };
    let mut heap: std::collections::BinaryHeap<Piece> =
        pts.windows(2).map(|w| piece(w[0], w[1])).collect();
    for _ in 0..MAX_BISECTIONS {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= tol {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            break;
        }
        heap.push(piece(worst.lo, mid));
        heap.push(piece(mid, worst.hi));
    }
    heap.iter().map(|p| p.value).sum()
}

/// Flattened entries `[vac, a…, b…, Re c…, Im c…]` for entrywise comparisons.
pub fn state_entries(state: &NoisyNoonState) -> Vec<f64> {
    let mut v = vec![state.vac()];
    v.extend_from_slice(state.diag_a_ladder());
    v.extend_from_slice(state.diag_b_ladder());
    v.extend(state.coh_ladder().iter().map(|c| c.re));
    v.extend(state.coh_ladder().iter().map(|c| c.im));
    v
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Beam-splitter Kraus operators of single-mode loss with intensity
/// transmission `eta`, truncated at `dim` levels: `A_l |n⟩ = sqrt(C(n,l)
/// eta^{n-l} (1-eta)^l) |n-l⟩`.
fn loss_kraus(eta: f64, dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|l| {
            let mut a = vec![0.0; dim * dim];
            for n in l..dim {
                let amp = (choose(n, l) * eta.powi((n - l) as i32) * (1.0 - eta).powi(l as i32)).sqrt();
                a[(n - l) * dim + n] = amp;
            }
            a
        })
        .collect()
}

/// Constant loss applied by brute-force Kraus summation on the full
/// `(cutoff+1)²` product basis. Returns the row-major output matrix.
pub fn dense_loss_oracle(state: &NoisyNoonState, kappa: f64, theta: f64) -> Vec<Complex64> {
    let n = state.cutoff() + 1;
    let d = n * n;
    let rho = crate::dense::embed_in_product_basis(&state.to_dense(), state.cutoff())
        .expect("embedding of a valid state");
    let ka = loss_kraus(kappa, n);
    let kb = loss_kraus(theta, n);
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for a in &ka {
        for b in &kb {
            // K = a ⊗ b is real; out += K ρ Kᵀ
            let k = |r: usize, c: usize| a[(r / n) * n + c / n] * b[(r % n) * n + c % n];
            let mut tmp = vec![Complex64::new(0.0, 0.0); d * d];
            for r in 0..d {
                for c in 0..d {
                    let kr = k(r, c);
                    if kr == 0.0 {
                        continue;
                    }
                    for s in 0..d {
                        tmp[r * d + s] += kr * rho.get(c, s);
                    }
                }
            }
            for r in 0..d {
                for s in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..d {
                        let kc = k(s, c);
                        if kc != 0.0 {
                            acc += tmp[r * d + c] * kc;
                        }
                    }
                    out[r * d + s] += acc;
                }
            }
        }
    }
    out
}

/// Sample mean and standard error of [`state_entries`] of
/// `apply_constant_loss(state, κ_i, θ_i)` over the given draws.
pub fn mc_loss_average(
    state: &NoisyNoonState,
    draws: impl IntoIterator<Item = (f64, f64)>,
) -> (Vec<f64>, Vec<f64>) {
    let len = state_entries(state).len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); len];
    for (kappa, theta) in draws {
        let spec = crate::channels::ConstantLossSpec::new(kappa, theta).expect("draw in [0, 1]");
        let out = crate::channels::apply_constant_loss(state, &spec);
        for (col, x) in columns.iter_mut().zip(state_entries(&out)) {
            col.push(x);
        }
    }
    columns.iter().map(|c| mean_and_se(c)).unzip()
}

/// Random `d×d` density matrix `G G† / Tr(G G†)` with complex Gaussian-like `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let g: Vec<Complex64> = (0..d * d)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            m[r * d + c] = (0..d).map(|k| g[r * d + k] * g[c * d + k].conj()).sum();
        }
    }
    let tr: f64 = (0..d).map(|i| m[i * d + i].re).sum();
    m.iter_mut().for_each(|x| *x /= tr);
    // exact Hermiticity
    for r in 0..d {
        m[r * d + r].im = 0.0;
        for c in r + 1..d {
            m[c * d + r] = m[r * d + c].conj();
        }
    }
    m
}

/// Kronecker product of two square matrices.
pub fn kron(a: &[Complex64], da: usize, b: &[Complex64], db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + j * db + l] = a[i * da + j] * b[k * db + l];
                }
            }
        }
    }
    out
}

/// Compensated (Neumaier) sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error, compensated mean and two-pass variance.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `E[T^n]` from the density, integrated in `s = ln x` with
/// `x = 2 ln(T0/T)`, where `P(T) dT = P(T) (T/2) x ds`. The integrand is
/// smooth in `s`. Below `x = 1e-13` the density cannot be evaluated from a
/// double-precision `T`; that sliver of mass (`x` is Weibull with shape
/// `2/ζ` and scale `stretch`) is added in closed form with `T^n ≈ T0^n`.
pub fn pdtc_moment_by_density(wp: &WeibullParams, n: i32, tol: f64) -> f64 {
    let shape = 2.0 / wp.zeta;
    let scale = wp.stretch();
    let x_lo = (scale * (1e-30f64).powf(1.0 / shape)).max(1e-13);
    let x_hi = scale * 60f64.powf(1.0 / shape);
    let sliver = -(-(x_lo / scale).powf(shape)).exp_m1() * wp.t0.powi(n);
    sliver
        + adaptive_integrate(
            |s| {
                let x = s.exp();
                let t = wp.t0 * (-0.5 * x).exp();
                pdtc_density(wp, t) * 0.5 * t * x * t.powi(n)
            },
            x_lo.ln(),
            x_hi.ln(),
            &[scale.ln()],
            tol,
        )
}
