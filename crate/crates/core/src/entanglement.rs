//! Partial-transpose entanglement test.
//!
//! Transposing mode 2 sends each coherence `|i,0⟩⟨0,i|` to `|i,i⟩⟨0,0|`.
//! The populations stay on the diagonal, and the coherences form an
//! arrowhead block on `{|0,0⟩, |1,1⟩, …}` with hub `ρ00` and zero spoke
//! diagonal. Its characteristic polynomial factors as
//! `λ^{n-1} (λ² - ρ00 λ - Σ|c_i|²)`, so the only possibly negative PT
//! eigenvalue is
//!
//! ```text
//! τ = (ρ00 - sqrt(ρ00² + 4 Σ|c_i|²)) / 2.
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{embed_in_product_basis, DenseHermitian};
use crate::{Error, NoisyNoonState, Result};

/// `τ` below `-ENTANGLEMENT_TOL` certifies entanglement.
pub const ENTANGLEMENT_TOL: f64 = 1e-12;

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which the
/// Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtReport {
    /// Minimal eigenvalue of the partial transpose.
    pub tau: f64,
    pub entangled: bool,
    /// `Σ_i |ρ_{i0,0i}|²`.
    pub coherence_norm2: f64,
}

pub fn min_pt_eigenvalue(state: &NoisyNoonState) -> PtReport {
    let c2 = state.coherence_norm2();
    let v = state.vac();
    // Rationalized form of (v - sqrt(v² + 4c²))/2; no cancellation for c² ≪ v².
    let tau = if c2 == 0.0 {
        0.0
    } else {
        -2.0 * c2 / (v + (v * v + 4.0 * c2).sqrt())
    };
    PtReport {
        tau,
        entangled: tau < -ENTANGLEMENT_TOL,
        coherence_norm2: c2,
    }
}

/// Transposes the second tensor factor of a `d1·d2` matrix:
/// `((i,k),(j,l)) → ((i,l),(j,k))`.
pub fn partial_transpose_dense(m: &DenseHermitian, dims: (usize, usize)) -> Result<DenseHermitian> {
    let (d1, d2) = dims;
    let d = d1 * d2;
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.dim(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d1 {
        for k in 0..d2 {
            for j in 0..d1 {
                for l in 0..d2 {
                    out[(i * d2 + l) * d + (j * d2 + k)] = m.get(i * d2 + k, j * d2 + l);
                }
            }
        }
    }
    DenseHermitian::from_rows(d, out)
}

/// Smallest eigenvalue by cyclic Jacobi rotations on the real symmetric
/// embedding `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is that of
/// `H` with every eigenvalue doubled.
pub fn dense_min_eigenvalue(m: &DenseHermitian) -> Result<f64> {
    let eig = jacobi_eigenvalues(real_embedding(m))?;
    Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
}

/// Minimal PT eigenvalue through the dense route: embed into the product
/// basis, transpose mode 2, diagonalize.
pub fn dense_pt_min_eigenvalue(state: &NoisyNoonState) -> Result<f64> {
    let n = state.cutoff();
    let full = embed_in_product_basis(&state.to_dense(), n)?;
    let pt = partial_transpose_dense(&full, (n + 1, n + 1))?;
    dense_min_eigenvalue(&pt)
}

struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }
    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] = v;
    }
}

fn real_embedding(m: &DenseHermitian) -> SymMatrix {
    let d = m.dim();
    let n = 2 * d;
    let mut s = SymMatrix {
        n,
        a: vec![0.0; n * n],
    };
    for r in 0..d {
        for c in 0..d {
            let h = m.get(r, c);
            s.set(r, c, h.re);
            s.set(d + r, d + c, h.re);
            s.set(r, d + c, -h.im);
            s.set(d + r, c, h.im);
        }
    }
    s
}

fn jacobi_eigenvalues(mut m: SymMatrix) -> Result<Vec<f64>> {
    let n = m.n;
    let frob = m.a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * frob.max(1.0);
    let off_norm = |m: &SymMatrix| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += m.at(p, q).powi(2);
            }
        }
        (2.0 * s).sqrt()
    };
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&m) <= target {
            return Ok((0..n).map(|i| m.at(i, i)).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m.at(p, p), m.at(q, q));
                // Negligible against both diagonal entries: drop it.
                if apq.abs() * 1e18 < app.abs().min(aqq.abs()) {
                    m.set(p, q, 0.0);
                    m.set(q, p, 0.0);
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.at(k, p);
                    let akq = m.at(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.at(p, k);
                    let aqk = m.at(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
            }
        }
    }
    let off = off_norm(&m);
    if off <= target {
        return Ok((0..n).map(|i| m.at(i, i)).collect());
    }
    Err(Error::EigenNotConverged {
        sweeps: JACOBI_MAX_SWEEPS,
        off_norm: off,
    })
}
