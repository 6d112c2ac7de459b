//! Dense Hermitian matrices on truncated two-mode Fock bases.
//!
//! Only used as an independent representation for cross-checks; the
//! structured [`NoisyNoonState`](crate::NoisyNoonState) is the working form.

use num_complex::Complex64;

use crate::{Error, Result};

/// Entrywise tolerance on `H = H†`.
pub const HERMITIAN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    dim: usize,
    // row-major
    data: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from row-major entries, checking Hermiticity.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let m = Self { dim, data };
        for r in 0..dim {
            for c in r..dim {
                if (m.get(r, c) - m.get(c, r).conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!(
                        "matrix not Hermitian at ({r}, {c})"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// Sets `(r, c)` and its mirror `(c, r)` to keep the matrix Hermitian.
    pub fn set_hermitian(&mut self, r: usize, c: usize, v: Complex64) {
        let d = self.dim;
        if r == c {
            self.data[r * d + r] = Complex64::new(v.re, 0.0);
        } else {
            self.data[r * d + c] = v;
            self.data[c * d + r] = v.conj();
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// `Tr(A B)`.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += self.data[r * d + c] * other.data[c * d + r];
            }
        }
        acc
    }

    /// `A²`, which is Hermitian again.
    pub fn square(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * self.data[k * d + c];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Fock labels `(n1, n2)` of the structured basis used by
/// [`NoisyNoonState::to_dense`](crate::NoisyNoonState::to_dense):
/// `|0,0⟩, |1,0⟩..|N,0⟩, |0,1⟩..|0,N⟩, |1,1⟩..|N,N⟩`.
pub fn structured_basis(cutoff: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::with_capacity(1 + 3 * cutoff);
    labels.push((0, 0));
    labels.extend((1..=cutoff).map(|i| (i, 0)));
    labels.extend((1..=cutoff).map(|i| (0, i)));
    labels.extend((1..=cutoff).map(|i| (i, i)));
    labels
}

/// Embeds a matrix on the structured basis into the full product basis
/// `|n1⟩⊗|n2⟩`, `0 ≤ n1, n2 ≤ cutoff`, with index `n1·(cutoff+1) + n2`.
pub fn embed_in_product_basis(m: &DenseHermitian, cutoff: usize) -> Result<DenseHermitian> {
    let labels = structured_basis(cutoff);
    if m.dim() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: m.dim(),
        });
    }
    let side = cutoff + 1;
    let mut out = DenseHermitian::zeros(side * side);
    let idx = |(a, b): (usize, usize)| a * side + b;
    for (r, &lr) in labels.iter().enumerate() {
        for (c, &lc) in labels.iter().enumerate() {
            out.data[idx(lr) * side * side + idx(lc)] = m.get(r, c);
        }
    }
    Ok(out)
}
