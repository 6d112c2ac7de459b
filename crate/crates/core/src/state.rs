//! The structured noisy-N00N density operator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{structured_basis, DenseHermitian};
use crate::{Error, Result, VALIDATION_TOL};

/// Two-mode density operator with support on `|0,0⟩`, `|i,0⟩`, `|0,i⟩`.
///
/// Levels are 1-based: `diag_a(i)` is `ρ_{i0,i0}`, `diag_b(i)` is
/// `ρ_{0i,0i}` and `coh(i)` is `ρ_{i0,0i}`. The opposite coherence
/// `ρ_{0i,i0}` is `coh(i).conj()` and is never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateDoc", into = "StateDoc")]
pub struct NoisyNoonState {
    vac: f64,
    diag_a: Vec<f64>,
    diag_b: Vec<f64>,
    coh: Vec<Complex64>,
}

impl NoisyNoonState {
    /// Validated constructor; the cutoff is the common length of the ladders.
    pub fn new(vac: f64, diag_a: Vec<f64>, diag_b: Vec<f64>, coh: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(vac, diag_a, diag_b, coh, VALIDATION_TOL)
    }

    pub fn with_tolerance(
        vac: f64,
        diag_a: Vec<f64>,
        diag_b: Vec<f64>,
        coh: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self> {
        let s = Self::from_parts_unchecked(vac, diag_a, diag_b, coh);
        s.validate(tol)?;
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(
        vac: f64,
        diag_a: Vec<f64>,
        diag_b: Vec<f64>,
        coh: Vec<Complex64>,
    ) -> Self {
        Self {
            vac,
            diag_a,
            diag_b,
            coh,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.diag_a.len();
        if n == 0 {
            return Err(Error::InvalidState("cutoff must be at least 1".into()));
        }
        if self.diag_b.len() != n || self.coh.len() != n {
            return Err(Error::InvalidState(format!(
                "ladder lengths differ: diag_a {}, diag_b {}, coh {}",
                n,
                self.diag_b.len(),
                self.coh.len()
            )));
        }
        let all_finite = self.vac.is_finite()
            && self.diag_a.iter().chain(&self.diag_b).all(|x| x.is_finite())
            && self.coh.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !all_finite {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        if self.vac < -tol {
            return Err(Error::InvalidState(format!("negative vacuum weight {}", self.vac)));
        }
        for i in 0..n {
            let (a, b) = (self.diag_a[i], self.diag_b[i]);
            if a < -tol || b < -tol {
                return Err(Error::InvalidState(format!(
                    "negative population at level {}: ({a}, {b})",
                    i + 1
                )));
            }
            if self.coh[i].norm_sqr() > a.max(0.0) * b.max(0.0) + tol {
                return Err(Error::InvalidState(format!(
                    "coherence at level {} violates |c|² ≤ ab",
                    i + 1
                )));
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(())
    }

    /// Two-mode vacuum with the given cutoff.
    pub fn vacuum(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::param("cutoff", "must be at least 1"));
        }
        Ok(Self::from_parts_unchecked(
            1.0,
            vec![0.0; cutoff],
            vec![0.0; cutoff],
            vec![Complex64::new(0.0, 0.0); cutoff],
        ))
    }

    /// `(|N,0⟩ + |0,N⟩)/√2`.
    pub fn pure_noon(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param(
                "N",
                "must be ≥ 1; use mixed_noon with weight on N = 0 for the vacuum",
            ));
        }
        let mut s = Self::vacuum(n)?;
        s.vac = 0.0;
        s.diag_a[n - 1] = 0.5;
        s.diag_b[n - 1] = 0.5;
        s.coh[n - 1] = Complex64::new(0.5, 0.0);
        Ok(s)
    }

    /// `Σ_N p_N |ψ_N⟩⟨ψ_N|` with `|ψ_0⟩ = |0,0⟩`.
    ///
    /// The cutoff is `weights.len() - 1` (at least 1), so trailing zero
    /// weights keep their levels.
    pub fn mixed_noon(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("weights", "empty"));
        }
        if let Some((n, p)) = weights
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0) || !p.is_finite())
        {
            return Err(Error::param("weights", format!("p_{n} = {p} is not a probability")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::param("weights", format!("sum to {total}, expected 1")));
        }
        let cutoff = (weights.len() - 1).max(1);
        let mut s = Self::vacuum(cutoff)?;
        s.vac = weights[0];
        for (n, &p) in weights.iter().enumerate().skip(1) {
            s.diag_a[n - 1] = 0.5 * p;
            s.diag_b[n - 1] = 0.5 * p;
            s.coh[n - 1] = Complex64::new(0.5 * p, 0.0);
        }
        Ok(s)
    }

    /// `(1-p)|0,0⟩⟨0,0| + p|ψ_N⟩⟨ψ_N|`.
    pub fn vacuum_mix(p: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
        }
        if n == 0 {
            return Err(Error::param("N", "must be ≥ 1"));
        }
        let mut w = vec![0.0; n + 1];
        w[0] = 1.0 - p;
        w[n] = p;
        Self::mixed_noon(&w)
    }

    pub fn cutoff(&self) -> usize {
        self.diag_a.len()
    }

    pub fn vac(&self) -> f64 {
        self.vac
    }

    /// `ρ_{i0,i0}`; zero above the cutoff.
    pub fn diag_a(&self, i: usize) -> f64 {
        level(&self.diag_a, i).copied().unwrap_or(0.0)
    }

    /// `ρ_{0i,0i}`; zero above the cutoff.
    pub fn diag_b(&self, i: usize) -> f64 {
        level(&self.diag_b, i).copied().unwrap_or(0.0)
    }

    /// `ρ_{i0,0i}`; zero above the cutoff.
    pub fn coh(&self, i: usize) -> Complex64 {
        level(&self.coh, i)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn diag_a_ladder(&self) -> &[f64] {
        &self.diag_a
    }

    pub fn diag_b_ladder(&self) -> &[f64] {
        &self.diag_b
    }

    pub fn coh_ladder(&self) -> &[Complex64] {
        &self.coh
    }

    pub fn trace(&self) -> f64 {
        self.vac + self.diag_a.iter().sum::<f64>() + self.diag_b.iter().sum::<f64>()
    }

    /// `Σ_i |ρ_{i0,0i}|²`.
    pub fn coherence_norm2(&self) -> f64 {
        self.coh.iter().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn map_coherences(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coh = self
            .coh
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i + 1, c))
            .collect();
        Self {
            coh,
            ..self.clone()
        }
    }

    /// `⟨ψ_M|ρ|ψ_M⟩`.
    pub fn fidelity_with_noon(&self, m: usize) -> Result<f64> {
        self.check_order(m)?;
        Ok(0.5 * (self.diag_a(m) + self.diag_b(m)) + self.coh(m).re)
    }

    pub(crate) fn check_order(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::param("M", "must be ≥ 1"));
        }
        if m > self.cutoff() {
            return Err(Error::CutoffExceeded {
                requested: m,
                cutoff: self.cutoff(),
            });
        }
        Ok(())
    }

    /// Dense matrix on [`structured_basis`]. The `|i,i⟩` block is zero and
    /// only exists to receive partial-transpose images.
    pub fn to_dense(&self) -> DenseHermitian {
        let n = self.cutoff();
        let mut m = DenseHermitian::zeros(structured_basis(n).len());
        m.set_hermitian(0, 0, Complex64::new(self.vac, 0.0));
        for i in 1..=n {
            let ra = i;
            let rb = n + i;
            m.set_hermitian(ra, ra, Complex64::new(self.diag_a(i), 0.0));
            m.set_hermitian(rb, rb, Complex64::new(self.diag_b(i), 0.0));
            m.set_hermitian(ra, rb, self.coh(i));
        }
        m
    }

    /// Entrywise maximum absolute difference; states of different cutoff
    /// compare with zero padding.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.cutoff().max(other.cutoff());
        let mut d = (self.vac - other.vac).abs();
        for i in 1..=n {
            d = d
                .max((self.diag_a(i) - other.diag_a(i)).abs())
                .max((self.diag_b(i) - other.diag_b(i)).abs())
                .max((self.coh(i) - other.coh(i)).norm());
        }
        d
    }
}

fn level<T>(v: &[T], i: usize) -> Option<&T> {
    if i == 0 {
        None
    } else {
        v.get(i - 1)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ComplexDoc {
    re: f64,
    im: f64,
}

/// JSON form: `{cutoff, vac, diag_a, diag_b, coh: [{re, im}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateDoc {
    cutoff: usize,
    vac: f64,
    diag_a: Vec<f64>,
    diag_b: Vec<f64>,
    coh: Vec<ComplexDoc>,
}

impl From<NoisyNoonState> for StateDoc {
    fn from(s: NoisyNoonState) -> Self {
        Self {
            cutoff: s.cutoff(),
            vac: s.vac,
            diag_a: s.diag_a,
            diag_b: s.diag_b,
            coh: s
                .coh
                .into_iter()
                .map(|c| ComplexDoc { re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TryFrom<StateDoc> for NoisyNoonState {
    type Error = Error;

    fn try_from(d: StateDoc) -> Result<Self> {
        if d.diag_a.len() != d.cutoff {
            return Err(Error::InvalidState(format!(
                "cutoff {} but {} diag_a entries",
                d.cutoff,
                d.diag_a.len()
            )));
        }
        let coh = d.coh.into_iter().map(|c| Complex64::new(c.re, c.im)).collect();
        NoisyNoonState::new(d.vac, d.diag_a, d.diag_b, coh)
    }
}
