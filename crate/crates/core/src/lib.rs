//! Noisy N00N states in lossy, dephasing and turbulent channels.
//!
//! The state family handled here is the two-mode density operator
//!
//! ```text
//! ρ = ρ00 |0,0⟩⟨0,0| + Σ_i [ a_i |i,0⟩⟨i,0| + b_i |0,i⟩⟨0,i| ]
//!                    + Σ_i [ c_i |i,0⟩⟨0,i| + c_i* |0,i⟩⟨i,0| ]
//! ```
//!
//! which is closed under photon loss, dephasing and fluctuating loss. All
//! operations work on this structured form; [`dense`] provides a dense
//! matrix view for brute-force cross-checks.
//!
//! Modules:
//! - [`state`]: [`NoisyNoonState`] and its constructors
//! - [`channels`]: constant loss, dephasing, phase shift, fluctuating loss
//! - [`atmosphere`]: beam-wandering transmission statistics
//! - [`metrology`]: phase-estimation error and supersensitivity
//! - [`entanglement`]: partial-transpose test

pub mod atmosphere;
pub mod channels;
pub mod dense;
pub mod entanglement;
mod error;
pub mod metrology;
pub mod quadrature;
pub mod special;
pub mod state;

#[cfg(feature = "test-util")]
pub mod test_util;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use state::NoisyNoonState;

/// Default absolute tolerance for trace and positivity checks.
pub const VALIDATION_TOL: f64 = 1e-12;
