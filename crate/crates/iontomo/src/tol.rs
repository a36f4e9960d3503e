//! Numerical tolerances used by constructors and invariant checks.
//!
//! All linear algebra is double precision; bounds below allow for a few
//! orders of magnitude of accumulated rounding on top of machine epsilon.

/// Entrywise bound for `M = M†` checks on Hermitian-flagged operators.
pub const HERMITIAN_ATOL: f64 = 1e-12;

/// Max-norm bound for `‖U†U − I‖` on unitary-flagged operators.
pub const UNITARY_TOL: f64 = 1e-10;

/// `‖ψ‖₂ = 1` bound for pure state vectors.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// `Tr ρ = 1` bound for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// Density-matrix eigenvalues may dip this far below zero before the state
/// is rejected; covers eigensolver noise on genuinely positive matrices.
pub const EIG_FLOOR: f64 = -1e-9;

/// Default truncation-leakage tolerance: population of the two highest Fock
/// levels above this flags the result as unreliable.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// Measurement branches with probability below this cannot be post-selected.
pub const ZERO_PROB: f64 = 1e-12;

/// `A² + B² = 1` bound for atomic preparations.
pub const PREP_NORM_TOL: f64 = 1e-12;

/// Quantization step for (k, θ) keys in the kernel cache and grid lookups.
pub const KT_QUANT: f64 = 1e-12;
