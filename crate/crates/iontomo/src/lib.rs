//! Numerical toolkit for a laser-cooled trapped ion driven by an optical
//! standing wave without the rotating wave approximation.
//!
//! The crate covers three layers:
//!
//! * [`fock`] — dense linear algebra on a truncated Fock space: ladder
//!   operators, quadratures, displacements, Hermitian exponentials, tensor
//!   products with the two-level atom, partial traces.
//! * [`dynamics`] — the composite ion Hamiltonian, its closed-form resonant
//!   propagator, a brute-force propagator used as a validation oracle, and
//!   state evolution with the hyperbolic (cosh/sinh) decomposition.
//! * [`catgen`] / [`tomography`] — conditional generation of even/odd
//!   coherent-state superpositions, ground-state-probability measurement
//!   simulation, characteristic-function assembly and the kernel-integral
//!   reconstruction of vibrational density matrices.
//!
//! Everything is plain `f64`/`Complex64` dense linear algebra; all public
//! operations are pure functions over immutable inputs and safe to call
//! concurrently.

pub mod catgen;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod tol;
pub mod tomography;

pub use error::{Error, Result};
pub use fock::{IonState, Operator, Space, TruncationReport};
pub use dynamics::{AtomPrep, DriveParams};
