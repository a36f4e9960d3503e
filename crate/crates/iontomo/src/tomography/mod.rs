//! Vibrational-state measurement: ground-state probabilities, the sampled
//! characteristic function χ(k, θ), and kernel-integral reconstruction of
//! the density matrix.
//!
//! Scan geometry follows the fixed-interaction-time strategy: the
//! interaction time is held at `τ = π`, the radial variable `k` is swept
//! through the drive strength `Ω/ν`, and the quadrature angle `θ` is swept
//! with a free evolution `τ₀` applied before the interaction.

mod chi;
mod control;
pub mod io;
mod pg;
mod reconstruct;
mod scan;
mod wigner;

pub use chi::{char_fn_exact, char_fn_from_pg, CharFnGrid, GridMode, GridPoint, PointValue, ScanMeta};
pub use control::{controls_to_kt, scan_mesh, theta_base, ControlPoint, SCAN_TAU};
pub use pg::{ground_probability, interaction_kt};
pub use reconstruct::{reconstruct, kernel_dim, QuadSpec, ReconstructionResult};
pub use scan::simulate_scan;
pub use wigner::{wigner_from_chi, PhaseSpaceMesh, WignerMap};

pub use crate::metrics::{fidelity, trace_distance};
