//! The control map between drive settings and phase-space coordinates.
//!
//! A measurement setting `(Ω/ν, τ, τ₀)` addresses the point
//!
//! ```text
//! k = 4η(Ω/ν) sin(τ/2),        θ = θ_base(τ) + τ₀  (mod 2π, into (−π, π])
//! θ_base(τ) = arctan[sin τ / (1 − cos τ)] − π/2  =  −τ/2   on τ ∈ (0, 2π).
//! ```
//!
//! The sign of the free-evolution shift is fixed by the operator identity
//! `e^{iτ₀n̂} X̂_θ e^{−iτ₀n̂} = X̂_{θ+τ₀}`: rotating the state by `e^{−in̂τ₀}`
//! before the interaction advances the probed angle by `+τ₀`. The map above
//! is exact at the scan time `τ = π`; scans therefore hold `τ = π` and
//! reach every angle through `τ₀` alone (see [`pg::interaction_kt`] for the
//! angle the interaction itself realizes at other times).
//!
//! [`pg::interaction_kt`]: crate::tomography::interaction_kt

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::dynamics::DriveParams;
use crate::{Error, Result};

/// Interaction time held fixed by the scan strategy.
pub const SCAN_TAU: f64 = PI;

/// `θ_base(τ)` on the principal branch `τ ∈ (0, 2π)`.
pub fn theta_base(tau: f64) -> f64 {
    (tau.sin() / (1.0 - tau.cos())).atan() - FRAC_PI_2
}

/// Wrap an angle into `(−π, π]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Map drive settings to the addressed `(k, θ)`.
///
/// `τ` must lie strictly inside `(0, 2π)`: at the endpoints `k` vanishes
/// and the angle is meaningless.
pub fn controls_to_kt(params: &DriveParams, tau: f64, tau0: f64) -> Result<(f64, f64)> {
    params.require_resonant()?;
    if tau <= 0.0 || tau >= TAU {
        return Err(Error::UndefinedAngle(tau));
    }
    let k = 4.0 * params.coupling() * (tau / 2.0).sin();
    let theta = wrap_angle(theta_base(tau) + tau0);
    Ok((k, theta))
}

/// One measurement setting of a tomographic scan.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ControlPoint {
    /// Radial variable, `k = 4η(Ω/ν) sin(τ/2) > 0`.
    pub k: f64,
    /// Addressed quadrature angle in `(−π, π]`.
    pub theta: f64,
    /// Drive strength realizing this `k` at `tau_used`.
    pub omega_ratio_used: f64,
    pub tau_used: f64,
    /// Free evolution applied before the interaction, in `[0, 2π)`.
    pub free_evolution: f64,
}

impl ControlPoint {
    /// Solve the control map for a target `(k, θ)` at the fixed scan time
    /// `τ = π`. Fails when the required drive exceeds `omega_bound`.
    pub fn from_kt(params: &DriveParams, k: f64, theta: f64, omega_bound: f64) -> Result<Self> {
        params.require_resonant()?;
        if k <= 0.0 {
            return Err(Error::UndefinedAngle(if k == 0.0 { 0.0 } else { k }));
        }
        // sin(τ/2) = 1 at τ = π.
        let required = k / (4.0 * params.eta);
        if required > omega_bound {
            return Err(Error::InfeasibleControl { k, required, bound: omega_bound });
        }
        let theta = wrap_angle(theta);
        let free_evolution = (theta - theta_base(SCAN_TAU)).rem_euclid(TAU);
        Ok(ControlPoint {
            k,
            theta,
            omega_ratio_used: required,
            tau_used: SCAN_TAU,
            free_evolution,
        })
    }

    /// Drive parameters realizing this point (the swept `Ω/ν` substituted).
    pub fn drive(&self, eta: f64) -> Result<DriveParams> {
        DriveParams::resonant(eta, self.omega_ratio_used)
    }

    /// Check the stored coordinates against the control map.
    pub fn validate(&self, eta: f64) -> Result<()> {
        let params = self.drive(eta)?;
        let (k, theta) = controls_to_kt(&params, self.tau_used, self.free_evolution)?;
        if (k - self.k).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "control point k = {} does not match the map ({k})",
                self.k
            )));
        }
        if wrap_angle(theta - self.theta).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "control point theta = {} does not match the map ({theta})",
                self.theta
            )));
        }
        Ok(())
    }
}

/// The measured part of a product mesh: `k ∈ {Δk, 2Δk, …, k_max}` by
/// `θ ∈ {midpoints of [0, π)}`. `k = 0` is never measured (its value is
/// the exact normalization `χ = 1`) and `k < 0` follows from Hermitian
/// symmetry.
pub fn scan_mesh(
    params: &DriveParams,
    quad: &super::QuadSpec,
    omega_bound: f64,
) -> Result<Vec<ControlPoint>> {
    quad.validate()?;
    let mut points = Vec::with_capacity(quad.n_k() * quad.n_theta);
    for ki in 1..=quad.n_k() {
        let k = ki as f64 * quad.dk;
        for theta in quad.theta_values() {
            points.push(ControlPoint::from_kt(params, k, theta, omega_bound)?);
        }
    }
    Ok(points)
}
