//! The ground-state probability of the ion after one resonant interaction.

use num_complex::Complex64 as C64;

use crate::dynamics::{alpha_tau, AtomPrep, DriveParams};
use crate::fock::{self, trace_product, IonState, Space};
use crate::{Error, Result};

/// The `(k, θ)` pair the interaction itself realizes, derived from the
/// displacement amplitude: `k e^{iθ} = −2i α(τ)`.
///
/// This is the pair that makes the closed form below agree with the full
/// evolution for every `τ`; it coincides with the published control map
/// [`controls_to_kt`] at the scan time `τ = π` and differs from it by a
/// `τ`-dependent offset elsewhere, which is why scans hold `τ = π`.
/// Returns `k = 0, θ = 0` when the displacement vanishes (`τ ∈ 2πℤ`).
///
/// [`controls_to_kt`]: crate::tomography::controls_to_kt
pub fn interaction_kt(params: &DriveParams, tau: f64) -> Result<(f64, f64)> {
    let z = C64::new(0.0, -2.0) * alpha_tau(params, tau)?;
    let k = z.norm();
    let theta = if k == 0.0 { 0.0 } else { z.arg() };
    Ok((k, theta))
}

/// Probability of finding the ion in `|g⟩` after evolving
/// `|ψ_e(prep)⟩ ⊗ ρ_v` for time `τ` on resonance:
///
/// ```text
/// P_g = ½ + (𝒜²−ℬ²)/2 · Tr{cos(kX̂_θ) ρ} − 𝒜ℬ sin φ · Tr{sin(kX̂_θ) ρ}
/// ```
///
/// with `(k, θ)` from [`interaction_kt`]. Cross-checked against projecting
/// the full evolution onto `|g⟩` in the test suite.
pub fn ground_probability(
    params: &DriveParams,
    tau: f64,
    prep: &AtomPrep,
    rho_v: &IonState,
) -> Result<f64> {
    params.require_resonant()?;
    let n = match rho_v.space() {
        Space::Vibrational(n) => n,
        other => {
            return Err(Error::SpaceMismatch { expected: Space::Vibrational(0), got: other })
        }
    };
    let (a, b, phi) = (prep.a_coef(), prep.b_coef(), prep.phase());
    let even_weight = (a * a - b * b) / 2.0;
    let odd_weight = a * b * phi.sin();

    let (k, theta) = interaction_kt(params, tau)?;
    if k == 0.0 {
        // cos(0) = I, sin(0) = 0
        return Ok(0.5 + even_weight);
    }

    let x_theta = fock::quadrature(n, theta)?;
    let e_ikx = fock::herm_exp(&x_theta, C64::new(0.0, k))?;
    let rho = rho_v.to_density();
    // cos = (E + E†)/2, sin = (E − E†)/(2i); both traces real for Hermitian ρ.
    let w = trace_product(e_ikx.matrix(), &rho);
    let cos_trace = w.re;
    let sin_trace = w.im;
    Ok(0.5 + even_weight * cos_trace - odd_weight * sin_trace)
}
