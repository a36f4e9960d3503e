//! Shared helpers and independent oracles for the integration suites.
//!
//! Everything here is deliberately computed through routes that do not
//! share code with the implementation under test: closed-form amplitudes,
//! recurrences, and the brute-force propagator pipeline.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use iontomo::dynamics::{self, AtomPrep, DriveParams};
use iontomo::fock::{IonState, Space};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Random full-rank-ish density matrix supported on the lowest `support`
/// Fock levels of an `n`-level space (Ginibre construction).
pub fn random_density(n: usize, support: usize, rank: usize, rng: &mut ChaCha12Rng) -> IonState {
    let mut g = DMatrix::<C64>::zeros(support, rank);
    for i in 0..support {
        for j in 0..rank {
            g[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let mut rho = DMatrix::<C64>::zeros(n, n);
    for i in 0..support {
        for j in 0..support {
            rho[(i, j)] = gg[(i, j)] / C64::new(tr, 0.0);
        }
    }
    IonState::density(Space::Vibrational(n), rho).expect("valid random density")
}

/// Random pure state on the lowest `support` levels.
pub fn random_pure(n: usize, support: usize, rng: &mut ChaCha12Rng) -> IonState {
    let mut v = DVector::<C64>::zeros(n);
    for i in 0..support {
        v[i] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    IonState::pure_normalized(Space::Vibrational(n), v).expect("nonzero random vector")
}

/// Random atomic preparation.
pub fn random_prep(rng: &mut ChaCha12Rng) -> AtomPrep {
    let chi: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    AtomPrep::new(chi.cos(), chi.sin(), phase).expect("normalized by construction")
}

/// Analytic coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!`, truncated and
/// renormalized; the independent oracle for displacement/coherent tests.
pub fn coherent_amplitudes(n: usize, alpha: C64) -> DVector<C64> {
    let mut v = DVector::<C64>::zeros(n);
    v[0] = C64::new(1.0, 0.0);
    for k in 1..n {
        v[k] = v[k - 1] * alpha / C64::new((k as f64).sqrt(), 0.0);
    }
    let scale = (-alpha.norm_sqr() / 2.0).exp();
    v *= C64::new(scale, 0.0);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// `⟨α|β⟩ = exp(−(|α|²+|β|²)/2 + α*β)`.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (C64::new(-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0, 0.0) + alpha.conj() * beta).exp()
}

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 1.0 - x,
        _ => {
            let (mut lm1, mut l) = (1.0, 1.0 - x);
            for k in 1..n {
                let next = ((2.0 * k as f64 + 1.0 - x) * l - k as f64 * lm1) / (k as f64 + 1.0);
                lm1 = l;
                l = next;
            }
            l
        }
    }
}

/// Ground-state probability by the projective route: brute-force propagator
/// applied to the full composite state, then the `|g⟩`-block trace.
pub fn projective_ground_probability(
    params: &DriveParams,
    tau: f64,
    prep: &AtomPrep,
    rho_v: &IonState,
) -> f64 {
    let n = rho_v.dim();
    let u = dynamics::brute_force_propagator(params, tau, n).expect("propagator");
    let rho_c = prep.density().kronecker(&rho_v.to_density());
    let evolved = u.matrix() * rho_c * u.matrix().adjoint();
    let mut p = 0.0;
    for m in 0..n {
        p += evolved[(m, m)].re;
    }
    p
}

/// Wigner value at `(x, p)` through the displaced-parity route:
/// `W = (1/π) Tr{D†(β) ρ D(β) Π}` with `β = (x + ip)/√2`.
pub fn wigner_parity_oracle(rho_v: &IonState, x: f64, p: f64) -> f64 {
    let n = rho_v.dim();
    let beta = C64::new(x, p) / C64::new(std::f64::consts::SQRT_2, 0.0);
    let d = iontomo::fock::displacement(n, beta).expect("displacement");
    let rho = rho_v.to_density();
    let shifted = d.matrix().adjoint() * rho * d.matrix();
    let mut tr = 0.0;
    for m in 0..n {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        tr += sign * shifted[(m, m)].re;
    }
    tr / std::f64::consts::PI
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol})"
    );
}
