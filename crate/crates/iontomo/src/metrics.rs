//! State-comparison metrics: fidelity and trace distance.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::fock::{IonState, StateData};
use crate::{Error, Result};

/// Fidelity between two states.
///
/// With at least one pure input this is the squared overlap / `⟨ψ|ρ|ψ⟩`;
/// for two mixed states the Uhlmann form `(Tr√(√ρ σ √ρ))²` is used. For
/// valid density matrices the value lies in `[0, 1]`; matrices outside the
/// positive cone (e.g. raw reconstructions) can push it slightly past 1.
pub fn fidelity(a: &IonState, b: &IonState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    match (a.data(), b.data()) {
        (StateData::Pure(x), StateData::Pure(y)) => Ok(x.dotc(y).norm_sqr()),
        (StateData::Pure(x), StateData::Density(r)) | (StateData::Density(r), StateData::Pure(x)) => {
            Ok(x.dotc(&(r * x)).re)
        }
        (StateData::Density(r), StateData::Density(s)) => Ok(uhlmann(r, s)),
    }
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let f = C64::new(lam.max(0.0).sqrt(), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

fn uhlmann(r: &DMatrix<C64>, s: &DMatrix<C64>) -> f64 {
    // (Tr√(√ρ σ √ρ))² = ‖√ρ √σ‖₁²; the trace-norm form is symmetric to
    // machine precision even for rank-deficient inputs.
    let a = hermitian_sqrt(r) * hermitian_sqrt(s);
    let tr: f64 = a.svd(false, false).singular_values.iter().sum();
    tr * tr
}

/// Trace distance `½‖ρ_a − ρ_b‖₁`.
pub fn trace_distance(a: &IonState, b: &IonState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.to_density() - b.to_density();
    let eig = d.symmetric_eigen();
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Project a Hermitian matrix onto the positive cone (clamp negative
/// eigenvalues, nearest in Frobenius norm) and renormalize the trace.
pub fn psd_project(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let f = C64::new(lam.max(0.0), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    let mut out = scaled * eig.eigenvectors.adjoint();
    let tr = out.trace().re;
    if tr > 0.0 {
        out /= C64::new(tr, 0.0);
    }
    out
}
