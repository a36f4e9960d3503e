//! The characteristic function `χ(k, θ) = Tr{e^{ikX̂_θ} ρ}` and its grids.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dynamics::AtomPrep;
use crate::fock::{self, trace_product, IonState, Space};
use crate::{tol, Error, Result};

use super::control::ControlPoint;
use super::QuadSpec;

/// `χ(k, θ)` evaluated through the quadrature exponential.
pub fn char_fn_exact(rho_v: &IonState, k: f64, theta: f64) -> Result<C64> {
    let n = match rho_v.space() {
        Space::Vibrational(n) => n,
        other => {
            return Err(Error::SpaceMismatch { expected: Space::Vibrational(0), got: other })
        }
    };
    let x_theta = fock::quadrature(n, theta)?;
    let e_ikx = fock::herm_exp(&x_theta, C64::new(0.0, k))?;
    Ok(trace_product(e_ikx.matrix(), &rho_v.to_density()))
}

/// Invert the two probe measurements into one χ value:
/// `Re χ = 2p_cos − 1`, `Im χ = −(2p_sin − 1)`.
///
/// The probes must be the canonical pair: `(𝒜, ℬ) = (1, 0)`, which isolates
/// `Tr{cos kX̂_θ ρ}`, and `(𝒜, ℬ, φ) = (1/√2, 1/√2, π/2)`, which isolates
/// `Tr{sin kX̂_θ ρ}`.
pub fn char_fn_from_pg(pg_cos: f64, pg_sin: f64, probes: (&AtomPrep, &AtomPrep)) -> Result<C64> {
    for p in [pg_cos, pg_sin] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    let (c, s) = probes;
    let canonical_cos = (c.a_coef() - 1.0).abs() < 1e-9 && c.b_coef().abs() < 1e-9;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let canonical_sin = (s.a_coef() - r).abs() < 1e-9
        && (s.b_coef() - r).abs() < 1e-9
        && (s.phase() - std::f64::consts::FRAC_PI_2).abs() < 1e-9;
    if !canonical_cos || !canonical_sin {
        return Err(Error::BadProbePreparation);
    }
    Ok(C64::new(2.0 * pg_cos - 1.0, -(2.0 * pg_sin - 1.0)))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GridMode {
    Exact,
    Sampled,
}

/// Value stored at one grid point.
#[derive(Copy, Clone, Debug)]
pub enum PointValue {
    Exact(C64),
    /// Counts of `g` outcomes for the cos- and sin-probe preparations.
    Sampled { counts: [u64; 2], shots: u64 },
}

impl PointValue {
    /// The χ estimate this value carries.
    pub fn chi(&self) -> C64 {
        match *self {
            PointValue::Exact(c) => c,
            PointValue::Sampled { counts, shots } => {
                let p_cos = counts[0] as f64 / shots as f64;
                let p_sin = counts[1] as f64 / shots as f64;
                C64::new(2.0 * p_cos - 1.0, -(2.0 * p_sin - 1.0))
            }
        }
    }

    /// Estimated 1σ error of the χ estimate (0 for exact values).
    pub fn std_error(&self) -> f64 {
        match *self {
            PointValue::Exact(_) => 0.0,
            PointValue::Sampled { counts, shots } => {
                let var = |c: u64| {
                    let p = c as f64 / shots as f64;
                    4.0 * p * (1.0 - p) / shots as f64
                };
                (var(counts[0]) + var(counts[1])).sqrt()
            }
        }
    }

    pub fn p_hat(&self, probe: usize) -> Option<f64> {
        match *self {
            PointValue::Exact(_) => None,
            PointValue::Sampled { counts, shots } => Some(counts[probe] as f64 / shots as f64),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub control: ControlPoint,
    pub value: PointValue,
}

/// Scan header data carried by every grid.
#[derive(Copy, Clone, Debug)]
pub struct ScanMeta {
    pub eta: f64,
    pub tau: f64,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

/// Sampled or exact values of χ on a set of control points.
#[derive(Clone, Debug)]
pub struct CharFnGrid {
    pub mode: GridMode,
    pub meta: ScanMeta,
    pub points: Vec<GridPoint>,
}

impl CharFnGrid {
    /// Exact χ values of `rho` on the measured part of the `quad` mesh
    /// (`k > 0`; negative `k` follows from Hermitian symmetry).
    pub fn exact_on_mesh(
        rho: &IonState,
        quad: &QuadSpec,
        params: &crate::dynamics::DriveParams,
        omega_bound: f64,
    ) -> Result<CharFnGrid> {
        params.require_resonant()?;
        let mesh = super::control::scan_mesh(params, quad, omega_bound)?;
        let n = match rho.space() {
            Space::Vibrational(n) => n,
            other => {
                return Err(Error::SpaceMismatch { expected: Space::Vibrational(0), got: other })
            }
        };
        // One eigendecomposition of X̂ serves every point: X̂_θ = R_θ X̂ R_θ†,
        // so χ(k, θ) = Tr{R_θ e^{ikX̂} R_θ† ρ}.
        let basis = WeylBasis::new(n)?;
        let rho_m = rho.to_density();
        let points = mesh
            .into_iter()
            .map(|control| {
                let e = basis.weyl(control.k);
                let chi = theta_scaled_trace(&e, control.theta, &rho_m);
                GridPoint { control, value: PointValue::Exact(chi) }
            })
            .collect();
        Ok(CharFnGrid {
            mode: GridMode::Exact,
            meta: ScanMeta { eta: params.eta, tau: super::SCAN_TAU, seed: None, shots: None },
            points,
        })
    }

    /// Check the mode invariants.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut by_key: HashMap<(i64, i64), C64> = HashMap::new();
        for p in &self.points {
            match (self.mode, &p.value) {
                (GridMode::Exact, PointValue::Exact(c)) => {
                    if p.control.k == 0.0 && (c - C64::new(1.0, 0.0)).norm() > 1e-12 {
                        return Err(Error::InvalidState(format!(
                            "χ(0, θ) must be 1, got {c}"
                        )));
                    }
                }
                (GridMode::Sampled, PointValue::Sampled { counts, shots }) => {
                    if *shots == 0 {
                        return Err(Error::NoShots);
                    }
                    for c in counts {
                        if c > shots {
                            return Err(Error::InvalidProbability(*c as f64 / *shots as f64));
                        }
                    }
                }
                _ => {
                    return Err(Error::InvalidState(
                        "grid mode does not match its point values".into(),
                    ))
                }
            }
            by_key.insert(quantize_kt(p.control.k, p.control.theta), p.value.chi());
        }
        if self.mode == GridMode::Exact {
            // Hermitian symmetry wherever both signs are present.
            for p in &self.points {
                let mirror = quantize_kt(-p.control.k, p.control.theta);
                if let Some(c) = by_key.get(&mirror) {
                    if (c - p.value.chi().conj()).norm() > 1e-10 {
                        return Err(Error::InvalidState(format!(
                            "Hermitian symmetry violated at k = {}",
                            p.control.k
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// χ lookup keyed by quantized `(k, θ)`.
    pub fn lookup(&self) -> HashMap<(i64, i64), C64> {
        self.points
            .iter()
            .map(|p| (quantize_kt(p.control.k, p.control.theta), p.value.chi()))
            .collect()
    }
}

pub(crate) fn quantize_kt(k: f64, theta: f64) -> (i64, i64) {
    ((k / tol::KT_QUANT).round() as i64, (theta / tol::KT_QUANT).round() as i64)
}

/// Shared eigendecomposition of `X̂ = â + â†`.
///
/// `X̂_θ = R_θ X̂ R_θ†` with `R_θ = diag(e^{imθ})`, so every exponential
/// `e^{icX̂_θ}` is a phase-scaled copy of `e^{icX̂} = V e^{icλ} V†`.
pub(crate) struct WeylBasis {
    dim: usize,
    vectors: DMatrix<C64>,
    eigenvalues: DVector<f64>,
}

impl WeylBasis {
    pub fn new(dim: usize) -> Result<Self> {
        let x = fock::position(dim)?;
        let eig = x.into_matrix().symmetric_eigen();
        Ok(Self { dim, vectors: eig.eigenvectors, eigenvalues: eig.eigenvalues })
    }

    /// `exp(i k X̂)`.
    pub fn weyl(&self, k: f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, lam) in self.eigenvalues.iter().enumerate() {
            let f = C64::from_polar(1.0, k * lam);
            for i in 0..self.dim {
                scaled[(i, j)] *= f;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `Tr{R_θ E R_θ† ρ}` without forming the rotated matrix.
fn theta_scaled_trace(e: &DMatrix<C64>, theta: f64, rho: &DMatrix<C64>) -> C64 {
    let n = e.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            // (R_θ E R_θ†)[i, j] = e^{i(i−j)θ} E[i, j]
            let phase = C64::from_polar(1.0, (i as f64 - j as f64) * theta);
            acc += phase * e[(i, j)] * rho[(j, i)];
        }
    }
    acc
}

/// Rotate `E = exp(icX̂)` into `exp(icX̂_θ)` and crop to `keep × keep`.
pub(crate) fn theta_rotate_crop(e: &DMatrix<C64>, theta: f64, keep: usize) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(keep, keep);
    for i in 0..keep {
        for j in 0..keep {
            let phase = C64::from_polar(1.0, (i as f64 - j as f64) * theta);
            out[(i, j)] = phase * e[(i, j)];
        }
    }
    out
}
