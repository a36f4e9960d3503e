//! Diagnostic Wigner map: the 2-D Fourier transform of an exact χ grid.
//!
//! With `λ = ik e^{iθ}` the transform reduces to a filtered back-projection
//! onto phase-space coordinates `(x, p) = (⟨X̂⟩, ⟨X̂_{π/2}⟩)/√2`:
//!
//! ```text
//! W(x, p) = (1/2π²) ∫₀^π dθ ∫ dk |k| χ(k, θ) e^{−ik√2 (x cosθ + p sinθ)}
//! ```
//!
//! normalized so the map integrates to 1 (vacuum peaks at `1/π`). Sampled
//! grids are refused: the transform has no noise averaging and shot noise
//! at large `|k|` overwhelms it.

use rayon::prelude::*;

use crate::{Error, Result};

use super::chi::{quantize_kt, CharFnGrid, GridMode};
use super::reconstruct::QuadSpec;

/// Rectangular output mesh in `(x, p)`.
#[derive(Copy, Clone, Debug)]
pub struct PhaseSpaceMesh {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl PhaseSpaceMesh {
    /// Square mesh `[−half_width, half_width]²` with `n` nodes per axis.
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, nx: n, p_min: -half_width, p_max: half_width, np: n }
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }

    pub fn cell_area(&self) -> f64 {
        let dx = if self.nx > 1 { (self.x_max - self.x_min) / (self.nx - 1) as f64 } else { 0.0 };
        let dp = if self.np > 1 { (self.p_max - self.p_min) / (self.np - 1) as f64 } else { 0.0 };
        dx * dp
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

/// Real-valued Wigner samples, row-major with x as the slow index.
#[derive(Clone, Debug)]
pub struct WignerMap {
    pub mesh: PhaseSpaceMesh,
    pub values: Vec<f64>,
}

impl WignerMap {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.mesh.np + ip]
    }

    /// Riemann integral over the mesh.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.mesh.cell_area()
    }
}

/// Transform an exact χ grid into a Wigner map.
pub fn wigner_from_chi(
    grid: &CharFnGrid,
    quad: &QuadSpec,
    mesh: &PhaseSpaceMesh,
) -> Result<WignerMap> {
    if grid.mode != GridMode::Exact {
        return Err(Error::ExactGridRequired(
            "the Wigner transform amplifies shot noise at large |k|",
        ));
    }
    quad.validate()?;
    if grid.points.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let lookup = grid.lookup();
    let thetas = quad.theta_values();
    let n_k = quad.n_k() as i64;
    let dth = quad.d_theta();
    let norm = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);

    // (k, θ, weight, χ) tuples of the quadrature, χ(−k) by symmetry.
    let mut terms = Vec::with_capacity(2 * quad.n_k() * quad.n_theta);
    for ki in -n_k..=n_k {
        if ki == 0 {
            continue;
        }
        let k = ki as f64 * quad.dk;
        let wk = if ki.abs() == n_k { quad.dk / 2.0 } else { quad.dk };
        for theta in &thetas {
            let key = quantize_kt(k.abs(), *theta);
            let chi = lookup
                .get(&key)
                .copied()
                .ok_or(Error::MissingGridPoint { k: k.abs(), theta: *theta })?;
            let chi = if ki < 0 { chi.conj() } else { chi };
            terms.push((k, *theta, wk * dth * k.abs() * norm, chi));
        }
    }

    // Kink correction, as in the reconstruction: + (Δk²/6)·Σ_θ dθ · 1/(2π²).
    let offset = quad.dk * quad.dk / 6.0 * (quad.n_theta as f64 * dth) * norm;

    let xs = mesh.xs();
    let ps = mesh.ps();
    let sqrt2 = std::f64::consts::SQRT_2;
    let values: Vec<f64> = xs
        .par_iter()
        .flat_map_iter(|x| {
            ps.iter().map(move |p| (*x, *p))
        })
        .map(|(x, p)| {
            let mut w = offset;
            for (k, theta, weight, chi) in &terms {
                let arg = -k * sqrt2 * (x * theta.cos() + p * theta.sin());
                w += weight * (chi.re * arg.cos() - chi.im * arg.sin());
            }
            w
        })
        .collect();

    Ok(WignerMap { mesh: *mesh, values })
}
