//! Conditional generation of coherent-state superpositions.
//!
//! The protocol: start from `|g⟩ ⊗ |α₀⟩`, evolve on resonance to an odd
//! multiple of π, then measure the atom. At `τ = (2q+1)π` the displacement
//! amplitude reaches `α(τ)σ̂_x` with `α = −2ηΩ/ν`, and the collapse leaves a
//! superposition of `|−(α₀+α)⟩` and `|α−α₀⟩` whose relative sign is set by
//! the measured atomic level — even (`g`) or odd (`e`) combinations, the
//! even/odd coherent states when `α₀ = 0`.

use num_complex::Complex64 as C64;

use crate::dynamics::{self, AtomPrep, DriveParams};
use crate::fock::{self, IonState, Space, StateData, TruncationReport};
use crate::metrics;
use crate::{tol, Error, Result};

/// Atomic measurement result.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AtomOutcome {
    G,
    E,
}

/// Which collapsed branch a target describes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    EvenOnG,
    OddOnE,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Interaction times that produce the superposition: `τ = (2q+1)π`.
pub fn cat_time(q: u32) -> f64 {
    (2.0 * q as f64 + 1.0) * std::f64::consts::PI
}

/// Outcome of a selective atomic measurement.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub result: AtomOutcome,
    pub probability: f64,
    /// Collapsed, renormalized vibrational state.
    pub post_state: IonState,
}

/// Project a composite state onto `|g⟩` or `|e⟩` and renormalize the
/// vibrational factor.
pub fn conditional_measure(state: &IonState, want: AtomOutcome) -> Result<MeasurementOutcome> {
    let n = match state.space() {
        Space::Composite(n) => n,
        other => return Err(Error::SpaceMismatch { expected: Space::Composite(0), got: other }),
    };
    let offset = match want {
        AtomOutcome::G => 0,
        AtomOutcome::E => n,
    };
    match state.data() {
        StateData::Pure(psi) => {
            let block = psi.rows(offset, n).into_owned();
            let probability = block.norm().powi(2);
            if probability < tol::ZERO_PROB {
                return Err(Error::ZeroProbabilityBranch(probability));
            }
            let post_state = IonState::pure_normalized(Space::Vibrational(n), block)?;
            Ok(MeasurementOutcome { result: want, probability, post_state })
        }
        StateData::Density(rho) => {
            let block = rho.view((offset, offset), (n, n)).into_owned();
            let probability = block.trace().re;
            if probability < tol::ZERO_PROB {
                return Err(Error::ZeroProbabilityBranch(probability));
            }
            let post = block / C64::new(probability, 0.0);
            let post_state = IonState::density(Space::Vibrational(n), post)?;
            Ok(MeasurementOutcome { result: want, probability, post_state })
        }
    }
}

/// Normalized `|α⟩ ± |−α⟩`.
///
/// The continuum normalization constants are `1/√(2(1±e^{−2|α|²}))`; after
/// truncation the state is renormalized numerically and the report records
/// what was cut.
pub fn even_odd_cat(n: usize, alpha: C64, parity: Parity) -> Result<(IonState, TruncationReport)> {
    if parity == Parity::Odd && alpha.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let (plus, rep_p) = fock::coherent_state(n, alpha)?;
    let (minus, rep_m) = fock::coherent_state(n, -alpha)?;
    let vp = plus.pure_vector().expect("coherent states are pure");
    let vm = minus.pure_vector().expect("coherent states are pure");
    let combined = match parity {
        Parity::Even => vp + vm,
        Parity::Odd => vp - vm,
    };
    let state = IonState::pure_normalized(Space::Vibrational(n), combined)?;
    let top = rep_p.top_level_population.max(rep_m.top_level_population);
    Ok((state, TruncationReport::new(n, top, tol::LEAKAGE_TOL)))
}

/// The collapsed-state description for a given drive and initial amplitude.
#[derive(Clone, Debug)]
pub struct CatTarget {
    pub alpha0: C64,
    /// `α = −2ηΩ/ν`, the displacement picked up at `τ = (2q+1)π`.
    pub alpha_cat: f64,
    pub branch: Branch,
    /// The two coherent components `{−(α₀+α), α−α₀}`.
    pub components: [C64; 2],
}

impl CatTarget {
    pub fn new(params: &DriveParams, alpha0: C64, want: AtomOutcome) -> Self {
        let alpha_cat = -2.0 * params.coupling();
        let a = C64::new(alpha_cat, 0.0);
        let branch = match want {
            AtomOutcome::G => Branch::EvenOnG,
            AtomOutcome::E => Branch::OddOnE,
        };
        CatTarget { alpha0, alpha_cat, branch, components: [-(alpha0 + a), a - alpha0] }
    }

    /// The normalized target superposition on an `n`-level space.
    pub fn state(&self, n: usize) -> Result<IonState> {
        let (c0, _) = fock::coherent_state(n, self.components[0])?;
        let (c1, _) = fock::coherent_state(n, self.components[1])?;
        let v0 = c0.pure_vector().expect("pure");
        let v1 = c1.pure_vector().expect("pure");
        let combined = match self.branch {
            Branch::EvenOnG => v0 + v1,
            Branch::OddOnE => v0 - v1,
        };
        IonState::pure_normalized(Space::Vibrational(n), combined)
    }
}

/// One interaction of duration `τ = (2q+1)π` from `|g⟩ ⊗ vib`, followed by a
/// selective measurement. Accepts pure or mixed vibrational inputs so
/// interactions can be chained.
pub fn interact_and_measure(
    params: &DriveParams,
    vib: &IonState,
    q: u32,
    want: AtomOutcome,
) -> Result<MeasurementOutcome> {
    params.require_resonant()?;
    let evolved = dynamics::evolve(params, cat_time(q), &AtomPrep::ground(), vib)?;
    conditional_measure(&evolved.state, want)
}

/// Full protocol run with fidelity scoring against the ideal target.
#[derive(Clone, Debug)]
pub struct CatRun {
    pub outcome: MeasurementOutcome,
    pub fidelity: f64,
    pub target: CatTarget,
}

/// Run the generation protocol from a coherent state `|α₀⟩`.
pub fn cat_protocol(
    params: &DriveParams,
    alpha0: C64,
    q: u32,
    want: AtomOutcome,
    n: usize,
) -> Result<CatRun> {
    params.require_resonant()?;
    if !params.in_paper_regime() {
        return Err(Error::OutsidePaperRegime(params.eta));
    }
    let (vib, _) = fock::coherent_state(n, alpha0)?;
    let outcome = interact_and_measure(params, &vib, q, want)?;
    let target = CatTarget::new(params, alpha0, want);
    let fidelity = metrics::fidelity(&target.state(n)?, &outcome.post_state)?;
    Ok(CatRun { outcome, fidelity, target })
}
