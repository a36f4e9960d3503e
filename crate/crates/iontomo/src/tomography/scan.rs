//! Finite-shot measurement simulation over a set of control points.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::dynamics::{free_evolve, AtomPrep, DriveParams};
use crate::fock::{IonState, Space};
use crate::{Error, Result};

use super::chi::{CharFnGrid, GridMode, GridPoint, PointValue, ScanMeta};
use super::control::ControlPoint;
use super::pg::ground_probability;

/// Simulate a tomographic scan of `rho_true`.
///
/// Each control point is measured with both probe preparations; the `g`
/// counts are binomial draws with the exact ground-state probability as
/// success rate. Every (point, probe) pair gets its own counter-mode stream
/// of the seeded generator, so results are independent of evaluation order
/// and bit-reproducible under internal parallelism.
pub fn simulate_scan(
    rho_true: &IonState,
    points: &[ControlPoint],
    shots: u64,
    seed: u64,
    params: &DriveParams,
) -> Result<CharFnGrid> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    params.require_resonant()?;
    if !matches!(rho_true.space(), Space::Vibrational(_)) {
        return Err(Error::SpaceMismatch {
            expected: Space::Vibrational(0),
            got: rho_true.space(),
        });
    }

    let sampled: Result<Vec<GridPoint>> = points
        .par_iter()
        .enumerate()
        .map(|(idx, point)| {
            let drive = point.drive(params.eta)?;
            let rotated = free_evolve(rho_true, point.free_evolution)?;
            let p_cos = ground_probability(&drive, point.tau_used, &AtomPrep::cos_probe(), &rotated)?
                .clamp(0.0, 1.0);
            let p_sin = ground_probability(&drive, point.tau_used, &AtomPrep::sin_probe(), &rotated)?
                .clamp(0.0, 1.0);
            let mut counts = [0u64; 2];
            for (probe, p) in [p_cos, p_sin].into_iter().enumerate() {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                rng.set_stream(2 * idx as u64 + probe as u64);
                let bin = Binomial::new(shots, p)
                    .map_err(|_| Error::InvalidProbability(p))?;
                counts[probe] = bin.sample(&mut rng);
            }
            Ok(GridPoint { control: *point, value: PointValue::Sampled { counts, shots } })
        })
        .collect();

    Ok(CharFnGrid {
        mode: GridMode::Sampled,
        meta: ScanMeta {
            eta: params.eta,
            tau: super::SCAN_TAU,
            seed: Some(seed),
            shots: Some(shots),
        },
        points: sampled?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::vacuum_state;
    use crate::tomography::QuadSpec;

    #[test]
    fn zero_shots_rejected() {
        let params = DriveParams::resonant(0.05, 1.0).unwrap();
        let vac = vacuum_state(8).unwrap();
        assert!(matches!(simulate_scan(&vac, &[], 0, 1, &params), Err(Error::NoShots)));
    }

    #[test]
    fn single_shot_estimates_are_binary() {
        let params = DriveParams::resonant(0.05, 1.0).unwrap();
        let vac = vacuum_state(24).unwrap();
        let quad = QuadSpec { k_max: 1.0, dk: 0.5, n_theta: 3 };
        let mesh = super::super::scan_mesh(&params, &quad, 100.0).unwrap();
        let grid = simulate_scan(&vac, &mesh, 1, 7, &params).unwrap();
        for p in &grid.points {
            for probe in 0..2 {
                let phat = p.value.p_hat(probe).unwrap();
                assert!(phat == 0.0 || phat == 1.0);
            }
        }
    }
}
