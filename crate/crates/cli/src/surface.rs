//! Sampling of phase-space functions on equiangular grids for plotting.

use moyal_spin_core::error::{Error, Result};
use moyal_spin_core::wigner::WignerCoeffs;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::props::PropsTerm;

/// Grid of complex values over one sphere, row-major with theta as the
/// outer (slow) coordinate. Theta covers [0, pi] inclusive, phi covers
/// [0, 2 pi) exclusive; the grid holds resolution^2 values.
#[derive(Clone, Debug)]
pub struct SampledSurface {
    pub spin_slot: usize,
    pub fixed_angles: Vec<(f64, f64)>,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub values: Vec<C64>,
    pub decomposition_id: Option<usize>,
}

impl SampledSurface {
    pub fn value(&self, theta_index: usize, phi_index: usize) -> C64 {
        self.values[theta_index * self.phis.len() + phi_index]
    }
}

fn grid_axes(resolution: usize) -> (Vec<f64>, Vec<f64>) {
    let thetas: Vec<f64> = (0..resolution)
        .map(|i| PI * i as f64 / (resolution - 1) as f64)
        .collect();
    let phis: Vec<f64> = (0..resolution)
        .map(|i| 2.0 * PI * i as f64 / resolution as f64)
        .collect();
    (thetas, phis)
}

/// Number of worker threads: MOYAL_SPIN_THREADS if set, otherwise the
/// machine parallelism.
pub fn thread_cap() -> usize {
    std::env::var("MOYAL_SPIN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Evaluates rows of the grid in parallel, capped by [`thread_cap`].
fn sample_rows(thetas: &[f64], phis: &[f64], eval: impl Fn(f64, f64) -> C64 + Sync) -> Vec<C64> {
    let n_threads = thread_cap().min(thetas.len()).max(1);
    let mut values = vec![C64::new(0.0, 0.0); thetas.len() * phis.len()];
    let rows_per_chunk = thetas.len().div_ceil(n_threads);
    std::thread::scope(|scope| {
        for (chunk_id, chunk) in values.chunks_mut(rows_per_chunk * phis.len()).enumerate() {
            let eval = &eval;
            let first_row = chunk_id * rows_per_chunk;
            scope.spawn(move || {
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    let row = first_row + offset / phis.len();
                    let col = offset % phis.len();
                    *slot = eval(thetas[row], phis[col]);
                }
            });
        }
    });
    values
}

/// Samples one sphere of a multi-sphere function, holding the remaining
/// spheres at `fixed_angles` (given in sphere order, skipping the sampled
/// slot).
pub fn sample_surface(
    w: &WignerCoeffs,
    spin_slot: usize,
    resolution: usize,
    fixed_angles: &[(f64, f64)],
) -> Result<SampledSurface> {
    if spin_slot == 0 || spin_slot > w.n_spins() {
        return Err(Error::SlotOutOfRange {
            slot: spin_slot,
            n_spins: w.n_spins(),
        });
    }
    if resolution < 2 {
        return Err(Error::ShapeMismatch(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if fixed_angles.len() != w.n_spins() - 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected {} fixed angle pairs, got {}",
            w.n_spins() - 1,
            fixed_angles.len()
        )));
    }
    let (thetas, phis) = grid_axes(resolution);
    let values = sample_rows(&thetas, &phis, |theta, phi| {
        let mut angles = Vec::with_capacity(w.n_spins());
        let mut fixed = fixed_angles.iter();
        for slot in 1..=w.n_spins() {
            if slot == spin_slot {
                angles.push((theta, phi));
            } else {
                angles.push(*fixed.next().expect("length checked above"));
            }
        }
        w.evaluate(&angles)
    });
    Ok(SampledSurface {
        spin_slot,
        fixed_angles: fixed_angles.to_vec(),
        thetas,
        phis,
        values,
        decomposition_id: None,
    })
}

/// Samples one display factor of a product term (see
/// [`PropsTerm::display_factor`]).
pub fn sample_props_factor(
    term: &PropsTerm,
    spin_slot: usize,
    resolution: usize,
    term_id: usize,
) -> Result<SampledSurface> {
    if spin_slot == 0 || spin_slot > term.factors.len() {
        return Err(Error::SlotOutOfRange {
            slot: spin_slot,
            n_spins: term.factors.len(),
        });
    }
    if resolution < 2 {
        return Err(Error::ShapeMismatch(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let factor = term.display_factor(spin_slot - 1);
    let (thetas, phis) = grid_axes(resolution);
    let values = sample_rows(&thetas, &phis, |theta, phi| {
        factor.evaluate(&[(theta, phi)])
    });
    Ok(SampledSurface {
        spin_slot,
        fixed_angles: Vec::new(),
        thetas,
        phis,
        values,
        decomposition_id: Some(term_id),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use moyal_spin_core::angular::{r_normalization, HalfInt};
    use moyal_spin_core::spinop::{cartesian_op, Axis, Jm};
    use moyal_spin_core::wigner::wigner_transform;

    #[test]
    fn cos_theta_surface_has_polar_extrema() {
        let w = wigner_transform(&cartesian_op(1, &[(1, Axis::Z)]).unwrap());
        let surface = sample_surface(&w, 1, 16, &[]).unwrap();
        assert_eq!(surface.values.len(), 256);
        let r = r_normalization();
        // Poles carry |R cos theta| = R, the equator vanishes.
        assert!((surface.value(0, 0).re - r).abs() < 1e-12);
        assert!((surface.value(15, 0).re + r).abs() < 1e-12);
        let equator_row = 15 / 2;
        let max_pole = surface.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((max_pole - r).abs() < 1e-12);
        assert!(surface.value(equator_row, 3).norm() < 0.2 * r);
    }

    #[test]
    fn beta_projector_lobes() {
        // 1 - sqrt(3) cos(theta) up to scale: the theta = pi value exceeds
        // the theta = 0 value in magnitude with opposite signs.
        let w = wigner_transform(&cartesian_op(1, &[(1, Axis::Beta)]).unwrap());
        let surface = sample_surface(&w, 1, 32, &[]).unwrap();
        let north = surface.value(0, 0).re;
        let south = surface.value(31, 0).re;
        assert!(north < 0.0 && south > 0.0);
        assert!(south.abs() > north.abs());
    }

    #[test]
    fn coherence_phase_winds_once() {
        let w = moyal_spin_core::wigner::WignerCoeffs::from_entries(
            1,
            HalfInt::HALF,
            [(vec![Jm::new(1, -1)], C64::new(1.0, 0.0))],
        );
        let surface = sample_surface(&w, 1, 24, &[]).unwrap();
        let equator = 12;
        // Constant magnitude along phi.
        let norms: Vec<f64> = (0..24).map(|i| surface.value(equator, i).norm()).collect();
        for v in &norms {
            assert!((v - norms[0]).abs() < 1e-12);
        }
        // Phase decreases by 2 pi around the circle (order m = -1).
        let mut winding = 0.0;
        for i in 0..24 {
            let a = surface.value(equator, i).arg();
            let b = surface.value(equator, (i + 1) % 24).arg();
            let mut d = b - a;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            winding += d;
        }
        assert!((winding + 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn fixed_angle_slices_match_full_evaluation() {
        let w = wigner_transform(&cartesian_op(2, &[(1, Axis::X), (2, Axis::Z)]).unwrap());
        let fixed = [(0.9, 2.2)];
        let surface = sample_surface(&w, 2, 8, &fixed).unwrap();
        for (ti, &theta) in surface.thetas.iter().enumerate() {
            for (pi_idx, &phi) in surface.phis.iter().enumerate() {
                let direct = w.evaluate(&[(0.9, 2.2), (theta, phi)]);
                assert!((surface.value(ti, pi_idx) - direct).norm() < 1e-13);
            }
        }
        assert!(sample_surface(&w, 3, 8, &fixed).is_err());
        assert!(sample_surface(&w, 1, 1, &fixed).is_err());
        assert!(sample_surface(&w, 1, 8, &[]).is_err());
    }
}
