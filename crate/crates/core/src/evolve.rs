//! Time propagation of phase-space functions.
//!
//! At fixed Hamiltonian the equation-of-motion right-hand side is linear in
//! the state, so it has a matrix form in the coefficient basis. The default
//! propagation exponentiates that generator exactly through a hermitian
//! eigendecomposition (the generator is anti-hermitian for hermitian
//! Hamiltonians); a fourth-order Runge-Kutta stepper provides the direct
//! ODE view.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::spinop::{basis_indices, evolve_exact, BasisIndex, SpinOperator};
use crate::star::eom_rhs;
use crate::wigner::{wigner_transform, WignerCoeffs};

/// Matrix form of the equation-of-motion right-hand side at fixed
/// Hamiltonian, acting on flattened coefficient vectors.
#[derive(Clone, Debug)]
pub struct Generator {
    n_spins: usize,
    spin: HalfInt,
    basis: Vec<BasisIndex>,
    mat: DMatrix<C64>,
}

impl Generator {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn basis_order(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn flatten(&self, w: &WignerCoeffs) -> DVector<C64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|idx| w.get(idx)))
    }

    pub fn unflatten(&self, v: &DVector<C64>) -> WignerCoeffs {
        WignerCoeffs::from_entries(
            self.n_spins,
            self.spin,
            self.basis
                .iter()
                .zip(v.iter())
                .filter(|(_, c)| c.norm() > crate::wigner::DROP_TOL)
                .map(|(idx, c)| (idx.clone(), *c)),
        )
    }

    /// Applies the generator to a state, equivalent to `eom_rhs`.
    pub fn apply(&self, w: &WignerCoeffs) -> WignerCoeffs {
        self.unflatten(&(&self.mat * self.flatten(w)))
    }
}

/// Trajectory of states at strictly increasing times, optionally paired
/// with matrix-propagated oracle states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WignerCoeffs>,
    pub oracle_states: Option<Vec<SpinOperator>>,
}

/// Per-time maximum coefficient deviation between a propagated trajectory
/// and the matrix oracle.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub deviations: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

/// Builds the generator column by column: column i is the right-hand side
/// on the i-th unit coefficient function.
pub fn build_generator(w_h: &WignerCoeffs) -> Result<Generator> {
    if w_h.spin() != HalfInt::HALF {
        return Err(Error::ShapeMismatch(format!(
            "generator construction requires J = 1/2, got {}",
            w_h.spin()
        )));
    }
    let n = w_h.n_spins();
    let basis = basis_indices(n, w_h.spin());
    let dim = basis.len();
    let mut mat = DMatrix::zeros(dim, dim);
    for (col, idx) in basis.iter().enumerate() {
        let unit = WignerCoeffs::from_entries(n, w_h.spin(), [(idx.clone(), C64::new(1.0, 0.0))]);
        let rhs = eom_rhs(w_h, &unit)?;
        for (row, row_idx) in basis.iter().enumerate() {
            let v = rhs.get(row_idx);
            if v.norm() > 0.0 {
                mat[(row, col)] = v;
            }
        }
    }
    // Unitary dynamics requires an anti-hermitian generator; a hermitian
    // deviation means the Hamiltonian function was not hermitian.
    let herm = &mat * C64::new(0.0, 1.0);
    let scale = herm
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let dev = (&herm - herm.adjoint())
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        / scale;
    if dev > 1e-10 {
        return Err(Error::NotHermitian { dev });
    }
    Ok(Generator {
        n_spins: n,
        spin: w_h.spin(),
        basis,
        mat,
    })
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedTimes);
    }
    Ok(())
}

/// Propagates by the exact matrix exponential of the generator. The
/// generator of unitary dynamics is anti-hermitian, so i G is hermitian and
/// a single eigendecomposition serves every requested time.
pub fn propagate(gen: &Generator, w0: &WignerCoeffs, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let herm = &gen.mat * C64::new(0.0, 1.0);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let v0 = eig.eigenvectors.adjoint() * gen.flatten(w0);
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let phased = DVector::from_iterator(
            v0.len(),
            v0.iter()
                .zip(eig.eigenvalues.iter())
                .map(|(c, &lambda)| c * C64::new(0.0, -lambda * t).exp()),
        );
        let vt = &eig.eigenvectors * phased;
        states.push(gen.unflatten(&vt));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        oracle_states: None,
    })
}

/// Classic fourth-order Runge-Kutta stepping of the equation of motion,
/// without forming the generator. Steps with fixed `dt` from 0 to `t_end`
/// (final partial step included) and records every step.
pub fn propagate_rk4(
    w_h: &WignerCoeffs,
    w0: &WignerCoeffs,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 {
        return Err(Error::NonPositiveStep(dt));
    }
    let mut times = vec![0.0];
    let mut states = vec![w0.clone()];
    let mut t = 0.0;
    let mut state = w0.clone();
    while t < t_end - 1e-15 * t_end.max(1.0) {
        let step = dt.min(t_end - t);
        let k1 = eom_rhs(w_h, &state)?;
        let k2 = eom_rhs(w_h, &state.add(&k1.scale(C64::new(step / 2.0, 0.0)))?)?;
        let k3 = eom_rhs(w_h, &state.add(&k2.scale(C64::new(step / 2.0, 0.0)))?)?;
        let k4 = eom_rhs(w_h, &state.add(&k3.scale(C64::new(step, 0.0)))?)?;
        let increment = k1
            .add(&k2.scale(C64::new(2.0, 0.0)))?
            .add(&k3.scale(C64::new(2.0, 0.0)))?
            .add(&k4)?
            .scale(C64::new(step / 6.0, 0.0));
        state = state.add(&increment)?;
        t += step;
        times.push(t);
        states.push(state.clone());
    }
    Ok(Trajectory {
        times,
        states,
        oracle_states: None,
    })
}

/// Propagates both in phase space and with the exact matrix oracle, and
/// reports the maximum coefficient deviation per time.
pub fn compare_with_oracle(
    h: &SpinOperator,
    rho0: &SpinOperator,
    times: &[f64],
) -> Result<(Trajectory, OracleReport)> {
    check_times(times)?;
    let w_h = wigner_transform(h);
    let w0 = wigner_transform(rho0);
    let gen = build_generator(&w_h)?;
    let mut traj = propagate(&gen, &w0, times)?;
    let mut oracle_states = Vec::with_capacity(times.len());
    let mut deviations = Vec::with_capacity(times.len());
    let mut max_dev: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let exact = evolve_exact(h, rho0, t)?;
        let dev = traj.states[i].max_abs_diff(&wigner_transform(&exact));
        deviations.push((t, dev));
        max_dev = max_dev.max(dev);
        oracle_states.push(exact);
    }
    traj.oracle_states = Some(oracle_states);
    Ok((
        traj,
        OracleReport {
            deviations,
            max_deviation: max_dev,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::r_normalization;
    use crate::spinop::{cartesian_op, random_hermitian, Axis, Jm};
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn half() -> HalfInt {
        HalfInt::HALF
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn generator_reference_structure() {
        // H = omega I_z at N = 1: the only action is +- i omega on the
        // coherence coefficients.
        let omega = 1.3;
        let w_h = wigner_transform(&cartesian_op(1, &[(1, Axis::Z)]).unwrap()).scale(c(omega, 0.0));
        let gen = build_generator(&w_h).unwrap();
        assert_eq!(gen.dimension(), 4);
        let mut expected = DMatrix::zeros(4, 4);
        // Basis order: (0,0), (1,-1), (1,0), (1,1).
        expected[(1, 1)] = c(0.0, omega);
        expected[(3, 3)] = c(0.0, -omega);
        let diff = (gen.matrix() - &expected)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);

        // H = 0 gives the zero generator.
        let zero = WignerCoeffs::zero(2, half());
        let gen = build_generator(&zero).unwrap();
        assert!(gen.matrix().iter().all(|z| z.norm() == 0.0));

        // Non-hermitian Hamiltonian functions are rejected (their
        // generator would not be anti-hermitian).
        let lowering = WignerCoeffs::harmonic(half(), 1, -1);
        assert!(matches!(
            build_generator(&lowering),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn generator_matches_rhs_on_random_states() {
        let mut rng = StdRng::seed_from_u64(2);
        let h = random_hermitian(2, half(), &mut rng);
        let w_h = wigner_transform(&h);
        let gen = build_generator(&w_h).unwrap();
        for _ in 0..50 {
            let w = wigner_transform(&random_hermitian(2, half(), &mut rng));
            let direct = eom_rhs(&w_h, &w).unwrap();
            assert!(gen.apply(&w).max_abs_diff(&direct) < 1e-12);
        }
        // Trace row is zero.
        let zero_row = basis_indices(2, half())
            .iter()
            .position(|idx| idx.iter().all(|jm| jm.j == 0))
            .unwrap();
        for col in 0..gen.dimension() {
            assert!(gen.matrix()[(zero_row, col)].norm() < 1e-13);
        }
        // Spectrum is purely imaginary: i G is hermitian.
        let herm = gen.matrix() * c(0.0, 1.0);
        let dev = (&herm - herm.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn zz_generator_squares_to_oscillator() {
        // d^2/dt^2 W(I_1x) = -(pi nu)^2 W(I_1x) under H = pi nu 2 I1z I2z.
        let nu = 0.75;
        let h = cartesian_op(2, &[(1, Axis::Z), (2, Axis::Z)])
            .unwrap()
            .scale(c(2.0 * PI * nu, 0.0));
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        let w = wigner_transform(&cartesian_op(2, &[(1, Axis::X)]).unwrap());
        let twice = gen.apply(&gen.apply(&w));
        assert!(twice.max_abs_diff(&w.scale(c(-(PI * nu).powi(2), 0.0))) < 1e-12);
    }

    #[test]
    fn propagation_matches_closed_forms() {
        // Single-spin precession.
        let omega = 1.1;
        let r = r_normalization();
        let h = cartesian_op(1, &[(1, Axis::Z)])
            .unwrap()
            .scale(c(omega, 0.0));
        let rho0 = cartesian_op(1, &[(1, Axis::X)]).unwrap();
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        let times: Vec<f64> = (0..10).map(|i| 0.37 * i as f64).collect();
        let traj = propagate(&gen, &wigner_transform(&rho0), &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            for &(theta, phi) in &[(0.5f64, 0.8f64), (1.9, 3.3)] {
                let expected = r
                    * theta.sin()
                    * ((omega * t).cos() * phi.cos() + (omega * t).sin() * phi.sin());
                let got = traj.states[i].evaluate(&[(theta, phi)]);
                assert!((got - c(expected, 0.0)).norm() < 1e-11);
            }
        }
        // t = 0 reproduces the initial coefficients exactly.
        assert!(traj.states[0].max_abs_diff(&wigner_transform(&rho0)) < 1e-13);

        // Coefficient norm is conserved along the trajectory.
        for s in &traj.states {
            assert!((s.norm_sq() - wigner_transform(&rho0).norm_sq()).abs() < 1e-10);
        }

        // Two-spin ZZ evolution: cos(pi nu t) W(I1x) + sin(pi nu t) W(2 I1y I2z).
        let nu = 0.9;
        let h = cartesian_op(2, &[(1, Axis::Z), (2, Axis::Z)])
            .unwrap()
            .scale(c(2.0 * PI * nu, 0.0));
        let rho0 = cartesian_op(2, &[(1, Axis::X)]).unwrap();
        let wa = wigner_transform(&rho0);
        let wb = wigner_transform(
            &cartesian_op(2, &[(1, Axis::Y), (2, Axis::Z)])
                .unwrap()
                .scale(c(2.0, 0.0)),
        );
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        let times: Vec<f64> = (0..8).map(|i| 0.21 * i as f64).collect();
        let traj = propagate(&gen, &wa, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let closed = wa
                .scale(c((PI * nu * t).cos(), 0.0))
                .add(&wb.scale(c((PI * nu * t).sin(), 0.0)))
                .unwrap();
            assert!(traj.states[i].max_abs_diff(&closed) < 1e-11);
        }

        // Unsorted times are rejected.
        assert!(matches!(
            propagate(&gen, &wa, &[0.0, 0.5, 0.2]),
            Err(Error::UnsortedTimes)
        ));
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let omega = 1.0;
        let h = cartesian_op(1, &[(1, Axis::Z)])
            .unwrap()
            .scale(c(omega, 0.0));
        let w_h = wigner_transform(&h);
        let w0 = wigner_transform(&cartesian_op(1, &[(1, Axis::X)]).unwrap());
        let t_end = PI;
        let gen = build_generator(&w_h).unwrap();
        let exact = propagate(&gen, &w0, &[t_end]).unwrap().states[0].clone();

        let coarse = propagate_rk4(&w_h, &w0, t_end, 0.02).unwrap();
        let fine = propagate_rk4(&w_h, &w0, t_end, 0.01).unwrap();
        let err_coarse = coarse.states.last().unwrap().max_abs_diff(&exact);
        let err_fine = fine.states.last().unwrap().max_abs_diff(&exact);
        assert!(err_coarse < 1e-8);
        let ratio = err_coarse / err_fine;
        assert!(
            (8.0..40.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio}"
        );

        // Oversized steps degrade accuracy but do not blow up.
        let rough = propagate_rk4(&w_h, &w0, 2.0 * PI / omega, 10.0).unwrap();
        assert!(rough.states.last().unwrap().norm_sq().is_finite());
        assert!(matches!(
            propagate_rk4(&w_h, &w0, 1.0, 0.0),
            Err(Error::NonPositiveStep(_))
        ));
    }

    #[test]
    fn rk4_three_spin_triplet_end_state() {
        let nu = 0.5;
        let h = cartesian_op(3, &[(1, Axis::Z), (2, Axis::Z)])
            .unwrap()
            .add(&cartesian_op(3, &[(2, Axis::Z), (3, Axis::Z)]).unwrap())
            .unwrap()
            .scale(c(2.0 * PI * nu, 0.0));
        let rho0 = cartesian_op(3, &[(2, Axis::X)]).unwrap();
        let target = cartesian_op(3, &[(1, Axis::Z), (2, Axis::X), (3, Axis::Z)])
            .unwrap()
            .scale(c(-4.0, 0.0));
        let traj = propagate_rk4(
            &wigner_transform(&h),
            &wigner_transform(&rho0),
            1.0 / (2.0 * nu),
            1.0 / (2.0 * nu) / 400.0,
        )
        .unwrap();
        let end = traj.states.last().unwrap();
        assert!(end.max_abs_diff(&wigner_transform(&target)) < 1e-8);
    }

    #[test]
    fn oracle_comparison_on_cnot() {
        let omega = 1.0;
        let h = cartesian_op(2, &[(1, Axis::Beta), (2, Axis::X)])
            .unwrap()
            .add(&cartesian_op(2, &[(1, Axis::Z)]).unwrap().scale(c(0.5, 0.0)))
            .unwrap()
            .scale(c(omega, 0.0));
        let rho0 = cartesian_op(2, &[(1, Axis::Beta), (2, Axis::Alpha)]).unwrap();
        let times = [0.0, PI / (2.0 * omega), PI / omega];
        let (traj, report) = compare_with_oracle(&h, &rho0, &times).unwrap();
        assert!(report.max_deviation < 1e-10);
        let target =
            wigner_transform(&cartesian_op(2, &[(1, Axis::Beta), (2, Axis::Beta)]).unwrap());
        assert!(traj.states[2].max_abs_diff(&target) < 1e-10);

        // H = 0: no deviation anywhere.
        let zero = SpinOperator::zeros(2, half());
        let (_, report) = compare_with_oracle(&zero, &rho0, &[0.0, 1.0, 2.0]).unwrap();
        assert!(report.max_deviation < 1e-13);
    }

    #[test]
    fn rigid_rotation_of_the_wigner_function() {
        // Under H = omega I_z the function rotates: W(t, theta, phi) =
        // W(0, theta, phi - omega t).
        let omega = 0.8;
        let h = cartesian_op(1, &[(1, Axis::Z)])
            .unwrap()
            .scale(c(omega, 0.0));
        let mut rng = StdRng::seed_from_u64(4);
        let rho0 = random_hermitian(1, half(), &mut rng);
        let w0 = wigner_transform(&rho0);
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        for _ in 0..100 {
            let t = rand::Rng::gen_range(&mut rng, 0.0..7.0);
            let theta = rand::Rng::gen_range(&mut rng, 0.05..PI - 0.05);
            let phi = rand::Rng::gen_range(&mut rng, 0.0..2.0 * PI);
            let traj = propagate(&gen, &w0, &[t]).unwrap();
            let rotated = traj.states[0].evaluate(&[(theta, phi)]);
            let reference = w0.evaluate(&[(theta, phi - omega * t)]);
            assert!((rotated - reference).norm() < 1e-10);
        }
    }

    #[test]
    fn coherence_picks_up_a_phase() {
        // rho = I_- under H = omega I_z evolves as exp(i omega t) Y_{1,-1}.
        let omega = 1.6;
        let h = cartesian_op(1, &[(1, Axis::Z)])
            .unwrap()
            .scale(c(omega, 0.0));
        let w0 = WignerCoeffs::harmonic(half(), 1, -1);
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        let times: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        let traj = propagate(&gen, &w0, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let state = &traj.states[i];
            assert_eq!(state.len(), 1);
            let coeff = state.get(&vec![Jm::new(1, -1)]);
            let expected = C64::from_polar(1.0, omega * t);
            assert!((coeff - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_shift_only_moves_the_constant_coefficient() {
        let mut rng = StdRng::seed_from_u64(6);
        let h = random_hermitian(2, half(), &mut rng);
        let rho = random_hermitian(2, half(), &mut rng);
        let shifted = rho
            .add(&SpinOperator::identity(2, half()).scale(c(0.7, 0.0)))
            .unwrap();
        let gen = build_generator(&wigner_transform(&h)).unwrap();
        let times = [0.0, 0.4, 1.1];
        let a = propagate(&gen, &wigner_transform(&rho), &times).unwrap();
        let b = propagate(&gen, &wigner_transform(&shifted), &times).unwrap();
        let all_zero: Vec<Jm> = vec![Jm::new(0, 0); 2];
        for (sa, sb) in a.states.iter().zip(&b.states) {
            let mut diff = sb.sub(sa).unwrap();
            let shift = diff.get(&all_zero);
            assert!((shift - c(0.7 * 2.0, 0.0)).norm() < 1e-11);
            diff.add_term(&all_zero, -shift);
            assert!(diff.norm_sq() < 1e-22);
        }
    }
}
