//! Star products and the phase-space equation of motion for coupled
//! spins 1/2.
//!
//! The prestar product combines a pointwise product with Poisson brackets;
//! the star product is its rank projection and mirrors the matrix product
//! under the transform. The equation-of-motion right-hand side is assembled
//! directly from the odd-bracket-count expansion so even terms cancel
//! exactly instead of numerically.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::wigner::{expand_bilinear, poisson_bracket, project_rank, WignerCoeffs};

/// Prestar product and its rank-projected star product.
#[derive(Clone, Debug)]
pub struct StarResult {
    pub prestar: WignerCoeffs,
    pub star: WignerCoeffs,
}

fn check_spin_half(f: &WignerCoeffs, g: &WignerCoeffs, n_spins: Option<usize>) -> Result<()> {
    if f.spin() != HalfInt::HALF || g.spin() != HalfInt::HALF {
        return Err(Error::ShapeMismatch(format!(
            "star products require J = 1/2, got J = {} and J = {}",
            f.spin(),
            g.spin()
        )));
    }
    if f.n_spins() != g.n_spins() {
        return Err(Error::ShapeMismatch(format!(
            "star product of {}-sphere and {}-sphere functions",
            f.n_spins(),
            g.n_spins()
        )));
    }
    if let Some(n) = n_spins {
        if f.n_spins() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} spheres, got {}",
                f.n_spins()
            )));
        }
    }
    Ok(())
}

/// Single-spin prestar product sqrt(2 pi) f g - (i/2) {f, g}.
pub fn prestar_single(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    check_spin_half(f, g, Some(1))?;
    Ok(prestar_multi_unchecked(f, g))
}

/// Single-spin star product: the prestar product truncated to ranks 0 and 1.
pub fn star_single(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    Ok(project_rank(&prestar_single(f, g)?, 1))
}

/// Multi-spin prestar product: the sphere-wise composition of the
/// single-sphere prestar operators, expanded over all 2^N subsets of
/// spheres. The subset with bracket spheres S contributes
/// sqrt(2 pi)^(N-|S|) (-i/2)^|S| times nested Poisson brackets on S and
/// pointwise products elsewhere; masks are visited in ascending order so
/// results are reproducible bit for bit.
pub fn prestar_multi(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    check_spin_half(f, g, None)?;
    Ok(prestar_multi_unchecked(f, g))
}

fn prestar_multi_unchecked(f: &WignerCoeffs, g: &WignerCoeffs) -> WignerCoeffs {
    let n = f.n_spins();
    let sqrt_2pi = (2.0 * PI).sqrt();
    let mut out = WignerCoeffs::zero(n, f.spin());
    for mask in 0u32..(1 << n) {
        let brackets = mask.count_ones();
        let weight =
            C64::new(sqrt_2pi, 0.0).powu(n as u32 - brackets) * C64::new(0.0, -0.5).powu(brackets);
        let term = expand_bilinear(f, g, mask);
        out = out
            .add(&term.scale(weight))
            .expect("shapes agree by construction");
    }
    out
}

/// Multi-spin star product, the rank projection of the prestar product.
pub fn star_multi(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    Ok(project_rank(&prestar_multi(f, g)?, 1))
}

/// Both the prestar product and its projection.
pub fn star_with_prestar(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<StarResult> {
    let prestar = prestar_multi(f, g)?;
    let star = project_rank(&prestar, 1);
    Ok(StarResult { prestar, star })
}

/// Star commutator f * g - g * f.
pub fn star_commutator(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    star_multi(f, g)?.sub(&star_multi(g, f)?)
}

/// Right-hand side of the equation of motion,
/// d W_rho / dt = -i [W_H, W_rho]_star, assembled from the expansion over
/// odd bracket counts: the even subsets cancel in the commutator and the
/// odd ones double, leaving
/// -2i (W_1)^{-1} P sum_{odd l} c^l sum_{|S| = l} (bracket terms)
/// with c = -i / sqrt(8 pi).
pub fn eom_rhs(w_h: &WignerCoeffs, w_rho: &WignerCoeffs) -> Result<WignerCoeffs> {
    check_spin_half(w_h, w_rho, None)?;
    let n = w_h.n_spins();
    let c = C64::new(0.0, -1.0 / (8.0 * PI).sqrt());
    let inv_w_identity = (2.0 * PI).sqrt().powi(n as i32);
    let mut sum = WignerCoeffs::zero(n, w_h.spin());
    for mask in 0u32..(1 << n) {
        let brackets = mask.count_ones();
        if brackets % 2 == 0 {
            continue;
        }
        let term = expand_bilinear(w_h, w_rho, mask);
        sum = sum.add(&term.scale(c.powu(brackets)))?;
    }
    let prefactor = C64::new(0.0, -2.0 * inv_w_identity);
    Ok(project_rank(&sum.scale(prefactor), 1))
}

/// Fast path for natural Hamiltonians (at most bilinear terms):
/// d W_rho / dt = sqrt(2 pi)^(N-1) P sum_k {W_rho, W_H}^{k}.
/// The precondition is detected from the coefficient support of `w_h`.
pub fn eom_rhs_natural(w_h: &WignerCoeffs, w_rho: &WignerCoeffs) -> Result<WignerCoeffs> {
    check_spin_half(w_h, w_rho, None)?;
    for (idx, _) in w_h.iter() {
        let interacting = idx.iter().filter(|jm| jm.j >= 1).count();
        if interacting > 2 {
            return Err(Error::NotNaturalHamiltonian { count: interacting });
        }
    }
    let n = w_h.n_spins();
    let mut sum = WignerCoeffs::zero(n, w_h.spin());
    for k in 1..=n {
        sum = sum.add(&poisson_bracket(w_rho, w_h, k)?)?;
    }
    let prefactor = (2.0 * PI).sqrt().powi(n as i32 - 1);
    Ok(project_rank(&sum.scale(C64::new(prefactor, 0.0)), 1))
}

/// Single-spin evolution under a linear Hamiltonian for arbitrary spin J:
/// d W_A / dt = N_J {W_A, W_H} with N_J = 1/sqrt(2J(J+1)(2J+1)/3).
pub fn eom_rhs_linear_j(
    w_h: &WignerCoeffs,
    w_rho: &WignerCoeffs,
    spin: HalfInt,
) -> Result<WignerCoeffs> {
    if w_h.n_spins() != 1 || w_rho.n_spins() != 1 {
        return Err(Error::ShapeMismatch(
            "linear-Hamiltonian evolution applies to a single spin".into(),
        ));
    }
    if w_h.max_rank_per_sphere() > 1 || w_h.iter().any(|(idx, _)| idx[0].j > 1) {
        return Err(Error::NonlinearHamiltonian);
    }
    let jf = spin.as_f64();
    let n_j = 1.0 / (2.0 * jf * (jf + 1.0) * (2.0 * jf + 1.0) / 3.0).sqrt();
    Ok(poisson_bracket(w_rho, w_h, 1)?.scale(C64::new(n_j, 0.0)))
}
