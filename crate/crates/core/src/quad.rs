//! Independent numerical validation through sphere quadrature.
//!
//! Gauss-Legendre nodes in cos(theta) crossed with a uniform phi grid
//! integrate band-limited spherical functions exactly, which makes the
//! integral checks here a genuinely independent route against the
//! coefficient-space algebra: the forward/inverse transform, the
//! phase-space product structure, and the integral form of the star
//! product built from the three-point kernel expansion.

use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

use crate::angular::{clebsch_gordan, tables, HalfInt};
use crate::error::{Error, Result};
use crate::spinop::{
    embed_single, random_hermitian, random_operator, rotation_matrix, tensor_op, SpinOperator,
};
use crate::wigner::{sph_harmonic, wigner_transform, WignerCoeffs};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton iteration on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Product quadrature grid over one sphere: Gauss-Legendre in cos(theta),
/// uniform (trapezoidal) in phi.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    thetas: Vec<f64>,
    theta_weights: Vec<f64>,
    phis: Vec<f64>,
    phi_weight: f64,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let thetas: Vec<f64> = x.iter().map(|&c| c.acos()).collect();
        let phis: Vec<f64> = (0..n_phi)
            .map(|i| 2.0 * PI * i as f64 / n_phi as f64)
            .collect();
        SphereGrid {
            n_theta,
            n_phi,
            thetas,
            theta_weights: w,
            phis,
            phi_weight: 2.0 * PI / n_phi as f64,
        }
    }

    /// Iterates over (theta, phi, weight) with weights summing to 4 pi.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.thetas
            .iter()
            .zip(self.theta_weights.iter())
            .flat_map(move |(&t, &wt)| self.phis.iter().map(move |&p| (t, p, wt * self.phi_weight)))
    }

    /// Integrates a complex function over this sphere.
    pub fn integrate_fn(&self, f: impl Fn(f64, f64) -> C64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for (t, p, w) in self.nodes() {
            sum += f(t, p) * w;
        }
        sum
    }
}

/// Integrates a sampled function over the tensor product of per-sphere
/// grids.
pub fn integrate_fn(grids: &[SphereGrid], f: impl Fn(&[(f64, f64)]) -> C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut point = vec![(0.0, 0.0); grids.len()];
    integrate_rec(grids, &f, 0, 1.0, &mut point, &mut sum);
    sum
}

fn integrate_rec(
    grids: &[SphereGrid],
    f: &impl Fn(&[(f64, f64)]) -> C64,
    sphere: usize,
    weight: f64,
    point: &mut Vec<(f64, f64)>,
    sum: &mut C64,
) {
    if sphere == grids.len() {
        *sum += f(point) * weight;
        return;
    }
    for (t, p, w) in grids[sphere].nodes() {
        point[sphere] = (t, p);
        integrate_rec(grids, f, sphere + 1, weight * w, point, sum);
    }
}

/// Integrates a coefficient-space function over N spheres. Errors when the
/// grid cannot resolve the stored ranks.
pub fn integrate(w: &WignerCoeffs, grids: &[SphereGrid]) -> Result<C64> {
    if grids.len() != w.n_spins() {
        return Err(Error::ShapeMismatch(format!(
            "{} grids for a {}-sphere function",
            grids.len(),
            w.n_spins()
        )));
    }
    let rank = w.max_rank_per_sphere();
    if let Some(g) = grids.iter().find(|g| rank as usize >= g.n_theta) {
        return Err(Error::UnderResolvedGrid {
            rank,
            n_theta: g.n_theta,
        });
    }
    Ok(integrate_fn(grids, |angles| w.evaluate(angles)))
}

/// Rebuilds a single-spin operator from point samples of its phase-space
/// function, integrating the sampled function against the kernel
/// sum_jm conj(Y_jm) T_jm node by node.
pub fn inverse_wigner_by_quadrature(
    f: &dyn Fn(f64, f64) -> C64,
    spin: HalfInt,
    grid: &SphereGrid,
) -> Result<SpinOperator> {
    let max_rank = spin.twice() as usize;
    if max_rank >= grid.n_theta {
        return Err(Error::UnderResolvedGrid {
            rank: max_rank as u32,
            n_theta: grid.n_theta,
        });
    }
    let mut op = SpinOperator::zeros(1, spin);
    for j in 0..=spin.twice() as u32 {
        for m in -(j as i32)..=j as i32 {
            let coeff = grid.integrate_fn(|t, p| sph_harmonic(j, m, t, p).conj() * f(t, p));
            op = op.add(&tensor_op(spin, j, m)?.scale(coeff))?;
        }
    }
    Ok(op)
}

/// Integral form of the star product for a single spin J: both factors are
/// decomposed by quadrature and recombined through the three-point-kernel
/// expansion sum_L Q C^{LM}_{j1 m1 j2 m2} Y_LM. Exact for any J.
pub fn integral_star(
    w_a: &dyn Fn(f64, f64) -> C64,
    w_b: &dyn Fn(f64, f64) -> C64,
    spin: HalfInt,
    grid: &SphereGrid,
) -> Result<WignerCoeffs> {
    let max_rank = spin.twice() as u32;
    if 2 * max_rank as usize + 1 > grid.n_theta {
        return Err(Error::UnderResolvedGrid {
            rank: 2 * max_rank,
            n_theta: grid.n_theta,
        });
    }
    let decompose = |f: &dyn Fn(f64, f64) -> C64| -> Vec<(u32, i32, C64)> {
        let mut out = Vec::new();
        for j in 0..=max_rank {
            for m in -(j as i32)..=j as i32 {
                let c = grid.integrate_fn(|t, p| sph_harmonic(j, m, t, p).conj() * f(t, p));
                out.push((j, m, c));
            }
        }
        out
    };
    let a_coeffs = decompose(w_a);
    let b_coeffs = decompose(w_b);
    let tab = tables();
    let mut out = WignerCoeffs::zero(1, spin);
    for &(j1, m1, ca) in &a_coeffs {
        if ca.norm() <= crate::wigner::DROP_TOL {
            continue;
        }
        for &(j2, m2, cb) in &b_coeffs {
            if cb.norm() <= crate::wigner::DROP_TOL {
                continue;
            }
            let m = m1 + m2;
            for l in j1.abs_diff(j2)..=(j1 + j2).min(max_rank) {
                if m.abs() > l as i32 {
                    continue;
                }
                let q = tab.q(
                    spin,
                    HalfInt::from_int(j1 as i32),
                    HalfInt::from_int(j2 as i32),
                    HalfInt::from_int(l as i32),
                );
                if q == 0.0 {
                    continue;
                }
                let cg = clebsch_gordan(
                    HalfInt::from_int(j1 as i32),
                    HalfInt::from_int(m1),
                    HalfInt::from_int(j2 as i32),
                    HalfInt::from_int(m2),
                    HalfInt::from_int(l as i32),
                    HalfInt::from_int(m),
                );
                if cg == 0.0 {
                    continue;
                }
                out.add_term(&vec![crate::spinop::Jm::new(l, m)], ca * cb * q * cg);
            }
        }
    }
    Ok(out)
}

/// 3x3 rotation matrix about `axis` (not necessarily normalized) by
/// `angle`, acting on column vectors.
pub fn axis_angle_matrix(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (x, y, z) = (axis[0] / norm, axis[1] / norm, axis[2] / norm);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

fn transpose3(r: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in r.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[j][i] = v;
        }
    }
    out
}

/// Applies a 3x3 rotation to the unit vector given by spherical angles and
/// returns the rotated angles.
pub fn rotate_angles(r: &[[f64; 3]; 3], theta: f64, phi: f64) -> (f64, f64) {
    let v = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    }
    let new_theta = out[2].clamp(-1.0, 1.0).acos();
    let new_phi = out[1].atan2(out[0]).rem_euclid(2.0 * PI);
    (new_theta, new_phi)
}

/// One postulate line of the validation report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PostulateCheck {
    pub name: String,
    pub max_deviation: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Validation report over the defining postulates of the phase-space map:
/// linearity, reality, normalization/traciality, and covariance under
/// local rotations.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StratonovichReport {
    pub n_spins: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<PostulateCheck>,
}

impl StratonovichReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const COEFF_THRESHOLD: f64 = 1e-9;
const QUADRATURE_THRESHOLD: f64 = 1e-8;
const REALITY_THRESHOLD: f64 = 1e-11;

/// Runs the postulate suite for `n_spins` coupled spins 1/2 (coefficient
/// and quadrature paths) plus single-spin quadrature checks for J up to
/// 5/2.
pub fn validate_stratonovich(n_spins: usize, trials: usize, seed: u64) -> StratonovichReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let spin = HalfInt::HALF;
    let grids: Vec<SphereGrid> = (0..n_spins).map(|_| SphereGrid::new(4, 8)).collect();

    let mut linearity_dev: f64 = 0.0;
    let mut reality_dev: f64 = 0.0;
    let mut normalization_dev: f64 = 0.0;
    let mut traciality_dev: f64 = 0.0;
    let mut covariance_dev: f64 = 0.0;

    for _ in 0..trials {
        let a = random_operator(n_spins, spin, &mut rng);
        let b = random_operator(n_spins, spin, &mut rng);
        let wa = wigner_transform(&a);
        let wb = wigner_transform(&b);

        // (i) Linearity of the map.
        let alpha = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let combined = wigner_transform(&a.scale(alpha).add(&b).unwrap());
        let assembled = wa.scale(alpha).add(&wb).unwrap();
        linearity_dev = linearity_dev.max(combined.max_abs_diff(&assembled));

        // (ii) Reality: the transform of the adjoint is the conjugate
        // function; sampled on the grid, and hermitian inputs give real
        // values.
        let w_dag = wigner_transform(&a.dagger());
        let herm = random_hermitian(n_spins, spin, &mut rng);
        let w_herm = wigner_transform(&herm);
        let mut point = vec![(0.0, 0.0); n_spins];
        for _ in 0..8 {
            for slot in point.iter_mut() {
                *slot = (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
            }
            let dev = (w_dag.evaluate(&point) - wa.evaluate(&point).conj()).norm();
            reality_dev = reality_dev.max(dev);
            reality_dev = reality_dev.max(w_herm.evaluate(&point).im.abs());
        }

        // (iiia) Normalization: tr(A) equals the integral of W_1 W_A.
        let w_one = WignerCoeffs::identity_function(n_spins, spin);
        let integral = integrate_fn(&grids, |angles| {
            w_one.evaluate(angles) * wa.evaluate(angles)
        });
        normalization_dev = normalization_dev.max((integral - a.trace()).norm());

        // (iiib) Traciality: tr(B^dagger A) equals the integral of
        // conj(W_B) W_A; checked in coefficient space and by quadrature.
        let hs = b.inner(&a).unwrap();
        let coeff_side = wb.inner(&wa).unwrap();
        traciality_dev = traciality_dev.max((hs - coeff_side).norm());
        let quad_side = integrate_fn(&grids, |angles| {
            wb.evaluate(angles).conj() * wa.evaluate(angles)
        });
        traciality_dev = traciality_dev.max((hs - quad_side).norm());

        // (iv) Covariance under a random local rotation on every spin.
        let mut rotated = a.clone();
        let mut rotations = Vec::with_capacity(n_spins);
        for k in 1..=n_spins {
            let axis = [
                rng.gen_range(-1.0..1.0_f64),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let angle = rng.gen_range(0.0..2.0 * PI);
            let u = rotation_matrix(spin, axis, angle);
            let embedded = embed_single(n_spins, k, spin, &u).unwrap();
            rotated = embedded
                .mul(&rotated)
                .unwrap()
                .mul(&embedded.dagger())
                .unwrap();
            rotations.push(axis_angle_matrix(axis, angle));
        }
        let w_rotated = wigner_transform(&rotated);
        for _ in 0..4 {
            for slot in point.iter_mut() {
                *slot = (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
            }
            // W_{R(A)}(Omega) = W_A(R^{-1} Omega) sphere by sphere.
            let pulled: Vec<(f64, f64)> = point
                .iter()
                .zip(rotations.iter())
                .map(|(&(t, p), r)| rotate_angles(&transpose3(r), t, p))
                .collect();
            let dev = (w_rotated.evaluate(&point) - wa.evaluate(&pulled)).norm();
            covariance_dev = covariance_dev.max(dev);
        }
    }

    // Single-spin checks for higher spin numbers: round trip through
    // quadrature and traciality on a finer grid.
    let mut high_spin_dev: f64 = 0.0;
    for twice_j in [1, 2, 3, 4, 5] {
        let spin_j = HalfInt::from_twice(twice_j);
        let grid = SphereGrid::new(twice_j as usize + 2, 2 * twice_j as usize + 4);
        for _ in 0..trials.min(10) {
            let a = random_operator(1, spin_j, &mut rng);
            let w = wigner_transform(&a);
            let back =
                inverse_wigner_by_quadrature(&|t, p| w.evaluate(&[(t, p)]), spin_j, &grid).unwrap();
            high_spin_dev = high_spin_dev.max(back.max_abs_diff(&a));
            let b = random_operator(1, spin_j, &mut rng);
            let wb = wigner_transform(&b);
            let quad_side =
                grid.integrate_fn(|t, p| wb.evaluate(&[(t, p)]).conj() * w.evaluate(&[(t, p)]));
            high_spin_dev = high_spin_dev.max((quad_side - b.inner(&a).unwrap()).norm());
        }
    }

    let checks = vec![
        PostulateCheck {
            name: "linearity".into(),
            max_deviation: linearity_dev,
            threshold: COEFF_THRESHOLD,
            pass: linearity_dev < COEFF_THRESHOLD,
        },
        PostulateCheck {
            name: "reality".into(),
            max_deviation: reality_dev,
            threshold: REALITY_THRESHOLD,
            pass: reality_dev < REALITY_THRESHOLD,
        },
        PostulateCheck {
            name: "normalization".into(),
            max_deviation: normalization_dev,
            threshold: QUADRATURE_THRESHOLD,
            pass: normalization_dev < QUADRATURE_THRESHOLD,
        },
        PostulateCheck {
            name: "traciality".into(),
            max_deviation: traciality_dev,
            threshold: QUADRATURE_THRESHOLD,
            pass: traciality_dev < QUADRATURE_THRESHOLD,
        },
        PostulateCheck {
            name: "covariance".into(),
            max_deviation: covariance_dev,
            threshold: COEFF_THRESHOLD,
            pass: covariance_dev < COEFF_THRESHOLD,
        },
        PostulateCheck {
            name: "high_spin_quadrature".into(),
            max_deviation: high_spin_dev,
            threshold: QUADRATURE_THRESHOLD,
            pass: high_spin_dev < QUADRATURE_THRESHOLD,
        },
    ];

    StratonovichReport {
        n_spins,
        trials,
        seed,
        checks,
    }
}
