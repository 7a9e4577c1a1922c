//! Independent oracles shared by the integration tests. Everything here
//! deliberately avoids the closed-form coupling sums used by the library:
//! coupled states are built with ladder operators and Gram-Schmidt,
//! derivatives of spherical harmonics are taken analytically, and grid
//! integrals use raw Gauss-Legendre nodes.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

/// Clebsch-Gordan coefficient <j1 m1 j2 m2 | L M> computed by explicitly
/// constructing the coupled basis: the stretched state is lowered with
/// J_- = J1_- + J2_-, and each lower-L highest-weight state is fixed by
/// orthogonality with the Condon-Shortley sign (component with maximal m1
/// positive). All quantum numbers in twice-units.
pub fn cg_ladder(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tl: i32, tm: i32) -> f64 {
    if tm1 + tm2 != tm
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tl
        || tl < (tj1 - tj2).abs()
        || tl > tj1 + tj2
        || (tj1 + tj2 + tl) % 2 != 0
        || (tj1 + tm1) % 2 != 0
        || (tj2 + tm2) % 2 != 0
    {
        return 0.0;
    }

    // States in the M-subspace are maps (tm1 component) -> amplitude.
    type Vector = BTreeMap<i32, f64>;

    let lower = |state: &Vector, t_m: i32| -> Vector {
        // J_- amplitude sqrt(j(j+1) - m(m-1)) with twice-value arguments.
        let amp = |tj: i32, tm: i32| -> f64 {
            let j = tj as f64 / 2.0;
            let m = tm as f64 / 2.0;
            (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
        };
        let mut out: Vector = BTreeMap::new();
        for (&c1, &v) in state {
            let c2 = t_m - c1;
            // Lower the first constituent.
            if c1 - 2 >= -tj1 {
                *out.entry(c1 - 2).or_insert(0.0) += v * amp(tj1, c1);
            }
            // Lower the second constituent.
            if c2 - 2 >= -tj2 {
                *out.entry(c1).or_insert(0.0) += v * amp(tj2, c2);
            }
        }
        out
    };

    let dot = |a: &Vector, b: &Vector| -> f64 {
        a.iter()
            .map(|(k, v)| v * b.get(k).copied().unwrap_or(0.0))
            .sum()
    };

    // families[L] holds the current |L M> vector while M is lowered in
    // lockstep across all L >= M.
    let mut families: BTreeMap<i32, Vector> = BTreeMap::new();
    let top = tj1 + tj2;
    families.insert(top, BTreeMap::from([(tj1, 1.0)]));

    let mut t_m = top;
    loop {
        if t_m == tl {
            if let Some(state) = families.get(&tl) {
                // Lower this family down to the requested M.
                let mut current = state.clone();
                let mut mm = t_m;
                while mm > tm {
                    current = lower(&current, mm);
                    let norm = dot(&current, &current).sqrt();
                    for v in current.values_mut() {
                        *v /= norm;
                    }
                    mm -= 2;
                }
                return current.get(&tm1).copied().unwrap_or(0.0);
            }
        }
        if t_m <= (tj1 - tj2).abs() {
            return 0.0;
        }

        // Lower every existing family by one unit of M.
        let mut next: BTreeMap<i32, Vector> = BTreeMap::new();
        for (&l, state) in &families {
            let mut lowered = lower(state, t_m);
            let norm = dot(&lowered, &lowered).sqrt();
            for v in lowered.values_mut() {
                *v /= norm;
            }
            next.insert(l, lowered);
        }
        t_m -= 2;

        // A new family with L = t_m appears if allowed: orthogonal to all
        // lowered states in this subspace.
        if t_m >= (tj1 - tj2).abs() {
            let dim = count_subspace(tj1, tj2, t_m);
            if dim > next.len() {
                let mut candidate: Vector = BTreeMap::new();
                // Start from a basis state and orthogonalize.
                for seed_m1 in subspace_components(tj1, tj2, t_m) {
                    candidate.clear();
                    candidate.insert(seed_m1, 1.0);
                    for state in next.values() {
                        let overlap = dot(&candidate, state);
                        for (k, v) in state {
                            *candidate.entry(*k).or_insert(0.0) -= overlap * v;
                        }
                    }
                    if dot(&candidate, &candidate) > 1e-8 {
                        break;
                    }
                }
                let norm = dot(&candidate, &candidate).sqrt();
                for v in candidate.values_mut() {
                    *v /= norm;
                }
                // Condon-Shortley: the component with the largest m1 is
                // positive.
                let max_m1 = *candidate.keys().max().unwrap();
                if candidate[&max_m1] < 0.0 {
                    for v in candidate.values_mut() {
                        *v = -*v;
                    }
                }
                next.insert(t_m, candidate);
            }
        }
        families = next;
    }
}

fn subspace_components(tj1: i32, tj2: i32, tm: i32) -> Vec<i32> {
    let mut out = Vec::new();
    let mut c1 = tj1.min(tm + tj2);
    while c1 >= -tj1 && tm - c1 <= tj2 {
        out.push(c1);
        c1 -= 2;
    }
    out
}

fn count_subspace(tj1: i32, tj2: i32, tm: i32) -> usize {
    subspace_components(tj1, tj2, tm).len()
}

/// Analytic theta-derivative of a spherical harmonic:
/// dY_jm/dtheta = m cot(theta) Y_jm + sqrt((j-m)(j+m+1)) e^{-i phi} Y_{j,m+1}.
pub fn sph_dtheta(j: u32, m: i32, theta: f64, phi: f64) -> C64 {
    use moyal_spin_core::wigner::sph_harmonic;
    let mut out = sph_harmonic(j, m, theta, phi) * (m as f64) * theta.cos() / theta.sin();
    if m < j as i32 {
        let jf = j as f64;
        let mf = m as f64;
        let ladder = ((jf - mf) * (jf + mf + 1.0)).sqrt();
        out += sph_harmonic(j, m + 1, theta, phi) * ladder * C64::from_polar(1.0, -phi);
    }
    out
}

/// Analytic phi-derivative, i m Y_jm.
pub fn sph_dphi(j: u32, m: i32, theta: f64, phi: f64) -> C64 {
    use moyal_spin_core::wigner::sph_harmonic;
    sph_harmonic(j, m, theta, phi) * C64::new(0.0, m as f64)
}

/// Spherical Poisson bracket of two single harmonics evaluated pointwise
/// from the analytic derivatives:
/// (df/dphi dg/dtheta - df/dtheta dg/dphi) / (R sin theta).
pub fn poisson_bracket_pointwise(
    (j1, m1): (u32, i32),
    (j2, m2): (u32, i32),
    theta: f64,
    phi: f64,
) -> C64 {
    let r = moyal_spin_core::angular::r_normalization();
    (sph_dphi(j1, m1, theta, phi) * sph_dtheta(j2, m2, theta, phi)
        - sph_dtheta(j1, m1, theta, phi) * sph_dphi(j2, m2, theta, phi))
        / (r * theta.sin())
}

/// Raw Gauss-Legendre nodes, independent of the library implementation:
/// golub-welsch-free Newton iteration on the recurrence.
pub fn gl_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Integrates f(theta, phi) over the sphere with an n x 2n product rule.
pub fn integrate_sphere(n: usize, f: impl Fn(f64, f64) -> C64) -> C64 {
    let nodes = gl_nodes(n);
    let n_phi = 2 * n;
    let phi_w = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut sum = C64::new(0.0, 0.0);
    for &(x, w) in &nodes {
        let theta = x.acos();
        for ip in 0..n_phi {
            let phi = phi_w * ip as f64;
            sum += f(theta, phi) * (w * phi_w);
        }
    }
    sum
}
