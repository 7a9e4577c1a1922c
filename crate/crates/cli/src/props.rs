//! Decomposition of a multi-sphere phase-space function into a sum of
//! products of single-sphere functions, for visualization as overlapping
//! circles.
//!
//! The decomposition groups greedily along the last spin slot: the last
//! sphere is expanded in the orthonormal hermitian basis (identity, x, y,
//! z components), each group's leading part is decomposed recursively, and
//! every factor is normalized with the aggregate scale kept per term. The
//! grouping keeps the term count at or below 4^(N-1) and reproduces the
//! input exactly. Sum decompositions are not unique; this one is chosen
//! for determinism.

use moyal_spin_core::angular::HalfInt;
use moyal_spin_core::spinop::{BasisIndex, Jm};
use moyal_spin_core::wigner::WignerCoeffs;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

/// One product term: `scale` times the tensor product of unit-norm
/// single-sphere factors, first sphere first.
#[derive(Clone, Debug)]
pub struct PropsTerm {
    pub scale: C64,
    pub factors: Vec<WignerCoeffs>,
}

impl PropsTerm {
    /// Evaluates scale * prod_k factor_k(theta_k, phi_k).
    pub fn evaluate(&self, angles: &[(f64, f64)]) -> C64 {
        let mut value = self.scale;
        for (factor, &point) in self.factors.iter().zip(angles.iter()) {
            value *= factor.evaluate(&[point]);
        }
        value
    }

    /// Factor k rescaled for display: |scale|^(1/N) on every sphere with
    /// the phase of the scale attached to the first factor.
    pub fn display_factor(&self, k: usize) -> WignerCoeffs {
        let n = self.factors.len() as f64;
        let magnitude = self.scale.norm().powf(1.0 / n);
        let mut weight = C64::new(magnitude, 0.0);
        if k == 0 && self.scale.norm() > 0.0 {
            weight *= self.scale / self.scale.norm();
        }
        self.factors[k].scale(weight)
    }
}

/// Hermitian single-sphere components of the last spin slot.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Component {
    Identity,
    X,
    Y,
    Z,
}

fn component_function(spin: HalfInt, component: Component) -> WignerCoeffs {
    let s = 1.0 / 2.0_f64.sqrt();
    match component {
        Component::Identity => {
            WignerCoeffs::from_entries(1, spin, [(vec![Jm::new(0, 0)], C64::new(1.0, 0.0))])
        }
        Component::X => WignerCoeffs::from_entries(
            1,
            spin,
            [
                (vec![Jm::new(1, -1)], C64::new(s, 0.0)),
                (vec![Jm::new(1, 1)], C64::new(-s, 0.0)),
            ],
        ),
        Component::Y => WignerCoeffs::from_entries(
            1,
            spin,
            [
                (vec![Jm::new(1, -1)], C64::new(0.0, s)),
                (vec![Jm::new(1, 1)], C64::new(0.0, s)),
            ],
        ),
        Component::Z => {
            WignerCoeffs::from_entries(1, spin, [(vec![Jm::new(1, 0)], C64::new(1.0, 0.0))])
        }
    }
}

/// Weights of one (j, m) coefficient of the last sphere in the hermitian
/// component basis.
fn component_weights(jm: Jm, value: C64) -> Vec<(Component, C64)> {
    let s = 1.0 / 2.0_f64.sqrt();
    match (jm.j, jm.m) {
        (0, 0) => vec![(Component::Identity, value)],
        (1, -1) => vec![
            (Component::X, value * s),
            (Component::Y, value * C64::new(0.0, -s)),
        ],
        (1, 0) => vec![(Component::Z, value)],
        (1, 1) => vec![
            (Component::X, value * -s),
            (Component::Y, value * C64::new(0.0, -s)),
        ],
        _ => unreachable!("rank above 1 cannot appear for spin 1/2 functions"),
    }
}

/// Decomposes `w` into product terms; the sum of all terms reproduces `w`
/// exactly. Requires J = 1/2.
pub fn props_decompose(w: &WignerCoeffs) -> Vec<PropsTerm> {
    assert_eq!(
        w.spin(),
        HalfInt::HALF,
        "product decomposition is defined for spin 1/2"
    );
    let n = w.n_spins();
    if w.is_empty() {
        return Vec::new();
    }
    if n == 1 {
        let (scale, factor) = normalize_single(w);
        return vec![PropsTerm {
            scale,
            factors: vec![factor],
        }];
    }

    // Group by the hermitian component of the last sphere.
    let mut groups: BTreeMap<Component, WignerCoeffs> = BTreeMap::new();
    for (idx, &value) in w.iter() {
        let last = idx[n - 1];
        let rest: BasisIndex = idx[..n - 1].to_vec();
        for (component, weight) in component_weights(last, value) {
            groups
                .entry(component)
                .or_insert_with(|| WignerCoeffs::zero(n - 1, w.spin()))
                .add_term(&rest, weight);
        }
    }

    let mut terms = Vec::new();
    for (component, leading) in groups {
        if leading.is_empty() {
            continue;
        }
        let last_factor = component_function(w.spin(), component);
        for sub in props_decompose(&leading) {
            let mut factors = sub.factors;
            factors.push(last_factor.clone());
            terms.push(PropsTerm {
                scale: sub.scale,
                factors,
            });
        }
    }
    terms
}

/// Splits a single-sphere function into (scale, unit-norm factor) with a
/// deterministic phase: the largest coefficient of the factor is made real
/// and positive.
fn normalize_single(w: &WignerCoeffs) -> (C64, WignerCoeffs) {
    let norm = w.norm_sq().sqrt();
    let mut anchor = C64::new(0.0, 0.0);
    let mut best = -1.0;
    for (_, &v) in w.iter() {
        if v.norm() > best + 1e-15 {
            best = v.norm();
            anchor = v;
        }
    }
    let phase = anchor / anchor.norm();
    let scale = phase * norm;
    (scale, w.scale(C64::new(1.0, 0.0) / scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use moyal_spin_core::spinop::{cartesian_op, random_operator, Axis, SpinOperator};
    use moyal_spin_core::wigner::wigner_transform;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn reconstruct_matches(w: &WignerCoeffs, terms: &[PropsTerm], rng: &mut StdRng) {
        for _ in 0..20 {
            let angles: Vec<(f64, f64)> = (0..w.n_spins())
                .map(|_| (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let direct = w.evaluate(&angles);
            let sum: C64 = terms.iter().map(|t| t.evaluate(&angles)).sum();
            assert!(
                (direct - sum).norm() < 1e-11,
                "reconstruction mismatch: {direct} vs {sum}"
            );
        }
    }

    #[test]
    fn product_operator_gives_one_term() {
        let mut rng = StdRng::seed_from_u64(1);
        let op = cartesian_op(2, &[(1, Axis::X), (2, Axis::X)]).unwrap();
        let w = wigner_transform(&op);
        let terms = props_decompose(&w);
        assert_eq!(terms.len(), 1);
        reconstruct_matches(&w, &terms, &mut rng);

        // Combinations sharing the last-sphere component also stay single.
        let combined = cartesian_op(2, &[(2, Axis::Z)])
            .unwrap()
            .scale(C64::new(0.3, 0.0))
            .add(&cartesian_op(2, &[(1, Axis::X), (2, Axis::Z)]).unwrap())
            .unwrap()
            .add(
                &cartesian_op(2, &[(1, Axis::Y), (2, Axis::Z)])
                    .unwrap()
                    .scale(C64::new(-0.9, 0.0)),
            )
            .unwrap()
            .add(
                &cartesian_op(2, &[(1, Axis::Z), (2, Axis::Z)])
                    .unwrap()
                    .scale(C64::new(2.0, 0.0)),
            )
            .unwrap();
        let w = wigner_transform(&combined);
        let terms = props_decompose(&w);
        assert_eq!(terms.len(), 1);
        reconstruct_matches(&w, &terms, &mut rng);
    }

    #[test]
    fn bell_state_gives_four_terms() {
        let bell = SpinOperator::identity(2, HalfInt::HALF)
            .scale(C64::new(0.25, 0.0))
            .add(&cartesian_op(2, &[(1, Axis::X), (2, Axis::X)]).unwrap())
            .unwrap()
            .sub(&cartesian_op(2, &[(1, Axis::Y), (2, Axis::Y)]).unwrap())
            .unwrap()
            .add(&cartesian_op(2, &[(1, Axis::Z), (2, Axis::Z)]).unwrap())
            .unwrap();
        let w = wigner_transform(&bell);
        let terms = props_decompose(&w);
        assert_eq!(terms.len(), 4);
        let mut rng = StdRng::seed_from_u64(2);
        reconstruct_matches(&w, &terms, &mut rng);
    }

    #[test]
    fn random_functions_stay_within_bound_and_reconstruct() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in 1..=3usize {
            let w = wigner_transform(&random_operator(n, HalfInt::HALF, &mut rng));
            let terms = props_decompose(&w);
            assert!(terms.len() <= 4usize.pow(n as u32 - 1));
            for t in &terms {
                assert_eq!(t.factors.len(), n);
                for f in &t.factors {
                    assert!((f.norm_sq() - 1.0).abs() < 1e-10);
                }
            }
            reconstruct_matches(&w, &terms, &mut rng);
        }
    }

    #[test]
    fn display_factors_split_scale_evenly() {
        let mut rng = StdRng::seed_from_u64(4);
        let w = wigner_transform(&random_operator(2, HalfInt::HALF, &mut rng));
        for term in props_decompose(&w) {
            let angles = [(0.7, 1.1), (2.0, 4.2)];
            let via_display: C64 = term
                .factors
                .iter()
                .enumerate()
                .map(|(k, _)| term.display_factor(k).evaluate(&[angles[k]]))
                .product();
            assert!((via_display - term.evaluate(&angles)).norm() < 1e-11);
        }
    }
}
