//! Phase-space representation: finite spherical-harmonic coefficient
//! tensors over N spheres, the forward/inverse transform between operators
//! and phase-space functions, point evaluation, the spherical Poisson
//! bracket, pointwise products, and the rank projector.
//!
//! The coefficient tensor is the canonical representation; sampled grids
//! are derived views. A function is stored sparsely as a map from the
//! multi-index (j_1 m_1 ... j_N m_N) to the complex coefficient of
//! `Y_{j1 m1}(theta_1, phi_1) ... Y_{jN mN}(theta_N, phi_N)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::angular::{tables, HalfInt};
use crate::error::{Error, Result};
use crate::spinop::{basis_indices, product_basis_op, BasisIndex, Jm, SpinOperator};

/// Coefficients dropped after arithmetic when their magnitude falls below
/// this threshold.
pub const DROP_TOL: f64 = 1e-14;

/// Spherical coordinates of one point per sphere, as (theta, phi) pairs
/// with theta in [0, pi] and phi in [0, 2 pi).
pub type SphereAngles = [(f64, f64)];

/// Sparse spherical-harmonic coefficient tensor of an N-spin phase-space
/// function.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerCoeffs {
    n_spins: usize,
    spin: HalfInt,
    max_rank: u32,
    coeffs: BTreeMap<BasisIndex, C64>,
}

impl WignerCoeffs {
    pub fn zero(n_spins: usize, spin: HalfInt) -> Self {
        WignerCoeffs {
            n_spins,
            spin,
            max_rank: 0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(n_spins: usize, spin: HalfInt, entries: I) -> Self
    where
        I: IntoIterator<Item = (BasisIndex, C64)>,
    {
        let mut w = WignerCoeffs::zero(n_spins, spin);
        for (idx, v) in entries {
            w.add_term(&idx, v);
        }
        w
    }

    /// Single-sphere function consisting of one spherical harmonic.
    pub fn harmonic(spin: HalfInt, j: u32, m: i32) -> Self {
        WignerCoeffs::from_entries(1, spin, [(vec![Jm::new(j, m)], C64::new(1.0, 0.0))])
    }

    /// Constant function with the value of the identity transform,
    /// 1/sqrt(2 pi)^N.
    pub fn identity_function(n_spins: usize, spin: HalfInt) -> Self {
        let value =
            (2.0 * PI).sqrt().powi(-(n_spins as i32)) * (4.0 * PI).sqrt().powi(n_spins as i32);
        // 1/sqrt(2 pi)^N = value * prod_k Y_00.
        WignerCoeffs::from_entries(
            n_spins,
            spin,
            [(vec![Jm::new(0, 0); n_spins], C64::new(value, 0.0))],
        )
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn max_rank_per_sphere(&self) -> u32 {
        self.max_rank
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, idx: &BasisIndex) -> C64 {
        self.coeffs.get(idx).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &C64)> {
        self.coeffs.iter()
    }

    /// Adds `value` to the coefficient at `idx`, dropping the entry if it
    /// cancels below [`DROP_TOL`].
    pub fn add_term(&mut self, idx: &BasisIndex, value: C64) {
        debug_assert_eq!(idx.len(), self.n_spins);
        let slot = self.coeffs.entry(idx.clone()).or_insert(C64::new(0.0, 0.0));
        *slot += value;
        if slot.norm() <= DROP_TOL {
            self.coeffs.remove(idx);
            // max_rank may now overestimate; it stays a valid upper bound.
        } else {
            let rank = idx.iter().map(|jm| jm.j).max().unwrap_or(0);
            self.max_rank = self.max_rank.max(rank);
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = WignerCoeffs::zero(self.n_spins, self.spin);
        for (idx, v) in &self.coeffs {
            out.add_term(idx, v * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (idx, v) in &other.coeffs {
            out.add_term(idx, *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Sum of |c|^2 over all stored coefficients. Equal to the squared
    /// Frobenius norm of the corresponding operator.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum()
    }

    /// Coefficient-space inner product, sum of conj(self) * other.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_shape(other)?;
        let mut sum = C64::new(0.0, 0.0);
        for (idx, v) in &self.coeffs {
            sum += v.conj() * other.get(idx);
        }
        Ok(sum)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (idx, v) in &self.coeffs {
            m = m.max((v - other.get(idx)).norm());
        }
        for (idx, v) in &other.coeffs {
            m = m.max((v - self.get(idx)).norm());
        }
        m
    }

    /// Evaluates the expansion at one point per sphere.
    pub fn evaluate(&self, angles: &SphereAngles) -> C64 {
        assert_eq!(
            angles.len(),
            self.n_spins,
            "need one (theta, phi) pair per sphere"
        );
        let mut sum = C64::new(0.0, 0.0);
        for (idx, v) in &self.coeffs {
            let mut term = *v;
            for (jm, &(theta, phi)) in idx.iter().zip(angles.iter()) {
                term *= sph_harmonic(jm.j, jm.m, theta, phi);
            }
            sum += term;
        }
        sum
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n_spins != other.n_spins || self.spin != other.spin {
            return Err(Error::ShapeMismatch(format!(
                "{} spheres (J = {}) vs {} spheres (J = {})",
                self.n_spins, self.spin, other.n_spins, other.spin
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<CoeffEntry> = self
            .coeffs
            .iter()
            .map(|(idx, v)| CoeffEntry {
                jm: idx.iter().map(|jm| [jm.j as i32, jm.m]).collect(),
                re: v.re,
                im: v.im,
            })
            .collect();
        let io = CoeffsJson {
            n_spins: self.n_spins,
            spin_2j: self.spin.twice(),
            entries,
        };
        serde_json::to_string_pretty(&io).expect("coefficient serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let io: CoeffsJson = serde_json::from_str(text)
            .map_err(|e| Error::ShapeMismatch(format!("bad coefficient JSON: {e}")))?;
        let spin = HalfInt::from_twice(io.spin_2j);
        let mut w = WignerCoeffs::zero(io.n_spins, spin);
        for entry in io.entries {
            if entry.jm.len() != io.n_spins {
                return Err(Error::ShapeMismatch(format!(
                    "index of length {} in {}-sphere coefficient JSON",
                    entry.jm.len(),
                    io.n_spins
                )));
            }
            let idx: BasisIndex = entry
                .jm
                .iter()
                .map(|[j, m]| Jm::new(*j as u32, *m))
                .collect();
            w.add_term(&idx, C64::new(entry.re, entry.im));
        }
        Ok(w)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffsJson {
    n_spins: usize,
    #[serde(rename = "spin_2J")]
    spin_2j: i32,
    entries: Vec<CoeffEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    jm: Vec<[i32; 2]>,
    re: f64,
    im: f64,
}

/// Associated Legendre function P_j^m(x) including the Condon-Shortley
/// phase, for m >= 0, via the standard upward recurrences.
fn assoc_legendre(j: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= j);
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * somx2;
    }
    if j == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if j == m + 1 {
        return pmmp1;
    }
    let mut pjm = 0.0;
    for jj in (m + 2)..=j {
        pjm = (x * ((2 * jj - 1) as f64) * pmmp1 - ((jj + m - 1) as f64) * pmm) / ((jj - m) as f64);
        pmm = pmmp1;
        pmmp1 = pjm;
    }
    pjm
}

/// Complex spherical harmonic Y_{jm}(theta, phi) in the Condon-Shortley
/// phase convention.
pub fn sph_harmonic(j: u32, m: i32, theta: f64, phi: f64) -> C64 {
    let ma = m.unsigned_abs();
    debug_assert!(ma <= j);
    let mut log_ratio = 0.0;
    for k in (j - ma + 1)..=(j + ma) {
        log_ratio += (k as f64).ln();
    }
    let norm = ((2 * j + 1) as f64 / (4.0 * PI) * (-log_ratio).exp()).sqrt();
    let p = assoc_legendre(j, ma, theta.cos());
    let value = C64::from_polar(norm * p, ma as f64 * phi);
    if m >= 0 {
        value
    } else {
        // Y_{j,-m} = (-1)^m conj(Y_{jm}).
        let sign = if ma.is_multiple_of(2) { 1.0 } else { -1.0 };
        value.conj() * sign
    }
}

/// Forward transform: coefficients a_idx = tr(basis_idx^dagger A) over the
/// orthonormal product basis, so that the function evaluates to the kernel
/// trace at every point.
pub fn wigner_transform(op: &SpinOperator) -> WignerCoeffs {
    let mut w = WignerCoeffs::zero(op.n_spins(), op.spin());
    for idx in basis_indices(op.n_spins(), op.spin()) {
        let basis =
            product_basis_op(op.n_spins(), op.spin(), &idx).expect("canonical index is valid");
        let coeff = basis.inner(op).expect("shapes match");
        if coeff.norm() > DROP_TOL {
            w.add_term(&idx, coeff);
        }
    }
    w
}

/// Inverse (Weyl) transform: rebuilds the operator from its coefficients.
/// Fails if any stored rank exceeds 2J.
pub fn inverse_wigner(w: &WignerCoeffs) -> Result<SpinOperator> {
    let max = w.spin.twice() as u32;
    let mut op = SpinOperator::zeros(w.n_spins(), w.spin());
    for (idx, v) in w.iter() {
        if let Some(bad) = idx.iter().find(|jm| jm.j > max) {
            return Err(Error::UnrepresentableRank {
                rank: bad.j,
                max,
                spin: w.spin().to_string(),
            });
        }
        let basis = product_basis_op(w.n_spins(), w.spin(), idx)?;
        op = op.add(&basis.scale(*v))?;
    }
    Ok(op)
}

/// Bilinear per-sphere expansion shared by pointwise products, Poisson
/// brackets and the prestar machinery: on every sphere in `bracket_mask`
/// (bit k set = sphere k+1) the harmonics of `f` and `g` combine through
/// the Poisson-bracket coefficients `U`; on every other sphere through the
/// pointwise-product coefficients `Z`.
pub(crate) fn expand_bilinear(
    f: &WignerCoeffs,
    g: &WignerCoeffs,
    bracket_mask: u32,
) -> WignerCoeffs {
    let n = f.n_spins();
    let tab = tables();
    let mut out = WignerCoeffs::zero(n, f.spin());
    let mut idx = vec![Jm::new(0, 0); n];
    for (fi, fv) in f.iter() {
        for (gi, gv) in g.iter() {
            // Per sphere k the pair (j_k, j'_k) expands over L_k with a
            // scalar weight; accumulate the tensor product of expansions.
            let base = fv * gv;
            expand_rec(&mut out, tab, fi, gi, bracket_mask, base, 0, &mut idx);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn expand_rec(
    out: &mut WignerCoeffs,
    tab: &crate::angular::AngularTables,
    fi: &BasisIndex,
    gi: &BasisIndex,
    bracket_mask: u32,
    weight: C64,
    sphere: usize,
    idx: &mut BasisIndex,
) {
    if weight.norm() <= DROP_TOL {
        return;
    }
    if sphere == fi.len() {
        out.add_term(idx, weight);
        return;
    }
    let a = fi[sphere];
    let b = gi[sphere];
    let m = a.m + b.m;
    let j1 = HalfInt::from_int(a.j as i32);
    let j2 = HalfInt::from_int(b.j as i32);
    let lo = a.j.abs_diff(b.j);
    let hi = a.j + b.j;
    for l in lo..=hi {
        if m.abs() > l as i32 {
            continue;
        }
        let ll = HalfInt::from_int(l as i32);
        let factor = if bracket_mask & (1 << sphere) != 0 {
            tab.u(j1, j2, ll)
        } else {
            C64::new(tab.z(j1, j2, ll), 0.0)
        };
        if factor.norm() <= DROP_TOL {
            continue;
        }
        let cg = tab.cg(
            j1,
            HalfInt::from_int(a.m),
            j2,
            HalfInt::from_int(b.m),
            ll,
            HalfInt::from_int(m),
        );
        if cg == 0.0 {
            continue;
        }
        idx[sphere] = Jm::new(l, m);
        expand_rec(
            out,
            tab,
            fi,
            gi,
            bracket_mask,
            weight * factor * cg,
            sphere + 1,
            idx,
        );
    }
}

/// Pointwise product of two phase-space functions, expanded back into
/// spherical-harmonic coefficients sphere by sphere.
pub fn pointwise_product(f: &WignerCoeffs, g: &WignerCoeffs) -> Result<WignerCoeffs> {
    f.check_shape(g)?;
    Ok(expand_bilinear(f, g, 0))
}

/// Spherical Poisson bracket taken on sphere `k` (1-based); the remaining
/// spheres multiply pointwise. Antisymmetric in (f, g).
pub fn poisson_bracket(f: &WignerCoeffs, g: &WignerCoeffs, k: usize) -> Result<WignerCoeffs> {
    f.check_shape(g)?;
    if k == 0 || k > f.n_spins() {
        return Err(Error::SlotOutOfRange {
            slot: k,
            n_spins: f.n_spins(),
        });
    }
    Ok(expand_bilinear(f, g, 1 << (k - 1)))
}

/// Truncates the expansion to ranks <= `max_j` on every sphere. Idempotent.
pub fn project_rank(w: &WignerCoeffs, max_j: u32) -> WignerCoeffs {
    let mut out = WignerCoeffs::zero(w.n_spins(), w.spin());
    for (idx, v) in w.iter() {
        if idx.iter().all(|jm| jm.j <= max_j) {
            out.add_term(idx, *v);
        }
    }
    out
}
