//! Matrix-side representation of coupled spin systems.
//!
//! Dense irreducible tensor operators, embedded/product operators, Cartesian
//! operators, the von-Neumann right-hand side, and the exact matrix
//! propagator that serves as the oracle for every phase-space computation.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::angular::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};

/// Rank/order pair indexing one sphere of a product basis element.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Jm {
    pub j: u32,
    pub m: i32,
}

impl Jm {
    pub fn new(j: u32, m: i32) -> Self {
        Jm { j, m }
    }
}

/// Multi-index (j_1 m_1 ... j_N m_N) of an N-spin product basis operator.
pub type BasisIndex = Vec<Jm>;

/// Dense complex operator on an N-spin system of uniform spin number J.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator {
    n_spins: usize,
    spin: HalfInt,
    mat: DMatrix<C64>,
}

/// Per-spin dimension 2J+1.
fn site_dim(spin: HalfInt) -> usize {
    spin.multiplicity() as usize
}

impl SpinOperator {
    pub fn new(n_spins: usize, spin: HalfInt, mat: DMatrix<C64>) -> Result<Self> {
        let dim = site_dim(spin).pow(n_spins as u32);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} matrix for {n_spins} spins of J = {spin}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(SpinOperator { n_spins, spin, mat })
    }

    pub fn zeros(n_spins: usize, spin: HalfInt) -> Self {
        let dim = site_dim(spin).pow(n_spins as u32);
        SpinOperator {
            n_spins,
            spin,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(n_spins: usize, spin: HalfInt) -> Self {
        let dim = site_dim(spin).pow(n_spins as u32);
        SpinOperator {
            n_spins,
            spin,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        SpinOperator {
            n_spins: self.n_spins,
            spin: self.spin,
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        SpinOperator {
            n_spins: self.n_spins,
            spin: self.spin,
            mat: &self.mat * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(SpinOperator {
            n_spins: self.n_spins,
            spin: self.spin,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(SpinOperator {
            n_spins: self.n_spins,
            spin: self.spin,
            mat: &self.mat - &other.mat,
        })
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(SpinOperator {
            n_spins: self.n_spins,
            spin: self.spin,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Hilbert-Schmidt inner product tr(self^dagger other).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_shape(other)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn normalize_frobenius(&self) -> Self {
        let n = self.frobenius_norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// Relative deviation from hermiticity in the Frobenius norm.
    pub fn hermiticity_deviation(&self) -> f64 {
        let scale = self.frobenius_norm().max(1.0);
        self.mat
            .iter()
            .zip(self.mat.adjoint().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / scale
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n_spins != other.n_spins || self.spin != other.spin {
            return Err(Error::ShapeMismatch(format!(
                "{} spins of J = {} vs {} spins of J = {}",
                self.n_spins, self.spin, other.n_spins, other.spin
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let io = OperatorJson {
            n_spins: self.n_spins,
            spin_2j: self.spin.twice(),
            matrix: self
                .mat
                .row_iter()
                .flat_map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect(),
        };
        serde_json::to_string_pretty(&io).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let io: OperatorJson = serde_json::from_str(text)
            .map_err(|e| Error::ShapeMismatch(format!("bad operator JSON: {e}")))?;
        let spin = HalfInt::from_twice(io.spin_2j);
        let dim = site_dim(spin).pow(io.n_spins as u32);
        if io.matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "operator JSON holds {} entries, expected {}",
                io.matrix.len(),
                dim * dim
            )));
        }
        let mat = DMatrix::from_row_iterator(
            dim,
            dim,
            io.matrix.iter().map(|[re, im]| C64::new(*re, *im)),
        );
        SpinOperator::new(io.n_spins, spin, mat)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    n_spins: usize,
    #[serde(rename = "spin_2J")]
    spin_2j: i32,
    matrix: Vec<[f64; 2]>,
}

/// Single-spin irreducible tensor operator of rank j and order m, with
/// matrix elements sqrt((2j+1)/(2J+1)) C^{J m1}_{J m2, j m}.
pub fn tensor_op(spin: HalfInt, j: u32, m: i32) -> Result<SpinOperator> {
    if j as i32 > spin.twice() || m.abs() > j as i32 {
        return Err(Error::RankOutOfRange {
            j: j.to_string(),
            m: m.to_string(),
            spin: spin.to_string(),
        });
    }
    let d = site_dim(spin);
    let jj = HalfInt::from_int(j as i32);
    let jm = HalfInt::from_int(m);
    let norm = ((2 * j + 1) as f64 / spin.multiplicity() as f64).sqrt();
    // Row/column index 0 corresponds to the highest weight m = J.
    let weights: Vec<i32> = (0..d).map(|i| spin.twice() - 2 * i as i32).collect();
    let mut mat = DMatrix::zeros(d, d);
    for (r, &tm1) in weights.iter().enumerate() {
        for (c, &tm2) in weights.iter().enumerate() {
            let cg = clebsch_gordan(
                spin,
                HalfInt::from_twice(tm2),
                jj,
                jm,
                spin,
                HalfInt::from_twice(tm1),
            );
            if cg != 0.0 {
                mat[(r, c)] = C64::new(norm * cg, 0.0);
            }
        }
    }
    SpinOperator::new(1, spin, mat)
}

/// Kronecker product of a list of single-spin matrices.
fn kron_all(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Tensor operator acting on the k-th spin (1-based) of an N-spin system,
/// with identity-like factors T_00 on every other slot; Frobenius norm 1.
pub fn tensor_op_embedded(
    n_spins: usize,
    k: usize,
    spin: HalfInt,
    j: u32,
    m: i32,
) -> Result<SpinOperator> {
    if k == 0 || k > n_spins {
        return Err(Error::SlotOutOfRange { slot: k, n_spins });
    }
    let t00 = tensor_op(spin, 0, 0)?;
    let tjm = tensor_op(spin, j, m)?;
    let factors: Vec<DMatrix<C64>> = (1..=n_spins)
        .map(|slot| {
            if slot == k {
                tjm.matrix().clone()
            } else {
                t00.matrix().clone()
            }
        })
        .collect();
    SpinOperator::new(n_spins, spin, kron_all(&factors))
}

/// Orthonormal product basis operator T_{j1 m1} x ... x T_{jN mN}.
pub fn product_basis_op(n_spins: usize, spin: HalfInt, idx: &[Jm]) -> Result<SpinOperator> {
    if idx.len() != n_spins {
        return Err(Error::ShapeMismatch(format!(
            "basis index length {} does not match {} spins",
            idx.len(),
            n_spins
        )));
    }
    let factors: Vec<DMatrix<C64>> = idx
        .iter()
        .map(|jm| tensor_op(spin, jm.j, jm.m).map(SpinOperator::into_matrix))
        .collect::<Result<_>>()?;
    SpinOperator::new(n_spins, spin, kron_all(&factors))
}

/// Canonical enumeration of all basis indices: per sphere j = 0..2J with
/// m = -j..j, the first sphere varying slowest.
pub fn basis_indices(n_spins: usize, spin: HalfInt) -> Vec<BasisIndex> {
    let mut single = Vec::new();
    for j in 0..=spin.twice() as u32 {
        for m in -(j as i32)..=j as i32 {
            single.push(Jm::new(j, m));
        }
    }
    let mut out: Vec<BasisIndex> = vec![Vec::new()];
    for _ in 0..n_spins {
        let mut next = Vec::with_capacity(out.len() * single.len());
        for prefix in &out {
            for &jm in &single {
                let mut idx = prefix.clone();
                idx.push(jm);
                next.push(idx);
            }
        }
        out = next;
    }
    out
}

/// Expands an operator over the orthonormal product basis,
/// a_idx = tr(basis^dagger op). Entries below 1e-14 are dropped.
pub fn decompose(op: &SpinOperator) -> BTreeMap<BasisIndex, C64> {
    let mut out = BTreeMap::new();
    for idx in basis_indices(op.n_spins(), op.spin()) {
        let basis =
            product_basis_op(op.n_spins(), op.spin(), &idx).expect("canonical index is valid");
        let coeff = basis.inner(op).expect("shapes match by construction");
        if coeff.norm() > 1e-14 {
            out.insert(idx, coeff);
        }
    }
    out
}

/// Cartesian axis or single-spin projector label.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    X,
    Y,
    Z,
    /// Projector onto the upper basis state, 1/2 + I_z.
    Alpha,
    /// Projector onto the lower basis state, 1/2 - I_z.
    Beta,
}

impl Axis {
    pub fn parse(c: char) -> Option<Axis> {
        match c {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            'a' | 'α' => Some(Axis::Alpha),
            'b' | 'β' => Some(Axis::Beta),
            _ => None,
        }
    }
}

/// Single-spin angular momentum matrix I_x, I_y or I_z for arbitrary J.
pub fn spin_axis_matrix(spin: HalfInt, axis: Axis) -> DMatrix<C64> {
    let d = site_dim(spin);
    let jf = spin.as_f64();
    let mut plus = DMatrix::zeros(d, d);
    // Basis ordering m = J..-J; I_+ |J m> = sqrt(J(J+1) - m(m+1)) |J m+1>.
    for c in 1..d {
        let m = jf - c as f64;
        plus[(c - 1, c)] = C64::new((jf * (jf + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.adjoint();
    match axis {
        Axis::X => (&plus + &minus) * C64::new(0.5, 0.0),
        Axis::Y => (&plus - &minus) * C64::new(0.0, -0.5),
        Axis::Z => DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(jf - r as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Axis::Alpha | Axis::Beta => {
            let sign = if axis == Axis::Alpha { 1.0 } else { -1.0 };
            DMatrix::identity(d, d) * C64::new(0.5, 0.0)
                + spin_axis_matrix(spin, Axis::Z) * C64::new(sign, 0.0)
        }
    }
}

/// Product of embedded Cartesian operators I_{k,axis} on distinct spin-1/2
/// slots, e.g. `[(1, Z), (2, Z)]` gives I_{1z} I_{2z}.
pub fn cartesian_op(n_spins: usize, spec: &[(usize, Axis)]) -> Result<SpinOperator> {
    let spin = HalfInt::HALF;
    let mut seen = vec![false; n_spins + 1];
    let mut out = SpinOperator::identity(n_spins, spin);
    for &(slot, axis) in spec {
        if slot == 0 || slot > n_spins {
            return Err(Error::SlotOutOfRange { slot, n_spins });
        }
        if seen[slot] {
            return Err(Error::RepeatedSlot { slot });
        }
        seen[slot] = true;
        let single = spin_axis_matrix(spin, axis);
        let factors: Vec<DMatrix<C64>> = (1..=n_spins)
            .map(|s| {
                if s == slot {
                    single.clone()
                } else {
                    DMatrix::identity(2, 2)
                }
            })
            .collect();
        let embedded = SpinOperator::new(n_spins, spin, kron_all(&factors))?;
        out = out.mul(&embedded)?;
    }
    Ok(out)
}

/// Right-hand side of the von-Neumann equation, -i (H rho - rho H).
pub fn von_neumann_rhs(h: &SpinOperator, rho: &SpinOperator) -> Result<SpinOperator> {
    Ok(h.commutator(rho)?.scale(C64::new(0.0, -1.0)))
}

/// Exact propagation rho -> U rho U^dagger with U = exp(-i H t), via the
/// eigendecomposition of the hermitian Hamiltonian.
pub fn evolve_exact(h: &SpinOperator, rho: &SpinOperator, t: f64) -> Result<SpinOperator> {
    h.check_shape(rho)?;
    let dev = h.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian { dev });
    }
    let eig = nalgebra::SymmetricEigen::new(h.matrix().clone());
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|lambda| C64::new(0.0, -lambda * t).exp()),
    );
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    let evolved = &u * rho.matrix() * u.adjoint();
    SpinOperator::new(rho.n_spins(), rho.spin(), evolved)
}

/// Unitary exp(-i angle (axis . I)) acting on a single spin J; `axis` need
/// not be normalized.
pub fn rotation_matrix(spin: HalfInt, axis: [f64; 3], angle: f64) -> DMatrix<C64> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let gen = spin_axis_matrix(spin, Axis::X) * C64::new(axis[0] / norm, 0.0)
        + spin_axis_matrix(spin, Axis::Y) * C64::new(axis[1] / norm, 0.0)
        + spin_axis_matrix(spin, Axis::Z) * C64::new(axis[2] / norm, 0.0);
    let eig = nalgebra::SymmetricEigen::new(gen);
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|lambda| C64::new(0.0, -lambda * angle).exp()),
    );
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Embeds a single-spin unitary (or any single-spin matrix) on slot k.
pub fn embed_single(
    n_spins: usize,
    k: usize,
    spin: HalfInt,
    single: &DMatrix<C64>,
) -> Result<SpinOperator> {
    if k == 0 || k > n_spins {
        return Err(Error::SlotOutOfRange { slot: k, n_spins });
    }
    let d = site_dim(spin);
    let factors: Vec<DMatrix<C64>> = (1..=n_spins)
        .map(|s| {
            if s == k {
                single.clone()
            } else {
                DMatrix::identity(d, d)
            }
        })
        .collect();
    SpinOperator::new(n_spins, spin, kron_all(&factors))
}

/// Partial trace keeping the listed spin slots (1-based, strictly
/// increasing).
pub fn partial_trace(rho: &SpinOperator, keep: &[usize]) -> Result<SpinOperator> {
    let n = rho.n_spins();
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ShapeMismatch(
            "keep slots must be nonempty and strictly increasing".into(),
        ));
    }
    if *keep.last().unwrap() > n || keep[0] == 0 {
        return Err(Error::SlotOutOfRange {
            slot: *keep.last().unwrap(),
            n_spins: n,
        });
    }
    let d = site_dim(rho.spin());
    let traced: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    let keep_dim = d.pow(keep.len() as u32);
    let traced_dim = d.pow(traced.len() as u32);
    let mut out = DMatrix::zeros(keep_dim, keep_dim);

    let digits = |mut flat: usize, len: usize| -> Vec<usize> {
        let mut ds = vec![0; len];
        for slot in (0..len).rev() {
            ds[slot] = flat % d;
            flat /= d;
        }
        ds
    };
    let flatten = |ds: &[usize]| -> usize { ds.iter().fold(0, |acc, &x| acc * d + x) };

    for r in 0..keep_dim {
        let rk = digits(r, keep.len());
        for c in 0..keep_dim {
            let ck = digits(c, keep.len());
            let mut sum = C64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let td = digits(t, traced.len());
                let mut full_r = vec![0; n];
                let mut full_c = vec![0; n];
                for (i, &slot) in keep.iter().enumerate() {
                    full_r[slot - 1] = rk[i];
                    full_c[slot - 1] = ck[i];
                }
                for (i, &slot) in traced.iter().enumerate() {
                    full_r[slot - 1] = td[i];
                    full_c[slot - 1] = td[i];
                }
                sum += rho.matrix()[(flatten(&full_r), flatten(&full_c))];
            }
            out[(r, c)] = sum;
        }
    }
    SpinOperator::new(keep.len(), rho.spin(), out)
}

/// Von-Neumann entropy (in bits) of the reduced state on `subsystem`.
/// Requires a physical state: unit trace within 1e-10.
pub fn entanglement_entropy(rho: &SpinOperator, subsystem: &[usize]) -> Result<f64> {
    let trace = rho.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::NonUnitTrace { trace: trace.re });
    }
    let reduced = partial_trace(rho, subsystem)?;
    let eig = nalgebra::SymmetricEigen::new(reduced.into_matrix());
    let mut entropy = 0.0;
    for &lambda in eig.eigenvalues.iter() {
        if lambda > 1e-14 {
            entropy -= lambda * lambda.log2();
        }
    }
    Ok(entropy)
}

/// Random operator with independent standard-normal real and imaginary
/// entries.
pub fn random_operator<R: Rng>(n_spins: usize, spin: HalfInt, rng: &mut R) -> SpinOperator {
    let dim = site_dim(spin).pow(n_spins as u32);
    let mat = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(sample_normal(rng), sample_normal(rng))
    });
    SpinOperator { n_spins, spin, mat }
}

/// Random hermitian operator (M + M^dagger)/2.
pub fn random_hermitian<R: Rng>(n_spins: usize, spin: HalfInt, rng: &mut R) -> SpinOperator {
    let m = random_operator(n_spins, spin, rng);
    m.add(&m.dagger())
        .expect("same shape")
        .scale(C64::new(0.5, 0.0))
}

fn sample_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; avoids log(0).
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
