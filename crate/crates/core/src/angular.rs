//! Angular-momentum coupling coefficients.
//!
//! Clebsch-Gordan coefficients, the Wigner 6-j symbols of shape
//! `{j1 j2 L; J J J}`, and the derived expansion coefficients `Z`, `U`, `Q`
//! and `Lambda` that drive products and Poisson brackets of spherical
//! harmonics. All quantum numbers are passed as [`HalfInt`] so half-integer
//! spins stay exact. Selection-rule violations yield `0.0` instead of errors,
//! which keeps summation loops over rectangular index ranges simple.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64 as C64;

/// A half-integer stored as twice its value, so 3/2 is `HalfInt { twice: 3 }`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Builds from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Multiplicity 2j+1 of the corresponding angular-momentum multiplet.
    pub const fn multiplicity(self) -> i32 {
        self.twice + 1
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Normalization factor of the spherical Poisson bracket, sqrt(3/(8 pi)).
pub fn r_normalization() -> f64 {
    (3.0 / (8.0 * PI)).sqrt()
}

const MAX_FACT: usize = 170;

/// Factorials 0!..170!, computed exactly as integers while they fit in u128
/// (through 34!) and extended multiplicatively in f64 beyond that.
fn factorials() -> &'static [f64; MAX_FACT + 1] {
    static TABLE: OnceLock<[f64; MAX_FACT + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0f64; MAX_FACT + 1];
        let mut exact: u128 = 1;
        t[0] = 1.0;
        for n in 1..=MAX_FACT {
            if n <= 34 {
                exact *= n as u128;
                t[n] = exact as f64;
            } else {
                t[n] = t[n - 1] * n as f64;
            }
        }
        t
    })
}

/// Factorial of a twice-valued argument; the argument must be even and
/// nonnegative or the caller has violated a selection rule.
fn fact_twice(twice: i32) -> f64 {
    debug_assert!(twice >= 0 && twice % 2 == 0);
    factorials()[(twice / 2) as usize]
}

fn phase(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Triangle coefficient Delta(a,b,c) in twice-units; 0 if the triangle rule
/// fails or the perimeter is not an integer.
fn triangle(ta: i32, tb: i32, tc: i32) -> Option<f64> {
    let s1 = ta + tb - tc;
    let s2 = ta - tb + tc;
    let s3 = -ta + tb + tc;
    if s1 < 0 || s2 < 0 || s3 < 0 || (ta + tb + tc) % 2 != 0 {
        return None;
    }
    Some((fact_twice(s1) * fact_twice(s2) * fact_twice(s3) / fact_twice(ta + tb + tc + 2)).sqrt())
}

/// Clebsch-Gordan coefficient `C^{LM}_{j1 m1 j2 m2} = <j1 m1 j2 m2 | L M>`
/// in the Condon-Shortley phase convention, evaluated with the Racah
/// closed-form sum. Returns 0 for any selection-rule violation.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    l: HalfInt,
    m: HalfInt,
) -> f64 {
    let (tj1, tm1, tj2, tm2, tl, tm) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        l.twice(),
        m.twice(),
    );
    if tm1 + tm2 != tm {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tl {
        return 0.0;
    }
    // j and m must have the same parity in twice-units.
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tl + tm) % 2 != 0 {
        return 0.0;
    }
    let delta = match triangle(tj1, tj2, tl) {
        Some(d) => d,
        None => return 0.0,
    };

    let prefactor = ((tl + 1) as f64).sqrt()
        * delta
        * (fact_twice(tj1 + tm1)
            * fact_twice(tj1 - tm1)
            * fact_twice(tj2 + tm2)
            * fact_twice(tj2 - tm2)
            * fact_twice(tl + tm)
            * fact_twice(tl - tm))
        .sqrt();

    // Summation index k runs over all values keeping every factorial
    // argument nonnegative; arguments are in twice-units.
    let k_min = 0.max(tj2 - tl - tm1).max(tj1 - tl + tm2);
    let k_max = (tj1 + tj2 - tl).min(tj1 - tm1).min(tj2 + tm2);
    let mut sum = 0.0;
    let mut tk = k_min;
    while tk <= k_max {
        let denom = fact_twice(tk)
            * fact_twice(tj1 + tj2 - tl - tk)
            * fact_twice(tj1 - tm1 - tk)
            * fact_twice(tj2 + tm2 - tk)
            * fact_twice(tl - tj2 + tm1 + tk)
            * fact_twice(tl - tj1 - tm2 + tk);
        sum += phase(tk / 2) / denom;
        tk += 2;
    }
    prefactor * sum
}

/// Wigner 6-j symbol of the shape `{j1 j2 L; J J J}` via the Racah sum.
/// Selection-rule violations yield 0.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, l: HalfInt, j: HalfInt) -> f64 {
    sixj_general(
        j1.twice(),
        j2.twice(),
        l.twice(),
        j.twice(),
        j.twice(),
        j.twice(),
    )
}

/// `{a b c; d e f}` with all arguments in twice-units.
fn sixj_general(ta: i32, tb: i32, tc: i32, td: i32, te: i32, tf: i32) -> f64 {
    let t1 = match triangle(ta, tb, tc) {
        Some(v) => v,
        None => return 0.0,
    };
    let t2 = match triangle(ta, te, tf) {
        Some(v) => v,
        None => return 0.0,
    };
    let t3 = match triangle(td, tb, tf) {
        Some(v) => v,
        None => return 0.0,
    };
    let t4 = match triangle(td, te, tc) {
        Some(v) => v,
        None => return 0.0,
    };

    let s_abc = ta + tb + tc;
    let s_aef = ta + te + tf;
    let s_dbf = td + tb + tf;
    let s_dec = td + te + tc;
    let q_abde = ta + tb + td + te;
    let q_bcef = tb + tc + te + tf;
    let q_acdf = ta + tc + td + tf;

    let t_min = s_abc.max(s_aef).max(s_dbf).max(s_dec);
    let t_max = q_abde.min(q_bcef).min(q_acdf);
    let mut sum = 0.0;
    let mut tt = t_min;
    while tt <= t_max {
        let denom = fact_twice(tt - s_abc)
            * fact_twice(tt - s_aef)
            * fact_twice(tt - s_dbf)
            * fact_twice(tt - s_dec)
            * fact_twice(q_abde - tt)
            * fact_twice(q_bcef - tt)
            * fact_twice(q_acdf - tt);
        sum += phase(tt / 2) * fact_twice(tt + 2) / denom;
        tt += 2;
    }
    t1 * t2 * t3 * t4 * sum
}

/// Tensor-operator product coefficient
/// `Q = (-1)^{2J+L} sqrt((2j1+1)(2j2+1)) {j1 j2 L; J J J}`; vanishes for
/// `L > 2J` through the 6-j triangle rules.
pub fn coeff_q(spin: HalfInt, j1: HalfInt, j2: HalfInt, l: HalfInt) -> f64 {
    let sixj = wigner_6j(j1, j2, l, spin);
    if sixj == 0.0 {
        return 0.0;
    }
    let exponent = spin.twice() + (l.twice() / 2);
    phase(exponent) * ((j1.multiplicity() * j2.multiplicity()) as f64).sqrt() * sixj
}

/// Pointwise-product coefficient of two spherical harmonics,
/// `Z = sqrt((2j1+1)(2j2+1) / (4 pi (2L+1))) C^{L0}_{j1 0 j2 0}`.
pub fn coeff_z(j1: HalfInt, j2: HalfInt, l: HalfInt) -> f64 {
    let cg = clebsch_gordan(j1, HalfInt::ZERO, j2, HalfInt::ZERO, l, HalfInt::ZERO);
    if cg == 0.0 {
        return 0.0;
    }
    ((j1.multiplicity() * j2.multiplicity()) as f64 / (4.0 * PI * l.multiplicity() as f64)).sqrt()
        * cg
}

/// Poisson-bracket coefficient of two spherical harmonics. Vanishes whenever
/// `L - j1 - j2` is even; otherwise
/// `U = -(i/R) sqrt(j1(j1+1) L(L+1)) sqrt((2j1+1)(2j2+1)/(4 pi (2L+1))) C^{L1}_{j1 1 j2 0}`.
pub fn coeff_u(j1: HalfInt, j2: HalfInt, l: HalfInt) -> C64 {
    // Parity bracket [1 - (-1)^{L-j1-j2}]: 0 for even, 2 for odd exponent.
    let exponent = (l.twice() - j1.twice() - j2.twice()) / 2;
    if exponent.rem_euclid(2) == 0 {
        return C64::new(0.0, 0.0);
    }
    let cg = clebsch_gordan(j1, HalfInt::ONE, j2, HalfInt::ZERO, l, HalfInt::ONE);
    if cg == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let j1f = j1.as_f64();
    let lf = l.as_f64();
    let magnitude = (j1f * (j1f + 1.0) * lf * (lf + 1.0)).sqrt()
        * ((j1.multiplicity() * j2.multiplicity()) as f64 / (4.0 * PI * l.multiplicity() as f64))
            .sqrt()
        * cg;
    // -i/(2R) times the parity bracket value 2.
    C64::new(0.0, -1.0 / r_normalization()) * magnitude
}

/// Prestar expansion coefficient
/// `Lambda = sqrt(2 pi) Z - (i/2) U`.
pub fn coeff_lambda(j1: HalfInt, j2: HalfInt, l: HalfInt) -> C64 {
    C64::new((2.0 * PI).sqrt() * coeff_z(j1, j2, l), 0.0) - C64::new(0.0, 0.5) * coeff_u(j1, j2, l)
}

/// Memoized lookup tables for all coupling coefficients.
///
/// Entries are filled on first use and never evicted; recomputation is
/// bit-for-bit deterministic, so concurrent readers may race benignly on
/// the fill.
#[derive(Default)]
pub struct AngularTables {
    cg: RwLock<BTreeMap<[i32; 6], f64>>,
    sixj: RwLock<BTreeMap<[i32; 4], f64>>,
    z: RwLock<BTreeMap<[i32; 3], f64>>,
    u: RwLock<BTreeMap<[i32; 3], C64>>,
    q: RwLock<BTreeMap<[i32; 4], f64>>,
    lambda: RwLock<BTreeMap<[i32; 3], C64>>,
}

macro_rules! memo {
    ($lock:expr, $key:expr, $compute:expr) => {{
        if let Some(v) = $lock.read().unwrap().get(&$key) {
            return *v;
        }
        let v = $compute;
        $lock.write().unwrap().insert($key, v);
        v
    }};
}

impl AngularTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cg(
        &self,
        j1: HalfInt,
        m1: HalfInt,
        j2: HalfInt,
        m2: HalfInt,
        l: HalfInt,
        m: HalfInt,
    ) -> f64 {
        let key = [
            j1.twice(),
            m1.twice(),
            j2.twice(),
            m2.twice(),
            l.twice(),
            m.twice(),
        ];
        memo!(self.cg, key, clebsch_gordan(j1, m1, j2, m2, l, m))
    }

    pub fn sixj(&self, j1: HalfInt, j2: HalfInt, l: HalfInt, j: HalfInt) -> f64 {
        let key = [j1.twice(), j2.twice(), l.twice(), j.twice()];
        memo!(self.sixj, key, wigner_6j(j1, j2, l, j))
    }

    pub fn q(&self, spin: HalfInt, j1: HalfInt, j2: HalfInt, l: HalfInt) -> f64 {
        let key = [spin.twice(), j1.twice(), j2.twice(), l.twice()];
        memo!(self.q, key, coeff_q(spin, j1, j2, l))
    }

    pub fn z(&self, j1: HalfInt, j2: HalfInt, l: HalfInt) -> f64 {
        let key = [j1.twice(), j2.twice(), l.twice()];
        memo!(self.z, key, coeff_z(j1, j2, l))
    }

    pub fn u(&self, j1: HalfInt, j2: HalfInt, l: HalfInt) -> C64 {
        let key = [j1.twice(), j2.twice(), l.twice()];
        memo!(self.u, key, coeff_u(j1, j2, l))
    }

    pub fn lambda(&self, j1: HalfInt, j2: HalfInt, l: HalfInt) -> C64 {
        let key = [j1.twice(), j2.twice(), l.twice()];
        memo!(self.lambda, key, coeff_lambda(j1, j2, l))
    }
}

/// Shared process-wide coefficient tables.
pub fn tables() -> &'static AngularTables {
    static TABLES: OnceLock<AngularTables> = OnceLock::new();
    TABLES.get_or_init(AngularTables::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn clebsch_gordan_reference_values() {
        // Stretched two-spin-1/2 state couples uniquely.
        assert!((clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(2)) - 1.0).abs() < TOL);
        // Singlet component; frozen from the ladder-construction oracle.
        assert!(
            (clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0)) - 1.0 / 2.0_f64.sqrt()).abs()
                < TOL
        );
        // (-1)^{j1+j2-L} symmetry forbids <1 0 1 0 | 1 0>.
        assert_eq!(clebsch_gordan(h(2), h(0), h(2), h(0), h(2), h(0)), 0.0);
        // M != m1 + m2 and |m| > j both vanish.
        assert_eq!(clebsch_gordan(h(2), h(2), h(2), h(2), h(2), h(2)), 0.0);
        assert_eq!(clebsch_gordan(h(2), h(4), h(2), h(0), h(4), h(4)), 0.0);
    }

    #[test]
    fn clebsch_gordan_swap_symmetry() {
        for tj1 in 0..=4 {
            for tj2 in 0..=4 {
                for tl in i32::abs(tj1 - tj2)..=(tj1 + tj2) {
                    if (tj1 + tj2 + tl) % 2 != 0 {
                        continue;
                    }
                    let sign = phase((tj1 + tj2 - tl) / 2);
                    for tm1 in (-tj1..=tj1).step_by(2) {
                        for tm2 in (-tj2..=tj2).step_by(2) {
                            let a =
                                clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tl), h(tm1 + tm2));
                            let b =
                                clebsch_gordan(h(tj2), h(tm2), h(tj1), h(tm1), h(tl), h(tm1 + tm2));
                            assert!(
                                (a - sign * b).abs() < TOL,
                                "swap symmetry failed at j1={tj1} j2={tj2} L={tl}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clebsch_gordan_orthogonality() {
        // Sum over m1, m2 of C^{LM} C^{L'M'} = delta_{LL'} delta_{MM'}
        // over the valid couplings of j1 = 1 and j2 = 3/2.
        let tj1 = 2;
        let tj2 = 3;
        for tl in (1..=5).step_by(2) {
            for tlp in (1..=5).step_by(2) {
                for tm in (-tl..=tl).step_by(2) {
                    for tmp in (-tlp..=tlp).step_by(2) {
                        let mut sum = 0.0;
                        for tm1 in (-tj1..=tj1).step_by(2) {
                            for tm2 in (-tj2..=tj2).step_by(2) {
                                sum += clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tl), h(tm))
                                    * clebsch_gordan(
                                        h(tj1),
                                        h(tm1),
                                        h(tj2),
                                        h(tm2),
                                        h(tlp),
                                        h(tmp),
                                    );
                            }
                        }
                        let expected = if tl == tlp && tm == tmp { 1.0 } else { 0.0 };
                        assert!((sum - expected).abs() < TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn sixj_reference_values() {
        // Frozen from the tensor-operator product oracle (see tests/).
        assert!((wigner_6j(h(0), h(0), h(0), h(1)) + 1.0 / 2.0_f64.sqrt()).abs() < TOL);
        assert!((wigner_6j(h(2), h(2), h(2), h(1)) + 1.0 / 3.0).abs() < TOL);
        // Triangle (1, 2, 1/2) fails.
        assert_eq!(wigner_6j(h(2), h(2), h(4), h(1)), 0.0);
    }

    #[test]
    fn q_values_spin_half() {
        let j = HalfInt::HALF;
        let sq2 = 2.0_f64.sqrt();
        assert!((coeff_q(j, h(0), h(0), h(0)) - 1.0 / sq2).abs() < TOL);
        assert!((coeff_q(j, h(0), h(2), h(2)) - 1.0 / sq2).abs() < TOL);
        assert!((coeff_q(j, h(2), h(0), h(2)) - 1.0 / sq2).abs() < TOL);
        assert!((coeff_q(j, h(2), h(2), h(0)) + 3.0_f64.sqrt() / sq2).abs() < TOL);
        assert!((coeff_q(j, h(2), h(2), h(2)) + 1.0).abs() < TOL);
        // L > 2J vanishes.
        assert_eq!(coeff_q(j, h(2), h(2), h(4)), 0.0);
    }

    #[test]
    fn z_values() {
        let inv_sqrt4pi = 1.0 / (4.0 * PI).sqrt();
        assert!((coeff_z(h(0), h(0), h(0)) - inv_sqrt4pi).abs() < TOL);
        assert!((coeff_z(h(2), h(0), h(2)) - inv_sqrt4pi).abs() < TOL);
        // Frozen from the grid-product oracle (see tests/): -sqrt(3/(4 pi)).
        assert!((coeff_z(h(2), h(2), h(0)) + (3.0 / (4.0 * PI)).sqrt()).abs() < TOL);
        // Symmetric under j1 <-> j2.
        for tj1 in 0..=4 {
            for tj2 in 0..=4 {
                for tl in 0..=8 {
                    assert!(
                        (coeff_z(h(tj1), h(tj2), h(tl)) - coeff_z(h(tj2), h(tj1), h(tl))).abs()
                            < TOL
                    );
                }
            }
        }
    }

    #[test]
    fn u_parity_and_symmetry() {
        // U vanishes for even L - j1 - j2. The nonzero entries are
        // symmetric under j1 <-> j2: combined with the odd Clebsch-Gordan
        // swap factor (-1)^{j1+j2-L} = -1 this is what makes the bracket
        // expansion antisymmetric in its two functions.
        for tj1 in 0..=4 {
            for tj2 in 0..=4 {
                for tl in 0..=8 {
                    let u = coeff_u(h(tj1), h(tj2), h(tl));
                    if ((tl - tj1 - tj2) / 2).rem_euclid(2) == 0 {
                        assert_eq!(u, C64::new(0.0, 0.0));
                    }
                    let swapped = coeff_u(h(tj2), h(tj1), h(tl));
                    assert!(
                        (u - swapped).norm() < TOL,
                        "U not symmetric at ({tj1},{tj2},{tl}): {u} vs {swapped}"
                    );
                }
            }
        }
    }

    #[test]
    fn lambda_values_and_theorem() {
        let sq2 = 2.0_f64.sqrt();
        let close = |a: C64, b: C64| (a - b).norm() < TOL;
        assert!(close(
            coeff_lambda(h(0), h(0), h(0)),
            C64::new(1.0 / sq2, 0.0)
        ));
        assert!(close(
            coeff_lambda(h(0), h(2), h(2)),
            C64::new(1.0 / sq2, 0.0)
        ));
        assert!(close(
            coeff_lambda(h(2), h(0), h(2)),
            C64::new(1.0 / sq2, 0.0)
        ));
        assert!(close(
            coeff_lambda(h(2), h(2), h(0)),
            C64::new(-(3.0_f64.sqrt()) / sq2, 0.0)
        ));
        assert!(close(coeff_lambda(h(2), h(2), h(2)), C64::new(-1.0, 0.0)));
        // Lambda = Q^{(1/2)} over the whole rank-1 range.
        for tj1 in (0..=2).step_by(2) {
            for tj2 in (0..=2).step_by(2) {
                for tl in (0..=2).step_by(2) {
                    let lam = coeff_lambda(h(tj1), h(tj2), h(tl));
                    let q = coeff_q(HalfInt::HALF, h(tj1), h(tj2), h(tl));
                    assert!(
                        (lam - C64::new(q, 0.0)).norm() < TOL,
                        "Lambda != Q at ({tj1},{tj2},{tl}): {lam} vs {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn tables_are_deterministic() {
        let t = AngularTables::new();
        let args = (h(2), h(0), h(2), h(2), h(2), h(2));
        let cached = t.cg(args.0, args.1, args.2, args.3, args.4, args.5);
        let fresh = clebsch_gordan(args.0, args.1, args.2, args.3, args.4, args.5);
        assert_eq!(cached.to_bits(), fresh.to_bits());
        assert_eq!(
            t.cg(args.0, args.1, args.2, args.3, args.4, args.5)
                .to_bits(),
            fresh.to_bits()
        );
        // Cached CG swap symmetry.
        let swapped = t.cg(args.2, args.3, args.0, args.1, args.4, args.5);
        assert!((cached - phase((2 + 2 - 2) / 2) * swapped).abs() < TOL);
        let lam = t.lambda(h(2), h(2), h(2));
        assert_eq!(lam, coeff_lambda(h(2), h(2), h(2)));
        assert!((t.sixj(h(2), h(2), h(2), h(1)) + 1.0 / 3.0).abs() < TOL);
        assert!((t.q(HalfInt::HALF, h(2), h(2), h(2)) + 1.0).abs() < TOL);
        assert!((t.z(h(0), h(0), h(0)) - 1.0 / (4.0 * PI).sqrt()).abs() < TOL);
        assert!(t.u(h(2), h(2), h(0)).norm() < TOL);
    }

    #[test]
    fn half_int_display_and_arithmetic() {
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(4).to_string(), "2");
        assert_eq!((h(3) + h(1)).twice(), 4);
        assert_eq!((h(3) - h(1)).twice(), 2);
        assert_eq!((-h(3)).twice(), -3);
        assert!(h(4).is_integer());
        assert!(!h(3).is_integer());
        assert_eq!(h(3).multiplicity(), 4);
    }
}
