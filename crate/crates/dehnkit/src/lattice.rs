//! Exact integer arithmetic for cusp lattices: slopes, slope-tuples,
//! denominator-tuples, congruence and domination, extended lattices
//! P + Z zeta/m, congruence-class enumeration, and the explicit bound
//! formulas A(n), T(n).
//!
//! All membership and congruence questions here are decision procedures
//! over exact rationals, never floating-point tests.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A slope in a fixed cusp basis (mu, lambda): either the zero pair or a
/// primitive integer pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct Slope {
    p: i64,
    q: i64,
}

impl TryFrom<(i64, i64)> for Slope {
    type Error = Error;
    fn try_from((p, q): (i64, i64)) -> Result<Self> {
        Slope::new(p, q)
    }
}

impl From<Slope> for (i64, i64) {
    fn from(s: Slope) -> (i64, i64) {
        (s.p, s.q)
    }
}

/// gcd with the convention gcd(x, 0) = |x|.
fn gcd(a: i64, b: i64) -> i64 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i64
}

/// True iff (p, q) is a primitive pair.
pub fn is_primitive(p: i64, q: i64) -> bool {
    gcd(p, q) == 1
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if (p, q) != (0, 0) && !is_primitive(p, q) {
            return Err(Error::NonPrimitiveSlope(p, q));
        }
        Ok(Slope { p, q })
    }

    pub fn trivial() -> Self {
        Slope { p: 0, q: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        (self.p, self.q) == (0, 0)
    }

    pub fn coefficients(&self) -> (i64, i64) {
        (self.p, self.q)
    }
}

/// One slope per cusp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeTuple(pub Vec<Slope>);

impl SlopeTuple {
    pub fn single(s: Slope) -> Self {
        SlopeTuple(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One positive root order per cusp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct DenominatorTuple(Vec<i64>);

impl TryFrom<Vec<i64>> for DenominatorTuple {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        DenominatorTuple::new(v)
    }
}

impl From<DenominatorTuple> for Vec<i64> {
    fn from(d: DenominatorTuple) -> Vec<i64> {
        d.0
    }
}

impl DenominatorTuple {
    pub fn new(v: Vec<i64>) -> Result<Self> {
        for &m in &v {
            if m < 1 {
                return Err(Error::BadDenominator(m));
            }
        }
        Ok(DenominatorTuple(v))
    }

    pub fn single(m: i64) -> Result<Self> {
        DenominatorTuple::new(vec![m])
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Componentwise congruence of slope-tuples modulo a denominator-tuple.
pub fn congruent_mod(z1: &SlopeTuple, z2: &SlopeTuple, m: &DenominatorTuple) -> Result<bool> {
    if z1.len() != z2.len() || z1.len() != m.len() {
        return Err(Error::LengthMismatch(z1.len(), z2.len().max(m.len())));
    }
    Ok(z1
        .0
        .iter()
        .zip(&z2.0)
        .zip(m.components())
        .all(|((a, b), &mj)| {
            (a.p - b.p).rem_euclid(mj) == 0 && (a.q - b.q).rem_euclid(mj) == 0
        }))
}

/// z1 dominates z2 modulo m: componentwise congruent, or the z1 component
/// is zero.
pub fn dominates(z1: &SlopeTuple, z2: &SlopeTuple, m: &DenominatorTuple) -> Result<bool> {
    if z1.len() != z2.len() || z1.len() != m.len() {
        return Err(Error::LengthMismatch(z1.len(), z2.len().max(m.len())));
    }
    Ok(z1
        .0
        .iter()
        .zip(&z2.0)
        .zip(m.components())
        .all(|((a, b), &mj)| {
            a.is_trivial()
                || ((a.p - b.p).rem_euclid(mj) == 0 && (a.q - b.q).rem_euclid(mj) == 0)
        }))
}

/// The rank-2 lattice P + Z zeta/m inside P (x) Q, with a basis in lowest
/// terms and the index of the base lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedLattice {
    pub slope: Slope,
    pub denominator: i64,
    /// two rational row vectors spanning the lattice
    pub basis: [(BigRational, BigRational); 2],
    /// index of Z^2 in the extended lattice
    pub index: i64,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Hermite normal form [[a, b], [0, c]] (a, c > 0, 0 <= b < c) of the
/// integer lattice generated by the given rows.
fn hnf2(rows: &[(i64, i64)]) -> (i64, i64, i64) {
    let mut rows: Vec<(i64, i64)> = rows.iter().copied().filter(|r| *r != (0, 0)).collect();
    // clear the first column down to a single row via extended gcd steps
    loop {
        let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].0 != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let &i = nz
            .iter()
            .min_by_key(|&&i| rows[i].0.unsigned_abs())
            .unwrap();
        let (x, _) = rows[i];
        for &j in &nz {
            if j != i {
                let k = rows[j].0.div_euclid(x);
                rows[j].0 -= k * x;
                rows[j].1 -= k * rows[i].1;
            }
        }
        rows.retain(|r| *r != (0, 0));
    }
    let pivot = rows.iter().position(|r| r.0 != 0);
    let (mut a, mut b) = pivot.map(|i| rows[i]).unwrap_or((0, 0));
    if a < 0 {
        a = -a;
        b = -b;
    }
    // gcd of the second column among rows with zero first column
    let mut c = 0i64;
    for (x, y) in &rows {
        if *x == 0 {
            c = gcd(c, *y);
        }
    }
    if c != 0 {
        b = b.rem_euclid(c);
    }
    (a, b, c)
}

/// The extended lattice Z^2 + Z (p, q)/m for a trivial-or-primitive slope.
pub fn extend_lattice(slope: Slope, m: i64) -> Result<ExtendedLattice> {
    if m < 1 {
        return Err(Error::BadDenominator(m));
    }
    let (p, q) = slope.coefficients();
    if slope.is_trivial() || m == 1 {
        return Ok(ExtendedLattice {
            slope,
            denominator: m,
            basis: [(rat(1, 1), rat(0, 1)), (rat(0, 1), rat(1, 1))],
            index: 1,
        });
    }
    // m * lattice is the integer lattice generated by (m,0), (0,m), (p,q)
    let (a, b, c) = hnf2(&[(m, 0), (0, m), (p, q)]);
    let index = (m * m) / (a * c);
    Ok(ExtendedLattice {
        slope,
        denominator: m,
        basis: [(rat(a, m), rat(b, m)), (rat(0, m), rat(c, m))],
        index,
    })
}

/// Membership verdict for a rational vector against an extended lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Membership {
    /// coordinates in the extended basis; `in_base` iff the vector lies in
    /// the base lattice Z^2 (the P-tilde minus P test is `!in_base`)
    Member {
        coords: (BigInt, BigInt),
        in_base: bool,
    },
    NotMember,
}

/// Exact membership decision and coordinates in the extended basis.
pub fn express_in_extended(v: (&BigRational, &BigRational), lat: &ExtendedLattice) -> Membership {
    let [(a, b), (zero, c)] = &lat.basis;
    debug_assert!(zero.is_zero());
    // solve (alpha, beta) * [[a, b], [0, c]] = v
    let alpha = v.0 / a;
    let beta = (v.1 - &alpha * b) / c;
    if alpha.is_integer() && beta.is_integer() {
        Membership::Member {
            coords: (alpha.to_integer(), beta.to_integer()),
            in_base: v.0.is_integer() && v.1.is_integer(),
        }
    } else {
        Membership::NotMember
    }
}

/// Decompose a member of the extended lattice as (p, q) + k zeta/m with
/// integers p, q and the canonical residue 0 <= k < m. Returns None for
/// non-members.
pub fn decompose_over_root(
    v: (&BigRational, &BigRational),
    lat: &ExtendedLattice,
) -> Option<(BigInt, BigInt, i64)> {
    let (zp, zq) = lat.slope.coefficients();
    let m = lat.denominator;
    for k in 0..m.max(1) {
        let rp = v.0 - rat(k * zp, m);
        let rq = v.1 - rat(k * zq, m);
        if rp.is_integer() && rq.is_integer() {
            return Some((rp.to_integer(), rq.to_integer(), k));
        }
    }
    None
}

/// Representatives of the realizable congruence classes of slopes modulo a
/// single denominator: residue pairs with gcd(p, q, m) = 1, plus the zero
/// class when requested.
fn cusp_class_representatives(m: i64, include_trivial: bool) -> Vec<Slope> {
    let mut out = Vec::new();
    let mut saw_zero = false;
    for p in 0..m {
        for q in 0..m {
            if gcd(gcd(p, q), m) == 1 {
                if (p, q) == (0, 0) {
                    saw_zero = true; // only for m = 1
                }
                out.push(lift_to_primitive(p, q, m));
            }
        }
    }
    if include_trivial && !saw_zero {
        out.push(Slope::trivial());
    }
    out
}

/// A primitive slope congruent to (p, q) modulo m. Exists whenever
/// gcd(p, q, m) = 1; found by a small search over lifts.
fn lift_to_primitive(p: i64, q: i64, m: i64) -> Slope {
    for dp in 0..=4 {
        for dq in 0..=4 {
            let (pp, qq) = (p + dp * m, q + dq * m);
            if is_primitive(pp, qq) {
                return Slope::new(pp, qq).unwrap();
            }
        }
    }
    unreachable!("gcd(p, q, m) = 1 admits a primitive lift");
}

/// The canonical representative of the congruence class of a slope-tuple
/// modulo m (componentwise residue, lifted to a primitive pair; trivial
/// components stay trivial).
pub fn class_representative(z: &SlopeTuple, m: &DenominatorTuple) -> Result<SlopeTuple> {
    if z.len() != m.len() {
        return Err(Error::LengthMismatch(z.len(), m.len()));
    }
    let reps = z
        .0
        .iter()
        .zip(m.components())
        .map(|(s, &mj)| {
            if s.is_trivial() {
                Slope::trivial()
            } else {
                let (p, q) = s.coefficients();
                lift_to_primitive(p.rem_euclid(mj), q.rem_euclid(mj), mj)
            }
        })
        .collect();
    Ok(SlopeTuple(reps))
}

/// One slope-tuple representative per congruence class modulo m that is
/// realizable by a slope-tuple.
pub fn enumerate_congruence_classes(m: &DenominatorTuple, include_trivial: bool) -> Vec<SlopeTuple> {
    let per_cusp: Vec<Vec<Slope>> = m
        .components()
        .iter()
        .map(|&mj| cusp_class_representatives(mj, include_trivial))
        .collect();
    let mut out = vec![Vec::new()];
    for reps in &per_cusp {
        let mut next = Vec::with_capacity(out.len() * reps.len());
        for prefix in &out {
            for r in reps {
                let mut t = prefix.clone();
                t.push(*r);
                next.push(t);
            }
        }
        out = next;
    }
    out.into_iter().map(SlopeTuple).collect()
}

/// Meridinal-area bound A(n) = 27^n (9 n^2 + 4 n) pi.
pub fn bound_a(n: u32) -> f64 {
    let n_ = n as f64;
    27f64.powi(n as i32) * (9.0 * n_ * n_ + 4.0 * n_) * std::f64::consts::PI
}

/// The integer coefficient 27^n (9 n^2 + 4 n) of A(n), exactly.
pub fn bound_a_coefficient(n: u32) -> BigUint {
    BigUint::from(27u32).pow(n) * BigUint::from(9 * n * n + 4 * n)
}

/// Denominator bound T(n) = 2 * 3^n, exactly.
pub fn bound_t(n: u32) -> BigUint {
    BigUint::from(2u32) * BigUint::from(3u32).pow(n)
}

/// Sum-of-relator-lengths stand-in for the presentation length of a group
/// with the given relator word lengths.
pub fn presentation_length_from(relator_lengths: impl IntoIterator<Item = usize>) -> usize {
    relator_lengths.into_iter().sum()
}

#[allow(dead_code)]
fn abs_rat(r: &BigRational) -> BigRational {
    r.abs()
}
