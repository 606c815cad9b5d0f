//! Cyclically reduced normal forms a1 b1 ... as bs for elements of a Dehn
//! extension, viewed as the amalgam of the base group with the extended
//! peripheral lattice over the peripheral subgroup.
//!
//! Peripheral membership of base-group words is delegated to a pluggable
//! oracle; the default oracle is numeric (parabolic fixed-point test
//! against a representation) and answers "unknown" rather than guess.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::h3::Isometry;
use crate::lattice::{self, ExtendedLattice, Membership};
use crate::presentation::{slope_word_pair, DehnExtension, MarkedPresentation, Word};
use crate::repvar::{self, Representation};

/// One factor of an amalgam word: a base-group word, or an extended-
/// lattice element with exact rational coordinates in the peripheral
/// basis of its cusp.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Vertex(Word),
    Edge {
        cusp: usize,
        coords: (BigRational, BigRational),
    },
}

#[derive(Serialize, Deserialize)]
enum FactorRepr {
    #[serde(rename = "v")]
    V(Vec<i32>),
    #[serde(rename = "e")]
    E { cusp: usize, coords: [[String; 2]; 2] },
}

fn rat_repr(r: &BigRational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

fn rat_parse(s: &[String; 2]) -> std::result::Result<BigRational, String> {
    let n: BigInt = s[0].parse().map_err(|_| format!("bad numerator {}", s[0]))?;
    let d: BigInt = s[1].parse().map_err(|_| format!("bad denominator {}", s[1]))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for Factor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Factor::Vertex(w) => FactorRepr::V(w.letters().to_vec()),
            Factor::Edge { cusp, coords } => FactorRepr::E {
                cusp: *cusp,
                coords: [rat_repr(&coords.0), rat_repr(&coords.1)],
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Factor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match FactorRepr::deserialize(d)? {
            FactorRepr::V(letters) => Ok(Factor::Vertex(Word::new(letters))),
            FactorRepr::E { cusp, coords } => Ok(Factor::Edge {
                cusp,
                coords: (
                    rat_parse(&coords[0]).map_err(serde::de::Error::custom)?,
                    rat_parse(&coords[1]).map_err(serde::de::Error::custom)?,
                ),
            }),
        }
    }
}

/// A word in the amalgam, stored as a factor sequence. Construction does
/// not normalize; see `reduce`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AmalgamWord {
    pub factors: Vec<Factor>,
}

impl AmalgamWord {
    pub fn new(factors: Vec<Factor>) -> Self {
        AmalgamWord { factors }
    }

    pub fn vertex(w: Word) -> Self {
        AmalgamWord {
            factors: vec![Factor::Vertex(w)],
        }
    }

    pub fn edge(cusp: usize, p: BigRational, q: BigRational) -> Self {
        AmalgamWord {
            factors: vec![Factor::Edge { cusp, coords: (p, q) }],
        }
    }

    pub fn edge_i64(cusp: usize, p: (i64, i64), q: (i64, i64)) -> Self {
        AmalgamWord::edge(
            cusp,
            BigRational::new(BigInt::from(p.0), BigInt::from(p.1)),
            BigRational::new(BigInt::from(q.0), BigInt::from(q.1)),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Oracle answer for "does this base-group word lie in the peripheral
/// subgroup of cusp j".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipAnswer {
    /// in P^j with the given (meridian, longitude) coordinates
    In(i64, i64),
    NotIn,
    Unknown,
}

/// Membership oracle contract. Answers must be consistent under free
/// reduction and inversion. Implementations must be safe for concurrent
/// queries or documented single-threaded.
pub trait MembershipOracle {
    fn query(&self, w: &Word, cusp: usize) -> MembershipAnswer;
}

/// The default numeric oracle: a word lies in P^j iff its image is
/// parabolic (or the identity) fixing the common fixed point of the
/// peripheral images, with integer coordinates recovered from the
/// translation parts. Gap answers are "unknown", never guessed.
pub struct NumericOracle<'a> {
    rep: &'a Representation,
    pres: &'a MarkedPresentation,
    pub in_tol: f64,
    pub out_floor: f64,
}

impl<'a> NumericOracle<'a> {
    pub fn new(rep: &'a Representation, pres: &'a MarkedPresentation) -> Self {
        NumericOracle {
            rep,
            pres,
            in_tol: 1e-6,
            out_floor: 1e-3,
        }
    }

    /// Conjugator sending the parabolic fixed point of the cusp's
    /// meridian image to infinity, plus the conjugated peripheral
    /// translations.
    fn frame(&self, cusp: usize) -> Result<(Isometry, Complex64, Complex64)> {
        let c = self
            .pres
            .cusps
            .get(cusp)
            .ok_or(Error::BadCuspIndex(cusp, self.pres.cusp_count()))?;
        let mu = repvar::evaluate(self.rep, &c.meridian)?;
        let la = repvar::evaluate(self.rep, &c.longitude)?;
        let fps = mu.fixed_points()?;
        let conj = match fps.first() {
            Some(crate::h3::BoundaryPoint::Infinity) | None => Isometry::identity(),
            Some(crate::h3::BoundaryPoint::Finite(z0)) => Isometry::from_entries(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                *z0,
            ),
        };
        let muc = conj.mul(&mu).mul(&conj.inverse());
        let lac = conj.mul(&la).mul(&conj.inverse());
        Ok((conj, muc.b / muc.a, lac.b / lac.a))
    }
}

impl MembershipOracle for NumericOracle<'_> {
    fn query(&self, w: &Word, cusp: usize) -> MembershipAnswer {
        let Ok((conj, tau_mu, tau_la)) = self.frame(cusp) else {
            return MembershipAnswer::Unknown;
        };
        let Ok(img) = repvar::evaluate(self.rep, w) else {
            return MembershipAnswer::Unknown;
        };
        let m = conj.mul(&img).mul(&conj.inverse());
        // peripheral images are upper triangular with trace +-2 in this frame
        let defect = m.c.norm().max((m.trace().norm() - 2.0).abs());
        if defect > self.out_floor {
            return MembershipAnswer::NotIn;
        }
        if defect > self.in_tol {
            return MembershipAnswer::Unknown;
        }
        let tau = m.b / m.a;
        // solve p tau_mu + q tau_la = tau over the reals
        let det = tau_mu.re * tau_la.im - tau_mu.im * tau_la.re;
        if det.abs() < 1e-12 {
            return MembershipAnswer::Unknown;
        }
        let p = (tau.re * tau_la.im - tau.im * tau_la.re) / det;
        let q = (tau_mu.re * tau.im - tau_mu.im * tau.re) / det;
        let (pr, qr) = (p.round(), q.round());
        let drift = (p - pr).abs().max((q - qr).abs());
        if drift > self.out_floor {
            return MembershipAnswer::NotIn;
        }
        if drift > self.in_tol * 10.0 {
            return MembershipAnswer::Unknown;
        }
        MembershipAnswer::In(pr as i64, qr as i64)
    }
}

/// Oracle that abstains on every query; useful for exercising the
/// inconclusive paths.
pub struct UnknownOracle;

impl MembershipOracle for UnknownOracle {
    fn query(&self, _w: &Word, _cusp: usize) -> MembershipAnswer {
        MembershipAnswer::Unknown
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormStatus {
    Reduced,
    ReducedUpToConjugacy,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormResult {
    pub reduced: AmalgamWord,
    pub syllable_length: usize,
    pub status: NormalFormStatus,
}

struct Reducer<'a> {
    base: &'a MarkedPresentation,
    lats: Vec<ExtendedLattice>,
    oracle: &'a dyn MembershipOracle,
    unknown_hit: bool,
    conjugacy_used: bool,
    changed: bool,
}

fn int_rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl<'a> Reducer<'a> {
    fn new(ext: &'a DehnExtension, oracle: &'a dyn MembershipOracle) -> Result<Self> {
        let mut lats = Vec::new();
        for (s, &m) in ext.slopes.0.iter().zip(ext.denominators.components()) {
            lats.push(lattice::extend_lattice(*s, m)?);
        }
        Ok(Reducer {
            base: &ext.inclusion.source,
            lats,
            oracle,
            unknown_hit: false,
            conjugacy_used: false,
            changed: false,
        })
    }

    fn validate(&self, w: &AmalgamWord) -> Result<()> {
        for f in &w.factors {
            match f {
                Factor::Vertex(v) => {
                    if v.max_index() > self.base.generators.len() {
                        return Err(Error::UndeclaredGenerator(v.max_index() as i32));
                    }
                }
                Factor::Edge { cusp, coords } => {
                    let lat = self
                        .lats
                        .get(*cusp)
                        .ok_or(Error::BadCuspIndex(*cusp, self.lats.len()))?;
                    if express_membership(coords, lat) == Membership::NotMember {
                        return Err(Error::Validation(format!(
                            "edge factor {:?} is not in the extended lattice of cusp {}",
                            coords, cusp
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Leftmost applicable inner step; true iff a change was made.
    fn inner_step(&mut self, fs: &mut Vec<Factor>) -> Result<bool> {
        for i in 0..fs.len() {
            match &fs[i] {
                Factor::Vertex(w) if w.is_empty() => {
                    fs.remove(i);
                    return Ok(true);
                }
                Factor::Edge { coords, .. }
                    if coords.0.is_zero() && coords.1.is_zero() =>
                {
                    fs.remove(i);
                    return Ok(true);
                }
                Factor::Edge { cusp, coords }
                    if coords.0.is_integer() && coords.1.is_integer() =>
                {
                    // base-lattice element: fold back into the vertex group
                    let p = coords.0.to_integer().to_i64().ok_or_else(|| {
                        Error::Validation("edge coordinate overflows i64".into())
                    })?;
                    let q = coords.1.to_integer().to_i64().ok_or_else(|| {
                        Error::Validation("edge coordinate overflows i64".into())
                    })?;
                    fs[i] = Factor::Vertex(slope_word_pair(self.base, *cusp, (p, q))?);
                    return Ok(true);
                }
                _ => {}
            }
            if i + 1 < fs.len() {
                match (&fs[i], &fs[i + 1]) {
                    (Factor::Vertex(w1), Factor::Vertex(w2)) => {
                        fs[i] = Factor::Vertex(w1.concat(w2));
                        fs.remove(i + 1);
                        return Ok(true);
                    }
                    (
                        Factor::Edge { cusp: c1, coords: x },
                        Factor::Edge { cusp: c2, coords: y },
                    ) if c1 == c2 => {
                        fs[i] = Factor::Edge {
                            cusp: *c1,
                            coords: (&x.0 + &y.0, &x.1 + &y.1),
                        };
                        fs.remove(i + 1);
                        return Ok(true);
                    }
                    (Factor::Vertex(w), Factor::Edge { cusp, coords }) => {
                        match self.oracle.query(w, *cusp) {
                            MembershipAnswer::In(p, q) => {
                                fs[i] = Factor::Edge {
                                    cusp: *cusp,
                                    coords: (&coords.0 + int_rat(p), &coords.1 + int_rat(q)),
                                };
                                fs.remove(i + 1);
                                return Ok(true);
                            }
                            MembershipAnswer::Unknown => self.unknown_hit = true,
                            MembershipAnswer::NotIn => {}
                        }
                    }
                    (Factor::Edge { cusp, coords }, Factor::Vertex(w)) => {
                        match self.oracle.query(w, *cusp) {
                            MembershipAnswer::In(p, q) => {
                                // the extended lattice is abelian, so the
                                // absorbed vertex commutes into the edge
                                fs[i] = Factor::Edge {
                                    cusp: *cusp,
                                    coords: (&coords.0 + int_rat(p), &coords.1 + int_rat(q)),
                                };
                                fs.remove(i + 1);
                                return Ok(true);
                            }
                            MembershipAnswer::Unknown => self.unknown_hit = true,
                            MembershipAnswer::NotIn => {}
                        }
                    }
                    _ => {}
                }
            } else if fs.len() == 1 {
                // a lone vertex recognized as the identity vanishes
                if let Factor::Vertex(w) = &fs[i] {
                    if let MembershipAnswer::In(0, 0) = self.oracle.query(w, 0) {
                        fs.remove(i);
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Cyclic-seam step: rotate when the last and first factors can merge.
    fn seam_step(&mut self, fs: &mut Vec<Factor>) -> bool {
        if fs.len() < 2 {
            return false;
        }
        let (first, last) = (&fs[0], &fs[fs.len() - 1]);
        let rotate = match (first, last) {
            (Factor::Vertex(_), Factor::Vertex(_)) => true,
            (Factor::Edge { cusp: c1, .. }, Factor::Edge { cusp: c2, .. }) => c1 == c2,
            (Factor::Edge { cusp, .. }, Factor::Vertex(w)) => {
                match self.oracle.query(w, *cusp) {
                    MembershipAnswer::In(..) => true,
                    MembershipAnswer::Unknown => {
                        self.unknown_hit = true;
                        false
                    }
                    MembershipAnswer::NotIn => false,
                }
            }
            (Factor::Vertex(w), Factor::Edge { cusp, .. }) => {
                match self.oracle.query(w, *cusp) {
                    MembershipAnswer::In(..) => true,
                    MembershipAnswer::Unknown => {
                        self.unknown_hit = true;
                        false
                    }
                    MembershipAnswer::NotIn => false,
                }
            }
        };
        if rotate {
            let last = fs.pop().expect("len >= 2");
            fs.insert(0, last);
            self.conjugacy_used = true;
        }
        rotate
    }

    fn run(&mut self, mut fs: Vec<Factor>) -> Result<Vec<Factor>> {
        loop {
            self.unknown_hit = false;
            while self.inner_step(&mut fs)? {
                self.changed = true;
                self.unknown_hit = false;
            }
            if !self.seam_step(&mut fs) {
                return Ok(fs);
            }
            self.changed = true;
        }
    }
}

fn express_membership(
    coords: &(BigRational, BigRational),
    lat: &ExtendedLattice,
) -> Membership {
    lattice::express_in_extended((&coords.0, &coords.1), lat)
}

fn syllables(fs: &[Factor]) -> usize {
    fs.iter()
        .filter(|f| matches!(f, Factor::Edge { .. }))
        .count()
}

/// Iteratively merge factors until no step applies: base-lattice edge
/// factors fold back into vertex words, oracle-recognized peripheral
/// vertex factors are absorbed into adjacent edges, and the cyclic seam
/// is merged last. The result represents a conjugate of the input; the
/// status records whether any seam (conjugacy) move was used, or whether
/// an oracle abstention blocked a potential step.
pub fn reduce(
    w: &AmalgamWord,
    ext: &DehnExtension,
    oracle: &dyn MembershipOracle,
) -> Result<NormalFormResult> {
    let mut red = Reducer::new(ext, oracle)?;
    red.validate(w)?;
    let fs = red.run(w.factors.clone())?;
    let status = if red.unknown_hit {
        NormalFormStatus::Inconclusive
    } else if red.conjugacy_used {
        NormalFormStatus::ReducedUpToConjugacy
    } else {
        NormalFormStatus::Reduced
    };
    Ok(NormalFormResult {
        syllable_length: syllables(&fs),
        reduced: AmalgamWord::new(fs),
        status,
    })
}

/// True iff no reduction step (including across the cyclic seam) applies;
/// None when the oracle abstained before any step was found.
pub fn is_cyclically_reduced(
    w: &AmalgamWord,
    ext: &DehnExtension,
    oracle: &dyn MembershipOracle,
) -> Result<Option<bool>> {
    let mut red = Reducer::new(ext, oracle)?;
    red.validate(w)?;
    let _ = red.run(w.factors.clone())?;
    if red.changed {
        Ok(Some(false))
    } else if red.unknown_hit {
        Ok(None)
    } else {
        Ok(Some(true))
    }
}

/// The syllable count s of the reduced form; None when inconclusive.
pub fn syllable_length(
    w: &AmalgamWord,
    ext: &DehnExtension,
    oracle: &dyn MembershipOracle,
) -> Result<Option<usize>> {
    let r = reduce(w, ext, oracle)?;
    if r.status == NormalFormStatus::Inconclusive {
        Ok(None)
    } else {
        Ok(Some(r.syllable_length))
    }
}

/// Translate a word in the extension presentation's generators into an
/// amalgam word: base generators become vertex letters, each adjoined
/// root becomes the edge factor zeta^j / m^j.
pub fn from_extension_word(ext: &DehnExtension, w: &Word) -> Result<AmalgamWord> {
    let n = ext.inclusion.source.generators.len() as i32;
    let mut factors: Vec<Factor> = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    for &l in w.letters() {
        let idx = l.abs();
        if idx <= n {
            pending.push(l);
            continue;
        }
        if !pending.is_empty() {
            factors.push(Factor::Vertex(Word::new(std::mem::take(&mut pending))));
        }
        let cusp = ext
            .root_generators
            .iter()
            .position(|g| *g == Some(idx as usize))
            .ok_or(Error::UndeclaredGenerator(l))?;
        let (p, q) = ext.slopes.0[cusp].coefficients();
        let m = ext.denominators.components()[cusp];
        let sign = if l > 0 { 1 } else { -1 };
        factors.push(Factor::Edge {
            cusp,
            coords: (
                BigRational::new(BigInt::from(sign * p), BigInt::from(m)),
                BigRational::new(BigInt::from(sign * q), BigInt::from(m)),
            ),
        });
    }
    if !pending.is_empty() {
        factors.push(Factor::Vertex(Word::new(pending)));
    }
    Ok(AmalgamWord::new(factors))
}
