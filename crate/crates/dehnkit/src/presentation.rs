//! Finite group presentations with marked peripheral subgroups, and the
//! presentation-level constructors for Dehn fillings, Dehn extensions,
//! and extended-filling epimorphisms.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, DenominatorTuple, Slope, SlopeTuple};

/// A freely reduced word in signed generator indices (1-based; negative
/// means inverse).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<i32>", into = "Vec<i32>")]
pub struct Word(Vec<i32>);

impl From<Vec<i32>> for Word {
    fn from(letters: Vec<i32>) -> Self {
        Word::new(letters)
    }
}

impl From<Word> for Vec<i32> {
    fn from(w: Word) -> Vec<i32> {
        w.0
    }
}

impl Word {
    /// Builds a word, freely reducing adjacent inverse pairs.
    pub fn new(letters: Vec<i32>) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            debug_assert!(l != 0, "letter indices are nonzero");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word::new(letters)
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Maximal generator index used.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

/// A marked peripheral subgroup: meridian and longitude words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cusp {
    pub meridian: Word,
    pub longitude: Word,
}

/// A finite presentation with marked cusps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub cusps: Vec<Cusp>,
}

impl MarkedPresentation {
    pub fn validate(&self) -> Result<()> {
        let n = self.generators.len();
        let check = |w: &Word| -> Result<()> {
            if w.max_index() > n {
                return Err(Error::UndeclaredGenerator(w.max_index() as i32));
            }
            Ok(())
        };
        for r in &self.relators {
            check(r)?;
        }
        for c in &self.cusps {
            check(&c.meridian)?;
            check(&c.longitude)?;
        }
        Ok(())
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }

    /// Sum of relator word lengths (stand-in presentation length).
    pub fn presentation_length(&self) -> usize {
        lattice::presentation_length_from(self.relators.iter().map(|r| r.len()))
    }
}

/// Kinds of presentation maps produced by the constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Filling,
    ExtendedFilling,
    CongruentExtendedFilling,
    DominatedExtendedFilling,
    Inclusion,
    Quotient,
}

/// A map between presentations given by one target word per source
/// generator. Relator triviality in the target is verified numerically
/// downstream, not symbolically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationMap {
    pub source: MarkedPresentation,
    pub target: MarkedPresentation,
    pub images: Vec<Word>,
    pub kind: MapKind,
}

impl PresentationMap {
    /// Push a source word forward through the map.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in w.letters() {
            let img = &self.images[(l.unsigned_abs() as usize) - 1];
            out = out.concat(&if l > 0 { img.clone() } else { img.inverse() });
        }
        out
    }

    fn identity_images(pres: &MarkedPresentation) -> Vec<Word> {
        (1..=pres.generators.len())
            .map(|i| Word::new(vec![i as i32]))
            .collect()
    }
}

/// The word mu^p lambda^q for a slope in the marked basis of a cusp.
pub fn slope_word(pres: &MarkedPresentation, cusp: usize, s: Slope) -> Result<Word> {
    slope_word_pair(pres, cusp, s.coefficients())
}

/// Same as `slope_word` for a raw (not necessarily primitive) pair.
pub fn slope_word_pair(pres: &MarkedPresentation, cusp: usize, (p, q): (i64, i64)) -> Result<Word> {
    let c = pres
        .cusps
        .get(cusp)
        .ok_or(Error::BadCuspIndex(cusp, pres.cusp_count()))?;
    Ok(c.meridian.pow(p).concat(&c.longitude.pow(q)))
}

/// The Dehn filling along a slope-tuple: one new relator per nontrivial
/// component; filled cusps are demoted.
pub fn dehn_filling(
    pres: &MarkedPresentation,
    z: &SlopeTuple,
) -> Result<(MarkedPresentation, PresentationMap)> {
    if z.len() != pres.cusp_count() {
        return Err(Error::LengthMismatch(z.len(), pres.cusp_count()));
    }
    let mut target = pres.clone();
    target.cusps.clear();
    for (j, slope) in z.0.iter().enumerate() {
        if slope.is_trivial() {
            target.cusps.push(pres.cusps[j].clone());
        } else {
            target.relators.push(slope_word(pres, j, *slope)?);
        }
    }
    let map = PresentationMap {
        source: pres.clone(),
        target: target.clone(),
        images: PresentationMap::identity_images(pres),
        kind: MapKind::Filling,
    };
    Ok((target, map))
}

/// A Dehn extension together with its inclusion map and the root data
/// needed by the extended-filling constructor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnExtension {
    pub presentation: MarkedPresentation,
    pub inclusion: PresentationMap,
    pub slopes: SlopeTuple,
    pub denominators: DenominatorTuple,
    /// generator index (1-based) of the adjoined root per cusp, where the
    /// extension is nontrivial on that cusp
    pub root_generators: Vec<Option<usize>>,
}

/// The Dehn extension along (zeta, m), presented by adjoining an m-th root
/// of each nontrivial slope word together with the peripheral commutators.
pub fn dehn_extension(
    pres: &MarkedPresentation,
    z: &SlopeTuple,
    m: &DenominatorTuple,
) -> Result<DehnExtension> {
    if z.len() != pres.cusp_count() || m.len() != pres.cusp_count() {
        return Err(Error::LengthMismatch(z.len(), pres.cusp_count()));
    }
    let mut target = pres.clone();
    let mut root_generators = vec![None; pres.cusp_count()];
    for (j, (slope, &mj)) in z.0.iter().zip(m.components()).enumerate() {
        // trivial on this cusp: nothing adjoined
        if slope.is_trivial() || mj == 1 {
            continue;
        }
        target.generators.push(format!("t{}", j + 1));
        let t = target.generators.len() as i32;
        root_generators[j] = Some(t as usize);
        let tw = Word::new(vec![t]);
        let zeta = slope_word(pres, j, *slope)?;
        target.relators.push(tw.pow(mj).concat(&zeta.inverse()));
        let mu = &pres.cusps[j].meridian;
        let la = &pres.cusps[j].longitude;
        for g in [mu, la] {
            let comm = tw
                .concat(g)
                .concat(&tw.inverse())
                .concat(&g.inverse());
            target.relators.push(comm);
        }
    }
    let inclusion = PresentationMap {
        source: pres.clone(),
        target: target.clone(),
        images: PresentationMap::identity_images(pres),
        kind: MapKind::Inclusion,
    };
    Ok(DehnExtension {
        presentation: target,
        inclusion,
        slopes: z.clone(),
        denominators: m.clone(),
        root_generators,
    })
}

/// The extended-filling epimorphism from a Dehn extension onto the Dehn
/// filling along a congruent (or dominated) slope-tuple: Gamma-generators
/// map to themselves and each root t_j maps to the lattice word for
/// (zeta - zeta')^j / m^j.
pub fn extended_filling(ext: &DehnExtension, z_prime: &SlopeTuple) -> Result<PresentationMap> {
    let source_base = &ext.inclusion.source;
    let m = &ext.denominators;
    let congruent = lattice::congruent_mod(&ext.slopes, z_prime, m)?;
    let dominated = lattice::dominates(&ext.slopes, z_prime, m)?;
    if !congruent && !dominated {
        return Err(Error::NotCongruent);
    }
    let (target, _) = dehn_filling(source_base, z_prime)?;
    let mut images = PresentationMap::identity_images(source_base);
    for (j, root) in ext.root_generators.iter().enumerate() {
        if root.is_none() {
            continue;
        }
        let (zp, zq) = ext.slopes.0[j].coefficients();
        let (pp, pq) = z_prime.0[j].coefficients();
        let mj = m.components()[j];
        let (dp, dq) = (zp - pp, zq - pq);
        if dp % mj != 0 || dq % mj != 0 {
            return Err(Error::NotCongruent);
        }
        images.push(slope_word_pair(source_base, j, (dp / mj, dq / mj))?);
    }
    let kind = if congruent {
        MapKind::CongruentExtendedFilling
    } else {
        MapKind::DominatedExtendedFilling
    };
    Ok(PresentationMap {
        source: ext.presentation.clone(),
        target,
        images,
        kind,
    })
}

/// Sum-of-relator-lengths presentation length.
pub fn presentation_length(pres: &MarkedPresentation) -> usize {
    pres.presentation_length()
}

/// The bundled one-cusped example group: the figure-eight knot group
/// with its standard two-generator, one-relator presentation and
/// peripheral (meridian, longitude) words.
pub fn figure_eight() -> MarkedPresentation {
    let pres: MarkedPresentation =
        serde_json::from_str(FIGURE_EIGHT_JSON).expect("bundled group data parses");
    pres.validate().expect("bundled group data is well-formed");
    pres
}

/// JSON source for the bundled example group.
pub const FIGURE_EIGHT_JSON: &str = include_str!("../data/figure_eight.json");

#[allow(dead_code)]
fn _to_i64(x: &num_bigint::BigInt) -> Option<i64> {
    x.to_i64()
}
