//! Numeric representations of presentations into the 2x2 unimodular
//! group: word evaluation, relator residuals, kill tests, the stability
//! classifier for sequences of representations, and sample-level
//! descendant comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::h3::Isometry;
use crate::presentation::{MarkedPresentation, PresentationMap, Word};

/// Default threshold below which a word image counts as trivial.
pub const TRIVIAL_TOL: f64 = 1e-6;
/// Default floor above which a word image counts as nontrivial; margins in
/// the gap are undetermined.
pub const NONTRIVIAL_FLOOR: f64 = 1e-3;

/// A generator-to-matrix assignment for a presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Representation {
    pub matrices: Vec<Isometry>,
    pub tolerance: f64,
    /// false when some relator residual exceeded the tolerance at
    /// construction; carried for diagnostics rather than rejected
    pub valid: bool,
}

impl Representation {
    pub fn new(pres: &MarkedPresentation, matrices: Vec<Isometry>, tolerance: f64) -> Result<Self> {
        if matrices.len() != pres.generators.len() {
            return Err(Error::LengthMismatch(matrices.len(), pres.generators.len()));
        }
        let mut rep = Representation {
            matrices,
            tolerance,
            valid: true,
        };
        let report = residuals(&rep, pres)?;
        rep.valid = report.max() <= tolerance;
        Ok(rep)
    }

    pub fn generator_count(&self) -> usize {
        self.matrices.len()
    }
}

/// Evaluate a word as a product of generator images.
pub fn evaluate(rep: &Representation, w: &Word) -> Result<Isometry> {
    let mut out = Isometry::identity();
    for &l in w.letters() {
        let idx = (l.unsigned_abs() as usize)
            .checked_sub(1)
            .filter(|&i| i < rep.matrices.len())
            .ok_or(Error::UndeclaredGenerator(l))?;
        let g = &rep.matrices[idx];
        out = out.mul(&if l > 0 { *g } else { g.inverse() });
    }
    Ok(out)
}

/// Numeric evaluation of the relator-ideal generators: per-relator
/// sign-minimized distance of the relator image to the identity, and the
/// unimodularity defect of each generator image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub relator_residuals: Vec<f64>,
    pub unimodularity_defects: Vec<f64>,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.relator_residuals
            .iter()
            .chain(&self.unimodularity_defects)
            .fold(0.0, |acc, &x| acc.max(x))
    }
}

pub fn residuals(rep: &Representation, pres: &MarkedPresentation) -> Result<ResidualReport> {
    if rep.matrices.len() != pres.generators.len() {
        return Err(Error::LengthMismatch(rep.matrices.len(), pres.generators.len()));
    }
    let relator_residuals = pres
        .relators
        .iter()
        .map(|r| Ok(evaluate(rep, r)?.dist_to_identity()))
        .collect::<Result<Vec<_>>>()?;
    let unimodularity_defects = rep
        .matrices
        .iter()
        .map(|m| (m.det() - 1.0).norm())
        .collect();
    Ok(ResidualReport {
        relator_residuals,
        unimodularity_defects,
    })
}

/// Whether the representation kills the word, plus the sign-minimized
/// distance of the image to the identity.
pub fn kills(rep: &Representation, w: &Word) -> Result<(bool, f64)> {
    kills_with_tol(rep, w, TRIVIAL_TOL)
}

pub fn kills_with_tol(rep: &Representation, w: &Word, trivial_tol: f64) -> Result<(bool, f64)> {
    let margin = evaluate(rep, w)?.dist_to_identity();
    Ok((margin <= trivial_tol, margin))
}

/// Per-word verdict in a stability classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordVerdict {
    EventuallyTrivial,
    EventuallyNontrivial,
    Undetermined,
}

/// Window-based estimate of the stable-sequence behaviour of a word set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub per_word: Vec<WordVerdict>,
    /// per word, the margin at each examined index
    pub margins: Vec<Vec<f64>>,
    pub window: (usize, usize),
    /// smallest tail margin among eventually-nontrivial words
    pub margin: f64,
    pub trivial_tol: f64,
    pub nontrivial_floor: f64,
}

impl StabilityVerdict {
    /// Indices (into the word list) of the estimated stable kernel.
    pub fn stable_kernel(&self) -> Vec<usize> {
        self.per_word
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == WordVerdict::EventuallyTrivial)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Classify the tail behaviour of each word under a finite sequence of
/// representations. The limit-level "for all but finitely many n" is
/// approximated by "for every index in the examined tail": the verdict is
/// taken from the maximal consistent suffix of the window, which must
/// cover at least half of it.
pub fn classify_stability(
    reps: &[Representation],
    words: &[Word],
    window: std::ops::Range<usize>,
) -> Result<StabilityVerdict> {
    classify_stability_with(reps, words, window, TRIVIAL_TOL, NONTRIVIAL_FLOOR)
}

pub fn classify_stability_with(
    reps: &[Representation],
    words: &[Word],
    window: std::ops::Range<usize>,
    trivial_tol: f64,
    nontrivial_floor: f64,
) -> Result<StabilityVerdict> {
    if window.is_empty() || window.end > reps.len() {
        return Err(Error::Validation(format!(
            "empty or out-of-range window {:?} over {} representations",
            window,
            reps.len()
        )));
    }
    assert!(
        trivial_tol < nontrivial_floor,
        "the trivial tolerance must stay below the nontrivial floor"
    );
    let mut per_word = Vec::with_capacity(words.len());
    let mut margins = Vec::with_capacity(words.len());
    let mut global_margin = f64::INFINITY;
    for w in words {
        let ms: Vec<f64> = window
            .clone()
            .map(|i| Ok(evaluate(&reps[i], w)?.dist_to_identity()))
            .collect::<Result<Vec<_>>>()?;
        let trivial_suffix = ms.iter().rev().take_while(|&&m| m <= trivial_tol).count();
        let nontrivial_suffix = ms
            .iter()
            .rev()
            .take_while(|&&m| m >= nontrivial_floor)
            .count();
        let min_tail = ms.len().div_ceil(2);
        let verdict = if trivial_suffix >= min_tail {
            WordVerdict::EventuallyTrivial
        } else if nontrivial_suffix >= min_tail {
            let tail_min = ms[ms.len() - nontrivial_suffix..]
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            global_margin = global_margin.min(tail_min);
            WordVerdict::EventuallyNontrivial
        } else {
            WordVerdict::Undetermined
        };
        per_word.push(verdict);
        margins.push(ms);
    }
    Ok(StabilityVerdict {
        per_word,
        margins,
        window: (window.start, window.end),
        margin: global_margin,
        trivial_tol,
        nontrivial_floor,
    })
}

/// Pull a representation of the filled group back to the Dehn extension
/// through an extended-filling map: each extension generator receives the
/// image of its word under the map.
pub fn extension_image(
    rep: &Representation,
    ext_map: &PresentationMap,
) -> Result<Representation> {
    let matrices = ext_map
        .images
        .iter()
        .map(|w| evaluate(rep, w))
        .collect::<Result<Vec<_>>>()?;
    Representation::new(&ext_map.source, matrices, rep.tolerance)
}

/// Sample-level kernel comparison outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescendantComparison {
    /// kernel(rep1) contained in kernel(rep2) on the sample
    FirstDescendsToSecond,
    SecondDescendsToFirst,
    Incomparable,
    EquivalentOnSample,
}

/// Semi-decision of descendant order by kernel containment over a word
/// sample. Only the sampled words are consulted.
pub fn descendant_compare(
    rep1: &Representation,
    rep2: &Representation,
    test_words: &[Word],
) -> Result<DescendantComparison> {
    let mut one_in_two = true;
    let mut two_in_one = true;
    for w in test_words {
        let (k1, _) = kills(rep1, w)?;
        let (k2, _) = kills(rep2, w)?;
        if k1 && !k2 {
            one_in_two = false;
        }
        if k2 && !k1 {
            two_in_one = false;
        }
    }
    Ok(match (one_in_two, two_in_one) {
        (true, true) => DescendantComparison::EquivalentOnSample,
        (true, false) => DescendantComparison::FirstDescendsToSecond,
        (false, true) => DescendantComparison::SecondDescendsToFirst,
        (false, false) => DescendantComparison::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::figure_eight;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The exact discrete faithful representation of the bundled group.
    pub(crate) fn riley() -> Vec<Isometry> {
        let om = c(0.5, 3f64.sqrt() / 2.0);
        vec![
            Isometry::from_entries(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            Isometry::from_entries(c(1.0, 0.0), c(0.0, 0.0), -om, c(1.0, 0.0)),
        ]
    }

    #[test]
    fn riley_is_a_representation() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        assert!(rep.valid);
        let report = residuals(&rep, &g).unwrap();
        assert!(report.max() < 1e-12, "residual {}", report.max());
    }

    #[test]
    fn evaluate_examples() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        assert!(evaluate(&rep, &Word::empty()).unwrap().dist_to_identity() < 1e-15);
        let a = evaluate(&rep, &Word::new(vec![1])).unwrap();
        assert!(a.entry_dist(&rep.matrices[0]) < 1e-15);
        let w = Word::new(vec![1, 2, -1]);
        let ww = evaluate(&rep, &w.concat(&w.inverse())).unwrap();
        assert!(ww.dist_to_identity() < 1e-12);
        assert!(evaluate(&rep, &Word::new(vec![5])).is_err());
    }

    #[test]
    fn evaluate_is_multiplicative() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let len1 = rng.gen_range(0..16);
            let len2 = rng.gen_range(0..16);
            let rand_word = |rng: &mut ChaCha8Rng, n: usize| {
                Word::new(
                    (0..n)
                        .map(|_| *[1, -1, 2, -2].choose(rng).unwrap())
                        .collect(),
                )
            };
            let w1 = rand_word(&mut rng, len1);
            let w2 = rand_word(&mut rng, len2);
            let lhs = evaluate(&rep, &w1.concat(&w2)).unwrap();
            let rhs = evaluate(&rep, &w1).unwrap().mul(&evaluate(&rep, &w2).unwrap());
            assert!(lhs.entry_dist(&rhs) < 1e-10);
        }
    }

    #[test]
    fn perturbation_shows_up_in_residuals() {
        let g = figure_eight();
        let mut mats = riley();
        mats[1].b += c(1e-3, 0.0);
        let rep = Representation {
            matrices: mats,
            tolerance: 1e-9,
            valid: false,
        };
        let report = residuals(&rep, &g).unwrap();
        assert!(report.max() >= 1e-4, "perturbed residual {}", report.max());
        // flagged at construction
        let rep = Representation::new(&g, rep.matrices, 1e-9).unwrap();
        assert!(!rep.valid);
    }

    #[test]
    fn kills_examples_and_sign_robustness() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        assert!(kills(&rep, &Word::empty()).unwrap().0);
        let (killed, margin) = kills(&rep, &Word::new(vec![1])).unwrap();
        assert!(!killed);
        assert!(margin > NONTRIVIAL_FLOOR);
        // negate a generator globally: verdicts unchanged
        let mut neg = rep.clone();
        neg.matrices[0] = neg.matrices[0].neg();
        for w in [Word::empty(), Word::new(vec![1]), Word::new(vec![1, 2, 1])] {
            assert_eq!(kills(&rep, &w).unwrap().0, kills(&neg, &w).unwrap().0);
        }
    }

    #[test]
    fn stability_window_validation() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        assert!(classify_stability(&[rep.clone()], &[Word::empty()], 0..0).is_err());
        let v = classify_stability(&[rep], &[Word::empty(), Word::new(vec![1])], 0..1).unwrap();
        assert_eq!(v.per_word[0], WordVerdict::EventuallyTrivial);
        assert_eq!(v.per_word[1], WordVerdict::EventuallyNontrivial);
        assert_eq!(v.stable_kernel(), vec![0]);
    }

    #[test]
    fn descendant_compare_reflexive() {
        let g = figure_eight();
        let rep = Representation::new(&g, riley(), 1e-9).unwrap();
        let words = vec![Word::empty(), Word::new(vec![1]), Word::new(vec![2, 1])];
        assert_eq!(
            descendant_compare(&rep, &rep, &words).unwrap(),
            DescendantComparison::EquivalentOnSample
        );
    }
}
