//! Piecewise-geodesic polygons lifted from cyclically reduced amalgam
//! words, their inscribed midpoint polygons, and the fatness metrics and
//! horoball obstruction used as a desk-scale impossibility check.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::h3::{
    self, apply, delta, distance, BoundaryPoint, GeodesicSegment, Horoball, Isometry, Point,
};
use crate::lattice::{self, Membership};
use crate::normal_form::{Factor, NormalFormResult, NormalFormStatus};
use crate::presentation::{DehnExtension, PresentationMap, Word};
use crate::repvar::{self, Representation, TRIVIAL_TOL};

/// A closed-or-open piecewise-geodesic polygon with alternating vertex
/// lists x_1..x_s (connector starts) and y_1..y_s (edge-translate ends).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    pub xs: Vec<Point>,
    pub ys: Vec<Point>,
    /// distance from the recursion's x_{s+1} back to x_1; zero (within
    /// tolerance) iff the word maps to the identity
    pub closure_gap: f64,
    /// (representation id, word id)
    pub provenance: (String, String),
}

impl Polygon {
    pub fn sides(&self) -> usize {
        self.xs.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closure_gap < TRIVIAL_TOL
    }

    /// Geodesic side segments [x_i, y_i].
    pub fn side_segments(&self) -> Vec<GeodesicSegment> {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| GeodesicSegment::new(*x, *y))
            .collect()
    }

    /// Connector lengths d(y_i, x_{i+1}), cyclically.
    pub fn connector_lengths(&self) -> Vec<f64> {
        let s = self.sides();
        (0..s)
            .map(|i| distance(self.ys[i], self.xs[(i + 1) % s]))
            .collect()
    }
}

/// The inscribed midpoint polygon and its per-vertex geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InscribedPolygon {
    pub midpoints: Vec<Point>,
    /// d(z_i, z_{i+1}), cyclically
    pub side_lengths: Vec<f64>,
    /// interior angle at z_i between z_{i-1} and z_{i+1}; empty for s = 1
    pub angles: Vec<f64>,
    /// <z_{i+1}, y_i>_{z_i}
    pub gromov_forward: Vec<f64>,
    /// <z_{i-1}, x_i>_{z_i}
    pub gromov_backward: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    /// minimum distance between distinct consecutive side segments;
    /// infinite when fewer than two sides exist
    pub min_separation: f64,
    pub five_delta: f64,
    pub passes_five_delta: bool,
    pub isolation: f64,
    pub passes_isolation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObstructionVerdict {
    /// Both geomC-style bounds hold; the contradiction configuration was
    /// constructed and the adjacent sides were tested against the
    /// horoball through the antipodal witness.
    FatBoundsHold {
        diameter_pair: (usize, usize),
        diameter: f64,
        witness: Point,
        support: BoundaryPoint,
        adjacent_sides_inside: bool,
    },
    BoundsViolated {
        kind: BoundKind,
        index: usize,
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Side,
    Angle,
}

/// Fatness thresholds: minimum side scale L and angle defect theta.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FatnessParams {
    pub theta: f64,
    pub l: f64,
}

impl Default for FatnessParams {
    fn default() -> Self {
        FatnessParams {
            theta: std::f64::consts::FRAC_PI_2,
            l: 2.0 * delta(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FatnessReport {
    pub min_side: f64,
    pub min_angle: f64,
    pub min_gromov: f64,
    pub max_connector: f64,
    pub min_separation: f64,
    pub params: FatnessParams,
    pub obstruction: ObstructionVerdict,
}

impl FatnessReport {
    /// One flat CSV row of the per-polygon metrics.
    pub fn csv_row(&self) -> String {
        format!(
            "{:.9},{:.9},{:.9},{:.9},{:.9}",
            self.min_side, self.min_angle, self.min_gromov, self.max_connector, self.min_separation
        )
    }

    pub fn csv_header() -> &'static str {
        "min_side,min_angle,min_gromov,max_connector,min_separation"
    }
}

/// Translate an edge factor into a word of the extension presentation's
/// generators: coords = (p, q) + k zeta/m becomes mu^p lambda^q t^k.
fn edge_word(ext: &DehnExtension, cusp: usize, coords: &(num_rational::BigRational, num_rational::BigRational)) -> Result<Word> {
    let base = &ext.inclusion.source;
    let lat = lattice::extend_lattice(ext.slopes.0[cusp], ext.denominators.components()[cusp])?;
    if let Membership::NotMember = lattice::express_in_extended((&coords.0, &coords.1), &lat) {
        return Err(Error::Validation(format!(
            "edge factor {coords:?} is not in the extended lattice of cusp {cusp}"
        )));
    }
    let (p, q, k) = lattice::decompose_over_root((&coords.0, &coords.1), &lat)
        .ok_or_else(|| Error::Validation("edge factor not decomposable over the root".into()))?;
    let p = p.to_i64().ok_or_else(|| Error::Validation("edge coordinate overflow".into()))?;
    let q = q.to_i64().ok_or_else(|| Error::Validation("edge coordinate overflow".into()))?;
    let c = &base.cusps[cusp];
    let mut w = c.meridian.pow(p).concat(&c.longitude.pow(q));
    if k != 0 {
        let t = ext.root_generators[cusp]
            .ok_or_else(|| Error::Validation("edge factor on a trivially extended cusp".into()))?;
        w = w.concat(&Word::new(vec![t as i32]).pow(k));
    }
    Ok(w)
}

/// Evaluate a word of the extension presentation in the filled group:
/// push through the extended-filling map, then evaluate the base word.
fn eval_extension_word(
    rep: &Representation,
    ext_map: &PresentationMap,
    w: &Word,
) -> Result<Isometry> {
    repvar::evaluate(rep, &ext_map.apply(w))
}

fn rep_id(rep: &Representation) -> String {
    let mut acc = 0.0f64;
    for (i, m) in rep.matrices.iter().enumerate() {
        for (j, e) in m.row_major().iter().enumerate() {
            acc += e.re * ((i * 4 + j) as f64 + 1.0) + e.im * ((i * 4 + j) as f64 + 1.5);
        }
    }
    format!("rep-{:x}", (acc.abs() * 1e6) as u64)
}

/// The default per-cusp anchor: the top of the unit-height horosphere in
/// the gauge where the cusp's parabolic fixes infinity.
pub fn default_anchors(ext: &DehnExtension) -> Vec<Point> {
    vec![Point::basepoint(); ext.inclusion.source.cusp_count()]
}

/// Lift a cyclically reduced word to a piecewise-geodesic polygon: the
/// anchor is translated along the prefix products of the cyclic factor
/// sequence b_1 a_2 b_2 ... b_s a_1, so the closure gap vanishes exactly
/// when the filled representation kills the word.
pub fn lift_polygon(
    rep: &Representation,
    nf: &NormalFormResult,
    ext: &DehnExtension,
    ext_map: &PresentationMap,
    cusp_anchors: &[Point],
) -> Result<Polygon> {
    if nf.status == NormalFormStatus::Inconclusive {
        return Err(Error::Inconclusive(
            "refusing to lift a word whose normal form is unresolved".into(),
        ));
    }
    if nf.syllable_length == 0 {
        return Err(Error::Degenerate(
            "syllable length 0: the word lies in the vertex group, no polygon".into(),
        ));
    }
    let factors = &nf.reduced.factors;
    let first_edge = factors
        .iter()
        .position(|f| matches!(f, Factor::Edge { .. }))
        .expect("s >= 1 implies an edge factor");
    // cyclic rotation starting at the first edge factor
    let cyc: Vec<&Factor> = factors[first_edge..]
        .iter()
        .chain(&factors[..first_edge])
        .collect();

    let anchor_cusp = match cyc[0] {
        Factor::Edge { cusp, .. } => *cusp,
        Factor::Vertex(_) => unreachable!(),
    };
    let anchor = *cusp_anchors
        .get(anchor_cusp)
        .ok_or(Error::BadCuspIndex(anchor_cusp, cusp_anchors.len()))?;

    let mut xs = vec![anchor];
    let mut ys = Vec::new();
    let mut m = Isometry::identity();
    let mut closure_gap = 0.0;
    let mut i = 0;
    let mut side = 0;
    while i < cyc.len() {
        let Factor::Edge { cusp, coords } = cyc[i] else {
            return Err(Error::Validation(
                "factor sequence does not alternate after reduction".into(),
            ));
        };
        m = m.mul(&eval_extension_word(rep, ext_map, &edge_word(ext, *cusp, coords)?)?);
        ys.push(apply(anchor, &m));
        // connector: the (possibly empty) run of vertex factors up to the
        // next edge factor
        i += 1;
        while i < cyc.len() {
            let Factor::Vertex(w) = cyc[i] else { break };
            m = m.mul(&eval_extension_word(rep, ext_map, w)?);
            i += 1;
        }
        side += 1;
        let x_next = apply(anchor, &m);
        if i < cyc.len() {
            xs.push(x_next);
        } else {
            closure_gap = distance(x_next, anchor);
        }
    }
    debug_assert_eq!(side, nf.syllable_length);
    Ok(Polygon {
        xs,
        ys,
        closure_gap,
        provenance: (
            rep_id(rep),
            serde_json::to_string(&nf.reduced).unwrap_or_default(),
        ),
    })
}

/// The inscribed polygon through the side midpoints, with side lengths,
/// vertex angles, and both Gromov-product families.
pub fn inscribe(poly: &Polygon) -> Result<InscribedPolygon> {
    if !poly.is_closed() {
        return Err(Error::Validation(format!(
            "polygon is not closed (gap {:.3e})",
            poly.closure_gap
        )));
    }
    let s = poly.sides();
    if s == 0 {
        return Err(Error::Degenerate("no sides".into()));
    }
    let midpoints: Vec<Point> = poly
        .side_segments()
        .iter()
        .map(|seg| seg.midpoint().0)
        .collect();
    if s == 1 {
        return Ok(InscribedPolygon {
            midpoints,
            side_lengths: vec![0.0],
            angles: Vec::new(),
            gromov_forward: Vec::new(),
            gromov_backward: Vec::new(),
        });
    }
    let mut side_lengths = Vec::with_capacity(s);
    let mut angles = Vec::with_capacity(s);
    let mut gromov_forward = Vec::with_capacity(s);
    let mut gromov_backward = Vec::with_capacity(s);
    for i in 0..s {
        let (prev, next) = ((i + s - 1) % s, (i + 1) % s);
        side_lengths.push(distance(midpoints[i], midpoints[next]));
        angles.push(
            h3::angle_at(midpoints[i], midpoints[prev], midpoints[next]).unwrap_or(0.0),
        );
        gromov_forward.push(h3::gromov_product(midpoints[i], midpoints[next], poly.ys[i]));
        gromov_backward.push(h3::gromov_product(midpoints[i], midpoints[prev], poly.xs[i]));
    }
    Ok(InscribedPolygon {
        midpoints,
        side_lengths,
        angles,
        gromov_forward,
        gromov_backward,
    })
}

/// Minimum distance between distinct consecutive side segments, compared
/// against 5 delta and the isolation constant 1 + 5 delta.
pub fn separation_check(poly: &Polygon) -> SeparationReport {
    let segs = poly.side_segments();
    let s = segs.len();
    let mut min_separation = f64::INFINITY;
    if s >= 2 {
        for i in 0..s {
            let j = (i + 1) % s;
            if i == j {
                continue;
            }
            min_separation = min_separation.min(h3::segment_segment_distance(&segs[i], &segs[j]));
            if s == 2 {
                break; // (0,1) and (1,0) are the same pair
            }
        }
    }
    let d = delta();
    SeparationReport {
        min_separation,
        five_delta: 5.0 * d,
        passes_five_delta: min_separation >= 5.0 * d,
        isolation: 1.0 + 5.0 * d,
        passes_isolation: min_separation >= 1.0 + 5.0 * d,
    }
}

/// The ideal endpoint of the geodesic ray from p through q.
fn forward_endpoint(p: Point, q: Point) -> BoundaryPoint {
    let dz = q.horizontal - p.horizontal;
    let sep = dz.norm();
    if sep < 1e-13 {
        return if q.height >= p.height {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(p.horizontal)
        };
    }
    let e = dz / sep;
    let (h1, h2) = (p.height, q.height);
    let c = (sep * sep + h2 * h2 - h1 * h1) / (2.0 * sep);
    let r = (c * c + h1 * h1).sqrt();
    let th_p = h1.atan2(-c);
    let th_q = h2.atan2(sep - c);
    // arc parameter increases with theta; the ray toward q exits at the
    // endpoint on q's side of the semicircle
    if th_q >= th_p {
        BoundaryPoint::Finite(p.horizontal + e * (c - r))
    } else {
        BoundaryPoint::Finite(p.horizontal + e * (c + r))
    }
}

/// Check the two fatness bounds (all inscribed sides >= L/2, all angles
/// >= pi - theta). When both hold, build the impossibility configuration:
/// the diameter pair (z_j, z_k), the antipodal witness w at distance D
/// behind z_j, and the horoball supported at the forward ray endpoint
/// through w — reporting whether the sides adjacent to z_j stay inside.
pub fn horoball_obstruction(
    insc: &InscribedPolygon,
    theta: f64,
    l: f64,
) -> Result<ObstructionVerdict> {
    let s = insc.midpoints.len();
    if s < 2 {
        return Err(Error::Degenerate("obstruction check needs s >= 2".into()));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) || !(l > 0.0) {
        return Err(Error::Validation("need theta in (0, pi) and L > 0".into()));
    }
    if let Some((i, &v)) = insc
        .side_lengths
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        if v < l / 2.0 {
            return Ok(ObstructionVerdict::BoundsViolated {
                kind: BoundKind::Side,
                index: i,
                value: v,
            });
        }
    }
    if let Some((i, &v)) = insc
        .angles
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        if v < std::f64::consts::PI - theta {
            return Ok(ObstructionVerdict::BoundsViolated {
                kind: BoundKind::Angle,
                index: i,
                value: v,
            });
        }
    }
    // both bounds hold: construct the contradiction configuration
    let mut diameter_pair = (0, 1);
    let mut diameter = 0.0;
    for j in 0..s {
        for k in (j + 1)..s {
            let d = distance(insc.midpoints[j], insc.midpoints[k]);
            if d > diameter {
                diameter = d;
                diameter_pair = (j, k);
            }
        }
    }
    let (j, k) = diameter_pair;
    let witness = h3::point_along(insc.midpoints[j], insc.midpoints[k], -diameter);
    let support = forward_endpoint(insc.midpoints[j], insc.midpoints[k]);
    let ball = Horoball::through(support, witness)?;
    let mut adjacent_sides_inside = true;
    for nb in [(j + s - 1) % s, (j + 1) % s] {
        let seg = GeodesicSegment::new(insc.midpoints[j], insc.midpoints[nb]);
        for step in 0..=32 {
            let t = step as f64 / 32.0;
            if !ball.contains_with_tol(seg.point_at(t), 1e-7) {
                adjacent_sides_inside = false;
            }
        }
    }
    Ok(ObstructionVerdict::FatBoundsHold {
        diameter_pair,
        diameter,
        witness,
        support,
        adjacent_sides_inside,
    })
}

/// All fatness metrics of a closed polygon in one report.
pub fn fatness_report(
    poly: &Polygon,
    insc: &InscribedPolygon,
    params: FatnessParams,
) -> Result<FatnessReport> {
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let min_gromov = min(&insc.gromov_forward).min(min(&insc.gromov_backward));
    let obstruction = horoball_obstruction(insc, params.theta, params.l)?;
    Ok(FatnessReport {
        min_side: min(&insc.side_lengths),
        min_angle: min(&insc.angles),
        min_gromov,
        max_connector: poly
            .connector_lengths()
            .iter()
            .copied()
            .fold(0.0, f64::max),
        min_separation: separation_check(poly).min_separation,
        params,
        obstruction,
    })
}
