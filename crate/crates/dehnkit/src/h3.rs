//! Numeric geometry of the upper half-space model of H^3 and its
//! orientation-preserving isometries.
//!
//! Points carry a complex boundary-plane coordinate and a positive height.
//! Isometries are unimodular 2x2 complex matrices acting by the Poincare
//! extension of the Mobius map; equality is projective (M and -M agree).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for geometric identities.
pub const GEOM_TOL: f64 = 1e-9;

/// Maximal inradius of a hyperbolic triangle, arccosh(2/sqrt 3) = ln sqrt 3.
pub fn delta() -> f64 {
    (2.0 / 3f64.sqrt()).acosh()
}

/// Thin-part isolation constant `1 + 5 delta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeometryConstants {
    pub delta: f64,
    pub isolation: f64,
}

impl Default for GeometryConstants {
    fn default() -> Self {
        let d = delta();
        GeometryConstants {
            delta: d,
            isolation: 1.0 + 5.0 * d,
        }
    }
}

/// A point of H^3 in the upper half-space model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "crate::json::complex")]
    pub horizontal: Complex64,
    pub height: f64,
}

impl Point {
    pub fn new(horizontal: Complex64, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::NonpositiveHeight(height));
        }
        Ok(Point { horizontal, height })
    }

    /// Convenience constructor from real parts; panics on nonpositive height.
    pub fn xyh(x: f64, y: f64, h: f64) -> Self {
        Point::new(Complex64::new(x, y), h).expect("height must be positive")
    }

    /// The conventional basepoint O = (0, 1).
    pub fn basepoint() -> Self {
        Point::xyh(0.0, 0.0, 1.0)
    }
}

/// A point of the sphere at infinity: the boundary plane plus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(#[serde(with = "crate::json::complex")] Complex64),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            BoundaryPoint::Finite(z) => Some(z),
            BoundaryPoint::Infinity => None,
        }
    }
}

/// An orientation-preserving isometry of H^3, stored as a unimodular
/// 2x2 complex matrix. M and -M denote the same isometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    #[serde(with = "crate::json::complex")]
    pub a: Complex64,
    #[serde(with = "crate::json::complex")]
    pub b: Complex64,
    #[serde(with = "crate::json::complex")]
    pub c: Complex64,
    #[serde(with = "crate::json::complex")]
    pub d: Complex64,
}

/// Isometry type with the complex translation length `l + i theta`
/// (2 cosh((l + i theta)/2) = +-trace, real part >= 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IsometryClass {
    Identity,
    Parabolic,
    Elliptic {
        #[serde(with = "crate::json::complex")]
        complex_length: Complex64,
    },
    Loxodromic {
        #[serde(with = "crate::json::complex")]
        complex_length: Complex64,
    },
}

impl Isometry {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Isometry { a, b, c, d };
        let defect = (m.det() - 1.0).norm();
        if defect > 1e-6 {
            return Err(Error::NotUnimodular(defect));
        }
        Ok(m)
    }

    /// No unimodularity check; used by solvers mid-iteration.
    pub fn from_entries(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Isometry { a, b, c, d }
    }

    pub fn identity() -> Self {
        Isometry {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_row_major(e: [Complex64; 4]) -> Self {
        Isometry {
            a: e[0],
            b: e[1],
            c: e[2],
            d: e[3],
        }
    }

    pub fn row_major(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Rescale so that det = 1 exactly (up to rounding).
    pub fn normalize(&self) -> Self {
        let s = self.det().sqrt();
        Isometry {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        Isometry {
            a: self.d / det,
            b: -self.b / det,
            c: -self.c / det,
            d: self.a / det,
        }
    }

    pub fn neg(&self) -> Self {
        Isometry {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Entrywise max distance to the other matrix.
    pub fn entry_dist(&self, other: &Isometry) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }

    /// Projective distance: entrywise max distance minimized over sign.
    pub fn proj_dist(&self, other: &Isometry) -> f64 {
        self.entry_dist(other).min(self.entry_dist(&other.neg()))
    }

    /// Sign-minimized distance to the identity.
    pub fn dist_to_identity(&self) -> f64 {
        self.proj_dist(&Isometry::identity())
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.dist_to_identity() <= tol
    }

    /// The Mobius action on the boundary plane.
    pub fn mobius(&self, z: BoundaryPoint) -> BoundaryPoint {
        match z {
            BoundaryPoint::Infinity => {
                if self.c.norm() < 1e-14 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < 1e-14 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Composition in application order: `g.then(h)` acts as g first, then h.
    /// Satisfies `apply(apply(p, g), h) = apply(p, g.then(h))`.
    pub fn then(&self, h: &Isometry) -> Isometry {
        h.mul(self)
    }

    /// Plain matrix product (the group operation used for word images).
    pub fn mul(&self, rhs: &Isometry) -> Isometry {
        Isometry {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Isometry type, with a tolerance band around trace = +-2.
    /// A matrix with near-parabolic trace but far from +-I is parabolic;
    /// trace alone cannot separate the two cases.
    pub fn classify(&self) -> IsometryClass {
        self.classify_with_tol(GEOM_TOL)
    }

    pub fn classify_with_tol(&self, tol: f64) -> IsometryClass {
        if self.dist_to_identity() <= tol {
            return IsometryClass::Identity;
        }
        let t = self.trace();
        if (t - 2.0).norm() <= tol || (t + 2.0).norm() <= tol {
            return IsometryClass::Parabolic;
        }
        // eigenvalue of larger modulus; complex length 2 log(lambda)
        let half = t / 2.0;
        let root = (half * half - 1.0).sqrt();
        let lam = if (half + root).norm() >= (half - root).norm() {
            half + root
        } else {
            half - root
        };
        let mut len = 2.0 * lam.ln();
        if len.re < 0.0 {
            len = -len;
        }
        if t.im.abs() <= tol && t.re > -2.0 && t.re < 2.0 {
            IsometryClass::Elliptic {
                complex_length: Complex64::new(0.0, len.im),
            }
        } else {
            IsometryClass::Loxodromic {
                complex_length: len,
            }
        }
    }

    /// Fixed points on the boundary sphere: roots of c z^2 + (d - a) z - b.
    pub fn fixed_points(&self) -> Result<Vec<BoundaryPoint>> {
        if self.dist_to_identity() <= GEOM_TOL {
            return Err(Error::Degenerate("identity has no isolated fixed points".into()));
        }
        let a = self.a;
        let b = self.b;
        let c = self.c;
        let d = self.d;
        if c.norm() < 1e-12 {
            // infinity is fixed; second root of (d-a) z = b
            let mut out = vec![BoundaryPoint::Infinity];
            if (d - a).norm() > 1e-12 {
                out.push(BoundaryPoint::Finite(b / (d - a)));
            }
            return Ok(out);
        }
        let disc = ((d - a) * (d - a) + 4.0 * b * c).sqrt();
        let z1 = (-(d - a) + disc) / (2.0 * c);
        let z2 = (-(d - a) - disc) / (2.0 * c);
        if (z1 - z2).norm() < 1e-10 {
            Ok(vec![BoundaryPoint::Finite((z1 + z2) / 2.0)])
        } else {
            Ok(vec![BoundaryPoint::Finite(z1), BoundaryPoint::Finite(z2)])
        }
    }
}

/// The Poincare extension of the Mobius map: `p.g`.
pub fn apply(p: Point, g: &Isometry) -> Point {
    let z = p.horizontal;
    let t = p.height;
    let den = g.c * z + g.d;
    let d2 = den.norm_sqr() + g.c.norm_sqr() * t * t;
    let znew = ((g.a * z + g.b) * den.conj() + g.a * g.c.conj() * t * t) / d2;
    let tnew = t * g.det().norm() / d2;
    Point {
        horizontal: znew,
        height: tnew,
    }
}

/// Hyperbolic distance: cosh d = 1 + (|dz|^2 + dh^2) / (2 h1 h2).
pub fn distance(p: Point, q: Point) -> f64 {
    let dz = (p.horizontal - q.horizontal).norm_sqr();
    let dh = p.height - q.height;
    let c = 1.0 + (dz + dh * dh) / (2.0 * p.height * q.height);
    c.max(1.0).acosh()
}

/// A geodesic segment between two points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub start: Point,
    pub end: Point,
}

impl GeodesicSegment {
    pub fn new(start: Point, end: Point) -> Self {
        GeodesicSegment { start, end }
    }

    pub fn length(&self) -> f64 {
        distance(self.start, self.end)
    }

    /// The point at arc length `t` from `start` toward `end`.
    /// `t` may exceed the segment length (continues along the geodesic).
    pub fn point_at(&self, t: f64) -> Point {
        point_along(self.start, self.end, t)
    }

    /// Midpoint; the degenerate (equal-endpoints) case returns the endpoint.
    pub fn midpoint(&self) -> (Point, bool) {
        let d = self.length();
        if d < 1e-13 {
            return (self.start, true);
        }
        (self.point_at(d / 2.0), false)
    }
}

/// Point at arc length `t` along the geodesic from `p` toward `q`.
pub fn point_along(p: Point, q: Point, t: f64) -> Point {
    let dz = q.horizontal - p.horizontal;
    let sep = dz.norm();
    if sep < 1e-13 {
        // vertical geodesic
        let sign = if q.height >= p.height { 1.0 } else { -1.0 };
        return Point {
            horizontal: p.horizontal,
            height: p.height * (sign * t).exp(),
        };
    }
    // Work in the vertical plane through the two points. Coordinates:
    // x along dz/|dz| from p.horizontal, y the height.
    let e = dz / sep;
    let (h1, h2) = (p.height, q.height);
    // center of the semicircle on the x-axis
    let c = (sep * sep + h2 * h2 - h1 * h1) / (2.0 * sep);
    let r = (c * c + h1 * h1).sqrt();
    // angles of p and q on the semicircle
    let th_p = h1.atan2(-c);
    let th_q = h2.atan2(sep - c);
    // arc length parameter s(theta) = ln tan(theta/2), increasing in theta
    let s_p = (th_p / 2.0).tan().ln();
    let s_q = (th_q / 2.0).tan().ln();
    let dir = if s_q >= s_p { 1.0 } else { -1.0 };
    let s = s_p + dir * t;
    let th = 2.0 * s.exp().atan();
    Point {
        horizontal: p.horizontal + e * (c + r * th.cos()),
        height: r * th.sin(),
    }
}

/// Gromov inner product <q, q'>_p = (d(p,q) + d(p,q') - d(q,q')) / 2.
pub fn gromov_product(p: Point, q: Point, q2: Point) -> f64 {
    0.5 * (distance(p, q) + distance(p, q2) - distance(q, q2)).max(0.0)
}

/// Interior angle at `vertex` of the triangle (vertex, a, b) via the
/// hyperbolic law of cosines.
pub fn angle_at(vertex: Point, a: Point, b: Point) -> Result<f64> {
    let da = distance(vertex, a);
    let db = distance(vertex, b);
    if da < 1e-13 || db < 1e-13 {
        return Err(Error::Degenerate("angle at coincident points".into()));
    }
    let dab = distance(a, b);
    let cos = (da.cosh() * db.cosh() - dab.cosh()) / (da.sinh() * db.sinh());
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Per-vertex tangent distances and tangent points of the triangle with
/// its incircle, plus the inradius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentData {
    /// distance from vertex i to its two adjacent tangent points;
    /// equals the Gromov product at that vertex
    pub tangent_dist: [f64; 3],
    /// tangent point on side [v0,v1], [v1,v2], [v2,v0] respectively
    pub tangent_points: [Point; 3],
    pub inradius: f64,
}

/// Tangent data of the triangle (p1, p2, p3) with its incircle. Degenerate
/// triangles give limiting values (zero inradius, tangent points on the
/// segments).
pub fn triangle_tangent_data(p1: Point, p2: Point, p3: Point) -> TangentData {
    let g1 = gromov_product(p1, p2, p3);
    let g2 = gromov_product(p2, p3, p1);
    let g3 = gromov_product(p3, p1, p2);
    // tangent point on [p1,p2] at distance g1 from p1, etc.
    let t12 = point_along(p1, p2, g1.min(distance(p1, p2)));
    let t23 = point_along(p2, p3, g2.min(distance(p2, p3)));
    let t31 = point_along(p3, p1, g3.min(distance(p3, p1)));
    // inradius: tanh r = sqrt(sinh(s-a) sinh(s-b) sinh(s-c) / sinh s)
    let a = distance(p2, p3);
    let b = distance(p3, p1);
    let c = distance(p1, p2);
    let s = (a + b + c) / 2.0;
    let inradius = if s < 1e-13 {
        0.0
    } else {
        let num = (s - a).sinh() * (s - b).sinh() * (s - c).sinh();
        let ratio = (num / s.sinh()).max(0.0);
        ratio.sqrt().min(1.0 - 1e-15).atanh()
    };
    TangentData {
        tangent_dist: [g1, g2, g3],
        tangent_points: [t12, t23, t31],
        inradius,
    }
}

/// The elliptic isometry rotating by `angle` about the geodesic with the
/// given boundary endpoints (conjugate of diag(e^{i angle/2}, e^{-i angle/2})).
pub fn elliptic_about_axis(
    end1: BoundaryPoint,
    end2: BoundaryPoint,
    angle: f64,
) -> Result<Isometry> {
    if end1 == end2 {
        return Err(Error::Degenerate("coincident axis endpoints".into()));
    }
    let lam = Complex64::new(0.0, angle / 2.0).exp();
    let diag = Isometry::from_entries(
        lam,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        1.0 / lam,
    );
    // h maps 0 -> end1, infinity -> end2; result is h diag h^{-1}
    let h = match (end1, end2) {
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            if (p - q).norm() < 1e-13 {
                return Err(Error::Degenerate("coincident axis endpoints".into()));
            }
            Isometry::from_entries(q, p, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
                .normalize()
        }
        (BoundaryPoint::Finite(p), BoundaryPoint::Infinity) => Isometry::from_entries(
            Complex64::new(1.0, 0.0),
            p,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ),
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(q)) => Isometry::from_entries(
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            -q,
        )
        .normalize(),
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => {
            return Err(Error::Degenerate("coincident axis endpoints".into()))
        }
    };
    Ok(h.mul(&diag).mul(&h.inverse()))
}

/// A closed horoball. For base = infinity the parameter is the height
/// cutoff (the ball is {height >= param}); for a finite base it is the
/// Euclidean diameter of the tangent ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Horoball {
    pub base: BoundaryPoint,
    pub parameter: f64,
}

impl Horoball {
    /// The horoball at `base` whose boundary horosphere passes through
    /// `witness`.
    pub fn through(base: BoundaryPoint, witness: Point) -> Result<Self> {
        match base {
            BoundaryPoint::Infinity => Ok(Horoball {
                base,
                parameter: witness.height,
            }),
            BoundaryPoint::Finite(z0) => {
                // witness.height > 0 keeps the quotient finite and positive
                let d2 = (witness.horizontal - z0).norm_sqr() + witness.height * witness.height;
                Ok(Horoball {
                    base,
                    parameter: d2 / witness.height,
                })
            }
        }
    }

    /// Closed containment (boundary counts as inside), with tolerance.
    pub fn contains(&self, p: Point) -> bool {
        self.contains_with_tol(p, GEOM_TOL)
    }

    pub fn contains_with_tol(&self, p: Point, tol: f64) -> bool {
        match self.base {
            BoundaryPoint::Infinity => p.height >= self.parameter - tol,
            BoundaryPoint::Finite(z0) => {
                // Euclidean ball of diameter `parameter` tangent at z0:
                // |z - z0|^2 + h^2 <= parameter * h
                let lhs = (p.horizontal - z0).norm_sqr() + p.height * p.height;
                lhs <= self.parameter * p.height + tol
            }
        }
    }
}

/// Minimal distance from a point to a geodesic segment (ternary search
/// over the arc length parameter; the distance function is convex).
pub fn point_segment_distance(p: Point, seg: &GeodesicSegment) -> f64 {
    let len = seg.length();
    if len < 1e-13 {
        return distance(p, seg.start);
    }
    let mut lo = 0.0;
    let mut hi = len;
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if distance(p, seg.point_at(m1)) < distance(p, seg.point_at(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    distance(p, seg.point_at((lo + hi) / 2.0))
}

/// Minimal distance between two geodesic segments. Both segments are
/// convex, so the outer minimization is convex as well.
pub fn segment_segment_distance(s1: &GeodesicSegment, s2: &GeodesicSegment) -> f64 {
    let len = s1.length();
    if len < 1e-13 {
        return point_segment_distance(s1.start, s2);
    }
    let f = |t: f64| point_segment_distance(s1.point_at(t), s2);
    let mut lo = 0.0;
    let mut hi = len;
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    f((lo + hi) / 2.0)
}
