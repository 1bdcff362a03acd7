//! Norms on the plane.
//!
//! A [`Norm`] is built from a serializable [`NormSpec`] and validated once.
//! Internally every norm is one of three gauges: the Euclidean norm, a smooth
//! (weighted) `l_p` norm with `1 < p < ∞`, or a centrally symmetric polygon.
//! `l_1` and `l_∞` (weighted or not) are canonicalized to 4-gons so that all
//! non-smooth geometry goes through the polygon code path.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{ModuliError, Result};
use crate::vector::{DualVector2, Vector2};

/// Tolerance for "is this point on the unit sphere".
pub const SPHERE_TOL: f64 = 1e-9;

/// Two facet values closer than this make a point a polygon vertex.
const VERTEX_TOL: f64 = 1e-12;

/// Exponent of an `l_p` norm, `1 ≤ p ≤ ∞`.
///
/// JSON accepts a number or one of the strings `"inf"`, `"infinity"`, `"∞"`;
/// infinity is written back as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        let p = self.0;
        if p == 1.0 {
            Exponent::INFINITY
        } else if p.is_infinite() {
            Exponent(1.0)
        } else {
            Exponent(p / (p - 1.0))
        }
    }

    pub fn parse(s: &str) -> Result<Exponent> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            _ => t.parse::<f64>().map(Exponent).map_err(|_| ModuliError::Parse(format!("not an exponent: {s:?}"))),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExpVisitor;
        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                Exponent::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(ExpVisitor)
    }
}

/// Serializable description of a norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormSpec {
    Euclidean,
    Lp {
        p: Exponent,
    },
    /// `‖v‖ = ‖(w1 v1, w2 v2)‖_p`.
    WeightedLp {
        p: Exponent,
        w: [f64; 2],
    },
    /// Centrally symmetric convex polygon, vertices counterclockwise.
    Polygon {
        vertices: Vec<Vector2>,
    },
}

/// `J₁(x)`: the segment of norm-one functionals supporting the unit ball at
/// `x`. `minus` precedes `plus` counterclockwise; they coincide at smooth points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub minus: DualVector2,
    pub plus: DualVector2,
}

impl SupportSet {
    pub fn single(p: DualVector2) -> Self {
        Self { minus: p, plus: p }
    }

    pub fn is_single(&self) -> bool {
        self.minus == self.plus
    }

    /// Point of the segment at parameter `t ∈ [0, 1]` (`0` is `minus`).
    pub fn at(&self, t: f64) -> DualVector2 {
        self.minus.lerp(self.plus, t)
    }

    /// Distinct endpoints (one entry at smooth points).
    pub fn endpoints(&self) -> impl Iterator<Item = DualVector2> {
        let second = (!self.is_single()).then_some(self.plus);
        std::iter::once(self.minus).chain(second)
    }
}

#[derive(Clone, Debug)]
struct Polygon {
    vertices: Vec<Vector2>,
    /// `normals[j]` is the facet functional of edge `(v[j-1], v[j])`, scaled
    /// so it equals 1 on that edge. These are the polar polygon's vertices.
    normals: Vec<DualVector2>,
}

#[derive(Clone, Debug)]
enum Gauge {
    Euclidean,
    Smooth { p: f64, w: [f64; 2] },
    Polygon(Polygon),
}

/// A validated norm on the plane.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "NormSpec", into = "NormSpec")]
pub struct Norm {
    spec: NormSpec,
    gauge: Gauge,
}

impl PartialEq for Norm {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl TryFrom<NormSpec> for Norm {
    type Error = ModuliError;
    fn try_from(spec: NormSpec) -> Result<Self> {
        Norm::new(spec)
    }
}

impl From<Norm> for NormSpec {
    fn from(n: Norm) -> NormSpec {
        n.spec
    }
}

fn check_exponent(p: Exponent) -> Result<f64> {
    let p = p.0;
    if p.is_nan() || p < 1.0 {
        return Err(ModuliError::Representation(format!("l_p exponent must lie in [1, ∞], got {p}")));
    }
    Ok(p)
}

fn check_weights(w: [f64; 2]) -> Result<[f64; 2]> {
    if w.iter().all(|&x| x.is_finite() && x > 0.0) {
        Ok(w)
    } else {
        Err(ModuliError::Representation(format!("weights must be finite and positive, got {w:?}")))
    }
}

/// Box / cross-polytope for weighted `l_∞` / `l_1`.
fn lp_polygon(p: f64, w: [f64; 2]) -> Polygon {
    let (a, b) = (1.0 / w[0], 1.0 / w[1]);
    let vertices = if p.is_infinite() {
        vec![Vector2::new(a, b), Vector2::new(-a, b), Vector2::new(-a, -b), Vector2::new(a, -b)]
    } else {
        vec![Vector2::new(a, 0.0), Vector2::new(0.0, b), Vector2::new(-a, 0.0), Vector2::new(0.0, -b)]
    };
    Polygon::from_valid(vertices)
}

impl Polygon {
    fn validate(vertices: &[Vector2]) -> Result<Polygon> {
        let n = vertices.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(ModuliError::Representation(format!(
                "a centrally symmetric polygon needs an even number ≥ 4 of vertices, got {n}"
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(ModuliError::Representation(format!("non-finite vertex {v:?}")));
        }
        let scale = vertices.iter().map(|v| v.euclidean_len()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(ModuliError::Representation("all vertices are zero".into()));
        }
        let half = n / 2;
        for i in 0..half {
            let gap = (vertices[i] + vertices[i + half]).euclidean_len();
            if gap > 1e-9 * scale {
                return Err(ModuliError::Representation(format!(
                    "not origin-symmetric: vertex {i} {:?} has no opposite (found {:?})",
                    vertices[i],
                    vertices[i + half]
                )));
            }
        }
        let mut winding = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if a.cross(b) <= 1e-12 * scale * scale {
                return Err(ModuliError::Representation(format!(
                    "origin is not strictly inside edge {i}→{}; vertices must be counterclockwise",
                    (i + 1) % n
                )));
            }
            if (b - a).cross(c - b) <= 1e-12 * scale * scale {
                return Err(ModuliError::Representation(format!(
                    "polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
            winding += a.cross(b).atan2(a.x * b.x + a.y * b.y);
        }
        if (winding - TAU).abs() > 1e-6 {
            return Err(ModuliError::Representation("vertices wind around the origin more than once".into()));
        }
        // exact symmetry from here on
        let mut sym: Vec<Vector2> = vertices[..half].to_vec();
        sym.extend(vertices[..half].iter().map(|&v| -v));
        Ok(Polygon::from_valid(sym))
    }

    fn from_valid(vertices: Vec<Vector2>) -> Polygon {
        let n = vertices.len();
        let normals = (0..n)
            .map(|j| {
                let a = vertices[(j + n - 1) % n];
                let b = vertices[j];
                let e = b - a;
                DualVector2::new(e.y, -e.x) * (1.0 / a.cross(b))
            })
            .collect();
        Polygon { vertices, normals }
    }

    #[inline]
    fn gauge(&self, v: Vector2) -> f64 {
        self.normals.iter().map(|n| n.apply(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    #[inline]
    fn support(&self, p: DualVector2) -> f64 {
        self.vertices.iter().map(|&v| p.apply(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn support_set(&self, x: Vector2) -> SupportSet {
        let n = self.normals.len();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (j, nj) in self.normals.iter().enumerate() {
            let v = nj.apply(x);
            if v > best_val {
                best_val = v;
                best = j;
            }
        }
        let tol = VERTEX_TOL * best_val.abs().max(1.0);
        let next = (best + 1) % n;
        let prev = (best + n - 1) % n;
        if best_val - self.normals[next].apply(x) <= tol {
            // x sits at vertex v[best], between facets `best` and `best + 1`
            SupportSet { minus: self.normals[best], plus: self.normals[next] }
        } else if best_val - self.normals[prev].apply(x) <= tol {
            SupportSet { minus: self.normals[prev], plus: self.normals[best] }
        } else {
            SupportSet::single(self.normals[best])
        }
    }
}

#[inline]
fn lp_value(a: f64, b: f64, p: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let r = a.min(b) / m;
    m * (1.0 + r.powf(p)).powf(1.0 / p)
}

impl Norm {
    pub fn new(spec: NormSpec) -> Result<Norm> {
        let gauge = match &spec {
            NormSpec::Euclidean => Gauge::Euclidean,
            NormSpec::Lp { p } => {
                let p = check_exponent(*p)?;
                if p == 1.0 || p.is_infinite() {
                    Gauge::Polygon(lp_polygon(p, [1.0, 1.0]))
                } else if p == 2.0 {
                    Gauge::Euclidean
                } else {
                    Gauge::Smooth { p, w: [1.0, 1.0] }
                }
            }
            NormSpec::WeightedLp { p, w } => {
                let p = check_exponent(*p)?;
                let w = check_weights(*w)?;
                if p == 1.0 || p.is_infinite() {
                    Gauge::Polygon(lp_polygon(p, w))
                } else {
                    Gauge::Smooth { p, w }
                }
            }
            NormSpec::Polygon { vertices } => Gauge::Polygon(Polygon::validate(vertices)?),
        };
        // keep the symmetrized vertex list so that serialization matches evaluation
        let spec = match (&spec, &gauge) {
            (NormSpec::Polygon { .. }, Gauge::Polygon(poly)) => NormSpec::Polygon { vertices: poly.vertices.clone() },
            _ => spec,
        };
        Ok(Norm { spec, gauge })
    }

    pub fn euclidean() -> Norm {
        Norm { spec: NormSpec::Euclidean, gauge: Gauge::Euclidean }
    }

    pub fn lp(p: f64) -> Result<Norm> {
        Norm::new(NormSpec::Lp { p: Exponent(p) })
    }

    pub fn weighted_lp(p: f64, w: [f64; 2]) -> Result<Norm> {
        Norm::new(NormSpec::WeightedLp { p: Exponent(p), w })
    }

    pub fn polygon(vertices: Vec<Vector2>) -> Result<Norm> {
        Norm::new(NormSpec::Polygon { vertices })
    }

    /// Regular `n`-gon inscribed in the Euclidean unit circle with a vertex at `(1, 0)`.
    pub fn regular_polygon(n: usize) -> Result<Norm> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(ModuliError::Representation(format!("regular polygon needs even n ≥ 4, got {n}")));
        }
        let half: Vec<Vector2> = (0..n / 2).map(|k| Vector2::from_angle(TAU * k as f64 / n as f64)).collect();
        let mut vertices = half.clone();
        vertices.extend(half.iter().map(|&v| -v));
        Norm::polygon(vertices)
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        match &self.spec {
            NormSpec::Euclidean => "euclidean".into(),
            NormSpec::Lp { p } => format!("lp({p})"),
            NormSpec::WeightedLp { p, w } => format!("weighted-lp({p};{},{})", w[0], w[1]),
            NormSpec::Polygon { vertices } => format!("polygon({})", vertices.len()),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.gauge, Gauge::Euclidean)
    }

    /// Unique supporting line at every boundary point.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.gauge, Gauge::Polygon(_))
    }

    /// No segments on the unit sphere.
    pub fn is_strictly_convex(&self) -> bool {
        !matches!(self.gauge, Gauge::Polygon(_))
    }

    /// Vertices of the unit ball when it is a polygon.
    pub fn polygon_vertices(&self) -> Option<&[Vector2]> {
        match &self.gauge {
            Gauge::Polygon(p) => Some(&p.vertices),
            _ => None,
        }
    }

    /// Angles in `[0, 2π)` where the unit sphere has corners.
    pub fn corner_angles(&self) -> Vec<f64> {
        self.polygon_vertices().map(|vs| vs.iter().map(|v| v.angle()).collect()).unwrap_or_default()
    }

    /// `‖v‖`. No finiteness check; see [`Norm::eval_checked`].
    #[inline]
    pub fn eval(&self, v: Vector2) -> f64 {
        match &self.gauge {
            Gauge::Euclidean => v.euclidean_len(),
            Gauge::Smooth { p, w } => lp_value(w[0] * v.x, w[1] * v.y, *p),
            Gauge::Polygon(poly) => poly.gauge(v),
        }
    }

    pub fn eval_checked(&self, v: Vector2) -> Result<f64> {
        v.ensure_finite("vector")?;
        Ok(self.eval(v))
    }

    /// Dual norm `sup{<p, x> : ‖x‖ ≤ 1}`.
    #[inline]
    pub fn dual_eval(&self, p: DualVector2) -> f64 {
        match &self.gauge {
            Gauge::Euclidean => p.x.hypot(p.y),
            Gauge::Smooth { p: e, w } => {
                let q = e / (e - 1.0);
                lp_value(p.x / w[0], p.y / w[1], q)
            }
            Gauge::Polygon(poly) => poly.support(p),
        }
    }

    /// The dual norm as a norm on the plane (coordinates identified through the
    /// standard pairing).
    pub fn dual(&self) -> Result<Norm> {
        match &self.spec {
            NormSpec::Euclidean => Ok(Norm::euclidean()),
            NormSpec::Lp { p } => Norm::new(NormSpec::Lp { p: p.conjugate() }),
            NormSpec::WeightedLp { p, w } => {
                Norm::new(NormSpec::WeightedLp { p: p.conjugate(), w: [1.0 / w[0], 1.0 / w[1]] })
            }
            NormSpec::Polygon { .. } => {
                let Gauge::Polygon(poly) = &self.gauge else { unreachable!() };
                Norm::polygon(poly.normals.iter().map(|n| n.as_primal()).collect())
            }
        }
    }

    /// Radial projection of the direction `θ` onto the unit sphere.
    #[inline]
    pub fn sphere_point(&self, theta: f64) -> Vector2 {
        let u = Vector2::from_angle(theta);
        u * (1.0 / self.eval(u))
    }

    pub fn sphere_point_checked(&self, theta: f64) -> Result<Vector2> {
        if !theta.is_finite() {
            return Err(ModuliError::Input(format!("angle must be finite, got {theta}")));
        }
        Ok(self.sphere_point(theta))
    }

    /// `J₁(x)` for a unit vector `x`.
    pub fn support_set(&self, x: Vector2) -> Result<SupportSet> {
        x.ensure_finite("x")?;
        let r = self.eval(x);
        if (r - 1.0).abs() > SPHERE_TOL {
            return Err(ModuliError::Input(format!("x = {x:?} is not on the unit sphere (‖x‖ = {r})")));
        }
        Ok(self.support_set_unchecked(x))
    }

    /// `J₁(x / ‖x‖)` without validating `x`.
    #[inline]
    pub fn support_set_unchecked(&self, x: Vector2) -> SupportSet {
        match &self.gauge {
            Gauge::Euclidean => {
                let r = x.euclidean_len();
                SupportSet::single(DualVector2::new(x.x / r, x.y / r))
            }
            Gauge::Smooth { p, w } => {
                let (a, b) = (w[0] * x.x, w[1] * x.y);
                let r = lp_value(a, b, *p);
                let comp = |u: f64, wi: f64| wi * u.signum() * (u.abs() / r).powf(p - 1.0);
                SupportSet::single(DualVector2::new(comp(a, w[0]), comp(b, w[1])))
            }
            Gauge::Polygon(poly) => poly.support_set(x),
        }
    }
}

/// Angle of `θ` folded into `[0, π)`.
pub fn half_turn(theta: f64) -> f64 {
    theta.rem_euclid(PI)
}
