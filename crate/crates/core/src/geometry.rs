//! Exact planar primitives over Q[√3]: points, lines, half-planes, affine maps
//! and open polygonal regions, bounded or unbounded.
//!
//! Regions are kept in a canonical form (counterclockwise, no redundant
//! vertices, rotated to the least vertex) so that derived equality and hashing
//! coincide with point-set equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, QS3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate region: {0}")]
    Degenerate(&'static str),
    #[error("region is not simple")]
    NotSimple,
    #[error("unbounded regions must be convex")]
    NonConvexUnbounded,
    #[error("operation requires a bounded region")]
    Unbounded,
    #[error("affine map is not invertible")]
    Singular,
    #[error("parallel lines have no intersection")]
    Parallel,
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("invalid point literal at byte {position}: {message}")]
    PointParse { position: usize, message: String },
    #[error("invalid region json: {0}")]
    Json(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type GeoResult<T> = Result<T, GeometryError>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: QS3,
    pub y: QS3,
}

impl Point {
    pub fn new(x: QS3, y: QS3) -> Point {
        Point { x, y }
    }

    pub fn origin() -> Point {
        Point::default()
    }

    pub fn from_ints(x: i64, y: i64) -> Point {
        Point { x: QS3::int(x), y: QS3::int(y) }
    }

    pub fn dot(&self, o: &Point) -> QS3 {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> QS3 {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn scale(&self, k: &QS3) -> Point {
        Point { x: &self.x * k, y: &self.y * k }
    }

    pub fn norm2(&self) -> QS3 {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Left normal `(-y, x)`.
    pub fn perp(&self) -> Point {
        Point { x: -&self.y, y: self.x.clone() }
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        let half = QS3::rat(1, 2);
        (self + o).scale(&half)
    }

    /// `self + t (o - self)`.
    pub fn lerp(&self, o: &Point, t: &QS3) -> Point {
        self + &(o - self).scale(t)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// Literal `x,y` with both coordinates in field literal syntax.
    pub fn to_literal(&self) -> String {
        format!("{},{}", self.x, self.y)
    }

    pub fn parse_literal(s: &str) -> GeoResult<Point> {
        let Some((xs, ys)) = s.split_once(',') else {
            return Err(GeometryError::PointParse { position: 0, message: "expected `<x>,<y>`".into() });
        };
        let shift = |e: FieldError, by: usize| match e {
            FieldError::Parse { position, message } => GeometryError::PointParse { position: position + by, message },
            other => GeometryError::Field(other),
        };
        let x = xs.trim().parse::<QS3>().map_err(|e| shift(e, 0))?;
        let y = ys.trim().parse::<QS3>().map_err(|e| shift(e, xs.len() + 1))?;
        Ok(Point { x, y })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.to_f64();
        write!(f, "({}, {}) ~({x:.6}, {y:.6})", self.x, self.y)
    }
}

impl<'a> Add<&'a Point> for &'a Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point { x: &self.x + &o.x, y: &self.y + &o.y }
    }
}

impl<'a> Sub<&'a Point> for &'a Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point { x: &self.x - &o.x, y: &self.y - &o.y }
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point { x: -&self.x, y: -&self.y }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        &self + &o
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        &self - &o
    }
}

/// Nonzero direction, scaled so that its first nonzero component is ±1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Direction(Point);

impl Direction {
    pub fn new(v: Point) -> GeoResult<Direction> {
        let lead = if !v.x.is_zero() { v.x.abs() } else if !v.y.is_zero() { v.y.abs() } else {
            return Err(GeometryError::ZeroDirection);
        };
        let inv = lead.recip()?;
        Ok(Direction(v.scale(&inv)))
    }

    pub fn vector(&self) -> &Point {
        &self.0
    }

    pub fn reversed(&self) -> Direction {
        Direction(-&self.0)
    }
}

/// Unoriented line `normal · p = offset`, with the first nonzero normal
/// component equal to 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Line {
    normal: Point,
    offset: QS3,
}

impl Line {
    pub fn new(a: QS3, b: QS3, c: QS3) -> GeoResult<Line> {
        let lead = if !a.is_zero() { a.clone() } else if !b.is_zero() { b.clone() } else {
            return Err(GeometryError::ZeroDirection);
        };
        let inv = lead.recip()?;
        Ok(Line { normal: Point::new(&a * &inv, &b * &inv), offset: &c * &inv })
    }

    pub fn through(p: &Point, q: &Point) -> GeoResult<Line> {
        let d = q - p;
        if d.is_zero() {
            return Err(GeometryError::Degenerate("line through coincident points"));
        }
        let n = d.perp();
        let c = n.dot(p);
        Line::new(n.x, n.y, c)
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> &QS3 {
        &self.offset
    }

    pub fn side(&self, p: &Point) -> i32 {
        (self.normal.dot(p) - &self.offset).signum()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.side(p) == 0
    }

    pub fn intersect(&self, o: &Line) -> GeoResult<Point> {
        let det = self.normal.cross(&o.normal);
        if det.is_zero() {
            return Err(GeometryError::Parallel);
        }
        let x = (&self.offset * &o.normal.y - &o.offset * &self.normal.y).checked_div(&det)?;
        let y = (&self.normal.x * &o.offset - &o.normal.x * &self.offset).checked_div(&det)?;
        Ok(Point::new(x, y))
    }

    pub fn positive_side(&self) -> HalfPlane {
        HalfPlane { normal: self.normal.clone(), offset: self.offset.clone() }
    }

    pub fn negative_side(&self) -> HalfPlane {
        HalfPlane { normal: -&self.normal, offset: -&self.offset }
    }
}

/// Open half-plane `normal · p > offset`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HalfPlane {
    normal: Point,
    offset: QS3,
}

impl HalfPlane {
    /// Points strictly to the left of the directed line through `origin`
    /// along `dir`.
    pub fn left_of(origin: &Point, dir: &Point) -> HalfPlane {
        let normal = dir.perp();
        let offset = normal.dot(origin);
        HalfPlane { normal, offset }
    }

    pub fn eval(&self, p: &Point) -> QS3 {
        self.normal.dot(p) - &self.offset
    }

    pub fn side(&self, p: &Point) -> i32 {
        self.eval(p).signum()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.side(p) > 0
    }

    pub fn complement(&self) -> HalfPlane {
        HalfPlane { normal: -&self.normal, offset: -&self.offset }
    }

    pub fn line(&self) -> Line {
        Line::new(self.normal.x.clone(), self.normal.y.clone(), self.offset.clone()).expect("nonzero normal")
    }

    fn linear(&self, v: &Point) -> QS3 {
        self.normal.dot(v)
    }
}

/// Affine map `p ↦ M p + t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffMap {
    pub m00: QS3,
    pub m01: QS3,
    pub m10: QS3,
    pub m11: QS3,
    pub tx: QS3,
    pub ty: QS3,
}

/// `(cos 30k°, sin 30k°)` exactly.
pub fn unit_30(k: i64) -> (QS3, QS3) {
    let half = QS3::rat(1, 2);
    let h3 = QS3::from_parts(0, 1, 1, 2);
    let table = [
        (QS3::one(), QS3::zero()),
        (h3.clone(), half.clone()),
        (half.clone(), h3.clone()),
        (QS3::zero(), QS3::one()),
    ];
    let k = k.rem_euclid(12) as usize;
    let (c, s) = table[k % 3].clone();
    // Rotate the first-quadrant value by quarter turns.
    match k / 3 {
        0 => (c, s),
        1 => (-&s, c),
        2 => (-&c, -&s),
        _ => (s, -&c),
    }
}

impl AffMap {
    pub fn new(m00: QS3, m01: QS3, m10: QS3, m11: QS3, tx: QS3, ty: QS3) -> AffMap {
        AffMap { m00, m01, m10, m11, tx, ty }
    }

    pub fn identity() -> AffMap {
        AffMap::new(QS3::one(), QS3::zero(), QS3::zero(), QS3::one(), QS3::zero(), QS3::zero())
    }

    pub fn translation(v: &Point) -> AffMap {
        AffMap::new(QS3::one(), QS3::zero(), QS3::zero(), QS3::one(), v.x.clone(), v.y.clone())
    }

    /// Rotation by `30k` degrees about the origin.
    pub fn rotation(k: i64) -> AffMap {
        let (c, s) = unit_30(k);
        AffMap::new(c.clone(), -&s, s, c, QS3::zero(), QS3::zero())
    }

    /// Rotation by `30k` degrees about `center`.
    pub fn rotation_about(k: i64, center: &Point) -> AffMap {
        AffMap::translation(center).compose(&AffMap::rotation(k)).compose(&AffMap::translation(&-center))
    }

    pub fn point_reflection(center: &Point) -> AffMap {
        AffMap::rotation_about(6, center)
    }

    pub fn homothety(center: &Point, ratio: &QS3) -> AffMap {
        let one_minus = QS3::one() - ratio;
        AffMap::new(ratio.clone(), QS3::zero(), QS3::zero(), ratio.clone(), &center.x * &one_minus, &center.y * &one_minus)
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &self.m00 * &p.x + &self.m01 * &p.y + &self.tx,
            &self.m10 * &p.x + &self.m11 * &p.y + &self.ty,
        )
    }

    pub fn apply_linear(&self, v: &Point) -> Point {
        Point::new(&self.m00 * &v.x + &self.m01 * &v.y, &self.m10 * &v.x + &self.m11 * &v.y)
    }

    pub fn translation_part(&self) -> Point {
        Point::new(self.tx.clone(), self.ty.clone())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffMap) -> AffMap {
        let t = self.apply(&other.translation_part());
        AffMap::new(
            &self.m00 * &other.m00 + &self.m01 * &other.m10,
            &self.m00 * &other.m01 + &self.m01 * &other.m11,
            &self.m10 * &other.m00 + &self.m11 * &other.m10,
            &self.m10 * &other.m01 + &self.m11 * &other.m11,
            t.x,
            t.y,
        )
    }

    pub fn det(&self) -> QS3 {
        &self.m00 * &self.m11 - &self.m01 * &self.m10
    }

    pub fn inverse(&self) -> GeoResult<AffMap> {
        let det = self.det();
        let inv = det.recip().map_err(|_| GeometryError::Singular)?;
        let lin = AffMap::new(
            &self.m11 * &inv,
            -&(&self.m01 * &inv),
            -&(&self.m10 * &inv),
            &self.m00 * &inv,
            QS3::zero(),
            QS3::zero(),
        );
        let t = -&lin.apply_linear(&self.translation_part());
        Ok(AffMap { tx: t.x, ty: t.y, ..lin })
    }

    pub fn is_isometry(&self) -> bool {
        let c0 = &self.m00 * &self.m00 + &self.m10 * &self.m10;
        let c1 = &self.m01 * &self.m01 + &self.m11 * &self.m11;
        let cross = &self.m00 * &self.m01 + &self.m10 * &self.m11;
        c0 == QS3::one() && c1 == QS3::one() && cross.is_zero()
    }

    pub fn same_linear_part(&self, o: &AffMap) -> bool {
        self.m00 == o.m00 && self.m01 == o.m01 && self.m10 == o.m10 && self.m11 == o.m11
    }

    /// `k` in `0..12` when the linear part is rotation by `30k` degrees.
    pub fn rotation_steps(&self) -> Option<u32> {
        (0..12).find(|&k| self.same_linear_part(&AffMap::rotation(k as i64))).map(|k| k as u32)
    }

    /// The ratio when the linear part is a scalar multiple of the identity.
    pub fn homothety_ratio(&self) -> Option<QS3> {
        (self.m01.is_zero() && self.m10.is_zero() && self.m00 == self.m11).then(|| self.m00.clone())
    }

    /// Unique fixed point; fails when `I - M` is singular.
    pub fn fixed_point(&self) -> GeoResult<Point> {
        let a = QS3::one() - &self.m00;
        let b = -&self.m01;
        let c = -&self.m10;
        let d = QS3::one() - &self.m11;
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(GeometryError::Singular);
        }
        let x = (&d * &self.tx - &b * &self.ty).checked_div(&det)?;
        let y = (&a * &self.ty - &c * &self.tx).checked_div(&det)?;
        Ok(Point::new(x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Inside,
    Disjoint,
    Straddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Bounded,
    Unbounded,
}

/// An open polygonal region. Bounded regions are simple polygons, possibly
/// nonconvex. Unbounded regions are convex: the boundary comes in from
/// infinity along `entry`, follows the vertex chain and leaves along `exit`;
/// both rays are stored as outward directions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Region {
    vertices: Vec<Point>,
    rays: Option<(Direction, Direction)>,
    convex: bool,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<_> = self.vertices.iter().map(Point::to_f64).collect();
        match &self.rays {
            None => write!(f, "Region{vs:.4?}"),
            Some((e, x)) => write!(f, "Region(in {:?}, {vs:.4?}, out {:?})", e.0.to_f64(), x.0.to_f64()),
        }
    }
}

fn turn(a: &Point, b: &Point, c: &Point) -> i32 {
    (b - a).cross(&(c - b)).signum()
}

fn signed_area2(vs: &[Point]) -> QS3 {
    let n = vs.len();
    (0..n).map(|i| vs[i].cross(&vs[(i + 1) % n])).sum()
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let ab = b - a;
    let ap = p - a;
    if !ab.cross(&ap).is_zero() {
        return false;
    }
    let t = ab.dot(&ap);
    !t.is_negative() && t <= ab.norm2()
}

fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = turn(a, b, c);
    let o2 = turn(a, b, d);
    let o3 = turn(c, d, a);
    let o4 = turn(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Drops repeated and collinear vertices of a closed ring.
fn clean_ring(mut vs: Vec<Point>) -> Vec<Point> {
    vs.dedup();
    while vs.len() > 1 && vs.first() == vs.last() {
        vs.pop();
    }
    loop {
        let n = vs.len();
        if n < 3 {
            return vs;
        }
        let keep: Vec<bool> = (0..n)
            .map(|i| turn(&vs[(i + n - 1) % n], &vs[i], &vs[(i + 1) % n]) != 0)
            .collect();
        if keep.iter().all(|&k| k) {
            return vs;
        }
        vs = vs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(v, _)| v).collect();
    }
}

fn rotate_to_least(vs: &mut [Point]) {
    if let Some((i, _)) = vs.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)) {
        vs.rotate_left(i);
    }
}

fn ring_is_convex(vs: &[Point]) -> bool {
    let n = vs.len();
    (0..n).all(|i| turn(&vs[i], &vs[(i + 1) % n], &vs[(i + 2) % n]) > 0)
}

fn ring_is_simple(vs: &[Point]) -> bool {
    let n = vs.len();
    for i in 0..n {
        let (a, b) = (&vs[i], &vs[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let (c, d) = (&vs[j], &vs[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone)]
enum Elem {
    Fin(Point),
    Inf(Point),
}

impl Region {
    /// A bounded region from a simple ring in either orientation.
    pub fn polygon(vertices: Vec<Point>) -> GeoResult<Region> {
        let mut vs = vertices;
        vs.dedup();
        if vs.len() > 1 && vs.first() == vs.last() {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(GeometryError::Degenerate("fewer than three vertices"));
        }
        if !ring_is_simple(&vs) {
            return Err(GeometryError::NotSimple);
        }
        match signed_area2(&vs).signum() {
            0 => Err(GeometryError::Degenerate("zero area")),
            s => {
                if s < 0 {
                    vs.reverse();
                }
                Region::from_ccw(vs)
            }
        }
    }

    /// Trusted constructor: `vs` is a simple counterclockwise ring.
    pub(crate) fn from_ccw(vs: Vec<Point>) -> GeoResult<Region> {
        let mut vs = clean_ring(vs);
        if vs.len() < 3 {
            return Err(GeometryError::Degenerate("fewer than three vertices"));
        }
        rotate_to_least(&mut vs);
        let convex = ring_is_convex(&vs);
        Ok(Region { vertices: vs, rays: None, convex })
    }

    /// An unbounded convex region. `entry` and `exit` are outward directions of
    /// the incoming and outgoing boundary rays.
    pub fn unbounded(vertices: Vec<Point>, entry: Point, exit: Point) -> GeoResult<Region> {
        let entry = Direction::new(entry)?;
        let exit = Direction::new(exit)?;
        let mut vs = vertices;
        vs.dedup();
        if vs.is_empty() {
            return Err(GeometryError::Degenerate("unbounded region without vertices"));
        }
        // Redundant chain ends continue a ray straight on.
        loop {
            let mut changed = false;
            if vs.len() >= 2 {
                let d = &vs[1] - &vs[0];
                if d.cross(entry.vector()).is_zero() && d.dot(entry.vector()).is_negative() {
                    vs.remove(0);
                    changed = true;
                }
            }
            if vs.len() >= 2 {
                let k = vs.len() - 1;
                let d = &vs[k] - &vs[k - 1];
                if d.cross(exit.vector()).is_zero() && d.dot(exit.vector()).is_positive() {
                    vs.pop();
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut i = 1;
        while i + 1 < vs.len() {
            if turn(&vs[i - 1], &vs[i], &vs[i + 1]) == 0 {
                vs.remove(i);
            } else {
                i += 1;
            }
        }
        let region = Region { vertices: vs, rays: Some((entry, exit)), convex: true };
        if !region.unbounded_is_convex() {
            return Err(GeometryError::NonConvexUnbounded);
        }
        Ok(region)
    }

    fn unbounded_is_convex(&self) -> bool {
        let (entry, exit) = self.rays.as_ref().expect("unbounded");
        let vs = &self.vertices;
        let mut dirs = vec![-entry.vector()];
        dirs.extend(vs.windows(2).map(|w| &w[1] - &w[0]));
        dirs.push(exit.vector().clone());
        // Every consecutive turn is a strict left turn, and the total turn is
        // at most a half revolution.
        if !dirs.windows(2).all(|w| w[0].cross(&w[1]).is_positive()) {
            return false;
        }
        let total = dirs[0].cross(dirs.last().unwrap());
        let total_dot = dirs[0].dot(dirs.last().unwrap());
        !(total.is_negative() || (total.is_zero() && total_dot.is_positive()))
    }

    pub fn kind(&self) -> RegionKind {
        if self.rays.is_some() { RegionKind::Unbounded } else { RegionKind::Bounded }
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_none()
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn rays(&self) -> Option<(&Direction, &Direction)> {
        self.rays.as_ref().map(|(a, b)| (a, b))
    }

    /// Directed boundary edges of a bounded region.
    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Boundary half-planes of a convex region.
    fn convex_half_planes(&self) -> Vec<HalfPlane> {
        let vs = &self.vertices;
        match &self.rays {
            None => self.edges().map(|(a, b)| HalfPlane::left_of(a, &(b - a))).collect(),
            Some((entry, exit)) => {
                let mut hps = vec![HalfPlane::left_of(&vs[0], &-entry.vector())];
                hps.extend(vs.windows(2).map(|w| HalfPlane::left_of(&w[0], &(&w[1] - &w[0]))));
                hps.push(HalfPlane::left_of(vs.last().unwrap(), exit.vector()));
                hps
            }
        }
    }

    pub fn classify(&self, p: &Point) -> Location {
        if self.convex {
            let mut on_line = false;
            for hp in self.convex_half_planes() {
                match hp.side(p) {
                    s if s < 0 => return Location::Exterior,
                    0 => on_line = true,
                    _ => {}
                }
            }
            return if on_line { Location::Boundary } else { Location::Interior };
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if on_segment(p, a, b) {
                return Location::Boundary;
            }
            let above_a = a.y > p.y;
            let above_b = b.y > p.y;
            if above_a != above_b {
                let orient = (b - a).cross(&(p - a)).signum();
                if (b.y > a.y && orient > 0) || (b.y < a.y && orient < 0) {
                    inside = !inside;
                }
            }
        }
        if inside { Location::Interior } else { Location::Exterior }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.classify(p) == Location::Interior
    }

    fn elems(&self) -> (Vec<Elem>, Vec<Point>) {
        let vs = &self.vertices;
        match &self.rays {
            None => (vs.iter().cloned().map(Elem::Fin).collect(), vec![]),
            Some((entry, exit)) => {
                let mut es = vec![Elem::Inf(entry.vector().clone())];
                es.extend(vs.iter().cloned().map(Elem::Fin));
                es.push(Elem::Inf(exit.vector().clone()));
                (es, vec![vs[0].clone(), vs.last().unwrap().clone()])
            }
        }
    }

    /// Convex region ∩ open half-plane, or `None` if that has empty interior.
    fn clip_convex(&self, hp: &HalfPlane) -> Option<Region> {
        let (elems, bases) = self.elems();
        let n = elems.len();
        let sides: Vec<i32> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| match e {
                Elem::Fin(p) => hp.side(p),
                Elem::Inf(d) => match hp.linear(d).signum() {
                    // A ray parallel to the line stays on its base point's side.
                    0 => hp.side(if i == 0 { &bases[0] } else { &bases[1] }),
                    s => s,
                },
            })
            .collect();
        if sides.iter().all(|&s| s <= 0) {
            return None;
        }
        if sides.iter().all(|&s| s >= 0) {
            return Some(self.clone());
        }
        let mut out: Vec<Elem> = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            if sides[i] >= 0 {
                out.push(elems[i].clone());
            }
            if sides[i] * sides[j] < 0 {
                out.push(crossing(&elems[i], &elems[j], hp));
            }
        }
        let infs: Vec<usize> = (0..out.len()).filter(|&i| matches!(out[i], Elem::Inf(_))).collect();
        match infs.len() {
            0 => {
                let vs = out.into_iter().map(|e| match e { Elem::Fin(p) => p, Elem::Inf(_) => unreachable!() }).collect();
                Region::from_ccw(vs).ok()
            }
            2 => {
                let m = out.len();
                // The two ideal points are cyclically adjacent: exit then entry.
                let first = if (infs[0] + 1) % m == infs[1] { infs[0] } else { infs[1] };
                let Elem::Inf(exit) = out[first].clone() else { unreachable!() };
                let Elem::Inf(entry) = out[(first + 1) % m].clone() else { unreachable!() };
                let vs: Vec<Point> = (2..m)
                    .map(|k| match &out[(first + k) % m] {
                        Elem::Fin(p) => p.clone(),
                        Elem::Inf(_) => unreachable!(),
                    })
                    .collect();
                Region::unbounded(vs, entry, exit).ok()
            }
            _ => unreachable!("convex clip produced {} ideal points", infs.len()),
        }
    }

    /// Open pieces of `self` inside the half-plane.
    pub fn clip(&self, hp: &HalfPlane) -> Vec<Region> {
        if self.convex {
            return self.clip_convex(hp).into_iter().collect();
        }
        split_nonconvex(self, hp).0
    }

    /// Connected open pieces of `self` minus the line, positive side first.
    pub fn split(&self, line: &Line) -> Vec<Region> {
        let hp = line.positive_side();
        if self.convex {
            let mut out: Vec<Region> = self.clip_convex(&hp).into_iter().collect();
            out.extend(self.clip_convex(&hp.complement()));
            return out;
        }
        let (mut pos, neg) = split_nonconvex(self, &hp);
        pos.extend(neg);
        pos
    }

    /// Intersection with a convex region, as connected open pieces.
    pub fn intersect_convex(&self, other: &Region) -> Vec<Region> {
        debug_assert!(other.convex);
        let mut pieces = vec![self.clone()];
        for hp in other.convex_half_planes() {
            pieces = pieces.iter().flat_map(|r| r.clip(&hp)).collect();
            if pieces.is_empty() {
                break;
            }
        }
        pieces
    }

    pub fn map(&self, f: &AffMap) -> GeoResult<Region> {
        let det = f.det();
        if det.is_zero() {
            return Err(GeometryError::Singular);
        }
        let mut vs: Vec<Point> = self.vertices.iter().map(|p| f.apply(p)).collect();
        match &self.rays {
            None => {
                if det.is_negative() {
                    vs.reverse();
                }
                Region::from_ccw(vs)
            }
            Some((entry, exit)) => {
                let e = f.apply_linear(entry.vector());
                let x = f.apply_linear(exit.vector());
                if det.is_negative() {
                    vs.reverse();
                    Region::unbounded(vs, x, e)
                } else {
                    Region::unbounded(vs, e, x)
                }
            }
        }
    }

    pub fn translate(&self, v: &Point) -> Region {
        self.map(&AffMap::translation(v)).expect("translation is invertible")
    }

    pub fn area(&self) -> GeoResult<QS3> {
        if !self.is_bounded() {
            return Err(GeometryError::Unbounded);
        }
        Ok(signed_area2(&self.vertices).scale(&crate::field::Rat::new(1, 2)))
    }

    pub fn area_and_centroid(&self) -> GeoResult<(QS3, Point)> {
        let area = self.area()?;
        let n = self.vertices.len();
        let (mut cx, mut cy) = (QS3::zero(), QS3::zero());
        for i in 0..n {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let w = a.cross(b);
            cx += &(&(&a.x + &b.x) * &w);
            cy += &(&(&a.y + &b.y) * &w);
        }
        let six_area = &area * &QS3::int(6);
        Ok((area, Point::new(cx.checked_div(&six_area)?, cy.checked_div(&six_area)?)))
    }

    pub fn centroid(&self) -> GeoResult<Point> {
        Ok(self.area_and_centroid()?.1)
    }

    /// Some point of the open region.
    pub fn interior_point(&self) -> Point {
        let vs = &self.vertices;
        let n = vs.len();
        let third = QS3::rat(1, 3);
        match &self.rays {
            Some((entry, exit)) => {
                let sum = vs.iter().fold(Point::origin(), |acc, p| &acc + p);
                let avg = sum.scale(&QS3::rat(1, n as i64));
                let push = entry.vector() + exit.vector();
                let mut k = QS3::one();
                for _ in 0..64 {
                    let cand = &avg + &push.scale(&k);
                    if self.contains(&cand) {
                        return cand;
                    }
                    k = &k * &QS3::int(2);
                }
                panic!("no interior point found for {self:?}");
            }
            None if self.convex => (&(&vs[0] + &vs[1]) + &vs[2]).scale(&third),
            None => {
                for i in 0..n {
                    let (a, b, c) = (&vs[(i + n - 1) % n], &vs[i], &vs[(i + 1) % n]);
                    if turn(a, b, c) <= 0 {
                        continue;
                    }
                    let ear = [a.clone(), b.clone(), c.clone()];
                    let blocked = vs.iter().enumerate().any(|(k, q)| {
                        k != i && k != (i + n - 1) % n && k != (i + 1) % n && {
                            let s = [turn(&ear[0], &ear[1], q), turn(&ear[1], &ear[2], q), turn(&ear[2], &ear[0], q)];
                            s.iter().all(|&t| t >= 0)
                        }
                    });
                    if !blocked {
                        return (&(a + b) + c).scale(&third);
                    }
                }
                panic!("simple polygon without an ear: {self:?}");
            }
        }
    }

    /// Whether this bounded region lies inside, outside or across `other`
    /// (also bounded).
    pub fn relation(&self, other: &Region) -> Relation {
        if other.convex && self.vertices.iter().all(|v| other.classify(v) != Location::Exterior) && self.is_bounded() {
            return Relation::Inside;
        }
        if boundary_enters(other, self) {
            return Relation::Straddle;
        }
        if other.contains(&self.interior_point()) {
            Relation::Inside
        } else {
            Relation::Disjoint
        }
    }

    /// `self ⊂ other` as open sets.
    pub fn is_inside(&self, other: &Region) -> bool {
        self.relation(other) == Relation::Inside
    }

    pub fn is_simple(&self) -> bool {
        self.rays.is_some() || ring_is_simple(&self.vertices)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let xs = self.vertices.iter().map(|p| &p.x);
        let ys = self.vertices.iter().map(|p| &p.y);
        let lo = Point::new(xs.clone().min().unwrap().clone(), ys.clone().min().unwrap().clone());
        let hi = Point::new(xs.max().unwrap().clone(), ys.max().unwrap().clone());
        (lo, hi)
    }
}

fn crossing(a: &Elem, b: &Elem, hp: &HalfPlane) -> Elem {
    let along = |p: &Point, d: &Point| {
        let t = (-hp.eval(p)).checked_div(&hp.linear(d)).expect("crossing edge is not parallel");
        p + &d.scale(&t)
    };
    match (a, b) {
        (Elem::Fin(p), Elem::Fin(q)) => Elem::Fin(along(p, &(q - p))),
        (Elem::Fin(p), Elem::Inf(d)) | (Elem::Inf(d), Elem::Fin(p)) => Elem::Fin(along(p, d)),
        (Elem::Inf(exit), Elem::Inf(entry)) => {
            if exit.cross(entry).is_zero() && exit.dot(entry).is_positive() {
                return Elem::Inf(exit.clone());
            }
            let u = hp.normal.perp();
            if exit.cross(&u).signum() >= 0 && u.cross(entry).signum() >= 0 {
                Elem::Inf(u)
            } else {
                Elem::Inf(-&u)
            }
        }
    }
}

/// Order of directions by counterclockwise angle from `reference`, with the
/// reference itself first.
fn ccw_angle_cmp(reference: &Point, a: &Point, b: &Point) -> Ordering {
    let half = |d: &Point| {
        let c = reference.cross(d);
        if c.is_positive() || (c.is_zero() && reference.dot(d).is_positive()) { 0 } else { 1 }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    match a.cross(b).signum() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

fn trace_faces(edges: Vec<(Point, Point)>) -> Vec<Region> {
    let mut outgoing: HashMap<&Point, Vec<usize>> = HashMap::new();
    for (i, (a, _)) in edges.iter().enumerate() {
        outgoing.entry(a).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut faces = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut ring = vec![edges[start].0.clone()];
        let mut cur = start;
        loop {
            let (u, v) = &edges[cur];
            let back = u - v;
            let next = *outgoing[v]
                .iter()
                .max_by(|&&x, &&y| ccw_angle_cmp(&back, &(&edges[x].1 - v), &(&edges[y].1 - v)))
                .expect("dangling edge");
            if next == start {
                break;
            }
            assert!(!used[next], "face tracing revisited an edge");
            used[next] = true;
            ring.push(v.clone());
            cur = next;
        }
        if let Ok(r) = Region::from_ccw(ring) {
            faces.push(r);
        }
    }
    faces
}

fn split_nonconvex(region: &Region, hp: &HalfPlane) -> (Vec<Region>, Vec<Region>) {
    let vs = region.vertices();
    let n = vs.len();
    let sides: Vec<i32> = vs.iter().map(|p| hp.side(p)).collect();
    if sides.iter().all(|&s| s >= 0) {
        return (vec![region.clone()], vec![]);
    }
    if sides.iter().all(|&s| s <= 0) {
        return (vec![], vec![region.clone()]);
    }
    let mut pts: Vec<(Point, i32)> = Vec::with_capacity(n + 4);
    for i in 0..n {
        let j = (i + 1) % n;
        pts.push((vs[i].clone(), sides[i]));
        if sides[i] * sides[j] < 0 {
            let Elem::Fin(p) = crossing(&Elem::Fin(vs[i].clone()), &Elem::Fin(vs[j].clone()), hp) else { unreachable!() };
            pts.push((p, 0));
        }
    }
    let along = Point::new(hp.normal.y.clone(), -&hp.normal.x);
    let mut zeros: Vec<Point> = pts.iter().filter(|(_, s)| *s == 0).map(|(p, _)| p.clone()).collect();
    zeros.sort_by_key(|a| a.dot(&along));
    zeros.dedup();

    let m = pts.len();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for i in 0..m {
        let ((a, sa), (b, sb)) = (&pts[i], &pts[(i + 1) % m]);
        let edge = (a.clone(), b.clone());
        if *sa == 0 && *sb == 0 {
            if (b - a).dot(&along).is_positive() {
                pos.push(edge);
            } else {
                neg.push(edge);
            }
        } else if *sa >= 0 && *sb >= 0 {
            pos.push(edge);
        } else {
            neg.push(edge);
        }
    }
    for w in zeros.windows(2) {
        if region.classify(&w[0].midpoint(&w[1])) == Location::Interior {
            pos.push((w[0].clone(), w[1].clone()));
            neg.push((w[1].clone(), w[0].clone()));
        }
    }
    (trace_faces(pos), trace_faces(neg))
}

/// Whether some boundary point of `s` lies in the open region `p`.
fn boundary_enters(s: &Region, p: &Region) -> bool {
    let p_edges: Vec<(&Point, &Point)> = p.edges().collect();
    for (a, b) in s.edges() {
        if p.contains(a) {
            return true;
        }
        let d = b - a;
        let len2 = d.norm2();
        let mut ts: Vec<QS3> = vec![QS3::zero(), len2.clone()];
        for (c, e) in &p_edges {
            let pe = *e - *c;
            let denom = d.cross(&pe);
            if denom.is_zero() {
                if d.cross(&(*c - a)).is_zero() {
                    for q in [*c, *e] {
                        let t = d.dot(&(q - a));
                        if t.is_positive() && t < len2 {
                            ts.push(t);
                        }
                    }
                }
                continue;
            }
            let ac = *c - a;
            let t = ac.cross(&pe).checked_div(&denom).expect("nonzero");
            let u = ac.cross(&d).checked_div(&denom).expect("nonzero");
            if t.is_positive() && t < QS3::one() && !u.is_negative() && u <= QS3::one() {
                ts.push(&t * &len2);
            }
        }
        ts.sort();
        ts.dedup();
        let inv = len2.recip().expect("nonzero edge");
        for w in ts.windows(2) {
            let mid = &(&w[0] + &w[1]) * &inv;
            let q = a.lerp(b, &mid.scale(&crate::field::Rat::new(1, 2)));
            if p.contains(&q) {
                return true;
            }
        }
    }
    false
}

#[derive(Serialize, Deserialize)]
struct RegionJson {
    kind: RegionKind,
    vertices: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    entry_ray: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    exit_ray: Option<[String; 2]>,
}

fn pair(p: &Point) -> [String; 2] {
    [p.x.to_literal(), p.y.to_literal()]
}

fn unpair(s: &[String; 2]) -> GeoResult<Point> {
    Ok(Point::new(s[0].parse()?, s[1].parse()?))
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        RegionJson {
            kind: self.kind(),
            vertices: self.vertices.iter().map(pair).collect(),
            entry_ray: self.rays.as_ref().map(|(e, _)| pair(e.vector())),
            exit_ray: self.rays.as_ref().map(|(_, x)| pair(x.vector())),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Region, D::Error> {
        use serde::de::Error;
        let raw = RegionJson::deserialize(de)?;
        let vertices: Vec<Point> = raw.vertices.iter().map(unpair).collect::<GeoResult<_>>().map_err(D::Error::custom)?;
        let region = match (raw.kind, raw.entry_ray, raw.exit_ray) {
            (RegionKind::Bounded, None, None) => Region::polygon(vertices),
            (RegionKind::Unbounded, Some(e), Some(x)) => {
                let e = unpair(&e).map_err(D::Error::custom)?;
                let x = unpair(&x).map_err(D::Error::custom)?;
                Region::unbounded(vertices, e, x)
            }
            _ => Err(GeometryError::Json("rays must be present exactly for unbounded regions".into())),
        };
        region.map_err(D::Error::custom)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        pair(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Point, D::Error> {
        use serde::de::Error;
        let raw = <[String; 2]>::deserialize(de)?;
        unpair(&raw).map_err(D::Error::custom)
    }
}

impl Serialize for AffMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let lit = |q: &QS3| q.to_literal();
        serde_json::json!({
            "matrix": [[lit(&self.m00), lit(&self.m01)], [lit(&self.m10), lit(&self.m11)]],
            "translation": [lit(&self.tx), lit(&self.ty)],
        })
        .serialize(ser)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn q(s: &str) -> QS3 {
        s.parse().unwrap()
    }

    fn unit_square() -> Region {
        Region::polygon(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).unwrap()
    }

    fn quadrant() -> Region {
        Region::unbounded(vec![pt(0, 0)], pt(0, 1), pt(1, 0)).unwrap()
    }

    #[test]
    fn classify_square() {
        let sq = unit_square();
        let half = QS3::rat(1, 2);
        assert_eq!(sq.classify(&Point::new(half.clone(), half.clone())), Location::Interior);
        assert_eq!(sq.classify(&Point::new(QS3::zero(), half.clone())), Location::Boundary);
        assert_eq!(sq.classify(&pt(2, 0)), Location::Exterior);
    }

    #[test]
    fn classify_wedge() {
        assert_eq!(quadrant().classify(&pt(5, 5)), Location::Interior);
        assert_eq!(quadrant().classify(&pt(0, 5)), Location::Boundary);
        assert_eq!(quadrant().classify(&pt(-1, 5)), Location::Exterior);
    }

    #[test]
    fn split_square_in_half() {
        let line = Line::new(QS3::one(), QS3::zero(), QS3::rat(1, 2)).unwrap();
        let pieces = unit_square().split(&line);
        assert_eq!(pieces.len(), 2);
        for p in &pieces {
            assert_eq!(p.area().unwrap(), QS3::rat(1, 2));
            assert_eq!(p.vertices().len(), 4);
        }
    }

    #[test]
    fn split_missing_line_keeps_region() {
        let line = Line::new(QS3::one(), QS3::zero(), QS3::int(2)).unwrap();
        assert_eq!(unit_square().split(&line), vec![unit_square()]);
    }

    #[test]
    fn split_wedge_by_diagonal() {
        let line = Line::new(QS3::one(), QS3::one(), QS3::one()).unwrap();
        let pieces = quadrant().split(&line);
        assert_eq!(pieces.len(), 2);
        let bounded: Vec<_> = pieces.iter().filter(|p| p.is_bounded()).collect();
        assert_eq!(bounded.len(), 1);
        assert_eq!(bounded[0].area().unwrap(), QS3::rat(1, 2));
        let far = pieces.iter().find(|p| !p.is_bounded()).unwrap();
        assert_eq!(far.vertices().len(), 2);
        assert!(far.contains(&pt(3, 3)));
    }

    #[test]
    fn split_half_strip_lengthwise() {
        let strip = Region::unbounded(vec![pt(0, 0), pt(2, 0)], pt(0, 1), pt(0, 1)).unwrap();
        let line = Line::new(QS3::one(), QS3::zero(), QS3::one()).unwrap();
        let pieces = strip.split(&line);
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| !p.is_bounded()));
    }

    #[test]
    fn apply_map_examples() {
        let sq = unit_square();
        assert_eq!(sq.map(&AffMap::identity()).unwrap(), sq);
        let flipped = sq.map(&AffMap::rotation(6)).unwrap();
        assert_eq!(flipped, Region::polygon(vec![pt(-1, -1), pt(0, -1), pt(0, 0), pt(-1, 0)]).unwrap());
        let moved = quadrant().translate(&pt(1, 0));
        assert_eq!(moved.vertices(), &[pt(1, 0)]);
        assert_eq!(moved.rays(), quadrant().rays());
        let singular = AffMap::homothety(&pt(0, 0), &QS3::zero());
        assert_eq!(sq.map(&singular), Err(GeometryError::Singular));
    }

    #[test]
    fn reflection_keeps_orientation() {
        let mirror = AffMap::new(QS3::one(), QS3::zero(), QS3::zero(), QS3::int(-1), QS3::zero(), QS3::zero());
        let tri = Region::polygon(vec![pt(0, 0), pt(2, 0), pt(0, 1)]).unwrap();
        let img = tri.map(&mirror).unwrap();
        assert_eq!(img.area().unwrap(), QS3::one());
        let wedge = quadrant().map(&mirror).unwrap();
        assert!(wedge.contains(&pt(1, -1)));
    }

    #[test]
    fn region_equality() {
        let a = Region::polygon(vec![pt(1, 1), pt(0, 1), pt(0, 0), pt(1, 0)]).unwrap();
        assert_eq!(a, unit_square());
        assert_ne!(unit_square().translate(&pt(1, 0)), unit_square());
        let tri = Region::polygon(vec![pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap();
        assert_ne!(tri, quadrant());
        let with_midpoint = Region::polygon(vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(2, 2), pt(0, 2)]).unwrap();
        assert_eq!(with_midpoint.vertices().len(), 4);
    }

    #[test]
    fn area_and_centroid_examples() {
        let (a, c) = unit_square().area_and_centroid().unwrap();
        assert_eq!(a, QS3::one());
        assert_eq!(c, Point::new(QS3::rat(1, 2), QS3::rat(1, 2)));
        let tri = Region::polygon(vec![pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap();
        let (a, c) = tri.area_and_centroid().unwrap();
        assert_eq!(a, QS3::rat(1, 2));
        assert_eq!(c, Point::new(QS3::rat(1, 3), QS3::rat(1, 3)));
        let dodecagon: Vec<Point> = (0..12)
            .map(|k| {
                let (c, s) = unit_30(k);
                Point::new(&c * &QS3::int(2), &s * &QS3::int(2))
            })
            .collect();
        let (a, c) = Region::polygon(dodecagon).unwrap().area_and_centroid().unwrap();
        assert_eq!(a, QS3::int(12));
        assert_eq!(c, Point::origin());
        assert_eq!(quadrant().area(), Err(GeometryError::Unbounded));
    }

    #[test]
    fn nonconvex_split_yields_components() {
        // A "U" shape cut across both arms.
        let u = Region::polygon(vec![pt(0, 0), pt(3, 0), pt(3, 3), pt(2, 3), pt(2, 1), pt(1, 1), pt(1, 3), pt(0, 3)]).unwrap();
        assert!(!u.is_convex());
        let line = Line::new(QS3::zero(), QS3::one(), QS3::int(2)).unwrap();
        let pieces = u.split(&line);
        assert_eq!(pieces.len(), 3);
        let total: QS3 = pieces.iter().map(|p| p.area().unwrap()).sum();
        assert_eq!(total, u.area().unwrap());
        // Touching the notch floor exactly.
        let line = Line::new(QS3::zero(), QS3::one(), QS3::one()).unwrap();
        let pieces = u.split(&line);
        assert_eq!(pieces.len(), 3);
    }

    #[test]
    fn relations() {
        let big = Region::polygon(vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)]).unwrap();
        let l = Region::polygon(vec![pt(0, 0), pt(4, 0), pt(4, 1), pt(1, 1), pt(1, 4), pt(0, 4)]).unwrap();
        let inner = Region::polygon(vec![pt(2, 2), pt(3, 2), pt(3, 3), pt(2, 3)]).unwrap();
        let edge = Region::polygon(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).unwrap();
        assert_eq!(inner.relation(&big), Relation::Inside);
        assert_eq!(inner.relation(&l), Relation::Disjoint);
        assert_eq!(edge.relation(&l), Relation::Inside);
        assert_eq!(big.relation(&l), Relation::Straddle);
        assert_eq!(big.relation(&inner), Relation::Straddle);
        assert_eq!(l.relation(&l), Relation::Inside);
    }

    #[test]
    fn json_round_trip() {
        for r in [unit_square(), quadrant()] {
            let text = serde_json::to_string(&r).unwrap();
            let back: Region = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
        let text = serde_json::to_string(&unit_square()).unwrap();
        assert!(text.starts_with(r#"{"kind":"bounded","vertices":[["0+0*s3","0+0*s3"]"#), "{text}");
    }

    #[test]
    fn point_literal() {
        let p = Point::parse_literal("1/2+0*s3,0+1/2*s3").unwrap();
        assert_eq!(p, Point::new(QS3::rat(1, 2), q("0+1/2*s3")));
        match Point::parse_literal("1,abc") {
            Err(GeometryError::PointParse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(Point::parse_literal("abc").is_err());
    }

    #[test]
    fn rotation_and_fixed_points() {
        for k in 0..12 {
            let r = AffMap::rotation(k);
            assert!(r.is_isometry());
            assert_eq!(r.rotation_steps(), Some(k as u32));
            assert_eq!(r.compose(&AffMap::rotation(12 - k)), AffMap::identity());
        }
        let c = Point::new(q("1+1*s3"), q("-2"));
        assert_eq!(AffMap::rotation_about(5, &c).fixed_point().unwrap(), c);
        assert_eq!(AffMap::identity().fixed_point(), Err(GeometryError::Singular));
        let h = AffMap::homothety(&c, &q("7+-4*s3"));
        assert_eq!(h.inverse().unwrap().compose(&h), AffMap::identity());
    }

    fn arb_small() -> impl Strategy<Value = QS3> {
        (-8i64..8, 1i64..4, -4i64..4, 1i64..4).prop_map(|(a, b, c, d)| QS3::from_parts(a, b, c, d))
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (arb_small(), arb_small()).prop_map(|(x, y)| Point::new(x, y))
    }

    fn arb_isometry() -> impl Strategy<Value = AffMap> {
        (0i64..12, any::<bool>(), arb_point()).prop_map(|(k, flip, t)| {
            let mut m = AffMap::rotation(k);
            if flip {
                m = m.compose(&AffMap::new(QS3::one(), QS3::zero(), QS3::zero(), QS3::int(-1), QS3::zero(), QS3::zero()));
            }
            AffMap::translation(&t).compose(&m)
        })
    }

    fn arb_convex() -> impl Strategy<Value = Region> {
        prop::collection::vec(arb_point(), 3..9).prop_filter_map("degenerate hull", |pts| {
            // Convex hull by gift wrapping, exact.
            let mut pts = pts;
            pts.sort();
            pts.dedup();
            if pts.len() < 3 {
                return None;
            }
            let mut lower: Vec<Point> = Vec::new();
            for p in pts.iter() {
                while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
                    lower.pop();
                }
                lower.push(p.clone());
            }
            let mut upper: Vec<Point> = Vec::new();
            for p in pts.iter().rev() {
                while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
                    upper.pop();
                }
                upper.push(p.clone());
            }
            lower.pop();
            upper.pop();
            lower.extend(upper);
            Region::polygon(lower).ok()
        })
    }

    fn arb_line() -> impl Strategy<Value = Line> {
        (arb_point(), arb_point()).prop_filter_map("coincident", |(a, b)| Line::through(&a, &b).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn split_conserves_area(r in arb_convex(), l in arb_line()) {
            let total: QS3 = r.split(&l).iter().map(|p| p.area().unwrap()).sum();
            prop_assert_eq!(total, r.area().unwrap());
        }

        #[test]
        fn isometry_preserves_area_and_interior(r in arb_convex(), f in arb_isometry()) {
            let img = r.map(&f).unwrap();
            prop_assert_eq!(img.area().unwrap(), r.area().unwrap());
            let p = r.interior_point();
            prop_assert!(r.contains(&p));
            prop_assert!(img.contains(&f.apply(&p)));
        }

        #[test]
        fn equality_is_structural(r in arb_convex(), k in 0usize..8) {
            let mut vs = r.vertices().to_vec();
            let n = vs.len();
            vs.rotate_left(k % n);
            prop_assert_eq!(Region::polygon(vs.clone()).unwrap(), r.clone());
            vs.reverse();
            prop_assert_eq!(Region::polygon(vs).unwrap(), r);
        }

        #[test]
        fn nonconvex_split_conserves_area(r in arb_convex(), l in arb_line(), notch in arb_point()) {
            // Carve a notch into the hull to force the general splitter.
            let vs = r.vertices().to_vec();
            let mut carved = vs.clone();
            carved.insert(1, vs[0].midpoint(&vs[1]).lerp(&notch, &QS3::rat(1, 8)));
            if let Ok(poly) = Region::polygon(carved) {
                let pieces = poly.split(&l);
                let total: QS3 = pieces.iter().map(|p| p.area().unwrap()).sum();
                prop_assert_eq!(total, poly.area().unwrap());
                for p in &pieces {
                    prop_assert!(poly.contains(&p.interior_point()));
                }
            }
        }
    }
}
