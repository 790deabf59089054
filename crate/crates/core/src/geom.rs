//! Planar primitives and the constructions the localizer is built from:
//! internal/external division points, Apollonius circles, perpendicular
//! bisectors, circumcenters and closed-form circle/line intersections.
//!
//! Every function here is pure. Intersection routines return their points
//! sorted lexicographically so callers see a deterministic candidate order.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative band inside which two ranges are considered equal.
pub const RANGE_EQ_TOL: f64 = 1e-9;

/// Relative factor of the tangency band, see [`tangency_tol`].
pub const TANGENCY_REL: f64 = 1e-9;

/// Minimum separation for two points to count as distinct.
pub const COINCIDENT_TOL: f64 = 1e-12;

/// Mixed absolute/relative tangency band `1e-9 * max(1, scale)`.
pub fn tangency_tol(scale: f64) -> f64 {
    TANGENCY_REL * scale.max(1.0)
}

/// Relative gap `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Lexicographic (x, then y) total order.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: Point) -> Point {
        rhs * self
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidInput("circle center is not finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }
}

/// A line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point,
    pub direction: Point,
}

impl Line {
    /// Builds a line, normalizing `direction` to unit length.
    pub fn new(point: Point, direction: Point) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) || !point.is_finite() {
            return Err(Error::InvalidInput("line needs a finite point and a nonzero direction".into()));
        }
        Ok(Self {
            point,
            direction: direction * (1.0 / n),
        })
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn project(&self, p: Point) -> Point {
        self.point + self.direction * (p - self.point).dot(self.direction)
    }
}

fn check_ranges(d_i: f64, d_j: f64) -> Result<()> {
    if !(d_i.is_finite() && d_j.is_finite() && d_i > 0.0 && d_j > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ranges must be positive and finite, got ({d_i}, {d_j})"
        )));
    }
    Ok(())
}

fn check_ratio(d_i: f64, d_j: f64) -> Result<()> {
    check_ranges(d_i, d_j)?;
    if relative_gap(d_i, d_j) <= RANGE_EQ_TOL {
        return Err(Error::DegenerateRatio { d_i, d_j });
    }
    Ok(())
}

/// Point dividing segment `z_i z_j` internally in ratio `d_i : d_j`.
pub fn internal_division(z_i: Point, z_j: Point, d_i: f64, d_j: f64) -> Result<Point> {
    check_ranges(d_i, d_j)?;
    Ok((d_j * z_i + d_i * z_j) * (1.0 / (d_i + d_j)))
}

/// Point dividing line `z_i z_j` externally in ratio `d_i : d_j`.
pub fn external_division(z_i: Point, z_j: Point, d_i: f64, d_j: f64) -> Result<Point> {
    check_ratio(d_i, d_j)?;
    Ok((d_j * z_i - d_i * z_j) * (1.0 / (d_j - d_i)))
}

/// Locus of points `p` with `|p - z_i| / |p - z_j| = d_i / d_j`.
///
/// Only the ratio matters, so scaling both ranges leaves the circle unchanged.
pub fn apollonius_circle(z_i: Point, z_j: Point, d_i: f64, d_j: f64) -> Result<Circle> {
    check_ratio(d_i, d_j)?;
    let d_ij = z_i.distance(z_j);
    if d_ij <= COINCIDENT_TOL {
        return Err(Error::InvalidInput("apollonius circle of coincident points".into()));
    }
    let (center, radius) = apollonius_unchecked(z_i, z_j, d_i / d_j);
    Circle::new(center, radius)
}

/// Center and radius of the Apollonius circle for `ratio = d_i / d_j`,
/// without the equality band. Finite for any `ratio != 1`.
pub(crate) fn apollonius_unchecked(z_i: Point, z_j: Point, ratio: f64) -> (Point, f64) {
    let l2 = ratio * ratio;
    let denom = 1.0 - l2;
    let center = z_j + (z_i - z_j) * (1.0 / denom);
    let radius = ratio * z_i.distance(z_j) / denom.abs();
    (center, radius)
}

/// Perpendicular bisector of `z_i z_j`.
///
/// The direction is canonicalized to have a positive x component (or a
/// positive y component when x is zero).
pub fn perpendicular_bisector(z_i: Point, z_j: Point) -> Result<Line> {
    let v = z_j - z_i;
    if v.norm() <= COINCIDENT_TOL {
        return Err(Error::InvalidInput("perpendicular bisector of coincident points".into()));
    }
    let mut dir = v.perp();
    if dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0) {
        dir = -dir;
    }
    Line::new((z_i + z_j) * 0.5, dir)
}

/// Relative area test: `|cross(z2 - z1, z3 - z1)| <= tol * max(1, |z2 - z1| |z3 - z1|)`.
pub fn collinear(z1: Point, z2: Point, z3: Point, tol: f64) -> bool {
    let a = z2 - z1;
    let b = z3 - z1;
    a.cross(b).abs() <= tol * (a.norm() * b.norm()).max(1.0)
}

/// Tolerance used by [`circumcenter`] to reject collinear triples.
pub const CIRCUMCENTER_COLLINEAR_TOL: f64 = 1e-12;

pub fn circumcenter(z1: Point, z2: Point, z3: Point) -> Result<Point> {
    if collinear(z1, z2, z3, CIRCUMCENTER_COLLINEAR_TOL) {
        return Err(Error::CollinearSensors);
    }
    // Solve relative to z1 for better conditioning.
    let a = z2 - z1;
    let b = z3 - z1;
    let d = 2.0 * a.cross(b);
    let a2 = a.dot(a);
    let b2 = b.dot(b);
    let ux = (b.y * a2 - a.y * b2) / d;
    let uy = (a.x * b2 - b.x * a2) / d;
    Ok(z1 + Point::new(ux, uy))
}

pub fn point_line_distance(p: Point, l: &Line) -> f64 {
    l.direction.cross(p - l.point).abs()
}

fn sort_points(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(Point::lex_cmp);
    pts
}

/// Intersection of two circles via the radical line.
///
/// Tangency within `tangency_tol(r_a + r_b)` yields exactly one point on the
/// center line.
pub fn circle_circle_intersection(a: &Circle, b: &Circle) -> Result<Vec<Point>> {
    let delta = b.center - a.center;
    let dist = delta.norm();
    let tol = tangency_tol(a.radius + b.radius);
    let sum = a.radius + b.radius;
    let diff = (a.radius - b.radius).abs();

    if dist <= tol && diff <= tol {
        return Err(Error::DegenerateIntersection);
    }
    if dist > sum + tol || dist < diff - tol {
        return Ok(Vec::new());
    }
    if dist <= tol {
        // Concentric within tolerance but radii differ by about the band.
        return Ok(Vec::new());
    }
    let u = delta * (1.0 / dist);
    if (dist - sum).abs() <= tol {
        return Ok(vec![a.center + u * a.radius]);
    }
    if (dist - diff).abs() <= tol {
        let p = if a.radius >= b.radius {
            a.center + u * a.radius
        } else {
            a.center - u * a.radius
        };
        return Ok(vec![p]);
    }
    let along = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
    let h = (a.radius * a.radius - along * along).max(0.0).sqrt();
    let mid = a.center + u * along;
    let off = u.perp() * h;
    Ok(sort_points(vec![mid + off, mid - off]))
}

pub fn line_circle_intersection(l: &Line, c: &Circle) -> Vec<Point> {
    let dist = point_line_distance(c.center, l);
    let tol = tangency_tol(c.radius);
    let foot = l.project(c.center);
    if dist > c.radius + tol {
        return Vec::new();
    }
    if (dist - c.radius).abs() <= tol {
        return vec![foot];
    }
    let half = (c.radius * c.radius - dist * dist).max(0.0).sqrt();
    sort_points(vec![foot + l.direction * half, foot - l.direction * half])
}
