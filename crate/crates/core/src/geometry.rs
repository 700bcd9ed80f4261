//! Planar geometry: points, poses, simple polygons with a cached convex
//! decomposition, and strict overlap tests (touching shapes do not collide).

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::float::{cos, hypot, sin};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub const fn v2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

impl Vec2 {
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    pub fn perp(self) -> Vec2 {
        v2(-self.y, self.x)
    }

    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = (sin(theta), cos(theta));
        v2(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        v2(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        v2(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        v2(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        v2(self.x * k, self.y * k)
    }
}

/// Rigid transform: rotate by `theta`, then translate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { position: v2(x, y), theta }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        p.rotate(self.theta) + self.position
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose { position: self.apply(other.position), theta: self.theta + other.theta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Aabb { min, max }
    }

    pub fn of_points(points: &[Vec2]) -> Self {
        let mut b = Aabb::new(v2(f64::INFINITY, f64::INFINITY), v2(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            b.min = v2(b.min.x.min(p.x), b.min.y.min(p.y));
            b.max = v2(b.max.x.max(p.x), b.max.y.max(p.y));
        }
        b
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        o.min.x >= self.min.x && o.min.y >= self.min.y && o.max.x <= self.max.x && o.max.y <= self.max.y
    }

    /// Strict: boxes sharing only a boundary do not overlap.
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x < o.max.x && o.min.x < self.max.x && self.min.y < o.max.y && o.min.y < self.max.y
    }
}

/// Convex polygon, counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Convex {
    pub points: Vec<Vec2>,
    pub aabb: Aabb,
}

impl Convex {
    pub fn new(points: Vec<Vec2>) -> Self {
        let aabb = Aabb::of_points(&points);
        Convex { points, aabb }
    }

    pub fn transformed(&self, pose: &Pose) -> Convex {
        Convex::new(self.points.iter().map(|p| pose.apply(*p)).collect())
    }
}

/// Simple polygon with its convex decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
    pieces: Vec<Convex>,
}

impl Polygon {
    /// Accepts either orientation and stores the polygon counter-clockwise.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Invariant(
                "polygon has at least 3 vertices",
                alloc::format!("{} given", vertices.len()),
            ));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Invariant("finite coordinates", "polygon vertex is not finite".into()));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::Invariant("polygon is simple", "zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if !is_simple(&vertices) {
            return Err(Error::Invariant("polygon is simple", "edges intersect".into()));
        }
        let pieces = decompose(&vertices)
            .ok_or_else(|| Error::Invariant("polygon is simple", "ear clipping found no ear".into()))?;
        Ok(Polygon { vertices, pieces })
    }

    pub fn rectangle(half_x: f64, half_y: f64) -> Self {
        Polygon::new(alloc::vec![v2(-half_x, -half_y), v2(half_x, -half_y), v2(half_x, half_y), v2(-half_x, half_y)])
            .expect("rectangle is simple")
    }

    pub fn axis_box(min: Vec2, max: Vec2) -> Result<Self> {
        Polygon::new(alloc::vec![min, v2(max.x, min.y), max, v2(min.x, max.y)])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn pieces(&self) -> &[Convex] {
        &self.pieces
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::of_points(&self.vertices)
    }

    /// Largest distance from the local origin to a vertex.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Crossing-number test; boundary points count as outside or inside
    /// arbitrarily.
    pub fn contains_point(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    pub fn transformed_pieces(&self, pose: &Pose) -> impl Iterator<Item = Convex> + '_ {
        let pose = *pose;
        self.pieces.iter().map(move |c| c.transformed(&pose))
    }
}

pub fn signed_area(points: &[Vec2]) -> f64 {
    let n = points.len();
    (0..n).map(|i| points[i].cross(points[(i + 1) % n])).sum::<f64>() / 2.0
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Vec2, b: Vec2, p: Vec2, d: f64| {
        d == 0.0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn is_simple(v: &[Vec2]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(a, b, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Ear clipping into triangles, then greedy merging of neighbouring pieces
/// while the union stays convex.
fn decompose(v: &[Vec2]) -> Option<Vec<Convex>> {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            if orient(v[a], v[b], v[c]) <= 0.0 {
                return false;
            }
            idx.iter().all(|&p| p == a || p == b || p == c || !in_triangle(v[p], v[a], v[b], v[c]))
        })?;
        let (a, b, c) = (idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]);
        pieces.push(alloc::vec![a, b, c]);
        idx.remove(ear);
    }
    pieces.push(idx);

    let mut merged = true;
    while merged {
        merged = false;
        'outer: for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                if let Some(u) = merge_convex(&pieces[i], &pieces[j], v) {
                    pieces[i] = u;
                    pieces.swap_remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
    }
    Some(pieces.into_iter().map(|p| Convex::new(p.into_iter().map(|i| v[i]).collect())).collect())
}

fn in_triangle(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

/// Union of two CCW pieces sharing an edge, if convex.
fn merge_convex(a: &[usize], b: &[usize], v: &[Vec2]) -> Option<Vec<usize>> {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        let (p, q) = (a[i], a[(i + 1) % na]);
        let Some(j) = (0..nb).find(|&j| b[j] == q && b[(j + 1) % nb] == p) else {
            continue;
        };
        // a from q around to p, then b's interior from p around to q.
        let mut u: Vec<usize> = (0..na).map(|k| a[(i + 1 + k) % na]).collect();
        u.extend((2..nb).map(|k| b[(j + k) % nb]));
        let m = u.len();
        let convex = (0..m).all(|k| orient(v[u[k]], v[u[(k + 1) % m]], v[u[(k + 2) % m]]) >= 0.0);
        return convex.then_some(u);
    }
    None
}

fn project(points: &[Vec2], axis: Vec2) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

/// Separating-axis test on edge normals. Shapes that only touch do not
/// overlap.
pub fn convex_overlap(a: &Convex, b: &Convex) -> bool {
    if !a.aabb.overlaps(&b.aabb) {
        return false;
    }
    for poly in [&a.points, &b.points] {
        let n = poly.len();
        for i in 0..n {
            let axis = (poly[(i + 1) % n] - poly[i]).perp();
            if axis.x == 0.0 && axis.y == 0.0 {
                continue;
            }
            let (alo, ahi) = project(&a.points, axis);
            let (blo, bhi) = project(&b.points, axis);
            if ahi <= blo || bhi <= alo {
                return false;
            }
        }
    }
    true
}

/// Distance from `p` to a convex polygon, zero inside.
pub fn point_convex_distance(p: Vec2, c: &Convex) -> f64 {
    let n = c.points.len();
    let inside = (0..n).all(|i| orient(c.points[i], c.points[(i + 1) % n], p) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..n).map(|i| point_segment_distance(p, c.points[i], c.points[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 { 0.0 } else { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) };
    (p - (a + ab * t)).norm()
}

pub fn disk_convex_overlap(center: Vec2, radius: f64, c: &Convex) -> bool {
    let r = v2(radius, radius);
    if !Aabb::new(center - r, center + r).overlaps(&c.aabb) {
        return false;
    }
    point_convex_distance(center, c) < radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn l_shape() -> Polygon {
        Polygon::new(vec![v2(0.0, 0.0), v2(2.0, 0.0), v2(2.0, 1.0), v2(1.0, 1.0), v2(1.0, 2.0), v2(0.0, 2.0)]).unwrap()
    }

    #[test]
    fn decomposition_preserves_area() {
        let p = l_shape();
        let sum: f64 = p.pieces().iter().map(|c| signed_area(&c.points)).sum();
        assert!((sum - p.area()).abs() < 1e-12);
        assert_eq!(p.pieces().len(), 2);
        for c in p.pieces() {
            assert!(signed_area(&c.points) > 0.0);
        }
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = Polygon::new(vec![v2(0.0, 0.0), v2(0.0, 1.0), v2(1.0, 1.0), v2(1.0, 0.0)]).unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn self_intersecting_polygon_is_rejected() {
        let bowtie = vec![v2(0.0, 0.0), v2(1.0, 1.0), v2(1.0, 0.0), v2(0.0, 1.0)];
        assert!(Polygon::new(bowtie).is_err());
        assert!(Polygon::new(vec![v2(0.0, 0.0), v2(1.0, 0.0)]).is_err());
    }

    #[test]
    fn touching_is_not_overlap() {
        let a = Convex::new(Polygon::rectangle(0.5, 0.5).vertices().to_vec());
        let b = a.transformed(&Pose::new(1.0, 0.0, 0.0));
        assert!(!convex_overlap(&a, &b));
        let c = a.transformed(&Pose::new(1.0 - 1e-6, 0.0, 0.0));
        assert!(convex_overlap(&a, &c));
        let d = a.transformed(&Pose::new(1.0 + 1e-6, 0.0, 0.0));
        assert!(!convex_overlap(&a, &d));
    }

    #[test]
    fn rotated_square_separates_on_its_own_axis() {
        let a = Convex::new(Polygon::rectangle(0.5, 0.5).vertices().to_vec());
        // Diamond whose corner is 0.01 from a's face: boxes overlap, shapes do not.
        let b =
            a.transformed(&Pose::new(0.5 + 0.01 + core::f64::consts::FRAC_1_SQRT_2, 0.6, core::f64::consts::FRAC_PI_4));
        assert!(!convex_overlap(&a, &b));
    }

    #[test]
    fn disk_tests() {
        let sq = Convex::new(Polygon::rectangle(0.5, 0.5).vertices().to_vec());
        assert!(disk_convex_overlap(v2(0.0, 0.0), 0.1, &sq));
        assert!(!disk_convex_overlap(v2(1.0, 0.0), 0.5, &sq));
        assert!(disk_convex_overlap(v2(1.0, 0.0), 0.5 + 1e-9, &sq));
        assert!(!disk_convex_overlap(v2(1.0, 1.0), 0.7, &sq));
    }

    #[test]
    fn pose_composition() {
        let g = Pose::new(1.0, 2.0, 0.5);
        let h = Pose::new(-0.3, 0.4, 1.1);
        let p = v2(0.7, -0.2);
        let a = g.compose(&h).apply(p);
        let b = g.apply(h.apply(p));
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn point_containment() {
        let p = l_shape();
        assert!(p.contains_point(v2(0.5, 1.5)));
        assert!(!p.contains_point(v2(1.5, 1.5)));
    }
}
