//! Convex polygons in the plane.
//!
//! Vertices are stored counterclockwise with collinear and repeated
//! vertices merged. Tolerances are relative to the bounding-box diagonal
//! so that scaled copies behave identically.

use serde::{Deserialize, Serialize};

use super::point::{point_segment_distance, segments_intersect, Point};
use crate::error::{Error, Result};

/// Relative tolerance on vertex bulge (distance of a vertex from the chord of
/// its neighbours) used for merging collinear vertices and testing convexity.
pub const CONVEXITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
}

/// Sutherland-Hodgman step against a scalar field that is affine along every
/// edge: keeps the part where `values >= 0`.
pub(crate) fn clip_by_values(points: &[Point], values: &[f64]) -> Vec<Point> {
    let n = points.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (points[i], points[j]);
        let (va, vb) = (values[i], values[j]);
        if va >= 0.0 {
            out.push(a);
        }
        if (va > 0.0 && vb < 0.0) || (va < 0.0 && vb > 0.0) {
            let t = va / (va - vb);
            out.push(a.lerp(b, t));
        }
    }
    out
}

pub(crate) fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += (points[i] - o).cross(points[i + 1] - o);
    }
    0.5 * s
}

fn bbox_diag(points: &[Point]) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    (x1 - x0).hypot(y1 - y0)
}

/// Signed distance of `cur` from the chord `prev -> next`; positive for a
/// convex (left) turn.
fn bulge(prev: Point, cur: Point, next: Point) -> f64 {
    let chord = next - prev;
    let len = chord.norm();
    if len == 0.0 {
        return cur.dist(prev);
    }
    (cur - prev).cross(chord) / len
}

/// Removes repeated and collinear vertices. Vertices with `|bulge| <= tol`
/// are dropped. Returns the cleaned ring (possibly with < 3 vertices).
fn merge_degenerate(mut pts: Vec<Point>, tol: f64) -> Vec<Point> {
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let mut removed = false;
        let mut out: Vec<Point> = Vec::with_capacity(n);
        for p in &pts {
            if out.last().is_some_and(|q: &Point| q.dist(*p) <= tol) {
                removed = true;
                continue;
            }
            out.push(*p);
        }
        while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= tol {
            out.pop();
            removed = true;
        }
        pts = out;
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let mut keep = vec![true; n];
        let mut i = 0;
        while i < n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            if keep[prev] && keep[next] && bulge(pts[prev], pts[i], pts[next]).abs() <= tol {
                keep[i] = false;
                removed = true;
                // skip the neighbour so we never delete two adjacent vertices in one pass
                i += 1;
            }
            i += 1;
        }
        if removed {
            pts = pts
                .into_iter()
                .zip(keep)
                .filter_map(|(p, k)| k.then_some(p))
                .collect();
        } else {
            return pts;
        }
    }
}

impl Polygon {
    /// Validating constructor. Clockwise input is reversed; collinear and
    /// repeated vertices are merged.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let scale = bbox_diag(&vertices);
        if scale == 0.0 {
            return Err(Error::InvalidPolygon("all vertices coincide".into()));
        }
        let tol = CONVEXITY_TOL * scale;
        let mut pts = merge_degenerate(vertices, tol);
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon(
                "degenerate (collinear) vertex list".into(),
            ));
        }
        if signed_area(&pts) < 0.0 {
            pts.reverse();
        }
        let n = pts.len();
        let mut turning = 0.0;
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            let b = bulge(prev, pts[i], next);
            if b < -tol {
                return Err(Error::InvalidPolygon(format!(
                    "not convex at vertex {i} ({:?})",
                    pts[i]
                )));
            }
            let e0 = pts[i] - prev;
            let e1 = next - pts[i];
            turning += e0.cross(e1).atan2(e0.dot(e1));
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolygon(
                "self-intersecting vertex list".into(),
            ));
        }
        Ok(Self { vertices: pts })
    }

    /// Builds a polygon from the output of a clip. Returns `None` when the
    /// ring has collapsed to zero area. `scale` is the reference length for
    /// tolerances (usually the diagonal of the operand).
    pub(crate) fn from_clip(points: Vec<Point>, scale: f64) -> Option<Self> {
        if points.len() < 3 {
            return None;
        }
        let tol = CONVEXITY_TOL * scale;
        let pts = merge_degenerate(points, tol);
        if pts.len() < 3 {
            return None;
        }
        let a = signed_area(&pts);
        if a <= 1e-15 * scale * scale {
            return None;
        }
        Some(Self { vertices: pts })
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::InvalidPolygon(format!(
                "empty rectangle [{x0},{x1}]x[{y0},{y1}]"
            )));
        }
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    /// Regular `m`-gon inscribed in the circle of radius `radius` about `center`.
    pub fn regular(m: usize, center: Point, radius: f64, phase: f64) -> Result<Self> {
        if m < 3 || !(radius > 0.0) {
            return Err(Error::InvalidPolygon(format!(
                "regular polygon needs m >= 3 and radius > 0 (m={m}, r={radius})"
            )));
        }
        let pts = (0..m)
            .map(|i| {
                let t = phase + std::f64::consts::TAU * i as f64 / m as f64;
                center + Point::new(t.cos(), t.sin()) * radius
            })
            .collect();
        Self::new(pts)
    }

    /// Convex hull (Andrew's monotone chain).
    pub fn convex_hull(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("hull of fewer than 3 points".into()));
        }
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 {
                let n = lower.len();
                if (lower[n - 1] - lower[n - 2]).cross(p - lower[n - 2]) <= 0.0 {
                    lower.pop();
                } else {
                    break;
                }
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 {
                let n = upper.len();
                if (upper[n - 1] - upper[n - 2]).cross(p - upper[n - 2]) <= 0.0 {
                    upper.pop();
                } else {
                    break;
                }
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(lower)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterator over directed edges `(a, b)`, counterclockwise.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point {
        let o = self.vertices[0];
        let mut acc = Point::default();
        let mut area2 = 0.0;
        for i in 1..self.vertices.len() - 1 {
            let a = self.vertices[i] - o;
            let b = self.vertices[i + 1] - o;
            let w = a.cross(b);
            acc += (a + b) * w;
            area2 += w;
        }
        o + acc * (1.0 / (3.0 * area2))
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::MAX, f64::MAX);
        let mut hi = Point::new(f64::MIN, f64::MIN);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Reference length for tolerances.
    pub fn scale_length(&self) -> f64 {
        bbox_diag(&self.vertices)
    }

    /// Maximum pairwise vertex distance (the diameter of a convex polygon is
    /// attained at a vertex pair).
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    /// Largest inscribed disk as `(radius, center)`.
    ///
    /// Solves `max r s.t. n_e . c + r <= b_e` for every edge by bisection on
    /// `r`; feasibility of the shifted half-plane system is decided on the raw
    /// (uncleaned) clip so that thin feasible sets near the optimum survive.
    pub fn inradius_center(&self) -> (f64, Point) {
        let planes: Vec<(Point, f64)> = self
            .edges()
            .map(|(a, b)| {
                let e = b - a;
                let n = Point::new(e.y, -e.x) * (1.0 / e.norm());
                (n, n.dot(a))
            })
            .collect();
        let feasible = |r: f64| -> Option<Point> {
            let mut ring = self.vertices.clone();
            for &(n, b) in &planes {
                if ring.is_empty() {
                    return None;
                }
                let vals: Vec<f64> = ring.iter().map(|p| b - r - n.dot(*p)).collect();
                ring = clip_by_values(&ring, &vals);
            }
            if ring.is_empty() {
                return None;
            }
            let mut c = Point::default();
            for p in &ring {
                c += *p;
            }
            Some(c * (1.0 / ring.len() as f64))
        };
        let mut lo = 0.0;
        let mut hi = 0.5 * self.diameter();
        let mut center = self.centroid();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match feasible(mid) {
                Some(c) => {
                    lo = mid;
                    center = c;
                }
                None => hi = mid,
            }
        }
        (lo, center)
    }

    pub fn inradius(&self) -> f64 {
        self.inradius_center().0
    }

    /// Point containment with a relative boundary tolerance.
    pub fn contains(&self, p: Point) -> bool {
        let tol = 1e-12 * self.scale_length();
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    /// Strict interior containment (distance to the boundary above the
    /// tolerance).
    pub fn contains_strict(&self, p: Point) -> bool {
        let tol = 1e-12 * self.scale_length();
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) > tol * e.norm()
        })
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance_to_point(&self, p: Point) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        self.boundary_distance(p)
    }

    /// Distance from `p` to the boundary curve.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance between two convex polygons (0 when they touch or overlap).
    pub fn distance_to(&self, other: &Polygon) -> f64 {
        for (a, b) in self.edges() {
            for (c, d) in other.edges() {
                if segments_intersect(a, b, c, d) {
                    return 0.0;
                }
            }
        }
        if self.contains(other.vertices[0]) || other.contains(self.vertices[0]) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for &p in &self.vertices {
            best = best.min(other.boundary_distance(p));
        }
        for &p in &other.vertices {
            best = best.min(self.boundary_distance(p));
        }
        best
    }

    /// Intersection with the half-plane `{x : normal . x <= offset}`.
    /// `None` when the intersection has zero area.
    pub fn clip_halfplane(&self, normal: Point, offset: f64) -> Option<Polygon> {
        let vals: Vec<f64> = self
            .vertices
            .iter()
            .map(|p| offset - normal.dot(*p))
            .collect();
        if vals.iter().all(|&v| v >= 0.0) {
            return Some(self.clone());
        }
        Polygon::from_clip(clip_by_values(&self.vertices, &vals), self.scale_length())
    }

    /// Convex intersection by clipping `self` against every edge of `other`.
    pub fn intersect(&self, other: &Polygon) -> Option<Polygon> {
        let scale = self.scale_length().max(other.scale_length());
        let mut ring = self.vertices.clone();
        for (a, b) in other.edges() {
            let e = b - a;
            let vals: Vec<f64> = ring.iter().map(|p| e.cross(*p - a)).collect();
            if vals.iter().all(|&v| v >= 0.0) {
                continue;
            }
            ring = clip_by_values(&ring, &vals);
            if ring.len() < 3 {
                return None;
            }
        }
        Polygon::from_clip(ring, scale)
    }

    /// Area of the intersection (0 when empty).
    pub fn intersection_area(&self, other: &Polygon) -> f64 {
        self.intersect(other).map_or(0.0, |p| p.area())
    }

    /// Whether `self` lies inside `other` (all vertices contained, with the
    /// usual relative tolerance).
    pub fn is_inside(&self, other: &Polygon) -> bool {
        let tol = 1e-9 * other.scale_length();
        self.vertices
            .iter()
            .all(|p| other.contains(*p) || other.boundary_distance(*p) <= tol)
    }

    /// Scaling about the origin.
    pub fn scaled(&self, r: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| *p * r).collect(),
        }
    }

    /// Point reflection through the origin (orientation is preserved).
    pub fn reflected(&self) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| -*p).collect(),
        }
    }

    pub fn translated(&self, v: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| *p + v).collect(),
        }
    }

    /// Whether the vertex sets of `self` and `other` agree up to cyclic
    /// shift within `tol` (relative to the scale).
    pub fn approx_eq(&self, other: &Polygon, rel_tol: f64) -> bool {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        let tol = rel_tol * self.scale_length().max(other.scale_length());
        (0..n).any(|shift| {
            (0..n).all(|i| self.vertices[i].dist(other.vertices[(i + shift) % n]) <= tol)
        })
    }

    /// Point on the boundary at arclength fraction `t` in `[0, 1)`.
    pub fn boundary_point(&self, t: f64) -> Point {
        let total = self.perimeter();
        let mut target = t.rem_euclid(1.0) * total;
        for (a, b) in self.edges() {
            let len = a.dist(b);
            if target <= len {
                return a.lerp(b, if len > 0.0 { target / len } else { 0.0 });
            }
            target -= len;
        }
        self.vertices[0]
    }

    /// `(min, max)` of `dir . x` over the polygon.
    pub fn projection_range(&self, dir: Point) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.vertices {
            let t = dir.dot(*p);
            lo = lo.min(t);
            hi = hi.max(t);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sq() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    fn tri345() -> Polygon {
        Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(0.0, 4.0),
        ])
        .unwrap()
    }

    #[test]
    fn area_diameter_inradius_basics() {
        assert_relative_eq!(sq().area(), 1.0);
        assert_relative_eq!(tri345().area(), 6.0);
        assert_relative_eq!(sq().diameter(), 2f64.sqrt());
        assert_relative_eq!(tri345().diameter(), 5.0);
        assert_relative_eq!(sq().inradius(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(tri345().inradius(), 1.0, max_relative = 1e-12);
        let (_, c) = tri345().inradius_center();
        assert!(c.dist(Point::new(1.0, 1.0)) < 1e-6);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn collinear_and_duplicate_vertices_merge() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn rejects_nonconvex_and_degenerate() {
        assert!(Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.2),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ])
        .is_err());
        assert!(Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ])
        .is_err());
        assert!(Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).is_err());
        // pentagram: every turn is left but it winds twice
        let star: Vec<Point> = (0..5)
            .map(|i| {
                let t = std::f64::consts::TAU * (2 * i) as f64 / 5.0;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        assert!(Polygon::new(star).is_err());
    }

    #[test]
    fn clip_examples() {
        let s = sq();
        let half = s.clip_halfplane(Point::new(1.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(half.area(), 0.5, max_relative = 1e-15);
        let same = s.clip_halfplane(Point::new(1.0, 0.0), 2.0).unwrap();
        assert_eq!(same, s);
        assert!(s.clip_halfplane(Point::new(1.0, 0.0), -1.0).is_none());
        // a clip exactly along an edge leaves nothing of positive area
        assert!(s.clip_halfplane(Point::new(1.0, 0.0), 0.0).is_none());
    }

    #[test]
    fn intersect_examples() {
        let s = sq();
        assert_relative_eq!(s.intersect(&s).unwrap().area(), 1.0, max_relative = 1e-15);
        let shifted = Polygon::rectangle(0.5, 0.0, 1.5, 1.0).unwrap();
        assert_relative_eq!(
            s.intersect(&shifted).unwrap().area(),
            0.5,
            max_relative = 1e-15
        );
        let far = Polygon::rectangle(2.0, 2.0, 3.0, 3.0).unwrap();
        assert!(s.intersect(&far).is_none());
        let touching = Polygon::rectangle(1.0, 0.0, 2.0, 1.0).unwrap();
        assert!(s.intersect(&touching).is_none());
    }

    #[test]
    fn distances() {
        let s = sq();
        let far = Polygon::rectangle(2.0, 0.0, 3.0, 1.0).unwrap();
        assert_relative_eq!(s.distance_to(&far), 1.0);
        let diag = Polygon::rectangle(2.0, 2.0, 3.0, 3.0).unwrap();
        assert_relative_eq!(s.distance_to(&diag), 2f64.sqrt());
        let overlapping = Polygon::rectangle(0.5, 0.5, 3.0, 3.0).unwrap();
        assert_eq!(s.distance_to(&overlapping), 0.0);
        let inner = Polygon::rectangle(0.25, 0.25, 0.75, 0.75).unwrap();
        assert_eq!(s.distance_to(&inner), 0.0);
        assert_relative_eq!(s.distance_to_point(Point::new(2.0, 0.5)), 1.0);
        assert_eq!(s.distance_to_point(Point::new(0.5, 0.5)), 0.0);
    }

    #[test]
    fn hull_and_regular() {
        let hull = Polygon::convex_hull(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.5),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(hull.len(), 4);
        let hex = Polygon::regular(6, Point::default(), 1.0, 0.0).unwrap();
        assert_relative_eq!(hex.area(), 1.5 * 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(hex.diameter(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn reflect_triangle() {
        let t = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let r = t.reflected();
        let expect = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
        ])
        .unwrap();
        assert!(r.approx_eq(&expect, 1e-15));
        let sym = Polygon::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap();
        assert!(sym.reflected().approx_eq(&sym, 1e-15));
    }
}
