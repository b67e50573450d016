use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::delaunay::orient;
use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{clip_by_values, Point, Polygon};

/// Which part of a field an integral is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    /// `f` itself.
    Whole,
    /// `f_+ = max(f, 0)`, supported on `{f >= 0}`.
    Positive,
    /// `f_- = max(-f, 0)`, supported on `{f <= 0}`.
    Negative,
}

/// Exact integrals of a P1 field (or one of its parts) over a region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    /// Area of the support (`{f >= 0}` for the positive part).
    pub area: f64,
    pub integral: f64,
    pub integral_sq: f64,
    pub gradient_l1: f64,
    pub gradient_sq: f64,
}

impl std::ops::AddAssign for FieldMoments {
    fn add_assign(&mut self, o: Self) {
        self.area += o.area;
        self.integral += o.integral;
        self.integral_sq += o.integral_sq;
        self.gradient_l1 += o.gradient_l1;
        self.gradient_sq += o.gradient_sq;
    }
}

/// Nodal values of a continuous piecewise-linear function.
#[derive(Clone, Debug)]
pub struct P1Field {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

/// Moments of an affine function `g` over the convex polygon `q`.
fn polygon_moments(q: &[Point], g: impl Fn(Point) -> f64, grad: Point) -> FieldMoments {
    let mut m = FieldMoments::default();
    if q.len() < 3 {
        return m;
    }
    let g0 = g(q[0]);
    for w in q[1..].windows(2) {
        let area = 0.5 * orient(q[0], w[0], w[1]);
        let (g1, g2) = (g(w[0]), g(w[1]));
        m.area += area;
        m.integral += area * (g0 + g1 + g2) / 3.0;
        m.integral_sq += area / 6.0 * (g0 * g0 + g1 * g1 + g2 * g2 + g0 * g1 + g1 * g2 + g2 * g0);
    }
    let gn = grad.norm();
    m.gradient_l1 = gn * m.area;
    m.gradient_sq = gn * gn * m.area;
    m
}

fn clip_to(q: Vec<Point>, region: &Polygon) -> Vec<Point> {
    let mut q = q;
    for (a, b) in region.edges() {
        if q.len() < 3 {
            break;
        }
        let vals: Vec<f64> = q.iter().map(|&p| (b - a).cross(p - a)).collect();
        if vals.iter().all(|&v| v >= 0.0) {
            continue;
        }
        q = clip_by_values(&q, &vals);
    }
    q
}

impl P1Field {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a mesh with {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite nodal value".into()));
        }
        Ok(Self { mesh, values })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = mesh.vertices().iter().map(|&p| f(p)).collect();
        Self::new(mesh, values)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.mesh.clone(), values)
    }

    /// `f - c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| v - c).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `sum_i coeffs[i] * fields[i]`; all fields must share one mesh.
    pub fn combination(fields: &[P1Field], coeffs: &[f64]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        if fields.len() != coeffs.len() {
            return Err(Error::InvalidArgument("coefficient count mismatch".into()));
        }
        if fields.iter().any(|f| !Arc::ptr_eq(&f.mesh, &first.mesh)) {
            return Err(Error::InvalidArgument(
                "fields live on different meshes".into(),
            ));
        }
        let mut values = vec![0.0; first.values.len()];
        for (f, &c) in fields.iter().zip(coeffs) {
            for (v, x) in values.iter_mut().zip(&f.values) {
                *v += c * x;
            }
        }
        Self::new(first.mesh.clone(), values)
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, t: usize) -> Point {
        let tri = self.mesh.triangles()[t];
        let [a, b, c] = self.mesh.corners(t);
        let [fa, fb, fc] = tri.map(|i| self.values[i]);
        let (e1, e2) = (b - a, c - a);
        let det = e1.cross(e2);
        let (d1, d2) = (fb - fa, fc - fa);
        Point::new((d1 * e2.y - d2 * e1.y) / det, (d2 * e1.x - d1 * e2.x) / det)
    }

    /// Value at `p`, or `None` outside the mesh.
    pub fn eval(&self, p: Point) -> Option<f64> {
        let scale = self.mesh.h().max(f64::MIN_POSITIVE);
        (0..self.mesh.n_triangles()).find_map(|t| {
            let [a, b, c] = self.mesh.corners(t);
            let tol = -1e-12 * scale * scale;
            (orient(a, b, p) >= tol && orient(b, c, p) >= tol && orient(c, a, p) >= tol).then(
                || {
                    let fa = self.values[self.mesh.triangles()[t][0]];
                    fa + self.gradient(t).dot(p - a)
                },
            )
        })
    }

    /// Exact moments of `part` of the field, optionally restricted to a
    /// convex region.
    pub fn moments(&self, region: Option<&Polygon>, part: Part) -> FieldMoments {
        let sign = match part {
            Part::Negative => -1.0,
            _ => 1.0,
        };
        let rbox = region.map(Polygon::bbox);
        let mut total = FieldMoments::default();
        for t in 0..self.mesh.n_triangles() {
            let corners = self.mesh.corners(t);
            if let Some((lo, hi)) = rbox {
                if corners.iter().all(|p| p.x < lo.x)
                    || corners.iter().all(|p| p.x > hi.x)
                    || corners.iter().all(|p| p.y < lo.y)
                    || corners.iter().all(|p| p.y > hi.y)
                {
                    continue;
                }
            }
            let vals = self.mesh.triangles()[t].map(|i| sign * self.values[i]);
            let grad = self.gradient(t) * sign;
            let a = corners[0];
            let g = |p: Point| vals[0] + grad.dot(p - a);
            let mut q = corners.to_vec();
            if part != Part::Whole {
                if vals.iter().all(|&v| v < 0.0) {
                    continue;
                }
                if vals.iter().any(|&v| v < 0.0) {
                    q = clip_by_values(&q, &vals);
                }
            }
            if let Some(r) = region {
                q = clip_to(q, r);
            }
            total += polygon_moments(&q, g, grad);
        }
        total
    }

    pub fn integrate(&self) -> f64 {
        self.moments(None, Part::Whole).integral
    }

    pub fn integrate_abs(&self) -> f64 {
        self.moments(None, Part::Positive).integral + self.moments(None, Part::Negative).integral
    }

    pub fn integrate_sq(&self) -> f64 {
        self.moments(None, Part::Whole).integral_sq
    }

    pub fn gradient_l1(&self) -> f64 {
        self.moments(None, Part::Whole).gradient_l1
    }

    /// `int |grad f|^2`.
    pub fn dirichlet_energy(&self) -> f64 {
        self.moments(None, Part::Whole).gradient_sq
    }

    pub fn rayleigh_quotient(&self) -> f64 {
        let m = self.moments(None, Part::Whole);
        m.gradient_sq / m.integral_sq
    }

    /// Area of `{f >= 0}`.
    pub fn positive_measure(&self) -> f64 {
        self.moments(None, Part::Positive).area
    }

    /// Area of the triangles on which `f` vanishes identically; every other
    /// zero set has measure zero.
    pub fn zero_measure(&self) -> f64 {
        (0..self.mesh.n_triangles())
            .filter(|&t| {
                self.mesh.triangles()[t]
                    .iter()
                    .all(|&i| self.values[i] == 0.0)
            })
            .map(|t| self.mesh.triangle_area(t))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square_mesh(h: f64) -> Arc<Mesh> {
        let p = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        Arc::new(Mesh::triangulate(&p, h, 4).unwrap())
    }

    #[test]
    fn constants_and_linear_fields() {
        let m = square_mesh(0.1);
        let one = P1Field::interpolate(m.clone(), |_| 1.0).unwrap();
        assert_relative_eq!(one.integrate(), 1.0, max_relative = 1e-12);
        let x = P1Field::interpolate(m.clone(), |p| p.x).unwrap();
        assert_relative_eq!(x.gradient_l1(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(x.integrate(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(x.integrate_sq(), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(x.shifted(0.5).positive_measure(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(x.shifted(0.5).integrate_abs(), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn parts_on_a_region() {
        let m = square_mesh(0.1);
        let f = P1Field::interpolate(m, |p| p.x - 0.5).unwrap();
        let left = Polygon::rectangle(0.0, 0.0, 0.5, 1.0).unwrap();
        let pos = f.moments(Some(&left), Part::Positive);
        assert!(pos.area < 1e-12);
        let neg = f.moments(Some(&left), Part::Negative);
        assert_relative_eq!(neg.area, 0.5, max_relative = 1e-12);
        // int_0^{1/2} (1/2 - x) dx = 1/8, int (1/2 - x)^2 = 1/24
        assert_relative_eq!(neg.integral, 0.125, max_relative = 1e-12);
        assert_relative_eq!(neg.integral_sq, 1.0 / 24.0, max_relative = 1e-12);
        assert_relative_eq!(neg.gradient_sq, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn level_set_consistency() {
        let m = square_mesh(0.2);
        let f = P1Field::interpolate(m.clone(), |p| (p.x * 7.0).sin() - p.y).unwrap();
        let total = f.positive_measure() + f.scaled(-1.0).positive_measure() - f.zero_measure();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        let z = P1Field::interpolate(m, |_| 0.0).unwrap();
        assert_relative_eq!(z.zero_measure(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn refine_preserves_integrals() {
        let p = Polygon::regular(6, Point::new(0.0, 0.0), 1.0, 0.1).unwrap();
        let m = Mesh::triangulate(&p, 0.25, 9).unwrap();
        let r = m.refine_with_map();
        let f = P1Field::interpolate(Arc::new(m), |p| p.x * p.x - 0.3 * p.y).unwrap();
        let g = P1Field::new(Arc::new(r.mesh.clone()), r.prolongate(f.values())).unwrap();
        assert!((f.integrate() - g.integrate()).abs() < 1e-12);
        assert!((f.positive_measure() - g.positive_measure()).abs() < 1e-12);
        assert!((f.gradient_l1() - g.gradient_l1()).abs() < 1e-12);
    }

    #[test]
    fn eval_and_combination() {
        let m = square_mesh(0.25);
        let x = P1Field::interpolate(m.clone(), |p| p.x).unwrap();
        let y = P1Field::interpolate(m, |p| p.y).unwrap();
        let s = P1Field::combination(&[x, y], &[2.0, -1.0]).unwrap();
        assert_relative_eq!(s.eval(Point::new(0.3, 0.6)).unwrap(), 0.0, epsilon = 1e-12);
        assert!(s.eval(Point::new(2.0, 0.0)).is_none());
    }

    #[test]
    fn rejects_bad_values() {
        let m = square_mesh(0.5);
        assert!(P1Field::new(m.clone(), vec![0.0]).is_err());
        let mut v = vec![0.0; m.n_vertices()];
        v[0] = f64::NAN;
        assert!(P1Field::new(m, v).is_err());
    }
}
