//! Triangle meshes of convex polygons and piecewise-linear fields on them.

mod delaunay;
mod field;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};

pub use field::{FieldMoments, P1Field, Part};

pub(crate) use delaunay::orient;

/// Smallest admissible triangle angle, in degrees.
pub const MIN_ANGLE_DEG: f64 = 15.0;

/// Interior grid points closer than this multiple of `h` to the boundary are
/// dropped.
const BOUNDARY_CLEARANCE: f64 = 0.5;

/// Relative jitter applied to the interior grid.
const JITTER: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    h: f64,
    requested_h: f64,
    seed: u64,
}

/// A refined mesh together with the parents of every new vertex.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub mesh: Mesh,
    /// New vertex `n_old + i` is the midpoint of `midpoints[i]`.
    pub midpoints: Vec<(usize, usize)>,
}

impl Refinement {
    /// Piecewise-linear interpolation of coarse nodal values.
    pub fn prolongate(&self, coarse: &[f64]) -> Vec<f64> {
        let mut out = coarse.to_vec();
        out.extend(
            self.midpoints
                .iter()
                .map(|&(a, b)| 0.5 * (coarse[a] + coarse[b])),
        );
        out
    }
}

fn boundary_points(poly: &Polygon, h: f64) -> Vec<Point> {
    let mut pts = Vec::new();
    for (a, b) in poly.edges() {
        let segs = (a.dist(b) / h).ceil().max(1.0) as usize;
        for s in 0..segs {
            pts.push(a.lerp(b, s as f64 / segs as f64));
        }
    }
    pts
}

fn interior_points(poly: &Polygon, h: f64, seed: u64) -> Vec<Point> {
    let (lo, hi) = poly.bbox();
    let nx = ((hi.x - lo.x) / h).ceil() as usize;
    let ny = ((hi.y - lo.y) / h).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            // draw unconditionally so the jitter of a point does not depend
            // on which of its predecessors were kept
            let jx = rng.random_range(-JITTER..JITTER) * h;
            let jy = rng.random_range(-JITTER..JITTER) * h;
            let p = Point::new(lo.x + i as f64 * h + jx, lo.y + j as f64 * h + jy);
            if poly.contains_strict(p) && poly.boundary_distance(p) >= BOUNDARY_CLEARANCE * h {
                pts.push(p);
            }
        }
    }
    pts
}

fn angles_deg(a: Point, b: Point, c: Point) -> [f64; 3] {
    let ang = |p: Point, q: Point, r: Point| {
        let (u, v) = (q - p, r - p);
        u.cross(v).abs().atan2(u.dot(v)).to_degrees()
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

impl Mesh {
    /// Jittered structured grid plus boundary samples, Delaunay-triangulated.
    ///
    /// If `h` is too coarse to place any interior vertex it is halved until
    /// one fits; if the result violates the minimum angle, `h` is halved once
    /// more before giving up. The effective spacing is `Mesh::h`.
    pub fn triangulate(poly: &Polygon, h: f64, seed: u64) -> Result<Mesh> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mesh size must be > 0, got {h}"
            )));
        }
        let mut eff = h;
        for _ in 0..60 {
            if !interior_points(poly, eff, seed).is_empty() {
                break;
            }
            eff *= 0.5;
        }
        match Self::build(poly, eff, h, seed) {
            Err(Error::MeshQuality(_)) => Self::build(poly, 0.5 * eff, h, seed),
            other => other,
        }
    }

    fn build(poly: &Polygon, h: f64, requested_h: f64, seed: u64) -> Result<Mesh> {
        let bnd = boundary_points(poly, h);
        let nb = bnd.len();
        let mut vertices = bnd;
        vertices.extend(interior_points(poly, h, seed));
        let triangles = delaunay::delaunay(&vertices)?;
        let mut boundary = vec![false; vertices.len()];
        boundary[..nb].iter_mut().for_each(|b| *b = true);
        let mesh = Mesh {
            vertices,
            triangles,
            boundary,
            h,
            requested_h,
            seed,
        };
        mesh.check_cover(poly)?;
        let min = mesh.min_angle_deg();
        if min < MIN_ANGLE_DEG {
            return Err(Error::MeshQuality(format!(
                "minimum angle {min:.2} deg below {MIN_ANGLE_DEG} deg at h = {h}"
            )));
        }
        Ok(mesh)
    }

    /// Builds a mesh from raw arrays, checking the structural invariants.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_vertices: &[usize],
        h: f64,
        seed: u64,
    ) -> Result<Mesh> {
        let n = vertices.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::InvalidArgument(format!(
                "triangle {t:?} out of range"
            )));
        }
        let mut boundary = vec![false; n];
        for &b in boundary_vertices {
            *boundary.get_mut(b).ok_or_else(|| {
                Error::InvalidArgument(format!("boundary index {b} out of range"))
            })? = true;
        }
        let mesh = Mesh {
            vertices,
            triangles,
            boundary,
            h,
            requested_h: h,
            seed,
        };
        mesh.check_orientation()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| self.boundary[i])
            .collect()
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Effective grid spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Spacing asked for by the caller (differs from `h` after automatic
    /// reduction).
    pub fn requested_h(&self) -> f64 {
        self.requested_h
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * orient(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .flat_map(|t| {
                let [a, b, c] = self.corners(t);
                angles_deg(a, b, c)
            })
            .fold(180.0, f64::min)
    }

    fn check_orientation(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if area.is_nan() || area <= 0.0 {
                return Err(Error::DegenerateTriangle { index: t, area });
            }
        }
        Ok(())
    }

    fn check_cover(&self, poly: &Polygon) -> Result<()> {
        self.check_orientation()?;
        let (area, target) = (self.area(), poly.area());
        if (area - target).abs() > 1e-6 * target {
            return Err(Error::MeshQuality(format!(
                "triangles cover area {area}, polygon area is {target}"
            )));
        }
        Ok(())
    }

    /// Checks every mesh invariant against the polygon it was built on.
    pub fn validate(&self, poly: &Polygon) -> Result<()> {
        self.check_cover(poly)?;
        let tol = 1e-9 * poly.scale_length();
        for (i, &p) in self.vertices.iter().enumerate() {
            let on = poly.boundary_distance(p) < tol;
            if on != self.boundary[i] {
                return Err(Error::MeshQuality(format!(
                    "vertex {i} boundary flag {} disagrees with its position",
                    self.boundary[i]
                )));
            }
        }
        Ok(())
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refine(&self) -> Mesh {
        self.refine_with_map().mesh
    }

    pub fn refine_with_map(&self) -> Refinement {
        let n = self.vertices.len();
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut vertices = self.vertices.clone();
        let mut boundary = self.boundary.clone();
        let mut midpoints = Vec::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let mut mid = [0usize; 3];
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[i] = *index.entry(key).or_insert_with(|| {
                    vertices.push(self.vertices[a].lerp(self.vertices[b], 0.5));
                    // an edge on the boundary belongs to exactly one triangle
                    boundary.push(self.boundary[a] && self.boundary[b] && edge_count[&key] == 1);
                    midpoints.push(key);
                    n + midpoints.len() - 1
                });
            }
            let [a, b, c] = *t;
            let [ab, bc, ca] = mid;
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Refinement {
            mesh: Mesh {
                vertices,
                triangles,
                boundary,
                h: 0.5 * self.h,
                requested_h: 0.5 * self.requested_h,
                seed: self.seed,
            },
            midpoints,
        }
    }

    /// Text dump with `VERTICES`, `TRIANGLES` and `BOUNDARY` sections.
    pub fn to_text(&self) -> String {
        let mut s = format!("# h {:?} seed {}\n", self.h, self.seed);
        let _ = writeln!(s, "VERTICES {}", self.vertices.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", p.x, p.y);
        }
        let _ = writeln!(s, "TRIANGLES {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let b = self.boundary_vertices();
        let _ = writeln!(s, "BOUNDARY {}", b.len());
        let line: Vec<String> = b.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", line.join(" "));
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut h = f64::NAN;
        let mut seed = 0;
        let mut section = "";
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut boundary = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let l = raw.trim();
            let perr = |msg: String| Error::Parse { line, msg };
            if let Some(rest) = l.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if let ["h", hv, "seed", sv] = toks[..] {
                    h = hv.parse().map_err(|_| perr(format!("bad h {hv:?}")))?;
                    seed = sv.parse().map_err(|_| perr(format!("bad seed {sv:?}")))?;
                }
                continue;
            }
            if l.is_empty() {
                continue;
            }
            let mut toks = l.split_whitespace();
            let head = toks.next().unwrap_or_default();
            if matches!(head, "VERTICES" | "TRIANGLES" | "BOUNDARY") {
                section = head;
                continue;
            }
            match section {
                "VERTICES" => {
                    let c: Vec<f64> = l
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| perr(format!("{e}")))?;
                    let [x, y] = c[..] else {
                        return Err(perr("expected two coordinates".into()));
                    };
                    vertices.push(Point::new(x, y));
                }
                "TRIANGLES" => {
                    let c: Vec<usize> = l
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| perr(format!("{e}")))?;
                    let [a, b, c] = c[..] else {
                        return Err(perr("expected three indices".into()));
                    };
                    triangles.push([a, b, c]);
                }
                "BOUNDARY" => {
                    for t in l.split_whitespace() {
                        boundary.push(t.parse().map_err(|e| perr(format!("{e}")))?);
                    }
                }
                _ => return Err(perr("data before the first section".into())),
            }
        }
        Mesh::from_parts(vertices, triangles, &boundary, h, seed)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Free-function form of [`Mesh::triangulate`].
pub fn triangulate(poly: &Polygon, h: f64, seed: u64) -> Result<Mesh> {
    Mesh::triangulate(poly, h, seed)
}

pub fn refine(mesh: &Mesh) -> Mesh {
    mesh.refine()
}
