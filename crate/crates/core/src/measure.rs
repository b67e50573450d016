//! Seeded Monte Carlo and exact-clipping measure computations.
//!
//! Sampling is split into fixed-size chunks. Chunk `j` of stream `s` draws
//! from its own ChaCha8 stream, so results do not depend on how many worker
//! threads evaluate the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point, Polygon};

/// Minimum sample count accepted by [`mc_measure`].
pub const MIN_SAMPLES: usize = 1_000;

/// Samples per chunk.
pub const CHUNK: usize = 1 << 16;

/// Rejection sampling aborts below this acceptance rate.
pub const MIN_EFFICIENCY: f64 = 0.01;

/// Symmetry tolerance for the inner body of the Guédon check.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Generator for chunk `chunk` of logical stream `stream`.
pub fn stream_rng(seed: u64, stream: u32, chunk: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 32) | chunk as u64);
    rng
}

/// A measurable set given as a membership predicate.
#[derive(Clone, Debug)]
pub enum Region {
    Body(ConvexBody),
    /// `{x : normal . x <= offset}`.
    HalfPlane {
        normal: Point,
        offset: f64,
    },
    /// Closed Euclidean ball in any dimension.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Intersection(Vec<Region>),
    Difference(Box<Region>, Box<Region>),
}

impl Region {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Body(b) => b.contains(p),
            Region::HalfPlane { normal, offset } => {
                p.len() == 2 && normal.x * p[0] + normal.y * p[1] <= *offset
            }
            Region::Ball { center, radius } => {
                p.len() == center.len()
                    && p.iter()
                        .zip(center)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        <= radius * radius
            }
            Region::Intersection(parts) => parts.iter().all(|r| r.contains(p)),
            Region::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    pub fn difference(self, other: Region) -> Region {
        Region::Difference(Box::new(self), Box::new(other))
    }
}

impl From<ConvexBody> for Region {
    fn from(b: ConvexBody) -> Self {
        Region::Body(b)
    }
}

/// Normalized measure estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_count(hits: usize, samples: usize, seed: u64) -> Self {
        let value = hits as f64 / samples as f64;
        Self {
            value,
            stderr: (value * (1.0 - value) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// A noiseless value (exact clipping).
    pub fn exact(value: f64, seed: u64) -> Self {
        Self {
            value,
            stderr: 0.0,
            samples: 0,
            seed,
        }
    }
}

/// Axis-aligned bounding box of a body in its own dimension.
pub fn bounding_box(body: &ConvexBody) -> Result<(Vec<f64>, Vec<f64>)> {
    match body {
        ConvexBody::Box(b) => Ok((
            b.lower.clone(),
            b.lower
                .iter()
                .zip(&b.lengths)
                .map(|(lo, l)| lo + l)
                .collect(),
        )),
        other => {
            let (lo, hi) = other.bbox2()?;
            Ok((vec![lo.x, lo.y], vec![hi.x, hi.y]))
        }
    }
}

/// Fraction of uniform samples of `ambient` that fall in `region`.
pub fn mc_measure(
    region: &Region,
    ambient: &ConvexBody,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    mc_measure_stream(region, ambient, samples, seed, 0)
}

/// [`mc_measure`] on logical stream `stream`.
pub fn mc_measure_stream(
    region: &Region,
    ambient: &ConvexBody,
    samples: usize,
    seed: u64,
    stream: u32,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let (lo, hi) = bounding_box(ambient)?;
    let chunks = samples.div_ceil(CHUNK);
    let counts: Vec<Result<usize>> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let quota = CHUNK.min(samples - j * CHUNK);
            let mut rng = stream_rng(seed, stream, j as u32);
            let cap = (quota as f64 / MIN_EFFICIENCY) as usize + 1000;
            let mut p = vec![0.0; lo.len()];
            let (mut accepted, mut hits, mut attempts) = (0, 0, 0);
            while accepted < quota {
                if attempts >= cap {
                    return Err(Error::LowEfficiency {
                        efficiency: accepted as f64 / attempts as f64,
                    });
                }
                attempts += 1;
                for (x, (a, b)) in p.iter_mut().zip(lo.iter().zip(&hi)) {
                    *x = a + (b - a) * rng.random::<f64>();
                }
                if ambient.contains(&p) {
                    accepted += 1;
                    hits += region.contains(&p) as usize;
                }
            }
            Ok(hits)
        })
        .collect();
    let mut hits = 0;
    for c in counts {
        hits += c?;
    }
    Ok(McEstimate::from_count(hits, samples, seed))
}

/// `count` uniform points of a body (by rejection from its bounding box) on
/// logical stream `stream`.
pub fn uniform_points(
    body: &ConvexBody,
    count: usize,
    seed: u64,
    stream: u32,
) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = bounding_box(body)?;
    let mut rng = stream_rng(seed, stream, 0);
    let cap = (count as f64 / MIN_EFFICIENCY) as usize + 1000;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= cap {
            return Err(Error::LowEfficiency {
                efficiency: out.len() as f64 / attempts as f64,
            });
        }
        attempts += 1;
        let p: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| a + (b - a) * rng.random::<f64>())
            .collect();
        if body.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// One line of a check report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
    pub pass: bool,
    pub seed: u64,
}

impl CheckReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Whether `inner` lies inside `outer` (planar bodies and boxes).
pub fn body_inside(inner: &ConvexBody, outer: &ConvexBody) -> Result<bool> {
    let tol = 1e-9 * outer.diameter();
    match (inner, outer) {
        (ConvexBody::Box(a), ConvexBody::Box(b)) if a.dim() != 2 || b.dim() != 2 => Ok(a.dim()
            == b.dim()
            && (0..a.dim()).all(|i| {
                a.lower[i] >= b.lower[i] - tol
                    && a.lower[i] + a.lengths[i] <= b.lower[i] + b.lengths[i] + tol
            })),
        (ConvexBody::Disk(a), ConvexBody::Disk(b)) => {
            Ok(a.center.dist(b.center) + a.radius <= b.radius + tol)
        }
        (ConvexBody::Disk(a), other) => {
            let p = other.to_polygon()?;
            Ok(p.contains(a.center) && p.boundary_distance(a.center) >= a.radius - tol)
        }
        (other, ConvexBody::Disk(b)) => {
            let p = other.to_polygon()?;
            Ok(p.vertices()
                .iter()
                .all(|v| v.dist(b.center) <= b.radius + tol))
        }
        (a, b) => Ok(a.to_polygon()?.is_inside(&b.to_polygon()?)),
    }
}

/// Checks `mu(outer \ r inner) <= (1 - mu(inner))^((r + 1) / 2)` with `mu`
/// normalized on `outer`. Polygon pairs are measured exactly; anything
/// involving a disk or a higher-dimensional box is sampled.
pub fn guedon_check(
    inner: &ConvexBody,
    outer: &ConvexBody,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be >= 1, got {r}")));
    }
    if !inner.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Precondition(
            "inner body is not centrally symmetric".into(),
        ));
    }
    if !body_inside(inner, outer)? {
        return Err(Error::Precondition(
            "inner body is not contained in the outer body".into(),
        ));
    }
    let scaled = inner.scale(r)?;
    let (lhs, mu_inner) = match (inner.as_exact_polygon(), outer.as_exact_polygon()) {
        (Some(pi), Some(po)) if inner.dim() == 2 && outer.dim() == 2 => {
            let area = po.area();
            let covered = po.intersection_area(&pi.scaled(r));
            (
                McEstimate::exact(((area - covered) / area).max(0.0), seed),
                McEstimate::exact(pi.area() / area, seed),
            )
        }
        _ => (
            mc_measure_stream(
                &Region::Body(outer.clone()).difference(Region::Body(scaled)),
                outer,
                samples,
                seed,
                0,
            )?,
            mc_measure_stream(&Region::Body(inner.clone()), outer, samples, seed, 1)?,
        ),
    };
    let rhs = (1.0 - mu_inner.value).powf(0.5 * (r + 1.0));
    let stderr = lhs.stderr.max(mu_inner.stderr);
    Ok(CheckReport {
        check: "guedon".into(),
        inputs: json!({ "inner": inner, "outer": outer, "r": r, "samples": lhs.samples }),
        lhs: lhs.value,
        rhs,
        stderr,
        pass: lhs.value <= rhs + 3.0 * stderr,
        seed,
    })
}

/// `area(P' ∩ -P') / area(P)` for `P' = P - c`.
pub fn symmetric_overlap(poly: &Polygon, c: Point) -> f64 {
    // (P - c) ∩ (c - P) is a translate of P ∩ (2c - P)
    let mirrored = poly.reflected().translated(c * 2.0);
    poly.intersection_area(&mirrored) / poly.area()
}

/// Translation maximizing the symmetric overlap: a `grid x grid` search over
/// the bounding box followed by `refinements` rounds of compass search.
pub fn stein_center(poly: &Polygon, grid: usize, refinements: usize) -> (Point, f64) {
    let (lo, hi) = poly.bbox();
    let g = grid.max(1);
    let mut best = (poly.centroid(), symmetric_overlap(poly, poly.centroid()));
    for i in 0..g {
        for j in 0..g {
            let c = Point::new(
                lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / g as f64,
                lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / g as f64,
            );
            if !poly.contains(c) {
                continue;
            }
            let v = symmetric_overlap(poly, c);
            if v > best.1 {
                best = (c, v);
            }
        }
    }
    let mut step = (hi.x - lo.x).max(hi.y - lo.y) / g as f64;
    let dirs = [
        Point::new(1.0, 0.0),
        Point::new(-1.0, 0.0),
        Point::new(0.0, 1.0),
        Point::new(0.0, -1.0),
    ];
    for _ in 0..refinements {
        let mut moved = true;
        while moved {
            moved = false;
            for d in dirs {
                let c = best.0 + d * step;
                let v = symmetric_overlap(poly, c);
                if v > best.1 {
                    best = (c, v);
                    moved = true;
                }
            }
        }
        step *= 0.5;
    }
    best
}

/// Checks `mu(B(x, R) ∩ body) >= min(1, (R / diam)^n)`.
pub fn bishop_gromov_check(
    body: &ConvexBody,
    x: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be > 0, got {radius}"
        )));
    }
    if !body.contains(x) {
        return Err(Error::Precondition(
            "ball center lies outside the body".into(),
        ));
    }
    let ball = Region::Ball {
        center: x.to_vec(),
        radius,
    };
    let est = mc_measure(&ball, body, samples, seed)?;
    let rhs = (radius / body.diameter()).powi(body.dim() as i32).min(1.0);
    Ok(CheckReport {
        check: "bishop_gromov".into(),
        inputs: json!({ "body": body, "x": x, "radius": radius, "samples": samples }),
        lhs: est.value,
        rhs,
        stderr: est.stderr,
        pass: est.value >= rhs - 3.0 * est.stderr,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxNd, Disk};
    use std::f64::consts::PI;

    fn square(a: f64) -> ConvexBody {
        Polygon::rectangle(-a, -a, a, a).unwrap().into()
    }

    #[test]
    fn ambient_region_is_exactly_one() {
        let sq = square(1.0);
        let e = mc_measure(&Region::Body(sq.clone()), &sq, 5_000, 3).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn half_plane_and_quarter_disk() {
        let unit: ConvexBody = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let half = Region::HalfPlane {
            normal: Point::new(1.0, 0.0),
            offset: 0.5,
        };
        let e = mc_measure(&half, &unit, 1_000_000, 11).unwrap();
        assert!((e.value - 0.5).abs() <= 3.0 * e.stderr, "{e:?}");

        let disk = Region::Body(Disk::new(Point::default(), 1.0).unwrap().into());
        let e = mc_measure(&disk, &square(1.0), 200_000, 5).unwrap();
        assert!((e.value - PI / 4.0).abs() <= 3.0 * e.stderr, "{e:?}");
        let s = (e.value * (1.0 - e.value) / e.samples as f64).sqrt();
        assert!((e.stderr - s).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_chunked() {
        let disk = Region::Body(Disk::new(Point::default(), 0.7).unwrap().into());
        let a = mc_measure(&disk, &square(1.0), 150_000, 9).unwrap();
        let b = mc_measure(&disk, &square(1.0), 150_000, 9).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| mc_measure(&disk, &square(1.0), 150_000, 9).unwrap());
        assert_eq!(a, c);
        let d = mc_measure(&disk, &square(1.0), 150_000, 10).unwrap();
        assert_ne!(a.value, d.value);
    }

    #[test]
    fn low_efficiency_and_small_samples_rejected() {
        let needle: ConvexBody = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.999, 1.0),
        ])
        .unwrap()
        .into();
        assert!(matches!(
            mc_measure(&Region::Body(needle.clone()), &needle, 2_000, 0),
            Err(Error::LowEfficiency { .. })
        ));
        let sq = square(1.0);
        assert!(mc_measure(&Region::Body(sq.clone()), &sq, 999, 0).is_err());
    }

    #[test]
    fn uniform_points_stay_inside() {
        let d: ConvexBody = Disk::new(Point::new(1.0, 2.0), 0.5).unwrap().into();
        let pts = uniform_points(&d, 500, 1, 0).unwrap();
        assert_eq!(pts.len(), 500);
        assert!(pts.iter().all(|p| d.contains(p)));
        assert_eq!(pts, uniform_points(&d, 500, 1, 0).unwrap());
        assert_ne!(pts, uniform_points(&d, 500, 1, 1).unwrap());
    }

    #[test]
    fn guedon_examples() {
        let d1: ConvexBody = Disk::new(Point::default(), 1.0).unwrap().into();
        let d3: ConvexBody = Disk::new(Point::default(), 3.0).unwrap().into();
        let rep = guedon_check(&d1, &d3, 2.0, 200_000, 1).unwrap();
        assert!(rep.pass);
        assert!((rep.lhs - 5.0 / 9.0).abs() <= 4.0 * rep.stderr, "{rep:?}");
        assert!((rep.rhs - (8.0f64 / 9.0).powf(1.5)).abs() < 0.01);

        let rep = guedon_check(&d1, &d3, 1.0, 200_000, 2).unwrap();
        assert!((rep.lhs - rep.rhs).abs() <= 6.0 * rep.stderr, "{rep:?}");

        let rep = guedon_check(&square(0.5), &square(1.0), 2.0, 1_000, 0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.stderr, 0.0);
        assert!(rep.pass);
        let line = rep.to_json_line();
        for key in ["check", "inputs", "lhs", "rhs", "stderr", "pass", "seed"] {
            assert!(line.contains(&format!("\"{key}\"")));
        }
    }

    #[test]
    fn guedon_preconditions() {
        let off: ConvexBody = Disk::new(Point::new(0.1, 0.0), 1.0).unwrap().into();
        let d3: ConvexBody = Disk::new(Point::default(), 3.0).unwrap().into();
        assert!(guedon_check(&off, &d3, 2.0, 1_000, 0).is_err());
        assert!(guedon_check(&d3, &square(1.0), 2.0, 1_000, 0).is_err());
        assert!(guedon_check(&square(0.5), &d3, 0.5, 1_000, 0).is_err());
    }

    #[test]
    fn guedon_in_higher_dimension() {
        let inner: ConvexBody = BoxNd::centered(vec![1.0; 3]).unwrap().into();
        let outer: ConvexBody = BoxNd::centered(vec![2.0; 3]).unwrap().into();
        let rep = guedon_check(&inner, &outer, 1.5, 50_000, 4).unwrap();
        // 1 - (1.5 / 2)^3
        assert!((rep.lhs - (1.0 - 0.421875)).abs() <= 4.0 * rep.stderr);
        assert!(rep.pass);
    }

    /// Brute-force maximum over a fine grid of candidate centers.
    fn grid_oracle(poly: &Polygon, n: usize) -> f64 {
        let (lo, hi) = poly.bbox();
        let mut best: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let c = Point::new(
                    lo.x + (hi.x - lo.x) * i as f64 / n as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / n as f64,
                );
                best = best.max(symmetric_overlap(poly, c));
            }
        }
        best
    }

    #[test]
    fn stein_center_examples() {
        let hex = Polygon::regular(6, Point::new(0.3, -0.2), 1.0, 0.2).unwrap();
        let (c, v) = stein_center(&hex, 8, 20);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        assert!(c.dist(Point::new(0.3, -0.2)) < 1e-6);

        let tri = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.5, 1.5),
        ])
        .unwrap();
        let (c, v) = stein_center(&tri, 10, 20);
        assert!((v - 2.0 / 3.0).abs() < 1e-3, "{v}");
        assert!(c.dist(tri.centroid()) < 1e-3);
        assert!(v >= grid_oracle(&tri, 120) - 1e-9);
    }

    #[test]
    fn bishop_gromov_examples() {
        let unit: ConvexBody = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let rep = bishop_gromov_check(&unit, &[0.5, 0.5], 0.5, 100_000, 3).unwrap();
        assert!((rep.lhs - PI / 4.0).abs() <= 4.0 * rep.stderr);
        assert!((rep.rhs - 0.125).abs() < 1e-12);
        assert!(rep.pass);
        let rep = bishop_gromov_check(&unit, &[0.1, 0.9], 2.0, 1_000, 3).unwrap();
        assert_eq!(rep.lhs, 1.0);
        assert_eq!(rep.rhs, 1.0);
        assert!(rep.pass);
        assert!(bishop_gromov_check(&unit, &[2.0, 0.0], 0.5, 1_000, 3).is_err());
    }
}
