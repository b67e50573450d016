use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::Point;
use super::polygon::Polygon;
use crate::error::{Error, Result};

/// Default vertex count when a disk is replaced by an inscribed polygon.
pub const DISK_POLYGON_VERTICES: usize = 256;

/// Axis-aligned box `prod_i [lower_i, lower_i + lengths_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxNd {
    pub lower: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl BoxNd {
    pub fn new(lower: Vec<f64>, lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() || lower.len() != lengths.len() {
            return Err(Error::InvalidBody(format!(
                "box needs matching nonempty lower/lengths, got {} and {}",
                lower.len(),
                lengths.len()
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidBody("box side lengths must be > 0".into()));
        }
        if lower.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("non-finite box corner".into()));
        }
        Ok(Self { lower, lengths })
    }

    /// `[0, L_1] x ... x [0, L_n]`.
    pub fn from_lengths(lengths: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; lengths.len()], lengths)
    }

    /// Box centred at the origin.
    pub fn centered(lengths: Vec<f64>) -> Result<Self> {
        let lower = lengths.iter().map(|l| -0.5 * l).collect();
        Self::new(lower, lengths)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.lengths))
                .all(|(&x, (&lo, &l))| x >= lo && x <= lo + l)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidBody(format!(
                "disk radius must be > 0, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexBody {
    Polygon(Polygon),
    Box(BoxNd),
    Disk(Disk),
}

impl From<Polygon> for ConvexBody {
    fn from(p: Polygon) -> Self {
        ConvexBody::Polygon(p)
    }
}

impl From<Disk> for ConvexBody {
    fn from(d: Disk) -> Self {
        ConvexBody::Disk(d)
    }
}

impl From<BoxNd> for ConvexBody {
    fn from(b: BoxNd) -> Self {
        ConvexBody::Box(b)
    }
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polygon(_) | ConvexBody::Disk(_) => 2,
            ConvexBody::Box(b) => b.dim(),
        }
    }

    /// Area (n = 2) or n-volume.
    pub fn volume(&self) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.area(),
            ConvexBody::Box(b) => b.lengths.iter().product(),
            ConvexBody::Disk(d) => PI * d.radius * d.radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.diameter(),
            ConvexBody::Box(b) => b.lengths.iter().map(|l| l * l).sum::<f64>().sqrt(),
            ConvexBody::Disk(d) => 2.0 * d.radius,
        }
    }

    pub fn inradius(&self) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.inradius(),
            ConvexBody::Box(b) => 0.5 * b.lengths.iter().cloned().fold(f64::INFINITY, f64::min),
            ConvexBody::Disk(d) => d.radius,
        }
    }

    /// Homothety `x -> r x` about the origin.
    pub fn scale(&self, r: f64) -> Result<ConvexBody> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be > 0, got {r}"
            )));
        }
        Ok(match self {
            ConvexBody::Polygon(p) => ConvexBody::Polygon(p.scaled(r)),
            ConvexBody::Box(b) => ConvexBody::Box(BoxNd {
                lower: b.lower.iter().map(|x| x * r).collect(),
                lengths: b.lengths.iter().map(|x| x * r).collect(),
            }),
            ConvexBody::Disk(d) => ConvexBody::Disk(Disk {
                center: d.center * r,
                radius: d.radius * r,
            }),
        })
    }

    /// Point reflection `x -> -x`.
    pub fn reflect(&self) -> ConvexBody {
        match self {
            ConvexBody::Polygon(p) => ConvexBody::Polygon(p.reflected()),
            ConvexBody::Box(b) => ConvexBody::Box(BoxNd {
                lower: b
                    .lower
                    .iter()
                    .zip(&b.lengths)
                    .map(|(lo, l)| -(lo + l))
                    .collect(),
                lengths: b.lengths.clone(),
            }),
            ConvexBody::Disk(d) => ConvexBody::Disk(Disk {
                center: -d.center,
                radius: d.radius,
            }),
        }
    }

    /// Translation of a planar body.
    pub fn translate(&self, v: Point) -> Result<ConvexBody> {
        Ok(match self {
            ConvexBody::Polygon(p) => ConvexBody::Polygon(p.translated(v)),
            ConvexBody::Disk(d) => ConvexBody::Disk(Disk {
                center: d.center + v,
                radius: d.radius,
            }),
            ConvexBody::Box(b) if b.dim() == 2 => ConvexBody::Box(BoxNd {
                lower: vec![b.lower[0] + v.x, b.lower[1] + v.y],
                lengths: b.lengths.clone(),
            }),
            ConvexBody::Box(_) => {
                return Err(Error::Unsupported {
                    op: "translate",
                    reason: "planar translation of a box with dim != 2".into(),
                })
            }
        })
    }

    /// Whether `-body == body` within a relative tolerance.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.diameter();
        match self {
            ConvexBody::Polygon(p) => p.reflected().approx_eq(p, rel_tol),
            ConvexBody::Box(b) => b
                .lower
                .iter()
                .zip(&b.lengths)
                .all(|(lo, l)| (lo + 0.5 * l).abs() <= rel_tol * scale),
            ConvexBody::Disk(d) => d.center.norm() <= rel_tol * scale,
        }
    }

    /// Containment for planar bodies.
    pub fn contains_point(&self, p: Point) -> bool {
        match self {
            ConvexBody::Polygon(poly) => poly.contains(p),
            ConvexBody::Disk(d) => p.dist(d.center) <= d.radius * (1.0 + 1e-12),
            ConvexBody::Box(b) => b.contains(&[p.x, p.y]),
        }
    }

    /// Containment for a point of matching dimension.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            ConvexBody::Box(b) => b.contains(p),
            _ => p.len() == 2 && self.contains_point(Point::new(p[0], p[1])),
        }
    }

    /// Planar bounding box `(min, max)`.
    pub fn bbox2(&self) -> Result<(Point, Point)> {
        match self {
            ConvexBody::Polygon(p) => Ok(p.bbox()),
            ConvexBody::Disk(d) => Ok((
                d.center - Point::new(d.radius, d.radius),
                d.center + Point::new(d.radius, d.radius),
            )),
            ConvexBody::Box(b) if b.dim() == 2 => Ok((
                Point::new(b.lower[0], b.lower[1]),
                Point::new(b.lower[0] + b.lengths[0], b.lower[1] + b.lengths[1]),
            )),
            ConvexBody::Box(b) => Err(Error::Unsupported {
                op: "bbox2",
                reason: format!("box of dimension {}", b.dim()),
            }),
        }
    }

    /// Polygonal representation of a planar body. Disks become inscribed
    /// regular polygons with `disk_vertices` vertices.
    pub fn to_polygon_with(&self, disk_vertices: usize) -> Result<Polygon> {
        match self {
            ConvexBody::Polygon(p) => Ok(p.clone()),
            ConvexBody::Disk(d) => Polygon::regular(disk_vertices, d.center, d.radius, 0.0),
            ConvexBody::Box(b) if b.dim() == 2 => Polygon::rectangle(
                b.lower[0],
                b.lower[1],
                b.lower[0] + b.lengths[0],
                b.lower[1] + b.lengths[1],
            ),
            ConvexBody::Box(b) => Err(Error::Unsupported {
                op: "to_polygon",
                reason: format!("box of dimension {}", b.dim()),
            }),
        }
    }

    pub fn to_polygon(&self) -> Result<Polygon> {
        self.to_polygon_with(DISK_POLYGON_VERTICES)
    }

    /// Polygon for exact clipping, or `None` for disks (which need sampling).
    pub fn as_exact_polygon(&self) -> Option<Polygon> {
        match self {
            ConvexBody::Disk(_) => None,
            other => other.to_polygon().ok(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn box_and_disk_basics() {
        let b = ConvexBody::Box(BoxNd::from_lengths(vec![2.0, 3.0]).unwrap());
        assert_relative_eq!(b.volume(), 6.0);
        assert_relative_eq!(b.diameter(), 13f64.sqrt());
        assert_relative_eq!(b.inradius(), 1.0);
        let d = ConvexBody::Disk(Disk::new(Point::default(), 1.0).unwrap());
        assert_relative_eq!(d.diameter(), 2.0);
        assert_relative_eq!(d.inradius(), 1.0);
        assert_relative_eq!(d.scale(3.0).unwrap().inradius(), 3.0);
        assert!(d.scale(0.0).is_err());
        assert!(d.scale(-1.0).is_err());
    }

    #[test]
    fn box_reflection_and_symmetry() {
        let b = ConvexBody::Box(BoxNd::from_lengths(vec![1.0, 2.0]).unwrap());
        assert!(!b.is_symmetric(1e-12));
        let r = b.reflect();
        assert_eq!(
            r.bbox2().unwrap(),
            (Point::new(-1.0, -2.0), Point::new(0.0, 0.0))
        );
        let c = ConvexBody::Box(BoxNd::centered(vec![1.0, 2.0, 3.0]).unwrap());
        assert!(c.is_symmetric(1e-12));
        assert_eq!(c.reflect(), c);
    }

    #[test]
    fn invalid_bodies() {
        assert!(BoxNd::from_lengths(vec![1.0, 0.0]).is_err());
        assert!(BoxNd::from_lengths(vec![]).is_err());
        assert!(Disk::new(Point::default(), 0.0).is_err());
    }

    #[test]
    fn scale_square() {
        let sq = ConvexBody::Polygon(Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap());
        let big = sq.scale(2.0).unwrap();
        assert_relative_eq!(big.volume(), 4.0);
        assert_eq!(big.bbox2().unwrap().1, Point::new(2.0, 2.0));
    }
}
