use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::point::Point;
use super::polygon::Polygon;
use crate::error::{Error, Result};

/// Relative tolerance for partition bookkeeping (area sums, overlaps).
pub const PARTITION_TOL: f64 = 1e-9;

/// A convex partition of a polygon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionPieces {
    pub pieces: Vec<Polygon>,
    pub parent: Polygon,
    pub diameters: Vec<f64>,
}

impl PartitionPieces {
    pub fn new(parent: Polygon, pieces: Vec<Polygon>) -> Self {
        let diameters = pieces.iter().map(Polygon::diameter).collect();
        Self {
            pieces,
            parent,
            diameters,
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    /// Checks the partition invariants: pieces inside the parent, pairwise
    /// interior-disjoint, and areas summing to the parent area.
    pub fn validate(&self) -> Result<()> {
        let total = self.parent.area();
        let sum: f64 = self.pieces.iter().map(Polygon::area).sum();
        if (sum - total).abs() > PARTITION_TOL * total {
            return Err(Error::Precondition(format!(
                "piece areas sum to {sum} but parent area is {total}"
            )));
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.is_inside(&self.parent) {
                return Err(Error::Precondition(format!("piece {i} leaves the parent")));
            }
            for (j, q) in self.pieces.iter().enumerate().skip(i + 1) {
                let overlap = p.intersection_area(q);
                if overlap > PARTITION_TOL * total {
                    return Err(Error::Precondition(format!(
                        "pieces {i} and {j} overlap in area {overlap}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Restriction to a sub-polygon; empty intersections are dropped.
    pub fn restrict_to(&self, inner: &Polygon) -> PartitionPieces {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| p.intersect(inner))
            .collect();
        PartitionPieces::new(inner.clone(), pieces)
    }
}

/// Voronoi cells of `sites` inside `poly`, aligned with `sites`. A cell is
/// `None` only when it has zero area (a site outside the polygon whose cell
/// misses it).
pub fn voronoi_cells(poly: &Polygon, sites: &[Point]) -> Result<Vec<Option<Polygon>>> {
    let tol = 1e-12 * poly.scale_length();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            if sites[i].dist(sites[j]) <= tol {
                return Err(Error::InvalidArgument(format!(
                    "duplicate Voronoi sites {i} and {j} at {:?}",
                    sites[i]
                )));
            }
        }
    }
    Ok(sites
        .iter()
        .enumerate()
        .map(|(i, &si)| {
            let mut cell = Some(poly.clone());
            for (j, &sj) in sites.iter().enumerate() {
                if i == j {
                    continue;
                }
                let Some(c) = cell else { break };
                let n = sj - si;
                let mid = (si + sj) * 0.5;
                cell = c.clip_halfplane(n, n.dot(mid));
            }
            cell
        })
        .collect())
}

/// Voronoi partition of a planar polygonal body by half-plane clipping.
pub fn voronoi_partition(body: &ConvexBody, sites: &[Point]) -> Result<PartitionPieces> {
    let poly = body.as_exact_polygon().ok_or_else(|| Error::Unsupported {
        op: "voronoi_partition",
        reason: "body must be polygonal".into(),
    })?;
    if sites.is_empty() {
        return Err(Error::InvalidArgument("no sites".into()));
    }
    let tol = 1e-9 * poly.scale_length();
    if let Some(s) = sites
        .iter()
        .find(|s| !poly.contains(**s) && poly.distance_to_point(**s) > tol)
    {
        return Err(Error::InvalidArgument(format!(
            "site {s:?} outside the body"
        )));
    }
    let cells = voronoi_cells(&poly, sites)?;
    let pieces = cells.into_iter().flatten().collect();
    Ok(PartitionPieces::new(poly, pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square() -> ConvexBody {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    #[test]
    fn two_sites_split_square() {
        let part =
            voronoi_partition(&square(), &[Point::new(0.25, 0.5), Point::new(0.75, 0.5)]).unwrap();
        assert_eq!(part.len(), 2);
        for p in &part.pieces {
            assert_relative_eq!(p.area(), 0.5, max_relative = 1e-14);
        }
        let (lo, hi) = part.pieces[0].bbox();
        assert_relative_eq!(lo.x, 0.0);
        assert_relative_eq!(hi.x, 0.5);
        part.validate().unwrap();
    }

    #[test]
    fn single_site_is_whole_body() {
        let part = voronoi_partition(&square(), &[Point::new(0.3, 0.3)]).unwrap();
        assert_eq!(part.len(), 1);
        assert_relative_eq!(part.pieces[0].area(), 1.0);
    }

    #[test]
    fn duplicates_and_outside_sites_rejected() {
        let p = Point::new(0.3, 0.3);
        assert!(voronoi_partition(&square(), &[p, p]).is_err());
        assert!(voronoi_partition(&square(), &[Point::new(2.0, 2.0)]).is_err());
    }

    #[test]
    fn validation_catches_overlap_and_gaps() {
        let parent = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let gap = PartitionPieces::new(
            parent.clone(),
            vec![Polygon::rectangle(0.0, 0.0, 0.4, 1.0).unwrap()],
        );
        assert!(gap.validate().is_err());
        let overlap = PartitionPieces::new(
            parent,
            vec![
                Polygon::rectangle(0.0, 0.0, 0.6, 1.0).unwrap(),
                Polygon::rectangle(0.4, 0.0, 1.0, 1.0).unwrap(),
                Polygon::rectangle(0.0, 0.0, 0.0 + 1e-3, 1e-3).unwrap(),
            ],
        );
        assert!(overlap.validate().is_err());
    }
}
