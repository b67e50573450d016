//! Separated nets over a dense quasi-random sample of a planar body.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::point::Point;
use super::polygon::Polygon;
use super::voronoi::voronoi_cells;
use crate::error::{Error, Result};

/// Default number of interior sample points.
pub const DEFAULT_SAMPLE_POINTS: usize = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetConfig {
    /// Target number of interior sample points, independent of the body's
    /// size; the number of Halton draws is scaled by bbox area / body area.
    pub sample_points: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            sample_points: DEFAULT_SAMPLE_POINTS,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteSet {
    pub points: Vec<Point>,
    /// Minimum pairwise distance; `None` for a single site.
    pub separation: Option<f64>,
    /// The separation radius the net was built for.
    pub radius: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl SiteSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `p` to the nearest site.
    pub fn nearest_distance(&self, p: Point) -> f64 {
        self.points
            .iter()
            .map(|s| s.dist(p))
            .fold(f64::INFINITY, f64::min)
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton (2, 3) points in the unit square with a seeded Cranley-Patterson
/// rotation.
pub fn halton_2d(count: usize, seed: u64) -> impl Iterator<Item = (f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u0, u1): (f64, f64) = (rng.random(), rng.random());
    (1..=count as u64).map(move |i| {
        (
            (radical_inverse(i, 2) + u0).fract(),
            (radical_inverse(i, 3) + u1).fract(),
        )
    })
}

pub(crate) fn mix_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Quasi-random interior sample of a planar body with (about) `count` points.
pub fn interior_sample(body: &ConvexBody, count: usize, seed: u64) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let (lo, hi) = body.bbox2()?;
    let ext = hi - lo;
    let fill = body.volume() / (ext.x * ext.y);
    let draws = ((count as f64 / fill).ceil() as usize).max(count);
    let inside = |p: Point| match body {
        ConvexBody::Polygon(poly) => poly.contains_strict(p),
        other => other.contains_point(p),
    };
    let pts: Vec<Point> = halton_2d(draws, seed)
        .map(|(u, v)| Point::new(lo.x + u * ext.x, lo.y + v * ext.y))
        .filter(|p| inside(*p))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument(
            "sample missed the body entirely".into(),
        ));
    }
    Ok(pts)
}

fn farthest_point_order(
    sample: &[Point],
    start: usize,
    mut stop: impl FnMut(usize, f64) -> bool,
) -> Vec<usize> {
    let mut chosen = vec![start];
    let mut dist: Vec<f64> = sample.iter().map(|p| p.dist(sample[start])).collect();
    loop {
        let (idx, d) = dist
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
            );
        if stop(chosen.len(), d) {
            return chosen;
        }
        chosen.push(idx);
        let s = sample[idx];
        for (dj, p) in dist.iter_mut().zip(sample) {
            *dj = dj.min(p.dist(s));
        }
    }
}

fn seeded_start(len: usize, seed: u64) -> usize {
    (mix_seed(seed) % len as u64) as usize
}

fn min_pairwise(points: &[Point]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].dist(points[j]);
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

/// Farthest-point greedy net: sites are added while some sample point is at
/// distance `>= r` from all current sites. The result is `r`-separated and an
/// `r`-cover of the sample.
pub fn greedy_net(body: &ConvexBody, r: f64, seed: u64) -> Result<SiteSet> {
    greedy_net_with(body, r, seed, &NetConfig::default())
}

pub fn greedy_net_with(body: &ConvexBody, r: f64, seed: u64, cfg: &NetConfig) -> Result<SiteSet> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "net radius must be > 0, got {r}"
        )));
    }
    let sample = interior_sample(body, cfg.sample_points, seed)?;
    let start = seeded_start(sample.len(), seed);
    let order = farthest_point_order(&sample, start, |_, d| d < r);
    let points: Vec<Point> = order.iter().map(|&i| sample[i]).collect();
    Ok(SiteSet {
        separation: min_pairwise(&points),
        points,
        radius: r,
        sample_count: sample.len(),
        seed,
    })
}

/// Exactly `count` farthest-point sites drawn from the interior sample.
pub fn farthest_point_sites(body: &ConvexBody, count: usize, seed: u64) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let sample = interior_sample(body, DEFAULT_SAMPLE_POINTS, seed)?;
    if sample.len() < count {
        return Err(Error::InvalidArgument(format!(
            "sample of {} points cannot provide {count} sites",
            sample.len()
        )));
    }
    let start = seeded_start(sample.len(), seed);
    let order = farthest_point_order(&sample, start, |n, _| n >= count);
    Ok(order.into_iter().map(|i| sample[i]).collect())
}

/// Extends an `r`-separated site set to an exact `r`-cover of a convex
/// polygon: while some Voronoi cell has a vertex at distance `>= r` from its
/// site, that vertex becomes a new site. A new site is at least `r` from its
/// own cell's site and hence from every site, so separation is preserved.
/// On return every cell lies in the open ball of radius `r` about its site.
pub fn complete_cover(poly: &Polygon, sites: &SiteSet) -> Result<SiteSet> {
    let r = sites.radius;
    let mut points = sites.points.clone();
    for _ in 0..100_000 {
        let cells = voronoi_cells(poly, &points)?;
        let mut worst: Option<(Point, f64)> = None;
        for (cell, site) in cells.iter().zip(&points) {
            let Some(cell) = cell else { continue };
            for v in cell.vertices() {
                let d = v.dist(*site);
                if worst.is_none_or(|(_, w)| d > w) {
                    worst = Some((*v, d));
                }
            }
        }
        match worst {
            Some((v, d)) if d >= r => points.push(v),
            _ => {
                return Ok(SiteSet {
                    separation: min_pairwise(&points),
                    points,
                    ..sites.clone()
                })
            }
        }
    }
    Err(Error::Infeasible(
        "cover completion did not terminate".into(),
    ))
}

/// Exact cover radius of `sites` over a convex polygon: the largest distance
/// from a point of the polygon to its nearest site.
pub fn cover_radius(poly: &Polygon, sites: &[Point]) -> Result<f64> {
    let cells = voronoi_cells(poly, sites)?;
    Ok(cells
        .iter()
        .zip(sites)
        .filter_map(|(c, s)| c.as_ref().map(|c| (c, s)))
        .flat_map(|(c, s)| c.vertices().iter().map(move |v| v.dist(*s)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexBody {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    #[test]
    fn radius_beyond_diameter_gives_one_site() {
        let net = greedy_net(&unit_square(), 1.5, 3).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.separation.is_none());
    }

    #[test]
    fn unit_square_net_is_separated_cover() {
        let body = unit_square();
        let net = greedy_net(&body, 0.6, 11).unwrap();
        let sample = interior_sample(&body, DEFAULT_SAMPLE_POINTS, 11).unwrap();
        assert!(sample.len() >= DEFAULT_SAMPLE_POINTS);
        for p in &sample {
            assert!(net.nearest_distance(*p) < 0.6);
        }
        assert!(net.separation.unwrap() >= 0.6 - 1e-12);
    }

    #[test]
    fn thin_rectangle_site_count() {
        let body: ConvexBody = Polygon::rectangle(0.0, 0.0, 10.0, 0.1).unwrap().into();
        let net = greedy_net(&body, 1.0, 5).unwrap();
        assert!((6..=11).contains(&net.len()), "got {}", net.len());
    }

    #[test]
    fn farthest_point_sites_count() {
        let sites = farthest_point_sites(&unit_square(), 5, 1).unwrap();
        assert_eq!(sites.len(), 5);
    }

    #[test]
    fn completion_gives_exact_cover() {
        let poly = Polygon::rectangle(0.0, 0.0, 3.0, 1.0).unwrap();
        let body: ConvexBody = poly.clone().into();
        let net = greedy_net(&body, 0.7, 2).unwrap();
        let full = complete_cover(&poly, &net).unwrap();
        assert!(full.len() >= net.len());
        assert!(cover_radius(&poly, &full.points).unwrap() < 0.7);
        assert!(full.separation.unwrap() >= 0.7 - 1e-12);
    }

    #[test]
    fn halton_is_deterministic_and_in_unit_square() {
        let a: Vec<_> = halton_2d(100, 9).collect();
        let b: Vec<_> = halton_2d(100, 9).collect();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|&(u, v)| (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v)));
    }
}
