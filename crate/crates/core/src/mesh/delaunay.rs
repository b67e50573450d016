//! Incremental Bowyer-Watson Delaunay triangulation with triangle adjacency
//! and walking point location.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::Point;

const NONE: usize = usize::MAX;

#[inline]
pub(crate) fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Positive iff `d` lies strictly inside the circumcircle of the
/// counterclockwise triangle `abc`.
#[inline]
pub(crate) fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (ad, bd, cd) = (a - d, b - d, c - d);
    let (a2, b2, c2) = (ad.norm_sq(), bd.norm_sq(), cd.norm_sq());
    ad.x * (bd.y * c2 - b2 * cd.y) - ad.y * (bd.x * c2 - b2 * cd.x)
        + a2 * (bd.x * cd.y - bd.y * cd.x)
}

#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    /// `n[i]` is the neighbor across the edge opposite `v[i]`.
    n: [usize; 3],
    alive: bool,
}

struct Builder<'a> {
    pts: &'a [Point],
    tris: Vec<Tri>,
    free: Vec<usize>,
    /// Stamp per triangle: `2 * insertion` when tested outside, `+1` inside.
    mark: Vec<u64>,
    last: usize,
}

impl Builder<'_> {
    fn alloc(&mut self, t: Tri) -> usize {
        if let Some(i) = self.free.pop() {
            self.tris[i] = t;
            i
        } else {
            self.tris.push(t);
            self.mark.push(0);
            self.tris.len() - 1
        }
    }

    fn contains(&self, t: usize, p: Point) -> bool {
        let v = self.tris[t].v;
        (0..3).all(|i| orient(self.pts[v[(i + 1) % 3]], self.pts[v[(i + 2) % 3]], p) >= 0.0)
    }

    fn locate(&self, p: Point) -> usize {
        let mut t = self.last;
        let cap = 4 * self.tris.len() + 16;
        'walk: for _ in 0..cap {
            let v = self.tris[t].v;
            for i in 0..3 {
                let (a, b) = (self.pts[v[(i + 1) % 3]], self.pts[v[(i + 2) % 3]]);
                if orient(a, b, p) < 0.0 {
                    let nb = self.tris[t].n[i];
                    if nb == NONE {
                        break 'walk;
                    }
                    t = nb;
                    continue 'walk;
                }
            }
            return t;
        }
        // walk cycled on round-off; fall back to a scan
        (0..self.tris.len())
            .find(|&t| self.tris[t].alive && self.contains(t, p))
            .unwrap_or(self.last)
    }

    fn in_circle(&self, t: usize, p: Point) -> bool {
        let v = self.tris[t].v;
        incircle(self.pts[v[0]], self.pts[v[1]], self.pts[v[2]], p) > 0.0
    }

    fn insert(&mut self, pi: usize, stamp: u64) -> Result<()> {
        let p = self.pts[pi];
        let start = self.locate(p);
        let inside = 2 * stamp + 1;
        let outside = 2 * stamp;
        let mut cavity = vec![start];
        self.mark[start] = inside;
        // boundary edges (a, b, neighbor outside, slot of the edge in it)
        let mut rim: Vec<(usize, usize, usize, usize)> = Vec::new();
        let mut i = 0;
        while i < cavity.len() {
            let c = cavity[i];
            i += 1;
            let tri = self.tris[c];
            for e in 0..3 {
                let nb = tri.n[e];
                let (a, b) = (tri.v[(e + 1) % 3], tri.v[(e + 2) % 3]);
                if nb == NONE {
                    rim.push((a, b, nb, 0));
                    continue;
                }
                if self.mark[nb] == inside {
                    continue;
                }
                if self.mark[nb] != outside && self.in_circle(nb, p) {
                    self.mark[nb] = inside;
                    cavity.push(nb);
                } else {
                    self.mark[nb] = outside;
                    let slot = self.tris[nb].n.iter().position(|&x| x == c).unwrap_or(0);
                    rim.push((a, b, nb, slot));
                }
            }
        }
        for &(a, b, _, _) in &rim {
            if orient(self.pts[a], self.pts[b], p) <= 0.0 {
                return Err(Error::MeshQuality(format!(
                    "Delaunay cavity for point {pi} is not star-shaped"
                )));
            }
        }
        for &c in &cavity {
            self.tris[c].alive = false;
            self.free.push(c);
        }
        let mut created = Vec::with_capacity(rim.len());
        for &(a, b, nb, slot) in &rim {
            let t = self.alloc(Tri {
                v: [a, b, pi],
                n: [NONE, NONE, nb],
                alive: true,
            });
            if nb != NONE {
                self.tris[nb].n[slot] = t;
            }
            created.push(t);
        }
        for &t in &created {
            let [a, b, _] = self.tris[t].v;
            let next = created.iter().copied().find(|&u| self.tris[u].v[0] == b);
            let prev = created.iter().copied().find(|&u| self.tris[u].v[1] == a);
            match (next, prev) {
                (Some(nx), Some(pv)) => {
                    self.tris[t].n[0] = nx;
                    self.tris[t].n[1] = pv;
                }
                _ => {
                    return Err(Error::MeshQuality(format!(
                        "Delaunay cavity for point {pi} has an open rim"
                    )))
                }
            }
        }
        self.last = created[0];
        Ok(())
    }
}

/// Delaunay triangulation of `points` (no duplicates). Triangles are
/// counterclockwise index triples into `points`.
pub(crate) fn delaunay(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 points".into()));
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let c = (lo + hi) * 0.5;
    let ext = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let m = 50.0 * ext;
    let n = points.len();
    let mut pts = points.to_vec();
    pts.push(Point::new(c.x - m, c.y - m));
    pts.push(Point::new(c.x + m, c.y - m));
    pts.push(Point::new(c.x, c.y + m));

    // insert in a snake order over a coarse grid so the walk stays short
    let cells = ((n as f64).sqrt() / 2.0).ceil().max(1.0);
    let cell_of = |p: Point| {
        let cx = (((p.x - lo.x) / ext) * cells).floor().min(cells - 1.0) as i64;
        let cy = (((p.y - lo.y) / ext) * cells).floor().min(cells - 1.0) as i64;
        let cx = if cy % 2 == 0 {
            cx
        } else {
            cells as i64 - 1 - cx
        };
        (cy, cx)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| cell_of(points[i]));

    let mut b = Builder {
        pts: &pts,
        tris: vec![Tri {
            v: [n, n + 1, n + 2],
            n: [NONE; 3],
            alive: true,
        }],
        free: Vec::new(),
        mark: vec![0],
        last: 0,
    };
    for (stamp, &i) in order.iter().enumerate() {
        b.insert(i, stamp as u64 + 1)?;
    }
    let mut out: Vec<[usize; 3]> = b
        .tris
        .iter()
        .filter(|t| t.alive && t.v.iter().all(|&v| v < n))
        .map(|t| t.v)
        .collect();
    lawson_flip(points, &mut out);
    Ok(out)
}

/// Flips interior edges that are not locally Delaunay. Returns the number of
/// flips performed.
pub(crate) fn lawson_flip(points: &[Point], tris: &mut [[usize; 3]]) -> usize {
    let mut total = 0;
    for _ in 0..64 {
        let mut edges: HashMap<(usize, usize), (usize, usize)> =
            HashMap::with_capacity(3 * tris.len());
        for (t, v) in tris.iter().enumerate() {
            for i in 0..3 {
                edges.insert((v[(i + 1) % 3], v[(i + 2) % 3]), (t, i));
            }
        }
        let mut touched = vec![false; tris.len()];
        let mut flips = 0;
        for t in 0..tris.len() {
            for i in 0..3 {
                if touched[t] {
                    break;
                }
                let v = tris[t];
                let (a, b, c) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
                let Some(&(u, j)) = edges.get(&(c, b)) else {
                    continue;
                };
                if touched[u] {
                    continue;
                }
                let d = tris[u][j];
                let (pa, pb, pc, pd) = (points[a], points[b], points[c], points[d]);
                let s = pa
                    .dist(pb)
                    .max(pb.dist(pc))
                    .max(pc.dist(pa))
                    .max(pd.dist(pb));
                let tol = 1e-10 * s.powi(4);
                if incircle(pa, pb, pc, pd) > tol
                    && orient(pa, pb, pd) > 0.0
                    && orient(pa, pd, pc) > 0.0
                {
                    tris[t] = [a, b, d];
                    tris[u] = [a, d, c];
                    touched[t] = true;
                    touched[u] = true;
                    flips += 1;
                }
            }
        }
        total += flips;
        if flips == 0 {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn area(pts: &[Point], t: &[usize; 3]) -> f64 {
        0.5 * orient(pts[t[0]], pts[t[1]], pts[t[2]])
    }

    #[test]
    fn square_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let tris = delaunay(&pts).unwrap();
        assert_eq!(tris.len(), 2);
        let total: f64 = tris.iter().map(|t| area(&pts, t)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_points_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts: Vec<Point> = (0..400)
            .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        pts.extend([
            Point::new(-0.1, -0.1),
            Point::new(1.1, -0.1),
            Point::new(1.1, 1.1),
            Point::new(-0.1, 1.1),
        ]);
        let tris = delaunay(&pts).unwrap();
        // Euler: 2n - 2 - hull
        assert_eq!(tris.len(), 2 * pts.len() - 2 - 4);
        let total: f64 = tris.iter().map(|t| area(&pts, t)).sum();
        assert!((total - 1.44).abs() < 1e-12);
        for t in &tris {
            assert!(area(&pts, t) > 0.0);
            for (k, &p) in pts.iter().enumerate() {
                if !t.contains(&k) {
                    assert!(incircle(pts[t[0]], pts[t[1]], pts[t[2]], p) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn collinear_boundary_points_keep_hull() {
        let mut pts = Vec::new();
        for i in 0..10 {
            let s = i as f64 / 10.0;
            pts.extend([
                Point::new(s, 0.0),
                Point::new(1.0, s),
                Point::new(1.0 - s, 1.0),
                Point::new(0.0, 1.0 - s),
            ]);
        }
        pts.push(Point::new(0.52, 0.47));
        let tris = delaunay(&pts).unwrap();
        let total: f64 = tris.iter().map(|t| area(&pts, t)).sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
        assert!(tris.iter().all(|t| area(&pts, t) > 1e-12));
    }
}
