//! Cheeger constant bounds, the (1,1)-Poincaré inequality, separation
//! witnesses and empirical-constant reports.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::{farthest_point_sites, ConvexBody, Point, Polygon};
use crate::measure::body_inside;
use crate::mesh::{P1Field, Part};

pub const DEFAULT_DIRECTIONS: usize = 180;
pub const DEFAULT_OFFSETS: usize = 200;

/// Cuts with a side below this fraction of the area are skipped.
pub const DEGENERATE_SIDE: f64 = 1e-9;

/// Relative slack of the Poincaré comparison.
pub const POINCARE_SLACK: f64 = 1e-9;

pub const DEFAULT_SEP_ITERS: usize = 500;

/// Vertices of the polygonal balls used by separation witnesses.
const BALL_VERTICES: usize = 64;

/// Directions tried by the slab candidates of [`sep_lower`].
const SLAB_DIRECTIONS: usize = 36;

const BISECTION_STEPS: usize = 50;

/// A straight cut `{x : (cos t, sin t) . x <= offset}` and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutCandidate {
    pub direction: f64,
    pub offset: f64,
    pub ratio0: f64,
    pub ratio1: f64,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerSource {
    InverseDiameter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_source: LowerSource,
    pub upper_witness: CutCandidate,
}

/// `1 / diam`, a certified lower bound for the Cheeger constant of a convex
/// body.
pub fn cheeger_lower(body: &ConvexBody) -> f64 {
    1.0 / body.diameter()
}

fn unit(t: f64) -> Point {
    Point::new(t.cos(), t.sin())
}

/// Evaluates one cut; `None` if either side is degenerate.
pub fn evaluate_cut(poly: &Polygon, direction: f64, offset: f64) -> Option<CutCandidate> {
    let n = unit(direction);
    let area = poly.area();
    let s0 = poly.clip_halfplane(n, offset)?;
    let s1 = poly.clip_halfplane(-n, -offset)?;
    let (a0, a1) = (s0.area(), s1.area());
    if a0 < DEGENERATE_SIDE * area || a1 < DEGENERATE_SIDE * area {
        return None;
    }
    let chord = 0.5 * (s0.perimeter() + s1.perimeter() - poly.perimeter());
    let (ratio0, ratio1) = (chord / a0, chord / a1);
    Some(CutCandidate {
        direction,
        offset,
        ratio0,
        ratio1,
        score: ratio0.max(ratio1),
    })
}

/// Half-plane cut sweep. Offsets split the projection range into
/// `n_offsets` equal parts (both ends included and skipped as degenerate).
pub fn cheeger_upper(poly: &Polygon, n_dirs: usize, n_offsets: usize) -> Result<CheegerBounds> {
    if n_dirs == 0 || n_offsets < 2 {
        return Err(Error::InvalidArgument(format!(
            "sweep needs >= 1 direction and >= 2 offsets, got {n_dirs} x {n_offsets}"
        )));
    }
    let per_dir: Vec<Option<CutCandidate>> = (0..n_dirs)
        .into_par_iter()
        .map(|i| {
            let t = PI * i as f64 / n_dirs as f64;
            let (lo, hi) = poly.projection_range(unit(t));
            (0..=n_offsets)
                .filter_map(|j| evaluate_cut(poly, t, lo + (hi - lo) * j as f64 / n_offsets as f64))
                .fold(None, |best: Option<CutCandidate>, c| match best {
                    Some(b) if b.score <= c.score => Some(b),
                    _ => Some(c),
                })
        })
        .collect();
    let witness = per_dir
        .into_iter()
        .flatten()
        .fold(None, |best: Option<CutCandidate>, c| match best {
            Some(b) if b.score <= c.score => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| Error::InvalidArgument("no nondegenerate cut found".into()))?;
    Ok(CheegerBounds {
        lower: 1.0 / poly.diameter(),
        upper: witness.score,
        lower_source: LowerSource::InverseDiameter,
        upper_witness: witness,
    })
}

/// Default-resolution bounds for any body. Boxes use the exact mid cut
/// across the longest side, `2 / L_max`; disks are swept on their polygonal
/// approximation.
pub fn cheeger_bounds(body: &ConvexBody) -> Result<CheegerBounds> {
    match body {
        ConvexBody::Box(b) if b.dim() != 2 => {
            let (axis, len) =
                b.lengths.iter().enumerate().fold(
                    (0, 0.0),
                    |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc },
                );
            let upper = 2.0 / len;
            Ok(CheegerBounds {
                lower: cheeger_lower(body),
                upper,
                lower_source: LowerSource::InverseDiameter,
                upper_witness: CutCandidate {
                    direction: axis as f64,
                    offset: b.lower[axis] + 0.5 * len,
                    ratio0: upper,
                    ratio1: upper,
                    score: upper,
                },
            })
        }
        other => {
            let mut b = cheeger_upper(&other.to_polygon()?, DEFAULT_DIRECTIONS, DEFAULT_OFFSETS)?;
            b.lower = cheeger_lower(other);
            Ok(b)
        }
    }
}

/// A median of the field, by bisection on `area{f >= m}`.
pub fn median(field: &P1Field) -> f64 {
    let vals = field.values();
    let mut lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let half = 0.5 * field.mesh().area();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if field.shifted(mid).positive_measure() >= half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One line of a constant-bearing or consistency report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub check: String,
    pub domain_id: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_emp: Option<f64>,
    pub pass: bool,
    pub seed: u64,
}

impl ConsistencyReport {
    pub fn with_domain(mut self, id: impl Into<String>) -> Self {
        self.domain_id = id.into();
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Short descriptive id of a body.
pub fn domain_label(body: &ConvexBody) -> String {
    match body {
        ConvexBody::Polygon(p) => format!("polygon{}", p.len()),
        ConvexBody::Disk(d) => format!("disk:{}", d.radius),
        ConvexBody::Box(b) => {
            let l: Vec<String> = b.lengths.iter().map(|x| x.to_string()).collect();
            format!("box:{}", l.join("x"))
        }
    }
}

/// `h_lower ||f - m||_1 <= || |grad f| ||_1`, both sides divided by the area.
pub fn poincare_check(body: &ConvexBody, field: &P1Field, h_lower: f64) -> ConsistencyReport {
    let area = field.mesh().area();
    let m = median(field);
    let g = field.shifted(m);
    let l1 = g.moments(None, Part::Positive).integral + g.moments(None, Part::Negative).integral;
    let lhs = h_lower * l1 / area;
    let rhs = field.gradient_l1() / area;
    ConsistencyReport {
        check: "poincare".into(),
        domain_id: domain_label(body),
        params: json!({ "h_lower": h_lower, "median": m }),
        lhs,
        rhs,
        c_emp: None,
        pass: lhs <= rhs * (1.0 + POINCARE_SLACK),
        seed: field.mesh().seed(),
    }
}

/// Disjoint convex subsets of a body with prescribed normalized masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub kappas: Vec<f64>,
    pub sets: Vec<Polygon>,
    pub masses: Vec<f64>,
    pub min_distance: f64,
    pub seed: u64,
}

impl SeparationWitness {
    /// Re-verifies masses, disjointness and the reported distance.
    pub fn verify(&self, body: &Polygon) -> Result<()> {
        let area = body.area();
        if self.sets.len() != self.kappas.len() {
            return Err(Error::Infeasible(
                "set count differs from kappa count".into(),
            ));
        }
        for (i, (s, &k)) in self.sets.iter().zip(&self.kappas).enumerate() {
            if !s.is_inside(body) {
                return Err(Error::Infeasible(format!("set {i} leaves the body")));
            }
            let mass = s.area() / area;
            if mass < k * (1.0 - 1e-9) {
                return Err(Error::Infeasible(format!("set {i} has mass {mass} < {k}")));
            }
        }
        let d = pairwise_distance(&self.sets, area)
            .ok_or_else(|| Error::Infeasible("witness sets overlap".into()))?;
        if (d - self.min_distance).abs() > 1e-9 * body.diameter().max(1.0) {
            return Err(Error::Infeasible(format!(
                "reported distance {} but sets are {d} apart",
                self.min_distance
            )));
        }
        Ok(())
    }
}

/// Minimum pairwise distance, or `None` if two sets overlap in area.
fn pairwise_distance(sets: &[Polygon], area: f64) -> Option<f64> {
    let mut best = f64::INFINITY;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersection_area(&sets[j]) > 1e-12 * area {
                return None;
            }
            best = best.min(sets[i].distance_to(&sets[j]));
        }
    }
    Some(best)
}

/// Smallest `t` in `[lo, hi]` (to bisection accuracy) with `mass(t) >= target`,
/// for nondecreasing `mass`.
fn bisect_up(mut lo: f64, mut hi: f64, target: f64, mass: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mass(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn ball_set(body: &Polygon, site: Point, r: f64) -> Option<Polygon> {
    Polygon::regular(BALL_VERTICES, site, r, 0.0)
        .ok()
        .and_then(|b| b.intersect(body))
}

/// Balls about `sites` grown until each has mass `kappas[i]`.
fn ball_candidate(body: &Polygon, sites: &[Point], kappas: &[f64]) -> Option<Vec<Polygon>> {
    let area = body.area();
    let reach = 2.0 * body.diameter();
    sites
        .iter()
        .zip(kappas)
        .map(|(&s, &k)| {
            let mass = |r: f64| ball_set(body, s, r).map_or(0.0, |p| p.area() / area);
            let r = bisect_up(0.0, reach, k, mass);
            ball_set(body, s, r)
        })
        .collect()
}

/// Offset `o` with `area{n . x <= o} = t * area`.
fn mass_offset(body: &Polygon, n: Point, t: f64) -> f64 {
    let area = body.area();
    let (lo, hi) = body.projection_range(n);
    if t <= 0.0 {
        return lo;
    }
    if t >= 1.0 {
        return hi;
    }
    bisect_up(lo, hi, t, |o| {
        body.clip_halfplane(n, o).map_or(0.0, |p| p.area() / area)
    })
}

/// Slab `{a <= n . x <= b}` of the body with mass coordinates `[t0, t1]`.
fn slab(body: &Polygon, n: Point, t0: f64, t1: f64) -> Option<Polygon> {
    let a = mass_offset(body, n, t0);
    let b = mass_offset(body, n, t1);
    body.clip_halfplane(n, b)?.clip_halfplane(-n, -a)
}

/// Slabs at fixed mass centers: the first and last are end caps, the others
/// are centered at `i / (m - 1)` in mass coordinates.
fn slab_candidate(body: &Polygon, n: Point, kappas: &[f64]) -> Option<Vec<Polygon>> {
    let m = kappas.len();
    kappas
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (t0, t1) = if i == 0 {
                (0.0, k)
            } else if i == m - 1 {
                (1.0 - k, 1.0)
            } else {
                let c = i as f64 / (m - 1) as f64;
                (c - 0.5 * k, c + 0.5 * k)
            };
            if t0 < 0.0 || t1 > 1.0 {
                return None;
            }
            slab(body, n, t0, t1)
        })
        .collect()
}

/// Consecutive slabs with masses `kappas`, touching each other.
fn packed_slabs(body: &Polygon, kappas: &[f64]) -> Option<Vec<Polygon>> {
    let n = Point::new(1.0, 0.0);
    let mut t = 0.0;
    kappas
        .iter()
        .map(|&k| {
            let s = slab(body, n, t, t + k);
            t += k;
            s
        })
        .collect()
}

/// End caps of masses `k0` and `k1` on opposite sides along `normal`.
pub fn cap_witness(body: &Polygon, normal: Point, k0: f64, k1: f64) -> Result<SeparationWitness> {
    let n = normal * (1.0 / normal.norm());
    let sets = vec![slab(body, n, 0.0, k0), slab(body, n, 1.0 - k1, 1.0)]
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Infeasible("degenerate cap".into()))?;
    witness_from(body, vec![k0, k1], sets, 0)
}

fn witness_from(
    body: &Polygon,
    kappas: Vec<f64>,
    sets: Vec<Polygon>,
    seed: u64,
) -> Result<SeparationWitness> {
    let area = body.area();
    let min_distance = pairwise_distance(&sets, area)
        .ok_or_else(|| Error::Infeasible("candidate sets overlap".into()))?;
    Ok(SeparationWitness {
        masses: sets.iter().map(|s| s.area() / area).collect(),
        kappas,
        sets,
        min_distance,
        seed,
    })
}

/// Best separation witness over a candidate family that depends only on
/// the body, the number of sets and the seed: ball configurations visited by
/// a site-spreading random walk, fixed-center slabs in several directions
/// and, as a fallback, touching packed slabs. Each candidate's sets grow
/// monotonically with the masses, so enlarging any `kappa_i` never increases
/// the result.
pub fn sep_lower(
    body: &ConvexBody,
    kappas: &[f64],
    seed: u64,
    iters: usize,
) -> Result<SeparationWitness> {
    if kappas.len() < 2 {
        return Err(Error::InvalidArgument("need at least two masses".into()));
    }
    if kappas.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "masses must lie in (0, 1], got {kappas:?}"
        )));
    }
    let total: f64 = kappas.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::Infeasible(format!("masses sum to {total} > 1")));
    }
    let poly = body.to_polygon()?;
    let area = poly.area();
    let m = kappas.len();

    let mut configs = vec![farthest_point_sites(body, m, seed)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = |s: &[Point]| {
        let mut d = f64::INFINITY;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                d = d.min(s[i].dist(s[j]));
            }
        }
        d
    };
    let mut cur = configs[0].clone();
    let mut cur_spread = spread(&cur);
    let diam = poly.diameter();
    for it in 0..iters {
        let step = 0.25 * diam * (1.0 - it as f64 / iters as f64).max(0.05);
        let i = rng.random_range(0..m);
        let t: f64 = rng.random_range(0.0..2.0 * PI);
        let mut next = cur.clone();
        next[i] = next[i] + unit(t) * step;
        if !poly.contains(next[i]) {
            continue;
        }
        let s = spread(&next);
        configs.push(next.clone());
        if s > cur_spread {
            cur = next;
            cur_spread = s;
        }
    }

    let mut candidates: Vec<Option<Vec<Polygon>>> = configs
        .par_iter()
        .map(|sites| ball_candidate(&poly, sites, kappas))
        .collect();
    candidates.extend(
        (0..SLAB_DIRECTIONS)
            .into_par_iter()
            .map(|i| slab_candidate(&poly, unit(PI * i as f64 / SLAB_DIRECTIONS as f64), kappas))
            .collect::<Vec<_>>(),
    );
    candidates.push(packed_slabs(&poly, kappas));

    let mut best: Option<(f64, Vec<Polygon>)> = None;
    for sets in candidates.into_iter().flatten() {
        if sets
            .iter()
            .zip(kappas)
            .any(|(s, &k)| s.area() < k * area * (1.0 - 1e-9))
        {
            continue;
        }
        if let Some(d) = pairwise_distance(&sets, area) {
            if best.as_ref().is_none_or(|b| d > b.0) {
                best = Some((d, sets));
            }
        }
    }
    let (_, sets) = best.ok_or_else(|| Error::Infeasible("no disjoint family found".into()))?;
    witness_from(&poly, kappas.to_vec(), sets, seed)
}

/// `max_{i != j} log(1 / (kappa_i kappa_j))`.
pub fn max_log_kappa(kappas: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..kappas.len() {
        for j in 0..kappas.len() {
            if i != j {
                best = best.max(-(kappas[i] * kappas[j]).ln());
            }
        }
    }
    best
}

/// Empirical constant `(sep sqrt(lambda_k) / max log(1/(kappa_i kappa_j)))^(1/(k-l+1))`.
pub fn reduction_consistency(
    body: &ConvexBody,
    k: usize,
    l: usize,
    kappas: &[f64],
    spectrum: &Spectrum,
    seed: u64,
) -> Result<ConsistencyReport> {
    let w = sep_lower(body, kappas, seed, DEFAULT_SEP_ITERS)?;
    reduction_from_witness(body, k, l, &w, spectrum)
}

/// [`reduction_consistency`] for an already computed witness.
pub fn reduction_from_witness(
    body: &ConvexBody,
    k: usize,
    l: usize,
    witness: &SeparationWitness,
    spectrum: &Spectrum,
) -> Result<ConsistencyReport> {
    if l > k || l == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= l <= k, got l = {l}, k = {k}"
        )));
    }
    if witness.kappas.len() != l + 1 {
        return Err(Error::InvalidArgument(format!(
            "need {} masses for l = {l}, got {}",
            l + 1,
            witness.kappas.len()
        )));
    }
    let lambda = spectrum
        .lambda(k)
        .ok_or_else(|| Error::InvalidArgument(format!("spectrum has no lambda_{k}")))?;
    let lhs = witness.min_distance * lambda.sqrt();
    let rhs = max_log_kappa(&witness.kappas);
    let c = (lhs / rhs).powf(1.0 / (k - l + 1) as f64);
    Ok(ConsistencyReport {
        check: "reduction".into(),
        domain_id: domain_label(body),
        params: json!({ "k": k, "l": l, "kappas": witness.kappas, "sep": witness.min_distance, "lambda_k": lambda }),
        lhs,
        rhs,
        c_emp: Some(c),
        pass: c.is_finite() && c > 0.0,
        seed: witness.seed,
    })
}

/// `h_upper(outer) >= v^2 h_lower(inner)` with `v = vol(inner) / vol(outer)`.
pub fn milman_consistency(inner: &ConvexBody, outer: &ConvexBody) -> Result<ConsistencyReport> {
    if !body_inside(inner, outer)? {
        return Err(Error::Precondition(
            "inner body is not contained in the outer body".into(),
        ));
    }
    let v = inner.volume() / outer.volume();
    let lhs = cheeger_bounds(outer)?.upper;
    let rhs = v * v * cheeger_lower(inner);
    Ok(ConsistencyReport {
        check: "milman-consistency".into(),
        domain_id: domain_label(outer),
        params: json!({ "v": v, "inner": domain_label(inner) }),
        lhs,
        rhs,
        c_emp: None,
        pass: lhs >= rhs,
        seed: 0,
    })
}

/// Records `diam sqrt(lambda_k) / (n k)` and checks `diam >= 1 / h_upper`.
pub fn diam_eigen_check(
    body: &ConvexBody,
    k: usize,
    spectrum: &Spectrum,
) -> Result<ConsistencyReport> {
    diam_eigen_with(body, k, spectrum, cheeger_bounds(body)?.upper)
}

/// [`diam_eigen_check`] with a known Cheeger upper bound.
pub fn diam_eigen_with(
    body: &ConvexBody,
    k: usize,
    spectrum: &Spectrum,
    h_upper: f64,
) -> Result<ConsistencyReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let lambda = spectrum
        .lambda(k)
        .ok_or_else(|| Error::InvalidArgument(format!("spectrum has no lambda_{k}")))?;
    let diam = body.diameter();
    let n = body.dim() as f64;
    Ok(ConsistencyReport {
        check: "diam-eigen".into(),
        domain_id: domain_label(body),
        params: json!({ "k": k, "lambda_k": lambda, "h_upper": h_upper }),
        lhs: diam,
        rhs: 1.0 / h_upper,
        c_emp: Some(diam * lambda.sqrt() / (n * k as f64)),
        pass: diam >= 1.0 / h_upper,
        seed: 0,
    })
}

/// Running maximum of an empirical constant over a suite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteMax {
    pub max: Option<f64>,
    pub instances: usize,
}

impl SuiteMax {
    pub fn push(&mut self, c: f64) {
        self.instances += 1;
        self.max = Some(self.max.map_or(c, |m| m.max(c)));
    }
}
