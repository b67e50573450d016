//! Partition certificates for Neumann eigenvalue lower bounds, the
//! bisecting eigenfunction combination, and end-to-end comparison pipelines
//! between nested convex domains.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cheeger::domain_label;
use crate::error::{Error, Result};
use crate::fem::{assemble, spectrum_with, EigenResult, FemConfig};
use crate::geometry::{
    complete_cover, greedy_net, voronoi_partition, ConvexBody, PartitionPieces, Point, Polygon,
};
use crate::measure::{body_inside, stein_center, uniform_points};
use crate::mesh::{P1Field, Part};
use crate::BoundaryCondition;

pub const DEFAULT_BISECTION_TOL: f64 = 1e-3;
pub const DEFAULT_RESTARTS: usize = 32;

/// Doublings of `c_sep` allowed before a pipeline instance is flagged.
pub const MAX_DOUBLINGS: usize = 6;

/// Minimum normalized Gram determinant of the bisection basis.
pub const GRAM_TOL: f64 = 1e-10;

/// Boundary samples for the neighbourhood claim of [`lem_mthm2_run`].
pub const CLAIM_SAMPLES: usize = 1_000;

/// Sample points used to measure cover multiplicity.
pub const MULTIPLICITY_SAMPLES: usize = 10_000;

const GN_ITERS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertConfig {
    /// Stand-in for the unknown absolute constant of the separation bound.
    pub c_sep: f64,
    /// Relative tolerance of FEM comparisons.
    pub slack: f64,
    /// Mesh spacing as a fraction of the diameter (capped at half the
    /// inradius).
    pub mesh_h: f64,
    pub seed: u64,
    /// Solve FEM problems on two levels and use the error estimate.
    pub richardson: bool,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            c_sep: 1.0,
            slack: 0.05,
            mesh_h: 1.0 / 30.0,
            seed: 0,
            richardson: false,
        }
    }
}

impl CertConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_sep > 0.0 && self.c_sep.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "c_sep must be > 0, got {}",
                self.c_sep
            )));
        }
        if !(self.slack > 0.0 && self.slack < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "slack must lie in (0, 0.5), got {}",
                self.slack
            )));
        }
        if !(self.mesh_h > 0.0 && self.mesh_h < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mesh_h must lie in (0, 1), got {}",
                self.mesh_h
            )));
        }
        Ok(())
    }

    /// Absolute mesh spacing for `body`.
    pub fn h_for(&self, body: &ConvexBody) -> f64 {
        (self.mesh_h * body.diameter()).min(0.5 * body.inradius())
    }

    /// Neumann `lambda_0..lambda_k` of `body`.
    pub fn neumann(&self, body: &ConvexBody, k: usize) -> Result<EigenResult> {
        let cfg = FemConfig {
            richardson: self.richardson,
            ..FemConfig::default()
        };
        spectrum_with(
            body,
            BoundaryCondition::Neumann,
            k.max(1),
            self.h_for(body),
            self.seed,
            &cfg,
        )
    }
}

/// `lambda_l(domain) >= h_min_lower^2 / (4 M^2)` for a cover with `l` pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub domain_id: String,
    pub l: usize,
    #[serde(rename = "M")]
    pub multiplicity: usize,
    pub h_min_lower: f64,
    pub lambda_lower: f64,
    pub fem_lambda: Option<f64>,
    pub fem_error: Option<f64>,
    pub slack: f64,
    pub c_sep_final: Option<f64>,
    pub seeds: Vec<u64>,
    pub piece_diameters: Vec<f64>,
}

impl PartitionCertificate {
    /// Attaches the FEM value of `lambda_l` from a Neumann spectrum.
    pub fn cross_check(mut self, fem: &EigenResult, slack: f64) -> Result<Self> {
        let v = fem.spectrum.lambda(self.l).ok_or_else(|| {
            Error::InvalidArgument(format!("FEM spectrum lacks lambda_{}", self.l))
        })?;
        self.fem_lambda = Some(v);
        self.fem_error = Some(fem.error_estimates.get(self.l).copied().unwrap_or(0.0));
        self.slack = slack;
        self.seeds.push(fem.seed);
        Ok(self)
    }

    /// `lambda_lower <= fem_lambda (1 + slack + error)`; `None` without a
    /// FEM value.
    pub fn is_sound(&self) -> Option<bool> {
        self.fem_lambda
            .map(|f| self.lambda_lower <= f * (1.0 + self.slack + self.fem_error.unwrap_or(0.0)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// Largest number of cover members containing a sampled point of `domain`.
pub fn multiplicity(
    cover: &[ConvexBody],
    domain: &ConvexBody,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    if cover.is_empty() {
        return Err(Error::InvalidArgument("empty cover".into()));
    }
    let pts = uniform_points(domain, samples.max(1), seed, 0)?;
    let mut best = 0;
    for p in &pts {
        let m = cover.iter().filter(|c| c.contains(p)).count();
        if m == 0 {
            return Err(Error::Precondition(format!(
                "cover misses the sample point {p:?}"
            )));
        }
        best = best.max(m);
    }
    Ok(best)
}

/// Certificate from a convex partition: each piece has Cheeger constant at
/// least `1 / diam`, and `M = 1`.
pub fn certify_lower(
    domain: &ConvexBody,
    pieces: &PartitionPieces,
) -> Result<PartitionCertificate> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("no pieces".into()));
    }
    let poly = domain.to_polygon()?;
    if (poly.area() - pieces.parent.area()).abs() > 1e-9 * poly.area() {
        return Err(Error::Precondition(
            "pieces partition a different domain".into(),
        ));
    }
    pieces.validate()?;
    let diam = pieces.max_diameter();
    let h = 1.0 / diam;
    Ok(PartitionCertificate {
        domain_id: domain_label(domain),
        l: pieces.len(),
        multiplicity: 1,
        h_min_lower: h,
        lambda_lower: h * h / 4.0,
        fem_lambda: None,
        fem_error: None,
        slack: 0.0,
        c_sep_final: None,
        seeds: Vec::new(),
        piece_diameters: pieces.diameters.clone(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BisectionResult {
    /// Unit-sphere coefficients of `1, f_1, .., f_l`, each basis function
    /// scaled to mean square one.
    pub coefficients: Vec<f64>,
    /// `|mu(A_i ∩ {f >= 0}) - mu(A_i)/2| / mu(A_i)`.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub converged: bool,
    pub restarts_used: usize,
    #[serde(skip)]
    pub field: Option<P1Field>,
}

/// Signed defects `mu(A_i ∩ {f >= 0}) / mu(A_i) - 1/2`.
pub fn signed_defects(field: &P1Field, pieces: &PartitionPieces) -> Vec<f64> {
    pieces
        .pieces
        .iter()
        .map(|p| field.moments(Some(p), Part::Positive).area / p.area() - 0.5)
        .collect()
}

struct Bisector<'a> {
    basis: DMatrix<f64>,
    mesh: Arc<crate::mesh::Mesh>,
    pieces: &'a PartitionPieces,
}

impl Bisector<'_> {
    fn field(&self, c: &DVector<f64>) -> P1Field {
        let v = &self.basis * c;
        P1Field::new(self.mesh.clone(), v.as_slice().to_vec()).expect("finite combination")
    }

    fn residual(&self, c: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(signed_defects(&self.field(c), self.pieces))
    }

    /// Gauss-Newton descent of the squared defects on the sphere, with a
    /// backtracking line search.
    fn descend(&self, mut c: DVector<f64>, tol: f64) -> (DVector<f64>, DVector<f64>) {
        let dim = c.len();
        let mut s = self.residual(&c);
        for _ in 0..GN_ITERS {
            if s.amax() <= 0.01 * tol {
                break;
            }
            let mut jac = DMatrix::zeros(s.len(), dim);
            let step = 1e-6;
            for j in 0..dim {
                let mut cp = c.clone();
                let mut cm = c.clone();
                cp[j] += step;
                cm[j] -= step;
                let d = (self.residual(&cp) - self.residual(&cm)) / (2.0 * step);
                jac.set_column(j, &d);
            }
            let proj = DMatrix::identity(dim, dim) - &c * c.transpose();
            let jp = &jac * &proj;
            let Ok(pinv) = jp.pseudo_inverse(1e-12) else {
                break;
            };
            let delta = -(pinv * &s);
            let f0 = s.norm_squared();
            let mut improved = false;
            let mut t = 1.0;
            for _ in 0..12 {
                let mut cn = &c + &delta * t;
                cn /= cn.norm();
                let sn = self.residual(&cn);
                if sn.norm_squared() < f0 {
                    c = cn;
                    s = sn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (c, s)
    }
}

/// Finds `f = c_0 + sum c_i f_i` bisecting every piece, where `f_i` are the
/// first `l` nonconstant Neumann eigenfunctions in `eigen`.
pub fn bisect_combination(
    eigen: &EigenResult,
    pieces: &PartitionPieces,
    tol: f64,
    seed: u64,
    restarts: usize,
) -> Result<BisectionResult> {
    let l = pieces.len();
    if l == 0 {
        return Err(Error::InvalidArgument("no pieces".into()));
    }
    let skip = usize::from(eigen.spectrum.bc == BoundaryCondition::Neumann);
    if eigen.eigenfunctions.len() < skip + l {
        return Err(Error::InvalidArgument(format!(
            "need {l} nonconstant eigenfunctions, have {}",
            eigen.eigenfunctions.len() - skip
        )));
    }
    let mesh = eigen.mesh().clone();
    let n = mesh.n_vertices();
    let area = mesh.area();
    let (_, mass) = assemble(&mesh)?;
    let mut basis = DMatrix::zeros(n, l + 1);
    basis.column_mut(0).fill(1.0);
    for i in 0..l {
        let f = eigen.eigenfunctions[skip + i].values();
        basis.set_column(i + 1, &DVector::from_column_slice(f));
    }
    for j in 0..=l {
        let col = basis.column(j).clone_owned();
        let nrm = (mass.bilinear(col.as_slice(), col.as_slice()) / area).sqrt();
        if nrm <= 0.0 {
            return Err(Error::Precondition(format!("basis function {j} vanishes")));
        }
        basis.column_mut(j).scale_mut(1.0 / nrm);
    }
    let gram = DMatrix::from_fn(l + 1, l + 1, |i, j| {
        let (a, b) = (basis.column(i).clone_owned(), basis.column(j).clone_owned());
        mass.bilinear(a.as_slice(), b.as_slice()) / area
    });
    let det = gram.determinant();
    if !(det > GRAM_TOL) {
        return Err(Error::Precondition(format!(
            "eigenfunctions are linearly dependent (Gram determinant {det:e})"
        )));
    }
    let bis = Bisector {
        basis,
        mesh,
        pieces,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DVector<f64>, DVector<f64>, usize)> = None;
    for r in 0..restarts.max(1) {
        let mut c = if r == 0 {
            // start on the nonconstant part, where odd symmetries bisect
            let mut c = DVector::zeros(l + 1);
            c[1] = 1.0;
            c
        } else {
            DVector::from_fn(l + 1, |_, _| rng.random_range(-1.0..1.0))
        };
        if c.norm() < 1e-6 {
            c[0] = 1.0;
        }
        c /= c.norm();
        let (c, s) = bis.descend(c, tol);
        let md = s.amax();
        if best.as_ref().is_none_or(|b| md < b.0) {
            best = Some((md, c, s, r + 1));
        }
        if md <= tol {
            break;
        }
    }
    let (max_defect, c, s, used) = best.expect("at least one restart");
    Ok(BisectionResult {
        coefficients: c.as_slice().to_vec(),
        defects: s.iter().map(|d| d.abs()).collect(),
        max_defect,
        converged: max_defect <= tol,
        restarts_used: used,
        field: Some(bis.field(&c)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSide {
    /// `int f_pm^2`.
    pub lhs: f64,
    /// `(4 M^2 / h^2) int |grad f_pm|^2`.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub max_defect: f64,
    pub plus: ChainSide,
    pub minus: ChainSide,
    pub pass: bool,
}

/// Evaluates `int f_pm^2 <= (4 M^2 / h^2) int |grad f_pm|^2` for a field
/// bisecting every piece within `tol`.
pub fn rayleigh_chain_verify(
    field: &P1Field,
    pieces: &PartitionPieces,
    cert: &PartitionCertificate,
    tol: f64,
) -> Result<ChainReport> {
    let max_defect = signed_defects(field, pieces)
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    if max_defect > tol {
        return Err(Error::Precondition(format!(
            "field does not bisect the pieces (max defect {max_defect:.3e})"
        )));
    }
    let m = cert.multiplicity as f64;
    let coeff = 4.0 * m * m / (cert.h_min_lower * cert.h_min_lower);
    let side = |part| {
        let mo = field.moments(None, part);
        let rhs = coeff * mo.gradient_sq;
        ChainSide {
            lhs: mo.integral_sq,
            rhs,
            pass: mo.integral_sq <= rhs * (1.0 + 1e-9),
        }
    };
    let plus = side(Part::Positive);
    let minus = side(Part::Negative);
    Ok(ChainReport {
        max_defect,
        pass: plus.pass && minus.pass,
        plus,
        minus,
    })
}

/// Voronoi partition of `body` from `count` farthest-point sites, certified
/// and cross-checked against FEM.
pub fn partition_certificate(
    body: &ConvexBody,
    count: usize,
    cfg: &CertConfig,
) -> Result<PartitionCertificate> {
    cfg.validate()?;
    let sites = crate::geometry::farthest_point_sites(body, count, cfg.seed)?;
    let poly = body.to_polygon()?;
    let pieces = voronoi_partition(&poly.into(), &sites)?;
    let mut cert = certify_lower(body, &pieces)?;
    cert.seeds.push(cfg.seed);
    let fem = cfg.neumann(body, cert.l)?;
    cert.cross_check(&fem, cfg.slack)
}

/// Net sites and the constant used to reach at most `max_sites` of them.
struct NetOutcome {
    sites: Vec<Point>,
    c_sep: f64,
    radius: f64,
    doublings: usize,
    flagged: bool,
}

/// Greedy `4R` net with `R = c * scale` completed to an exact cover,
/// doubling `c` until it has at most `max_sites` sites.
fn net_with_doubling(
    body: &ConvexBody,
    scale: f64,
    max_sites: usize,
    cfg: &CertConfig,
) -> Result<NetOutcome> {
    let poly = body.to_polygon()?;
    let mut c = cfg.c_sep;
    for doublings in 0..=MAX_DOUBLINGS {
        let radius = c * scale;
        let net = greedy_net(body, 4.0 * radius, cfg.seed)?;
        if net.len() <= max_sites {
            let full = complete_cover(&poly, &net)?;
            if full.len() <= max_sites {
                return Ok(NetOutcome {
                    sites: full.points,
                    c_sep: c,
                    radius,
                    doublings,
                    flagged: false,
                });
            }
        }
        if doublings < MAX_DOUBLINGS {
            c *= 2.0;
        }
    }
    Ok(NetOutcome {
        sites: Vec::new(),
        c_sep: c,
        radius: c * scale,
        doublings: MAX_DOUBLINGS,
        flagged: true,
    })
}

/// Outcome of one comparison pipeline between nested bodies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub pipeline: String,
    pub domain_id: String,
    pub k: usize,
    pub n: usize,
    pub c_sep_final: f64,
    pub doublings: usize,
    /// Net too large even after the allowed doublings.
    pub flagged: bool,
    pub radius: f64,
    pub sites: usize,
    pub max_piece_diameter: f64,
    pub diameter_bound: f64,
    pub diameters_ok: bool,
    /// Eigenvalue driving `R`.
    pub lambda_source: f64,
    /// FEM value of the certified eigenvalue.
    pub lambda_target: f64,
    /// `1 / (4 diameter_bound^2)`.
    pub bound: f64,
    pub bound_sound: bool,
    pub certificate: Option<PartitionCertificate>,
    /// `lambda_source / lambda_target`.
    pub ratio: f64,
    /// `ratio / (n log k)^2` or `ratio / (n^2 log k)^2`.
    pub c_fit: f64,
    /// Neighbourhood claim (lemma pipeline only).
    pub claim_distance: Option<f64>,
    pub claim_holds: Option<bool>,
    pub cover_multiplicity: Option<usize>,
    pub seed: u64,
}

impl PipelineReport {
    /// Constant-free assertions: soundness of every certificate and the
    /// piece-diameter bound.
    pub fn pass(&self) -> bool {
        if self.flagged || self.claim_holds == Some(false) {
            return true;
        }
        self.diameters_ok
            && self.bound_sound
            && self
                .certificate
                .as_ref()
                .is_none_or(|c| c.is_sound() != Some(false))
    }
}

fn sound(lower: f64, fem: &EigenResult, idx: usize, slack: f64) -> bool {
    let v = fem.spectrum.values[idx];
    let err = fem.error_estimates.get(idx).copied().unwrap_or(0.0);
    lower <= v * (1.0 + slack + err)
}

fn require_nested(inner: &ConvexBody, outer: &ConvexBody) -> Result<()> {
    if !body_inside(inner, outer)? {
        return Err(Error::Precondition(
            "inner body is not contained in the outer body".into(),
        ));
    }
    Ok(())
}

/// Executes the partition argument bounding `lambda_k(outer)` by
/// `lambda_{k-1}(inner)`: a `4R`-net of `outer` with at most `k - 1` sites,
/// Voronoi pieces restricted to `inner` of diameter `<= 8R`, and the
/// resulting certificate on `inner`.
pub fn mthm1_run(
    inner: &ConvexBody,
    outer: &ConvexBody,
    k: usize,
    cfg: &CertConfig,
) -> Result<PipelineReport> {
    cfg.validate()?;
    if k < 2 {
        return Err(Error::InvalidArgument("k must be >= 2".into()));
    }
    require_nested(inner, outer)?;
    let n = outer.dim();
    let lk = k as f64;
    let fem_outer = cfg.neumann(outer, k)?;
    let fem_inner = cfg.neumann(inner, k - 1)?;
    let lambda_source = fem_outer.spectrum.values[k];
    let lambda_target = fem_inner.spectrum.values[k - 1];
    let scale = n as f64 * lk.ln() / lambda_source.sqrt();
    let net = net_with_doubling(outer, scale, k - 1, cfg)?;
    let ratio = lambda_source / lambda_target;
    let c_fit = ratio / (n as f64 * lk.ln()).powi(2);
    let diameter_bound = 8.0 * net.radius;
    let bound = 1.0 / (4.0 * diameter_bound * diameter_bound);
    let mut report = PipelineReport {
        pipeline: "mthm1".into(),
        domain_id: format!("{}<{}", domain_label(inner), domain_label(outer)),
        k,
        n,
        c_sep_final: net.c_sep,
        doublings: net.doublings,
        flagged: net.flagged,
        radius: net.radius,
        sites: net.sites.len(),
        max_piece_diameter: 0.0,
        diameter_bound,
        diameters_ok: true,
        lambda_source,
        lambda_target,
        bound,
        bound_sound: sound(bound, &fem_inner, k - 1, cfg.slack),
        certificate: None,
        ratio,
        c_fit,
        claim_distance: None,
        claim_holds: None,
        cover_multiplicity: None,
        seed: cfg.seed,
    };
    if net.flagged {
        return Ok(report);
    }
    let inner_poly = inner.to_polygon()?;
    let pieces =
        voronoi_partition(&outer.to_polygon()?.into(), &net.sites)?.restrict_to(&inner_poly);
    report.max_piece_diameter = pieces.max_diameter();
    report.diameters_ok = report.max_piece_diameter <= diameter_bound;
    let mut cert = certify_lower(inner, &pieces)?;
    cert.c_sep_final = Some(net.c_sep);
    cert.seeds.push(cfg.seed);
    report.certificate = Some(cert.cross_check(&fem_inner, cfg.slack)?);
    Ok(report)
}

/// Largest distance from `CLAIM_SAMPLES` boundary points of `outer` to
/// `inner`.
pub fn neighbourhood_distance(inner: &Polygon, outer: &Polygon) -> f64 {
    (0..CLAIM_SAMPLES)
        .map(|i| inner.distance_to_point(outer.boundary_point(i as f64 / CLAIM_SAMPLES as f64)))
        .fold(0.0, f64::max)
}

/// Executes the lemma comparing `lambda_k(inner)` with `lambda_{k-1}(outer)`
/// when `inner` fills all but `k^-n` of `outer`: a `4R`-net of `inner`, the
/// claim that `outer` lies within `R` of `inner`, and Voronoi pieces of
/// `outer` of diameter `<= 10R`.
pub fn lem_mthm2_run(
    inner: &ConvexBody,
    outer: &ConvexBody,
    k: usize,
    cfg: &CertConfig,
) -> Result<PipelineReport> {
    cfg.validate()?;
    if k < 2 {
        return Err(Error::InvalidArgument("k must be >= 2".into()));
    }
    require_nested(inner, outer)?;
    let n = outer.dim();
    let lk = k as f64;
    let need = 1.0 - lk.powi(-(n as i32));
    let v = inner.volume() / outer.volume();
    if v < need * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "volume ratio {v} is below 1 - k^-n = {need}"
        )));
    }
    let fem_inner = cfg.neumann(inner, k)?;
    let fem_outer = cfg.neumann(outer, k - 1)?;
    let lambda_source = fem_inner.spectrum.values[k];
    let lambda_target = fem_outer.spectrum.values[k - 1];
    let scale = (n * n) as f64 * lk.ln() / lambda_source.sqrt();
    let net = net_with_doubling(inner, scale, k - 1, cfg)?;
    let ratio = lambda_source / lambda_target;
    let c_fit = ratio / ((n * n) as f64 * lk.ln()).powi(2);
    let diameter_bound = 10.0 * net.radius;
    let bound = 1.0 / (4.0 * diameter_bound * diameter_bound);
    let outer_poly = outer.to_polygon()?;
    let claim = neighbourhood_distance(&inner.to_polygon()?, &outer_poly);
    let mut report = PipelineReport {
        pipeline: "lem-mthm2".into(),
        domain_id: format!("{}<{}", domain_label(inner), domain_label(outer)),
        k,
        n,
        c_sep_final: net.c_sep,
        doublings: net.doublings,
        flagged: net.flagged,
        radius: net.radius,
        sites: net.sites.len(),
        max_piece_diameter: 0.0,
        diameter_bound,
        diameters_ok: true,
        lambda_source,
        lambda_target,
        bound,
        bound_sound: sound(bound, &fem_outer, k - 1, cfg.slack),
        certificate: None,
        ratio,
        c_fit,
        claim_distance: Some(claim),
        claim_holds: Some(claim <= net.radius),
        cover_multiplicity: None,
        seed: cfg.seed,
    };
    if net.flagged {
        return Ok(report);
    }
    let pieces = voronoi_partition(&outer_poly.into(), &net.sites)?;
    report.max_piece_diameter = pieces.max_diameter();
    report.diameters_ok = report.max_piece_diameter <= diameter_bound;
    if claim <= net.radius {
        let balls: Vec<ConvexBody> = net
            .sites
            .iter()
            .map(|&s| crate::geometry::Disk::new(s, 5.0 * net.radius).map(ConvexBody::from))
            .collect::<Result<_>>()?;
        report.cover_multiplicity =
            Some(multiplicity(&balls, outer, MULTIPLICITY_SAMPLES, cfg.seed)?);
    }
    let mut cert = certify_lower(outer, &pieces)?;
    cert.c_sep_final = Some(net.c_sep);
    cert.seeds.push(cfg.seed);
    report.certificate = Some(cert.cross_check(&fem_outer, cfg.slack)?);
    Ok(report)
}

/// `r = 2 max(n log k / -log(1 - v), 1)`; `v = 1` gives `r = 2`.
pub fn guedon_radius(n: usize, k: usize, v: f64) -> f64 {
    let denom = -(1.0 - v).ln();
    if !(denom.is_finite()) || v >= 1.0 {
        return 2.0;
    }
    2.0 * (n as f64 * (k as f64).ln() / denom).max(1.0)
}

/// Chained comparison `lambda_{k-2}(outer)` against `lambda_k(inner)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mthm2Report {
    pub domain_id: String,
    pub k: usize,
    pub n: usize,
    pub symmetric: bool,
    /// Recentering translation (general branch).
    pub center: Option<Point>,
    pub overlap_ratio: Option<f64>,
    pub v: f64,
    /// `v`, or `2^-n v` in the general branch.
    pub v_effective: f64,
    pub r: f64,
    /// `mu(outer \ Omega~)`.
    pub leftover: f64,
    pub leftover_bound: f64,
    pub measure_ok: bool,
    pub first: PipelineReport,
    pub second: PipelineReport,
    pub lambda_k_inner: f64,
    pub lambda_km2_outer: f64,
    /// `min(log(1 - v)^2 / (n^8 log^6 k), 1 / (n^6 log^4 k))`.
    pub envelope: f64,
    /// `lambda_{k-2}(outer) / (envelope lambda_k(inner))`.
    pub c_fit: f64,
    pub seed: u64,
}

impl Mthm2Report {
    pub fn pass(&self) -> bool {
        self.first.pass() && self.second.pass()
    }
}

/// Executes the chain: scale the (recentered) inner body by the Guédon
/// radius, intersect with `outer`, then run [`mthm1_run`] against the scaled
/// body and [`lem_mthm2_run`] against `outer`.
pub fn mthm2_run(
    inner: &ConvexBody,
    outer: &ConvexBody,
    k: usize,
    cfg: &CertConfig,
) -> Result<Mthm2Report> {
    cfg.validate()?;
    if k < 3 {
        return Err(Error::InvalidArgument("k must be >= 3".into()));
    }
    require_nested(inner, outer)?;
    let n = outer.dim();
    let v = inner.volume() / outer.volume();
    let symmetric = inner.is_symmetric(crate::measure::SYMMETRY_TOL);
    let (inner_c, outer_c, center, overlap, v_eff) = if symmetric {
        (inner.to_polygon()?, outer.to_polygon()?, None, None, v)
    } else {
        let ip = inner.to_polygon()?;
        let (c, ratio) = stein_center(&ip, 24, 30);
        (
            ip.translated(-c),
            outer.to_polygon()?.translated(-c),
            Some(c),
            Some(ratio),
            2f64.powi(-(n as i32)) * v,
        )
    };
    let r = guedon_radius(n, k, v_eff);
    let scaled = inner_c.scaled(r);
    let tilde = scaled
        .intersect(&outer_c)
        .ok_or_else(|| Error::Infeasible("scaled inner body misses the outer body".into()))?;
    let leftover = 1.0 - tilde.area() / outer_c.area();
    let leftover_bound = (k as f64).powi(-(n as i32));
    let measure_ok = leftover < leftover_bound;
    let tilde_b: ConvexBody = tilde.into();
    let first = mthm1_run(&tilde_b, &scaled.into(), k, cfg)?;
    let second = lem_mthm2_run(&tilde_b, &outer_c.clone().into(), k - 1, cfg)?;
    let lambda_k_inner = cfg.neumann(inner, k)?.spectrum.values[k];
    let lambda_km2_outer = cfg.neumann(outer, k - 2)?.spectrum.values[k - 2];
    let (nf, lk) = (n as f64, (k as f64).ln());
    let envelope = ((1.0 - v_eff).ln().powi(2) / (nf.powi(8) * lk.powi(6)))
        .min(1.0 / (nf.powi(6) * lk.powi(4)));
    Ok(Mthm2Report {
        domain_id: format!("{}<{}", domain_label(inner), domain_label(outer)),
        k,
        n,
        symmetric,
        center,
        overlap_ratio: overlap,
        v,
        v_effective: v_eff,
        r,
        leftover,
        leftover_bound,
        measure_ok,
        first,
        second,
        lambda_k_inner,
        lambda_km2_outer,
        envelope,
        c_fit: lambda_km2_outer / (envelope * lambda_k_inner),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn square() -> ConvexBody {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    fn split(vertical: bool) -> PartitionPieces {
        let (a, b) = if vertical {
            (
                Polygon::rectangle(0.0, 0.0, 0.5, 1.0).unwrap(),
                Polygon::rectangle(0.5, 0.0, 1.0, 1.0).unwrap(),
            )
        } else {
            (
                Polygon::rectangle(0.0, 0.0, 1.0, 0.5).unwrap(),
                Polygon::rectangle(0.0, 0.5, 1.0, 1.0).unwrap(),
            )
        };
        PartitionPieces::new(Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap(), vec![a, b])
    }

    fn whole() -> PartitionPieces {
        let p = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        PartitionPieces::new(p.clone(), vec![p])
    }

    #[test]
    fn config_validation() {
        assert!(CertConfig::default().validate().is_ok());
        for bad in [
            CertConfig {
                c_sep: 0.0,
                ..Default::default()
            },
            CertConfig {
                slack: 0.5,
                ..Default::default()
            },
            CertConfig {
                slack: 0.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn multiplicity_of_covers() {
        let sq = square();
        let halves: Vec<ConvexBody> = split(true).pieces.into_iter().map(Into::into).collect();
        assert_eq!(multiplicity(&halves, &sq, 2_000, 1).unwrap(), 1);
        let overlapping: Vec<ConvexBody> = vec![
            Polygon::rectangle(0.0, 0.0, 0.6, 1.0).unwrap().into(),
            Polygon::rectangle(0.4, 0.0, 1.0, 1.0).unwrap().into(),
        ];
        assert_eq!(multiplicity(&overlapping, &sq, 2_000, 1).unwrap(), 2);
        let gap: Vec<ConvexBody> = vec![Polygon::rectangle(0.0, 0.0, 0.4, 1.0).unwrap().into()];
        assert!(multiplicity(&gap, &sq, 2_000, 1).is_err());
        let big: Vec<ConvexBody> = vec![Disk::new(Point::new(0.5, 0.5), 1.0).unwrap().into()];
        assert_eq!(multiplicity(&big, &sq, 2_000, 1).unwrap(), 1);
    }

    #[test]
    fn certificates_by_hand() {
        let c = certify_lower(&square(), &split(true)).unwrap();
        assert_relative_eq!(c.h_min_lower, 1.0 / 1.25f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(c.lambda_lower, 0.2, max_relative = 1e-12);
        assert_eq!((c.l, c.multiplicity), (2, 1));
        let c = certify_lower(&square(), &whole()).unwrap();
        assert_relative_eq!(c.lambda_lower, 0.125, max_relative = 1e-12);
        assert_relative_eq!(
            c.lambda_lower,
            c.h_min_lower.powi(2) / 4.0,
            max_relative = 1e-15
        );
        let json = c.to_json();
        for key in [
            "domain_id",
            "\"l\"",
            "\"M\"",
            "h_min_lower",
            "lambda_lower",
            "fem_lambda",
            "slack",
            "c_sep_final",
            "seeds",
            "piece_diameters",
        ] {
            assert!(json.contains(key), "{key}");
        }
    }

    #[test]
    fn non_partitions_rejected() {
        let p = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let overlap = PartitionPieces::new(
            p.clone(),
            vec![
                Polygon::rectangle(0.0, 0.0, 0.6, 1.0).unwrap(),
                Polygon::rectangle(0.4, 0.0, 1.0, 1.0).unwrap(),
            ],
        );
        assert!(certify_lower(&square(), &overlap).is_err());
        let short = PartitionPieces::new(p, vec![Polygon::rectangle(0.0, 0.0, 0.5, 1.0).unwrap()]);
        assert!(certify_lower(&square(), &short).is_err());
    }

    #[test]
    fn cross_checked_certificates_are_sound() {
        let cfg = CertConfig::default();
        let fem = cfg.neumann(&square(), 2).unwrap();
        let c = certify_lower(&square(), &split(true))
            .unwrap()
            .cross_check(&fem, 0.05)
            .unwrap();
        assert_eq!(c.is_sound(), Some(true));
        assert!((c.fem_lambda.unwrap() - PI * PI).abs() < 0.05 * PI * PI);
        for l in 1..=4 {
            let c = partition_certificate(&square(), l, &cfg).unwrap();
            assert_eq!(c.l, l);
            assert_eq!(c.is_sound(), Some(true));
        }
    }

    #[test]
    fn bisection_on_the_square() {
        let cfg = CertConfig::default();
        let fem = cfg.neumann(&square(), 3).unwrap();
        let b = bisect_combination(&fem, &whole(), 1e-3, 1, 32).unwrap();
        assert!(b.converged, "{b:?}");
        assert!(b.coefficients[0].abs() < 0.05, "{:?}", b.coefficients);
        let norm: f64 = b.coefficients.iter().map(|c| c * c).sum();
        assert_relative_eq!(norm, 1.0, max_relative = 1e-12);

        let pieces = split(true);
        let b = bisect_combination(&fem, &pieces, 1e-3, 1, 32).unwrap();
        assert!(b.max_defect <= 1e-3, "{b:?}");
        let cert = certify_lower(&square(), &pieces).unwrap();
        let chain = rayleigh_chain_verify(b.field.as_ref().unwrap(), &pieces, &cert, 1e-3).unwrap();
        assert!(chain.pass, "{chain:?}");
    }

    #[test]
    fn dependent_eigenfunctions_rejected() {
        let cfg = CertConfig::default();
        let mut fem = cfg.neumann(&square(), 2).unwrap();
        fem.eigenfunctions[2] = fem.eigenfunctions[1].clone();
        assert!(matches!(
            bisect_combination(&fem, &split(true), 1e-3, 0, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rayleigh_chain_by_hand() {
        let mesh = Arc::new(
            crate::mesh::Mesh::triangulate(
                &Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap(),
                0.05,
                2,
            )
            .unwrap(),
        );
        let pieces = split(false);
        let cert = certify_lower(&square(), &pieces).unwrap();
        let f = P1Field::interpolate(mesh.clone(), |p| p.x - 0.5).unwrap();
        let r = rayleigh_chain_verify(&f, &pieces, &cert, 1e-3).unwrap();
        assert_relative_eq!(r.plus.lhs, 1.0 / 24.0, max_relative = 1e-9);
        assert_relative_eq!(r.minus.lhs, 1.0 / 24.0, max_relative = 1e-9);
        assert_relative_eq!(r.plus.rhs, 4.0 * 1.25 * 0.5, max_relative = 1e-9);
        assert!(r.pass);
        let c = P1Field::interpolate(mesh, |_| 1.0).unwrap();
        assert!(rayleigh_chain_verify(&c, &pieces, &cert, 1e-3).is_err());
    }

    #[test]
    fn mthm1_on_the_square() {
        let cfg = CertConfig::default();
        let r = mthm1_run(&square(), &square(), 2, &cfg).unwrap();
        assert!(!r.flagged);
        assert_eq!(r.sites, 1);
        assert!(r.diameters_ok);
        assert!(r.pass(), "{r:?}");
        assert!(r.bound <= PI * PI);
        let c = r.certificate.unwrap();
        assert_eq!(c.l, 1);
    }

    #[test]
    fn mthm1_is_scale_invariant() {
        let cfg = CertConfig::default();
        let inner: ConvexBody = Polygon::rectangle(0.1, 0.2, 0.7, 0.6).unwrap().into();
        let a = mthm1_run(&inner, &square(), 3, &cfg).unwrap();
        let b = mthm1_run(
            &inner.scale(3.0).unwrap(),
            &square().scale(3.0).unwrap(),
            3,
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-6);
        assert_relative_eq!(a.c_fit, b.c_fit, max_relative = 1e-6);
        assert_eq!(a.sites, b.sites);
    }

    #[test]
    fn lemma_run_on_a_shrunken_square() {
        let cfg = CertConfig::default();
        // 1 - (1 - 2e)^2 <= 1/9 for e = 0.025
        let inner: ConvexBody = Polygon::rectangle(0.025, 0.025, 0.975, 0.975)
            .unwrap()
            .into();
        let r = lem_mthm2_run(&inner, &square(), 3, &cfg).unwrap();
        assert_eq!(r.claim_holds, Some(true));
        assert!(r.claim_distance.unwrap() <= 0.025 * 2f64.sqrt() + 1e-9);
        assert!(r.pass(), "{r:?}");
        assert!(r.cover_multiplicity.unwrap() >= 1);
        let thin: ConvexBody = Polygon::rectangle(0.2, 0.2, 0.8, 0.8).unwrap().into();
        assert!(lem_mthm2_run(&thin, &square(), 3, &cfg).is_err());
    }

    #[test]
    fn guedon_radius_formula() {
        assert_eq!(guedon_radius(2, 3, 1.0), 2.0);
        let v: f64 = 0.16;
        assert_relative_eq!(
            guedon_radius(2, 3, v),
            2.0 * 2.0 * 3f64.ln() / -(1.0 - v).ln(),
            max_relative = 1e-12
        );
        assert_eq!(guedon_radius(2, 3, 0.999999), 2.0);
    }

    #[test]
    fn mthm2_symmetric_and_general() {
        let cfg = CertConfig::default();
        let inner: ConvexBody = Polygon::rectangle(-0.4, -0.4, 0.4, 0.4).unwrap().into();
        let outer: ConvexBody = Polygon::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap().into();
        let r = mthm2_run(&inner, &outer, 3, &cfg).unwrap();
        assert!(r.symmetric && r.measure_ok);
        assert!(r.pass(), "{r:?}");
        assert!(r.c_fit.is_finite() && r.c_fit > 0.0);

        let tri: ConvexBody = Polygon::new(vec![
            Point::new(-0.5, -0.4),
            Point::new(0.6, -0.3),
            Point::new(0.0, 0.5),
        ])
        .unwrap()
        .into();
        let r = mthm2_run(&tri, &outer, 3, &cfg).unwrap();
        assert!(!r.symmetric);
        assert!(r.overlap_ratio.unwrap() >= 0.25);
        assert!(r.pass(), "{r:?}");
    }
}
