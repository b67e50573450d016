//! Domain corpus, builtin domains, verification suites, experiments and
//! regression baselines.

mod experiments;
mod suites;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::{mthm1_run, CertConfig, PipelineReport};
use crate::cheeger::{cheeger_bounds, CheegerBounds};
use crate::error::{Error, Result};
use crate::fem::{spectrum_with, EigenResult, FemConfig};
use crate::geometry::{BoxNd, ConvexBody, Disk, Point, Polygon};
use crate::measure::stream_rng;
use crate::BoundaryCondition;

pub use experiments::{run_experiment, Experiment, ExperimentOutput};
pub use suites::{run_suite, Suite};

/// Largest eigenvalue index used by the suites.
pub const SUITE_K: usize = 8;

/// Relative band of the regression baseline.
pub const BASELINE_BAND: f64 = 0.10;

/// Vertices of a polygonalized smooth `l_p` ball.
pub const LP_VERTICES: usize = 128;

/// Environment variable naming the regression baseline file.
pub const BASELINE_ENV: &str = "SANDWICH_BASELINE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub id: String,
    pub body: ConvexBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedPair {
    pub id: String,
    pub inner: ConvexBody,
    pub outer: ConvexBody,
}

impl NestedPair {
    pub fn volume_ratio(&self) -> f64 {
        self.inner.volume() / self.outer.volume()
    }
}

/// Boundary of the unit `l_p` ball in the plane, `p >= 1`.
pub fn lp_polygon(p: f64, vertices: usize) -> Result<Polygon> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "l_p ball needs 1 <= p < inf, got {p}"
        )));
    }
    if vertices < 8 {
        return Err(Error::InvalidArgument(
            "l_p polygon needs at least 8 vertices".into(),
        ));
    }
    let e = 2.0 / p;
    let pts = (0..vertices)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / vertices as f64;
            let (s, c) = t.sin_cos();
            Point::new(c.signum() * c.abs().powf(e), s.signum() * s.abs().powf(e))
        })
        .collect();
    Polygon::new(pts)
}

/// Parses `square`, `box:LxW[x..]`, `disk:r`, `needle:L:eps`, `lp2d:p` or
/// `regular:m`.
pub fn parse_builtin(spec: &str) -> Result<ConvexBody> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad number {s:?} in builtin {spec:?}")))
    };
    match parts.as_slice() {
        ["square"] => Ok(Polygon::rectangle(0.0, 0.0, 1.0, 1.0)?.into()),
        ["box", dims] => {
            let lengths = dims.split('x').map(num).collect::<Result<Vec<_>>>()?;
            if lengths.len() == 2 {
                Ok(Polygon::rectangle(0.0, 0.0, lengths[0], lengths[1])?.into())
            } else {
                Ok(BoxNd::from_lengths(lengths)?.into())
            }
        }
        ["disk", r] => Ok(Disk::new(Point::new(0.0, 0.0), num(r)?)?.into()),
        ["needle", l, eps] => Ok(Polygon::rectangle(0.0, 0.0, num(l)?, num(eps)?)?.into()),
        ["lp2d", p] => Ok(lp_polygon(num(p)?, LP_VERTICES)?.into()),
        ["regular", m] => {
            let m = m.parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("bad vertex count in builtin {spec:?}"))
            })?;
            Ok(Polygon::regular(m, Point::new(0.0, 0.0), 1.0, 0.0)?.into())
        }
        _ => Err(Error::Unknown {
            kind: "builtin",
            name: spec.into(),
        }),
    }
}

fn random_hull(count: usize, seed: u64, stream: u32) -> Result<Polygon> {
    let mut rng = stream_rng(seed, stream, 0);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p.norm() <= 1.0 {
            pts.push(p);
        }
    }
    Polygon::convex_hull(&pts)
}

/// At least ten planar convex polygons: squares, rectangles up to aspect 40,
/// seeded random hulls, regular polygons and `l_p` balls.
pub fn corpus(seed: u64) -> Result<Vec<Domain>> {
    let rect = |w: f64, h: f64| Polygon::rectangle(0.0, 0.0, w, h);
    let origin = Point::new(0.0, 0.0);
    let mut out = vec![
        ("square".to_string(), rect(1.0, 1.0)?),
        ("rect-2x1".into(), rect(2.0, 1.0)?),
        ("rect-10x1".into(), rect(10.0, 1.0)?),
        ("rect-40x1".into(), rect(40.0, 1.0)?),
        ("triangle".into(), Polygon::regular(3, origin, 1.0, 0.3)?),
        ("pentagon".into(), Polygon::regular(5, origin, 1.0, 0.0)?),
        ("hexagon".into(), Polygon::regular(6, origin, 1.0, 0.0)?),
        ("dodecagon".into(), Polygon::regular(12, origin, 1.0, 0.1)?),
    ];
    for (i, count) in [8usize, 14, 20].into_iter().enumerate() {
        out.push((format!("hull-{count}"), random_hull(count, seed, i as u32)?));
    }
    for (name, p) in [("lp-1", 1.0), ("lp-1.5", 1.5), ("lp-2", 2.0)] {
        out.push((name.to_string(), lp_polygon(p, LP_VERTICES)?));
    }
    Ok(out
        .into_iter()
        .map(|(id, p)| Domain { id, body: p.into() })
        .collect())
}

/// Nested pairs built by shrinking, clipping and inscribing.
pub fn nested_pairs(seed: u64) -> Result<Vec<NestedPair>> {
    let square = Polygon::rectangle(0.0, 0.0, 1.0, 1.0)?;
    let origin = Point::new(0.0, 0.0);
    let shrink = |p: &Polygon, s: f64| {
        let c = p.centroid();
        p.translated(-c).scaled(s).translated(c)
    };
    let hexagon = Polygon::regular(6, origin, 1.0, 0.0)?;
    let hull = random_hull(14, seed, 1)?;
    let tri = Polygon::regular(3, origin, 1.0, 0.3)?;
    let lp = lp_polygon(1.5, LP_VERTICES)?;
    let needle = diagonal_needle(1.2, 0.05)?;
    let pairs = vec![
        ("square/shrink-0.9", shrink(&square, 0.9), square.clone()),
        (
            "square/clip-0.6",
            square
                .clip_halfplane(Point::new(1.0, 0.0), 0.6)
                .expect("nonempty"),
            square.clone(),
        ),
        (
            "rect-2x1/square",
            square.clone(),
            Polygon::rectangle(0.0, 0.0, 2.0, 1.0)?,
        ),
        ("hexagon/shrink-0.5", shrink(&hexagon, 0.5), hexagon.clone()),
        ("triangle/shrink-0.7", shrink(&tri, 0.7), tri),
        ("hull-14/shrink-0.8", shrink(&hull, 0.8), hull),
        (
            "lp-1.5/clip",
            lp.clip_halfplane(Point::new(1.0, 1.0), 0.5)
                .expect("nonempty"),
            lp,
        ),
        ("square/diagonal-needle", needle, square),
    ];
    Ok(pairs
        .into_iter()
        .map(|(id, inner, outer)| NestedPair {
            id: id.into(),
            inner: inner.into(),
            outer: outer.into(),
        })
        .collect())
}

/// Rectangle of the given length and width along the diagonal of the unit
/// square, centered in it.
pub fn diagonal_needle(length: f64, width: f64) -> Result<Polygon> {
    let c = Point::new(0.5, 0.5);
    let u = Point::new(1.0, 1.0) * (0.5 * length * std::f64::consts::FRAC_1_SQRT_2);
    let w = Point::new(-1.0, 1.0) * (0.5 * width * std::f64::consts::FRAC_1_SQRT_2);
    Polygon::new(vec![c - u - w, c + u - w, c + u + w, c - u + w])
}

/// Corpus, configuration and lazily computed spectra shared by the suites.
pub struct Lab {
    pub cfg: CertConfig,
    pub domains: Vec<Domain>,
    pub pairs: Vec<NestedPair>,
    neumann: OnceLock<Vec<EigenResult>>,
    pair_neumann: OnceLock<Vec<(EigenResult, EigenResult)>>,
    cheeger: OnceLock<Vec<CheegerBounds>>,
    mthm1: OnceLock<Vec<(usize, usize, Result<PipelineReport>)>>,
}

impl Lab {
    pub fn new(cfg: CertConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            domains: corpus(cfg.seed)?,
            pairs: nested_pairs(cfg.seed)?,
            cfg,
            neumann: OnceLock::new(),
            pair_neumann: OnceLock::new(),
            cheeger: OnceLock::new(),
            mthm1: OnceLock::new(),
        })
    }

    /// Neumann `lambda_0..lambda_8` of every corpus domain.
    pub fn neumann(&self) -> Result<&[EigenResult]> {
        if let Some(v) = self.neumann.get() {
            return Ok(v);
        }
        let v = par_map(&self.domains, |d| self.cfg.neumann(&d.body, SUITE_K))?;
        Ok(self.neumann.get_or_init(|| v))
    }

    /// Neumann `lambda_0..lambda_3` of both bodies of every nested pair.
    pub fn pair_neumann(&self) -> Result<&[(EigenResult, EigenResult)]> {
        if let Some(v) = self.pair_neumann.get() {
            return Ok(v);
        }
        let v = par_map(&self.pairs, |p| {
            Ok((
                self.cfg.neumann(&p.inner, 3)?,
                self.cfg.neumann(&p.outer, 3)?,
            ))
        })?;
        Ok(self.pair_neumann.get_or_init(|| v))
    }

    pub fn cheeger(&self) -> Result<&[CheegerBounds]> {
        if let Some(v) = self.cheeger.get() {
            return Ok(v);
        }
        let v = par_map(&self.domains, |d| cheeger_bounds(&d.body))?;
        Ok(self.cheeger.get_or_init(|| v))
    }

    /// Dirichlet `lambda_1` of `body` at the lab's mesh spacing.
    pub fn dirichlet(&self, body: &ConvexBody) -> Result<EigenResult> {
        let cfg = FemConfig {
            richardson: self.cfg.richardson,
            ..FemConfig::default()
        };
        spectrum_with(
            body,
            BoundaryCondition::Dirichlet,
            1,
            self.cfg.h_for(body),
            self.cfg.seed,
            &cfg,
        )
    }

    /// Partition pipeline runs on every nested pair for `k = 2, 3`, indexed
    /// by pair and `k`.
    pub fn mthm1_runs(&self) -> &[(usize, usize, Result<PipelineReport>)] {
        self.mthm1.get_or_init(|| {
            let jobs: Vec<(usize, usize)> = (0..self.pairs.len())
                .flat_map(|i| [(i, 2), (i, 3)])
                .collect();
            use rayon::prelude::*;
            jobs.par_iter()
                .map(|&(i, k)| {
                    let p = &self.pairs[i];
                    (i, k, mthm1_run(&p.inner, &p.outer, k, &self.cfg))
                })
                .collect()
        })
    }
}

/// Order-preserving parallel map that stops at the first error.
pub(crate) fn par_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<U> + Sync,
) -> Result<Vec<U>> {
    use rayon::prelude::*;
    items.par_iter().map(&f).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    /// Whether failures count against `verify --all`.
    pub asserted: bool,
    pub passed: usize,
    pub failed: usize,
    /// Fitted empirical constants.
    pub constants: BTreeMap<String, f64>,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub instances: Vec<Value>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub baseline: Vec<BaselineCheck>,
}

impl ExperimentReport {
    /// Builds the summary from per-instance `pass` fields.
    pub fn new(
        suite: &str,
        asserted: bool,
        instances: Vec<Value>,
        constants: BTreeMap<String, f64>,
    ) -> Self {
        let mut seeds: Vec<u64> = instances
            .iter()
            .filter_map(|v| v["seed"].as_u64())
            .collect();
        seeds.sort_unstable();
        seeds.dedup();
        let passed = instances
            .iter()
            .filter(|v| v["pass"] == Value::Bool(true))
            .count();
        let failed = instances
            .iter()
            .filter(|v| v["pass"] == Value::Bool(false))
            .count();
        Self {
            suite: suite.into(),
            summary: Summary {
                instances: instances.len(),
                asserted,
                passed,
                failed,
                constants,
                seeds,
                wall_time_s: None,
            },
            instances,
            timestamp: None,
            baseline: Vec::new(),
        }
    }

    /// Adds wall time and a Unix timestamp.
    pub fn stamp(&mut self, elapsed_s: f64) {
        self.summary.wall_time_s = Some(elapsed_s);
        self.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }

    /// Whether the suite's assertions hold.
    pub fn ok(&self) -> bool {
        !self.summary.asserted || self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Builds an instance record carrying the seed and mesh spacing.
pub fn record(domain_id: &str, seed: u64, h: f64, pass: Option<bool>, data: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("domain_id".into(), domain_id.into());
    m.insert("seed".into(), seed.into());
    m.insert("h".into(), h.into());
    m.insert("pass".into(), pass.map_or(Value::Null, Value::Bool));
    if let Value::Object(d) = data {
        m.extend(d);
    }
    Value::Object(m)
}

/// Fitted constants keyed by suite name.
pub type Baseline = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineCheck {
    pub constant: String,
    pub value: f64,
    pub baseline: f64,
    pub within: bool,
}

pub fn baseline_from(reports: &[ExperimentReport]) -> Baseline {
    reports
        .iter()
        .filter(|r| !r.summary.constants.is_empty())
        .map(|r| (r.suite.clone(), r.summary.constants.clone()))
        .collect()
}

pub fn read_baseline(path: impl AsRef<Path>) -> Result<Baseline> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_baseline(path: impl AsRef<Path>, reports: &[ExperimentReport]) -> Result<()> {
    let text = serde_json::to_string_pretty(&baseline_from(reports))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Whether `value` lies within the relative band of `base`.
pub fn within_band(value: f64, base: f64) -> bool {
    if base == 0.0 {
        return value.abs() <= 1e-12;
    }
    ((value - base) / base).abs() <= BASELINE_BAND
}

/// Compares the report's constants with the baseline entries for its suite.
pub fn apply_baseline(report: &mut ExperimentReport, baseline: &Baseline) {
    let Some(base) = baseline.get(&report.suite) else {
        return;
    };
    report.baseline = base
        .iter()
        .map(|(name, &b)| {
            let value = report
                .summary
                .constants
                .get(name)
                .copied()
                .unwrap_or(f64::NAN);
            BaselineCheck {
                constant: name.clone(),
                value,
                baseline: b,
                within: within_band(value, b),
            }
        })
        .collect();
}

/// Runs every registered suite.
pub fn run_all(lab: &Lab) -> Result<Vec<ExperimentReport>> {
    Suite::ALL.iter().map(|s| run_suite(*s, lab)).collect()
}
