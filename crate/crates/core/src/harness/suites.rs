use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use super::{par_map, record, ExperimentReport, Lab, SUITE_K};
use crate::analytic::{box_spectrum, disk_spectrum};
use crate::certify::{
    bisect_combination, certify_lower, mthm2_run, rayleigh_chain_verify, DEFAULT_BISECTION_TOL,
    DEFAULT_RESTARTS,
};
use crate::cheeger::{
    cheeger_lower, diam_eigen_with, milman_consistency, poincare_check, reduction_from_witness,
    sep_lower, DEFAULT_SEP_ITERS,
};
use crate::error::{Error, Result};
use crate::geometry::{farthest_point_sites, voronoi_partition, ConvexBody, Disk, Point, Polygon};
use crate::measure::{bishop_gromov_check, guedon_check, stein_center, stream_rng};
use crate::mesh::P1Field;
use crate::BoundaryCondition;

/// Random smooth fields per corpus domain in the Poincare suite.
pub const POINCARE_FIELDS: usize = 100;

/// Randomized symmetric instances in the Guedon suite.
pub const GUEDON_INSTANCES: usize = 50;

/// Samples for the Monte Carlo checks of the suites.
pub const SUITE_SAMPLES: usize = 20_000;

/// Samples for the disk-pair Guedon instance.
pub const DISK_PAIR_SAMPLES: usize = 1_000_000;

/// Corpus domains used by the separation suite (the smooth `l_p` balls are
/// skipped for cost).
const REDUCTION_DOMAINS: usize = 8;

const STEIN_GRID: usize = 24;
const STEIN_REFINEMENTS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Soundness,
    Poincare,
    Guedon,
    Stein,
    BishopGromov,
    CheegerOrder,
    MilmanConsistency,
    EneqEmil,
    DirichletMonotonicity,
    Universal,
    Liu,
    MilmanChengLi,
    Mthm1,
    Mthm2,
    Inradius,
    DiamEigen,
    Reduction,
    Bisection,
}

impl Suite {
    pub const ALL: [Suite; 18] = [
        Suite::Soundness,
        Suite::Poincare,
        Suite::Guedon,
        Suite::Stein,
        Suite::BishopGromov,
        Suite::CheegerOrder,
        Suite::MilmanConsistency,
        Suite::EneqEmil,
        Suite::DirichletMonotonicity,
        Suite::Universal,
        Suite::Liu,
        Suite::MilmanChengLi,
        Suite::Mthm1,
        Suite::Mthm2,
        Suite::Inradius,
        Suite::DiamEigen,
        Suite::Reduction,
        Suite::Bisection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Soundness => "soundness",
            Suite::Poincare => "poincare",
            Suite::Guedon => "guedon",
            Suite::Stein => "stein",
            Suite::BishopGromov => "bishop-gromov",
            Suite::CheegerOrder => "cheeger-order",
            Suite::MilmanConsistency => "milman-consistency",
            Suite::EneqEmil => "eneq-emil",
            Suite::DirichletMonotonicity => "dirichlet-monotonicity",
            Suite::Universal => "universal",
            Suite::Liu => "liu",
            Suite::MilmanChengLi => "milman-chengli",
            Suite::Mthm1 => "mthm1",
            Suite::Mthm2 => "mthm2",
            Suite::Inradius => "inradius",
            Suite::DiamEigen => "diam-eigen",
            Suite::Reduction => "reduction",
            Suite::Bisection => "bisection",
        }
    }

    pub fn from_name(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Unknown {
                kind: "suite",
                name: name.into(),
            })
    }

    /// Constant-free suites whose failures fail `verify --all`.
    pub fn asserted(self) -> bool {
        matches!(
            self,
            Suite::Soundness
                | Suite::Poincare
                | Suite::Guedon
                | Suite::Stein
                | Suite::BishopGromov
                | Suite::CheegerOrder
                | Suite::MilmanConsistency
                | Suite::EneqEmil
                | Suite::DirichletMonotonicity
        )
    }
}

/// Runs one suite over the lab's corpus. Reports carry no wall time or
/// timestamp; see [`ExperimentReport::stamp`].
pub fn run_suite(suite: Suite, lab: &Lab) -> Result<ExperimentReport> {
    let (instances, constants) = match suite {
        Suite::Soundness => soundness(lab)?,
        Suite::Poincare => poincare(lab)?,
        Suite::Guedon => guedon(lab)?,
        Suite::Stein => stein(lab)?,
        Suite::BishopGromov => bishop_gromov(lab)?,
        Suite::CheegerOrder => cheeger_order(lab)?,
        Suite::MilmanConsistency => milman(lab)?,
        Suite::EneqEmil => eneq_emil(lab)?,
        Suite::DirichletMonotonicity => dirichlet_monotonicity(lab)?,
        Suite::Universal => universal(lab)?,
        Suite::Liu => liu(lab)?,
        Suite::MilmanChengLi => milman_chengli(lab)?,
        Suite::Mthm1 => mthm1(lab)?,
        Suite::Mthm2 => mthm2(lab)?,
        Suite::Inradius => inradius(lab)?,
        Suite::DiamEigen => diam_eigen(lab)?,
        Suite::Reduction => reduction(lab)?,
        Suite::Bisection => bisection(lab)?,
    };
    Ok(ExperimentReport::new(
        suite.name(),
        suite.asserted(),
        instances,
        constants,
    ))
}

type SuiteOutput = (Vec<Value>, BTreeMap<String, f64>);

fn constants<const N: usize>(items: [(&str, f64); N]) -> BTreeMap<String, f64> {
    items
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn soundness(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let cfg = &lab.cfg;
    let jobs: Vec<(usize, usize)> = (0..lab.domains.len())
        .flat_map(|i| (1..=SUITE_K).map(move |l| (i, l)))
        .collect();
    let mut out = par_map(&jobs, |&(i, l)| {
        let d = &lab.domains[i];
        let sites = farthest_point_sites(&d.body, l, cfg.seed)?;
        let pieces = voronoi_partition(&d.body, &sites)?;
        let mut cert = certify_lower(&d.body, &pieces)?;
        cert.domain_id = d.id.clone();
        cert.seeds.push(cfg.seed);
        let cert = cert.cross_check(&fem[i], cfg.slack)?;
        Ok(record(
            &d.id,
            cfg.seed,
            fem[i].h,
            cert.is_sound(),
            json!({ "source": "partition", "certificate": cert }),
        ))
    })?;
    for (i, k, run) in lab.mthm1_runs() {
        let Ok(run) = run else { continue };
        let Some(cert) = &run.certificate else {
            continue;
        };
        out.push(record(
            &lab.pairs[*i].id,
            cfg.seed,
            cfg.h_for(&lab.pairs[*i].inner),
            cert.is_sound().map(|s| s && run.bound_sound),
            json!({ "source": "mthm1", "k": k, "certificate": cert, "bound": run.bound }),
        ));
    }
    Ok((out, BTreeMap::new()))
}

/// Sum of four seeded plane waves with wavelengths comparable to the
/// diameter.
fn smooth_field(
    mesh: &Arc<crate::mesh::Mesh>,
    diam: f64,
    seed: u64,
    stream: u32,
    chunk: u32,
) -> Result<P1Field> {
    let mut rng = stream_rng(seed, stream, chunk);
    let waves: Vec<(Point, f64, f64)> = (0..4)
        .map(|_| {
            let t = rng.random_range(0.0..TAU);
            let freq = rng.random_range(0.5..3.0) * TAU / diam;
            (
                Point::new(t.cos(), t.sin()) * freq,
                rng.random_range(0.0..TAU),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    P1Field::interpolate(mesh.clone(), |p| {
        waves
            .iter()
            .map(|&(w, phase, a)| a * (w.dot(p) + phase).cos())
            .sum()
    })
}

fn poincare(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let idx: Vec<usize> = (0..lab.domains.len()).collect();
    let out = par_map(&idx, |&i| {
        let d = &lab.domains[i];
        let mesh = fem[i].mesh();
        let diam = d.body.diameter();
        let h_lower = cheeger_lower(&d.body);
        let mut passed = 0;
        let mut worst = f64::INFINITY;
        for j in 0..POINCARE_FIELDS {
            let f = smooth_field(mesh, diam, lab.cfg.seed, i as u32, j as u32)?;
            let r = poincare_check(&d.body, &f, h_lower);
            passed += usize::from(r.pass);
            if r.lhs > 0.0 {
                worst = worst.min(r.rhs / r.lhs);
            }
        }
        Ok(record(
            &d.id,
            lab.cfg.seed,
            fem[i].h,
            Some(passed == POINCARE_FIELDS),
            json!({ "fields": POINCARE_FIELDS, "passed": passed, "h_lower": h_lower, "min_margin": worst }),
        ))
    })?;
    Ok((out, BTreeMap::new()))
}

/// Centrally symmetric hull of `count` random points and their negatives.
fn symmetric_polygon(rng: &mut impl Rng, count: usize) -> Result<Polygon> {
    let mut pts = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        pts.push(p);
        pts.push(-p);
    }
    Polygon::convex_hull(&pts)
}

/// Random symmetric inner body, a random convex outer body containing it and
/// a dilation factor.
pub fn guedon_instance(seed: u64, index: u32) -> Result<(Polygon, Polygon, f64)> {
    let mut rng = stream_rng(seed, 1000 + index, 0);
    for _ in 0..100 {
        let count = rng.random_range(3..8);
        let Ok(inner) = symmetric_polygon(&mut rng, count) else {
            continue;
        };
        let mut pts = inner.vertices().to_vec();
        let offset = Point::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        for _ in 0..rng.random_range(3..10) {
            pts.push(offset + Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        }
        let Ok(outer) = Polygon::convex_hull(&pts) else {
            continue;
        };
        let r = rng.random_range(1.0..4.0);
        return Ok((inner, outer, r));
    }
    Err(Error::Infeasible("no nondegenerate Guedon instance".into()))
}

fn guedon(lab: &Lab) -> Result<SuiteOutput> {
    let seed = lab.cfg.seed;
    let idx: Vec<u32> = (0..GUEDON_INSTANCES as u32).collect();
    let mut out = par_map(&idx, |&i| {
        let (inner, outer, r) = guedon_instance(seed, i)?;
        let rep = guedon_check(&inner.into(), &outer.into(), r, SUITE_SAMPLES, seed)?;
        Ok(record(
            &format!("random-{i}"),
            seed,
            0.0,
            Some(rep.pass),
            json!({ "r": r, "lhs": rep.lhs, "rhs": rep.rhs, "stderr": rep.stderr }),
        ))
    })?;
    let inner = Disk::new(Point::new(0.0, 0.0), 1.0 / 3.0)?.into();
    let outer = Disk::new(Point::new(0.0, 0.0), 1.0)?.into();
    let rep = guedon_check(&inner, &outer, 2.0, DISK_PAIR_SAMPLES, seed)?;
    out.push(record(
        "disk-pair",
        seed,
        0.0,
        Some(rep.pass),
        json!({ "r": 2.0, "lhs": rep.lhs, "rhs": rep.rhs, "stderr": rep.stderr, "exact_lhs": 5.0 / 9.0 }),
    ));
    Ok((out, BTreeMap::new()))
}

fn stein(lab: &Lab) -> Result<SuiteOutput> {
    let out = par_map(&lab.domains, |d| {
        let poly = d.body.to_polygon()?;
        let (c, ratio) = stein_center(&poly, STEIN_GRID, STEIN_REFINEMENTS);
        Ok(record(
            &d.id,
            lab.cfg.seed,
            0.0,
            Some(ratio >= 0.25),
            json!({ "center": [c.x, c.y], "overlap_ratio": ratio }),
        ))
    })?;
    let min = out
        .iter()
        .filter_map(|v| v["overlap_ratio"].as_f64())
        .fold(f64::INFINITY, f64::min);
    Ok((out, constants([("min_overlap", min)])))
}

fn bishop_gromov(lab: &Lab) -> Result<SuiteOutput> {
    let seed = lab.cfg.seed;
    let idx: Vec<usize> = (0..lab.domains.len()).collect();
    let nested = par_map(&idx, |&i| {
        let d = &lab.domains[i];
        let poly = d.body.to_polygon()?;
        let c = poly.centroid();
        let v = poly.vertices()[0];
        let centers = [
            c,
            c + (v - c) * 0.9,
            c + (poly.vertices()[poly.len() / 2] - c) * 0.4,
        ];
        let diam = d.body.diameter();
        let mut recs = Vec::new();
        for (j, x) in centers.iter().enumerate() {
            for (m, f) in [0.1, 0.3, 0.6].into_iter().enumerate() {
                let s = seed.wrapping_add((i * 100 + j * 10 + m) as u64);
                let rep = bishop_gromov_check(&d.body, &[x.x, x.y], f * diam, SUITE_SAMPLES, s)?;
                recs.push(record(
                    &d.id,
                    s,
                    0.0,
                    Some(rep.pass),
                    json!({ "x": [x.x, x.y], "radius": f * diam, "lhs": rep.lhs, "rhs": rep.rhs, "stderr": rep.stderr }),
                ));
            }
        }
        Ok(recs)
    })?;
    Ok((nested.into_iter().flatten().collect(), BTreeMap::new()))
}

fn cheeger_order(lab: &Lab) -> Result<SuiteOutput> {
    let bounds = lab.cheeger()?;
    let out = lab
        .domains
        .iter()
        .zip(bounds)
        .map(|(d, b)| {
            record(
                &d.id,
                lab.cfg.seed,
                0.0,
                Some(b.lower <= b.upper),
                json!({ "lower": b.lower, "upper": b.upper, "witness": b.upper_witness }),
            )
        })
        .collect();
    Ok((out, BTreeMap::new()))
}

fn milman(lab: &Lab) -> Result<SuiteOutput> {
    let out = par_map(&lab.pairs, |p| {
        let r = milman_consistency(&p.inner, &p.outer)?;
        Ok(record(
            &p.id,
            lab.cfg.seed,
            0.0,
            Some(r.pass),
            json!({ "lhs": r.lhs, "rhs": r.rhs, "v": p.volume_ratio() }),
        ))
    })?;
    Ok((out, BTreeMap::new()))
}

fn eneq_emil(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.pair_neumann()?;
    let slack = lab.cfg.slack;
    let mut log_form = f64::INFINITY;
    let out = lab
        .pairs
        .iter()
        .zip(fem)
        .map(|(p, (fi, fo))| {
            let v = p.volume_ratio();
            let (li, lo) = (fi.spectrum.values[1], fo.spectrum.values[1]);
            let rhs = v.powi(4) * li;
            // lambda_1(inner) >~ (1 / log(1 + 1/v))^2 lambda_1(outer)
            let c_log = li / (lo / (1.0 + 1.0 / v).ln().powi(2));
            log_form = log_form.min(c_log);
            record(
                &p.id,
                lab.cfg.seed,
                fi.h.max(fo.h),
                Some(lo >= rhs * (1.0 - slack)),
                json!({ "v": v, "lambda1_inner": li, "lambda1_outer": lo, "lhs": lo, "rhs": rhs, "c_log": c_log }),
            )
        })
        .collect();
    Ok((out, constants([("c_log_min", log_form)])))
}

fn dirichlet_monotonicity(lab: &Lab) -> Result<SuiteOutput> {
    let slack = lab.cfg.slack;
    let mut out = par_map(&lab.pairs, |p| {
        let (fi, fo) = (lab.dirichlet(&p.inner)?, lab.dirichlet(&p.outer)?);
        let (li, lo) = (fi.spectrum.values[0], fo.spectrum.values[0]);
        Ok(record(
            &p.id,
            lab.cfg.seed,
            fi.h.max(fo.h),
            Some(li * (1.0 + slack) >= lo),
            json!({ "source": "fem", "lambda1_inner": li, "lambda1_outer": lo }),
        ))
    })?;
    for (inner, outer) in [
        (vec![1.0, 1.0], vec![2.0, 1.0]),
        (vec![0.5, 0.8], vec![1.0, 1.0]),
        (vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]),
        (vec![0.3; 6], vec![0.4; 6]),
    ] {
        let li = box_spectrum(&inner, BoundaryCondition::Dirichlet, 1)?.values[0];
        let lo = box_spectrum(&outer, BoundaryCondition::Dirichlet, 1)?.values[0];
        out.push(record(
            &format!("box {inner:?} in {outer:?}"),
            0,
            0.0,
            Some(li >= lo),
            json!({ "source": "analytic", "lambda1_inner": li, "lambda1_outer": lo }),
        ));
    }
    Ok((out, BTreeMap::new()))
}

fn universal(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let mut max_ratio = [0.0f64; SUITE_K + 1];
    let mut c_fit = 0.0f64;
    let out = lab
        .domains
        .iter()
        .zip(fem)
        .map(|(d, e)| {
            let v = &e.spectrum.values;
            let n = d.body.dim() as f64;
            let ratios: Vec<f64> = (2..=SUITE_K).map(|k| v[k] / v[k - 1]).collect();
            for (j, r) in ratios.iter().enumerate() {
                let k = j + 2;
                max_ratio[k] = max_ratio[k].max(*r);
                c_fit = c_fit.max(r / (n * (k as f64).ln()).powi(2));
            }
            record(
                &d.id,
                lab.cfg.seed,
                e.h,
                None,
                json!({ "eigenvalues": v, "ratios_k2_to_k8": ratios }),
            )
        })
        .collect();
    let mut c: BTreeMap<String, f64> = (2..=SUITE_K)
        .map(|k| (format!("max_ratio_k{k}"), max_ratio[k]))
        .collect();
    c.insert("c_fit_max".into(), c_fit);
    Ok((out, c))
}

fn liu(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let mut best = 0.0f64;
    let out = lab
        .domains
        .iter()
        .zip(fem)
        .map(|(d, e)| {
            let v = &e.spectrum.values;
            let c = (1..=SUITE_K)
                .map(|k| v[k] / ((k * k) as f64 * v[1]))
                .fold(0.0, f64::max);
            best = best.max(c);
            record(&d.id, lab.cfg.seed, e.h, None, json!({ "c_liu": c }))
        })
        .collect();
    Ok((out, constants([("c_liu_max", best)])))
}

fn milman_chengli(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let mut best = f64::INFINITY;
    let out = lab
        .domains
        .iter()
        .zip(fem)
        .map(|(d, e)| {
            let v = &e.spectrum.values;
            let n = d.body.dim() as f64;
            let c = (1..=SUITE_K)
                .map(|k| v[k] / ((k as f64).powf(2.0 / n) * v[1]))
                .fold(f64::INFINITY, f64::min);
            best = best.min(c);
            record(&d.id, lab.cfg.seed, e.h, None, json!({ "c_mcl": c }))
        })
        .collect();
    Ok((out, constants([("c_mcl_min", best)])))
}

fn mthm1(lab: &Lab) -> Result<SuiteOutput> {
    let mut c_fit = 0.0f64;
    let mut slack_ratio = 0.0f64;
    let mut out = Vec::new();
    for (i, k, run) in lab.mthm1_runs() {
        let p = &lab.pairs[*i];
        let h = lab.cfg.h_for(&p.inner);
        match run {
            Ok(r) => {
                c_fit = c_fit.max(r.c_fit);
                if !r.flagged {
                    slack_ratio = slack_ratio.max(r.max_piece_diameter / r.diameter_bound);
                }
                out.push(record(
                    &p.id,
                    lab.cfg.seed,
                    h,
                    Some(r.pass()),
                    json!({ "k": k, "report": r }),
                ));
            }
            Err(e) => out.push(record(
                &p.id,
                lab.cfg.seed,
                h,
                Some(false),
                json!({ "k": k, "error": e.to_string() }),
            )),
        }
    }
    Ok((
        out,
        constants([("c_fit_max", c_fit), ("max_diameter_over_8r", slack_ratio)]),
    ))
}

/// Origin-centered pairs for the chained comparison, the last one with a
/// non-symmetric inner triangle.
pub fn mthm2_pairs() -> Result<Vec<(String, ConvexBody, ConvexBody)>> {
    let o = Point::new(0.0, 0.0);
    let big = Polygon::rectangle(-1.0, -1.0, 1.0, 1.0)?;
    Ok(vec![
        (
            "square-0.4/square".into(),
            Polygon::rectangle(-0.4, -0.4, 0.4, 0.4)?.into(),
            big.clone().into(),
        ),
        (
            "square-0.8/square".into(),
            Polygon::rectangle(-0.8, -0.8, 0.8, 0.8)?.into(),
            big.clone().into(),
        ),
        (
            "hexagon-0.6/hexagon".into(),
            Polygon::regular(6, o, 0.6, 0.0)?.into(),
            Polygon::regular(6, o, 1.0, 0.0)?.into(),
        ),
        (
            "triangle/square".into(),
            Polygon::new(vec![
                Point::new(-0.5, -0.4),
                Point::new(0.6, -0.3),
                Point::new(0.0, 0.5),
            ])?
            .into(),
            big.into(),
        ),
    ])
}

fn mthm2(lab: &Lab) -> Result<SuiteOutput> {
    let jobs: Vec<(String, ConvexBody, ConvexBody, usize)> = mthm2_pairs()?
        .into_iter()
        .flat_map(|(id, i, o)| [3, 4].map(|k| (id.clone(), i.clone(), o.clone(), k)))
        .collect();
    let runs = par_map(&jobs, |(id, inner, outer, k)| {
        let h = lab.cfg.h_for(inner);
        Ok(match mthm2_run(inner, outer, *k, &lab.cfg) {
            Ok(r) => (
                Some(r.c_fit),
                record(
                    id,
                    lab.cfg.seed,
                    h,
                    Some(r.pass()),
                    json!({ "k": k, "report": r }),
                ),
            ),
            Err(e) => (
                None,
                record(
                    id,
                    lab.cfg.seed,
                    h,
                    Some(false),
                    json!({ "k": k, "error": e.to_string() }),
                ),
            ),
        })
    })?;
    let c_min = runs
        .iter()
        .filter_map(|r| r.0)
        .fold(f64::INFINITY, f64::min);
    Ok((
        runs.into_iter().map(|r| r.1).collect(),
        constants([("c_fit_min", c_min)]),
    ))
}

fn inradius(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let ball = disk_spectrum(1.0, BoundaryCondition::Neumann, SUITE_K)?;
    let mut best = 0.0f64;
    let out = lab
        .domains
        .iter()
        .zip(fem)
        .map(|(d, e)| {
            let n = d.body.dim() as f64;
            let rho = d.body.inradius();
            let cs: Vec<f64> = (2..=SUITE_K)
                .map(|k| {
                    rho * e.spectrum.values[k].sqrt()
                        / (n * (k as f64).ln() * ball.values[k - 1].sqrt())
                })
                .collect();
            let c = cs.iter().copied().fold(0.0, f64::max);
            best = best.max(c);
            record(
                &d.id,
                lab.cfg.seed,
                e.h,
                None,
                json!({ "inradius": rho, "c_k2_to_k8": cs, "c_max": c }),
            )
        })
        .collect();
    Ok((out, constants([("c_max", best)])))
}

fn diam_eigen(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let bounds = lab.cheeger()?;
    let mut best = 0.0f64;
    let mut out = Vec::new();
    for ((d, e), b) in lab.domains.iter().zip(fem).zip(bounds) {
        let mut cs = Vec::new();
        let mut ordered = true;
        for k in 1..=SUITE_K {
            let r = diam_eigen_with(&d.body, k, &e.spectrum, b.upper)?;
            ordered &= r.pass;
            cs.push(r.c_emp.unwrap_or(f64::NAN));
        }
        let c = cs.iter().copied().fold(0.0, f64::max);
        best = best.max(c);
        out.push(record(
            &d.id,
            lab.cfg.seed,
            e.h,
            Some(ordered),
            json!({ "diameter": d.body.diameter(), "h_upper": b.upper, "c_emp_k1_to_k8": cs }),
        ));
    }
    Ok((out, constants([("c_emp_max", best)])))
}

fn reduction(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let seed = lab.cfg.seed;
    let families: [(usize, Vec<f64>); 2] = [(1, vec![0.25, 0.25]), (2, vec![0.2, 0.2, 0.2])];
    let jobs: Vec<(usize, usize)> = (0..REDUCTION_DOMAINS.min(lab.domains.len()))
        .flat_map(|i| (0..families.len()).map(move |f| (i, f)))
        .collect();
    let runs = par_map(&jobs, |&(i, f)| {
        let d = &lab.domains[i];
        let (l, kappas) = &families[f];
        let w = sep_lower(&d.body, kappas, seed, DEFAULT_SEP_ITERS)?;
        let mut recs = Vec::new();
        let mut best = 0.0f64;
        for k in *l..=3 {
            let r = reduction_from_witness(&d.body, k, *l, &w, &fem[i].spectrum)?;
            let c = r.c_emp.unwrap_or(f64::NAN);
            best = best.max(c);
            recs.push(record(
                &d.id,
                seed,
                fem[i].h,
                None,
                json!({ "k": k, "l": l, "kappas": kappas, "sep": w.min_distance, "c_emp": c }),
            ));
        }
        Ok((best, recs))
    })?;
    let best = runs.iter().map(|r| r.0).fold(0.0, f64::max);
    Ok((
        runs.into_iter().flat_map(|r| r.1).collect(),
        constants([("c_emp_max", best)]),
    ))
}

fn bisection(lab: &Lab) -> Result<SuiteOutput> {
    let fem = lab.neumann()?;
    let seed = lab.cfg.seed;
    let jobs: Vec<(usize, usize)> = (0..lab.domains.len())
        .flat_map(|i| (1..=3).map(move |l| (i, l)))
        .collect();
    let runs = par_map(&jobs, |&(i, l)| {
        let d = &lab.domains[i];
        let sites = farthest_point_sites(&d.body, l, seed)?;
        let pieces = voronoi_partition(&d.body, &sites)?;
        let b = bisect_combination(
            &fem[i],
            &pieces,
            DEFAULT_BISECTION_TOL,
            seed,
            DEFAULT_RESTARTS,
        )?;
        let cert = certify_lower(&d.body, &pieces)?;
        let chain = match &b.field {
            Some(f) if b.converged => Some(rayleigh_chain_verify(
                f,
                &pieces,
                &cert,
                DEFAULT_BISECTION_TOL,
            )?),
            _ => None,
        };
        let pass = chain.as_ref().map(|c| c.pass);
        Ok((
            b.converged,
            record(
                &d.id,
                seed,
                fem[i].h,
                pass,
                json!({ "l": l, "max_defect": b.max_defect, "converged": b.converged, "restarts": b.restarts_used, "chain": chain }),
            ),
        ))
    })?;
    let rate = runs.iter().filter(|r| r.0).count() as f64 / runs.len().max(1) as f64;
    Ok((
        runs.into_iter().map(|r| r.1).collect(),
        constants([("converged_fraction", rate)]),
    ))
}
