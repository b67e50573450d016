use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::json;

use super::{diagonal_needle, lp_polygon, par_map, record, ExperimentReport, LP_VERTICES};
use crate::analytic::needle_prediction;
use crate::certify::{mthm2_run, CertConfig};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point, Polygon};

pub const NEEDLE_WIDTHS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const LP_EXPONENTS: [f64; 3] = [1.0, 1.5, 2.0];
pub const NESTED_SCALES: [f64; 7] = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Width of the segment approximant in the `l_p` sweep, relative to its
/// length.
const LP_NEEDLE_WIDTH: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Needle,
    Lp2d,
    NestedScan,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::Needle, Experiment::Lp2d, Experiment::NestedScan];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Needle => "needle",
            Experiment::Lp2d => "lp2d",
            Experiment::NestedScan => "nested-scan",
        }
    }

    pub fn from_name(name: &str) -> Result<Experiment> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::Unknown {
                kind: "experiment",
                name: name.into(),
            })
    }
}

pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub csv: String,
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

pub fn run_experiment(exp: Experiment, cfg: &CertConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match exp {
        Experiment::Needle => needle(cfg),
        Experiment::Lp2d => lp2d(cfg),
        Experiment::NestedScan => nested_scan(cfg),
    }
}

fn lambda1(cfg: &CertConfig, body: &ConvexBody) -> Result<(f64, f64)> {
    let e = cfg.neumann(body, 1)?;
    Ok((e.spectrum.values[1], e.h))
}

/// Thin boxes of length `sqrt(2)`, axis-aligned and along the diagonal of
/// the unit square, against the limit `pi^2 / 2`.
fn needle(cfg: &CertConfig) -> Result<ExperimentOutput> {
    let limit = needle_prediction(2)?;
    let len = 2f64.sqrt();
    let (square, _) = lambda1(cfg, &Polygon::rectangle(0.0, 0.0, 1.0, 1.0)?.into())?;
    let rows = par_map(&NEEDLE_WIDTHS, |&eps| {
        let (axis, h) = lambda1(cfg, &Polygon::rectangle(0.0, 0.0, len, eps)?.into())?;
        let (diag, _) = lambda1(cfg, &diagonal_needle(len - eps, eps)?.into())?;
        Ok((eps, axis, diag, h))
    })?;
    let mut monotone = true;
    for w in rows.windows(2) {
        monotone &= w[1].2 <= w[0].2 * (1.0 + 1e-9);
    }
    let instances = rows
        .iter()
        .map(|&(eps, axis, diag, h)| {
            record(
                &format!("needle-{eps}"),
                cfg.seed,
                h,
                None,
                json!({
                    "eps": eps,
                    "lambda1_axis": axis,
                    "lambda1_diagonal": diag,
                    "prediction": limit,
                    "rel_err_axis": (axis - limit) / limit,
                    "ratio_square": square / axis,
                }),
            )
        })
        .collect();
    let last = rows.last().expect("widths are nonempty");
    let constants = BTreeMap::from([
        ("rel_err_finest".to_string(), (last.1 - limit) / limit),
        ("ratio_square_finest".to_string(), square / last.1),
        (
            "diagonal_monotone".to_string(),
            f64::from(u8::from(monotone)),
        ),
    ]);
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|&(eps, axis, diag, h)| {
            vec![
                eps.to_string(),
                axis.to_string(),
                diag.to_string(),
                limit.to_string(),
                h.to_string(),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        report: ExperimentReport::new("needle", false, instances, constants),
        csv: to_csv(
            &["eps", "lambda1_axis", "lambda1_diagonal", "prediction", "h"],
            &csv_rows,
        )?,
    })
}

/// Unit-area `l_p` balls and thin approximants of the segment from the
/// center to a vertex.
fn lp2d(cfg: &CertConfig) -> Result<ExperimentOutput> {
    let rows = par_map(&LP_EXPONENTS, |&p| {
        let ball = lp_polygon(p, LP_VERTICES)?;
        let ball = ball.scaled(1.0 / ball.area().sqrt());
        let reach = ball.projection_range(Point::new(1.0, 0.0)).1;
        let w = 0.5 * LP_NEEDLE_WIDTH * reach;
        let segment = ball
            .clip_halfplane(Point::new(-1.0, 0.0), 0.0)
            .and_then(|s| s.clip_halfplane(Point::new(0.0, 1.0), w))
            .and_then(|s| s.clip_halfplane(Point::new(0.0, -1.0), w))
            .ok_or_else(|| Error::Infeasible("segment approximant is empty".into()))?;
        let (lb, h) = lambda1(cfg, &ball.into())?;
        let (ls, _) = lambda1(cfg, &segment.into())?;
        Ok((p, reach, lb, ls, h))
    })?;
    let min_ball = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let instances = rows
        .iter()
        .map(|&(p, reach, lb, ls, h)| {
            record(
                &format!("lp-{p}"),
                cfg.seed,
                h,
                None,
                json!({
                    "p": p,
                    "radius": reach,
                    "lambda1_ball": lb,
                    "lambda1_segment": ls,
                    "segment_prediction": PI * PI / (reach * reach),
                }),
            )
        })
        .collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|&(p, reach, lb, ls, h)| {
            vec![
                p.to_string(),
                reach.to_string(),
                lb.to_string(),
                ls.to_string(),
                h.to_string(),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        report: ExperimentReport::new(
            "lp2d",
            false,
            instances,
            BTreeMap::from([("min_lambda1_ball".to_string(), min_ball)]),
        ),
        csv: to_csv(
            &["p", "radius", "lambda1_ball", "lambda1_segment", "h"],
            &csv_rows,
        )?,
    })
}

/// Chained comparison for centered squares `[-s, s]^2` inside `[-1, 1]^2`.
fn nested_scan(cfg: &CertConfig) -> Result<ExperimentOutput> {
    let outer: ConvexBody = Polygon::rectangle(-1.0, -1.0, 1.0, 1.0)?.into();
    let k = 3;
    let runs = par_map(&NESTED_SCALES, |&s| {
        let inner: ConvexBody = Polygon::rectangle(-s, -s, s, s)?.into();
        mthm2_run(&inner, &outer, k, cfg)
    })?;
    let instances = runs
        .iter()
        .map(|r| {
            record(
                &r.domain_id,
                cfg.seed,
                cfg.h_for(&outer),
                Some(r.pass()),
                json!({ "v": r.v, "r": r.r, "c_fit": r.c_fit, "envelope": r.envelope, "k": k }),
            )
        })
        .collect();
    let csv_rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| {
            vec![
                r.v.to_string(),
                r.r.to_string(),
                r.lambda_k_inner.to_string(),
                r.lambda_km2_outer.to_string(),
                r.envelope.to_string(),
                r.c_fit.to_string(),
            ]
        })
        .collect();
    let c_min = runs.iter().map(|r| r.c_fit).fold(f64::INFINITY, f64::min);
    Ok(ExperimentOutput {
        report: ExperimentReport::new(
            "nested-scan",
            false,
            instances,
            BTreeMap::from([("c_fit_min".to_string(), c_min)]),
        ),
        csv: to_csv(
            &[
                "v",
                "r",
                "lambda_k_inner",
                "lambda_km2_outer",
                "envelope",
                "c_fit",
            ],
            &csv_rows,
        )?,
    })
}
