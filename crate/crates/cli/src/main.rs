use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sandwich_core::certify::{mthm1_run, partition_certificate, CertConfig};
use sandwich_core::fem::{spectrum_with, FemConfig};
use sandwich_core::geometry::io::read_polygon_file;
use sandwich_core::geometry::{complete_cover, greedy_net, voronoi_partition, ConvexBody};
use sandwich_core::harness::{
    apply_baseline, parse_builtin, read_baseline, run_experiment, run_suite, write_baseline,
    Experiment, Lab, Suite, BASELINE_ENV,
};
use sandwich_core::{BoundaryCondition, Error, Result};

#[derive(Parser)]
#[command(
    name = "spectral-sandwich",
    version,
    about = "Neumann eigenvalue laboratory for convex domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// FEM eigenvalues of a domain
    Spectrum {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value = "neumann")]
        bc: BoundaryCondition,
        #[arg(short, default_value_t = 5)]
        k: usize,
        /// Mesh spacing (default: diameter / 30, at most half the inradius)
        #[arg(long)]
        h: Option<f64>,
        /// Solve on one mesh level only
        #[arg(long)]
        no_richardson: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Partition certificate for lambda_{k-1} from the net pipeline
    Certify {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(short, default_value_t = 2)]
        k: usize,
        /// Outer domain (default: the domain itself)
        #[arg(long)]
        outer_builtin: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run verification suites
    Verify {
        #[arg(long, conflicts_with = "all")]
        suite: Option<String>,
        #[arg(long)]
        all: bool,
        /// Write the fitted constants as a new baseline
        #[arg(long)]
        write_baseline: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run an experiment sweep (needle, lp2d, nested-scan)
    Experiment {
        name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Greedy r-net of a domain
    Net {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        radius: f64,
        /// Add sites until the Voronoi cells fit in radius-r balls
        #[arg(long)]
        complete: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Voronoi partition into k pieces with its certificate
    Partition {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct DomainArgs {
    /// square, box:LxW, disk:r, needle:L:eps, lp2d:p, regular:m
    #[arg(long, conflicts_with = "domain_file")]
    builtin: Option<String>,
    #[arg(long)]
    domain_file: Option<PathBuf>,
}

impl DomainArgs {
    fn label(&self) -> Option<String> {
        self.builtin
            .clone()
            .or_else(|| self.domain_file.as_ref().map(|p| p.display().to_string()))
    }

    fn body(&self) -> Result<ConvexBody> {
        match (&self.builtin, &self.domain_file) {
            (Some(b), _) => parse_builtin(b),
            (None, Some(path)) => Ok(read_polygon_file(path)?.into()),
            (None, None) => Err(Error::InvalidArgument(
                "pass --builtin or --domain-file".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    c_sep: f64,
    #[arg(long, default_value_t = 0.05)]
    slack: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit timestamps and wall times so runs compare byte for byte
    #[arg(long)]
    no_timestamp: bool,
}

impl CommonArgs {
    fn config(&self) -> Result<CertConfig> {
        let cfg = CertConfig {
            c_sep: self.c_sep,
            slack: self.slack,
            seed: self.seed,
            ..CertConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn stamp(&self, mut v: Value) -> Value {
        if !self.no_timestamp {
            if let Value::Object(m) = &mut v {
                m.insert("timestamp".into(), unix_time().into());
            }
        }
        v
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn line(v: &Value) -> String {
    serde_json::to_string(v).expect("json value serializes") + "\n"
}

fn spectrum_csv(values: &[f64], errors: &[f64], residuals: &[f64]) -> String {
    let mut s = String::from("index,eigenvalue,error_estimate,residual\n");
    for (i, v) in values.iter().enumerate() {
        let e = errors.get(i).copied().unwrap_or(0.0);
        let r = residuals.get(i).copied().unwrap_or(0.0);
        s += &format!("{i},{v},{e:.6e},{r:.6e}\n");
    }
    s
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Spectrum {
            domain,
            bc,
            k,
            h,
            no_richardson,
            common,
        } => {
            let body = domain.body()?;
            let h = h.unwrap_or_else(|| CertConfig::default().h_for(&body));
            let fem = FemConfig {
                richardson: !no_richardson,
                ..FemConfig::default()
            };
            let res = spectrum_with(&body, bc, k, h, common.seed, &fem)?;
            let rep = res.report();
            let text = match common.format {
                Format::Csv => spectrum_csv(&rep.eigenvalues, &rep.error_estimates, &rep.residuals),
                Format::Json => line(&common.stamp(serde_json::to_value(&rep)?)),
            };
            common.emit(&text)?;
        }
        Command::Certify {
            domain,
            k,
            outer_builtin,
            common,
        } => {
            let inner = domain.body()?;
            let outer = match outer_builtin {
                Some(b) => parse_builtin(&b)?,
                None => inner.clone(),
            };
            let mut report = mthm1_run(&inner, &outer, k, &common.config()?)?;
            if let Some(label) = domain.label() {
                report.domain_id = label.clone();
                if let Some(c) = report.certificate.as_mut() {
                    c.domain_id = label;
                }
            }
            let Some(cert) = &report.certificate else {
                return Err(Error::Infeasible(format!(
                    "net needs more than {} sites after the allowed doublings of c_sep",
                    k - 1
                )));
            };
            let v = json!({ "certificate": cert, "pipeline": report });
            common.emit(&line(&common.stamp(v)))?;
        }
        Command::Verify {
            suite,
            all,
            write_baseline: baseline_out,
            common,
        } => {
            let suites: Vec<Suite> = match (suite, all) {
                (Some(name), _) => vec![Suite::from_name(&name)?],
                (None, true) => Suite::ALL.to_vec(),
                (None, false) => {
                    return Err(Error::InvalidArgument("pass --suite NAME or --all".into()))
                }
            };
            let baseline = match std::env::var_os(BASELINE_ENV) {
                Some(path) if std::path::Path::new(&path).exists() => Some(read_baseline(path)?),
                _ => None,
            };
            let lab = Lab::new(common.config()?)?;
            let mut reports = Vec::new();
            for s in suites {
                let start = Instant::now();
                let mut r = run_suite(s, &lab)?;
                if !common.no_timestamp {
                    r.stamp(start.elapsed().as_secs_f64());
                }
                if let Some(b) = &baseline {
                    apply_baseline(&mut r, b);
                    for c in r.baseline.iter().filter(|c| !c.within) {
                        eprintln!(
                            "baseline drift in {}: {} = {} (baseline {})",
                            r.suite, c.constant, c.value, c.baseline
                        );
                    }
                }
                if !r.ok() {
                    eprintln!(
                        "{}: {} of {} instances failed",
                        r.suite, r.summary.failed, r.summary.instances
                    );
                }
                reports.push(r);
            }
            let text: String = reports.iter().map(|r| r.to_json() + "\n").collect();
            common.emit(&text)?;
            if let Some(path) = baseline_out {
                write_baseline(path, &reports)?;
            }
            if reports.iter().any(|r| !r.ok()) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Experiment { name, common } => {
            let exp = Experiment::from_name(&name)?;
            let start = Instant::now();
            let mut out = run_experiment(exp, &common.config()?)?;
            if !common.no_timestamp {
                out.report.stamp(start.elapsed().as_secs_f64());
            }
            let text = match common.format {
                Format::Csv => out.csv,
                Format::Json => out.report.to_json() + "\n",
            };
            common.emit(&text)?;
        }
        Command::Net {
            domain,
            radius,
            complete,
            common,
        } => {
            let body = domain.body()?;
            let mut net = greedy_net(&body, radius, common.seed)?;
            if complete {
                net = complete_cover(&body.to_polygon()?, &net)?;
            }
            let text = match common.format {
                Format::Csv => {
                    let mut s = String::from("x,y\n");
                    for p in &net.points {
                        s += &format!("{},{}\n", p.x, p.y);
                    }
                    s
                }
                Format::Json => line(&common.stamp(serde_json::to_value(&net)?)),
            };
            common.emit(&text)?;
        }
        Command::Partition { domain, k, common } => {
            let body = domain.body()?;
            let cfg = common.config()?;
            let mut cert = partition_certificate(&body, k, &cfg)?;
            if let Some(label) = domain.label() {
                cert.domain_id = label;
            }
            let sites = sandwich_core::geometry::farthest_point_sites(&body, k, cfg.seed)?;
            let pieces = voronoi_partition(&body, &sites)?;
            let v = json!({ "certificate": cert, "sites": sites, "pieces": pieces.pieces });
            common.emit(&line(&common.stamp(v)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
