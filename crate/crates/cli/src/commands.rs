//! Subcommand bodies. Each returns the text for stdout; report files are
//! written here, after all computation, from a single thread.

use std::fmt::Write as _;
use std::path::Path;

use freedom::counting::{fit_asymptotic, CountReport, Filter};
use freedom::exact::{format_rational, parse_rational, LogValue, Rational};
use freedom::lattice::{newton_polygon_with, EuclideanLattice, NewtonPolygon};
use freedom::projective::{fmt_f64, ProjectivePoint};
use freedom::varieties::{fiber_decay_report, variety_freedom, EpsilonFunction, FiberReport, Fibration, VarietyPoint};
use serde_json::json;

use crate::config::RunConfig;

/// Why a command failed; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input, unreadable or unwritable files, unsupported requests.
    Input(String),
    /// A computed result broke an invariant that must always hold.
    Invariant(String),
}

impl From<freedom::Error> for Failure {
    fn from(e: freedom::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<String, Failure>;

fn invariant(ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(what.to_string()))
    }
}

fn log_pair(v: &LogValue) -> String {
    format!("{v} ({})", fmt_f64(v.to_f64()))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn check_polygon(p: &NewtonPolygon) -> Result<(), Failure> {
    invariant(p.slopes.windows(2).all(|w| w[0] >= w[1]), "slopes are not nonincreasing")?;
    let sum = p.slopes.iter().try_fold(LogValue::zero(), |acc, s| acc.checked_add(s))?;
    invariant(sum == p.degree(), "slopes do not sum to the degree")
}

pub fn slope(cfg: &RunConfig, path: &str) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("malformed lattice file {path}: {e}")))?;
    let lattice = EuclideanLattice::from_json(&value)?;
    let poly = newton_polygon_with(&lattice, &cfg.options())?;
    check_polygon(&poly)?;
    if cfg.format == crate::config::Format::Json {
        return Ok(pretty(&json!({"polygon": poly.to_json(), "provenance": cfg.provenance()})));
    }
    let mut out = String::new();
    writeln!(out, "rank: {}", poly.rank).unwrap();
    writeln!(out, "degree: {}", log_pair(&poly.degree())).unwrap();
    writeln!(out, "slopes: {}", poly.slopes.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(out, "slopes (float): {}", poly.slopes.iter().map(|s| fmt_f64(s.to_f64())).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(out, "vertices: {}", poly.vertices.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")).unwrap();
    for i in 0..=poly.rank {
        let w = &poly.witnesses[i];
        let rows: Vec<String> = (0..w.nrows()).map(|r| format!("[{}]", w.row(r).iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))).collect();
        let bound = poly.search_bounds[i].as_ref().map(format_rational).unwrap_or_else(|| "-".into());
        writeln!(out, "i={i} roof={} witness={} search_bound={bound}", log_pair(&poly.roof[i]), rows.join(" ")).unwrap();
    }
    Ok(out)
}

pub fn freedom(cfg: &RunConfig) -> Outcome {
    let v = cfg.variety()?;
    let p = VarietyPoint::parse(cfg.require("point")?)?;
    let f = variety_freedom(&v, &p, &cfg.options())?;
    invariant(f.freedom.numerator() <= f.freedom.denominator() || f.freedom.is_zero(), "freedom exceeds 1")?;
    invariant(f.mu_min <= f.mu_max, "mu_min exceeds mu_max")?;
    if cfg.format == crate::config::Format::Json {
        return Ok(pretty(&json!({"variety": v.to_json(), "point": p.to_string(), "freedom": f.to_json(), "provenance": cfg.provenance()})));
    }
    let rows: Vec<String> = (0..f.witness.nrows()).map(|r| format!("[{}]", f.witness.row(r).iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))).collect();
    let mut out = String::new();
    writeln!(out, "variety: {}", v.name()).unwrap();
    writeln!(out, "point: {p}").unwrap();
    writeln!(out, "h: {}", log_pair(&f.height)).unwrap();
    writeln!(out, "tangent degree: {}", log_pair(&f.tangent_degree)).unwrap();
    writeln!(out, "mu_min: {}", log_pair(&f.mu_min)).unwrap();
    writeln!(out, "mu_max: {}", log_pair(&f.mu_max)).unwrap();
    writeln!(out, "l: {} ({})", f.freedom, fmt_f64(f.freedom.to_f64())).unwrap();
    writeln!(out, "witness: {}", if rows.is_empty() { "none (semistable)".to_string() } else { rows.join(" ") }).unwrap();
    Ok(out)
}

pub fn count(cfg: &RunConfig) -> Outcome {
    let v = cfg.variety()?;
    let bounds = cfg.bounds()?;
    let filter = Filter::epsilon(cfg.alpha.clone(), cfg.rounding)?;
    let report = CountReport::build(&v, &bounds, &filter, &cfg.options())?;
    for r in &report.rows {
        invariant(r.free <= r.total, "free count exceeds total")?;
        invariant(r.histogram.iter().sum::<u64>() == r.total, "histogram does not sum to the total")?;
    }
    invariant(report.rows.windows(2).all(|w| w[1].total >= w[0].total && w[1].free >= w[0].free), "counts decrease along the grid")?;
    let mut written = Vec::new();
    if cfg.format.csv() {
        write_file(&cfg.out, "count.csv", &report.csv())?;
        written.push("count.csv");
    }
    if cfg.format.json() {
        let mut j = report.to_json();
        j["provenance"] = cfg.provenance();
        write_file(&cfg.out, "count.json", &pretty(&j))?;
        written.push("count.json");
    }
    Ok(summary(&cfg.out, &written))
}

fn summary(dir: &Path, written: &[&str]) -> String {
    written.iter().map(|f| format!("wrote {}\n", dir.join(f).display())).collect()
}

/// Reads `(B, N)` pairs from either a two-column `B,N` CSV or a count CSV,
/// whose `free` column is used.
fn read_series(path: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| Failure::Input(format!("{path} is empty")))?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (bi, ni) = match (col("B"), col("free"), col("N")) {
        (Some(b), Some(f), _) => (b, f),
        (Some(b), None, Some(n)) => (b, n),
        _ => return Err(Failure::Input(format!("{path}: header needs B and N (or B and free) columns"))),
    };
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |k: usize| -> Result<f64, Failure> {
                let cell = cells.get(k).ok_or_else(|| Failure::Input(format!("{path} line {}: missing column", i + 2)))?;
                let r: Rational = parse_rational(cell).map_err(|e| Failure::Input(format!("{path} line {}: {e}", i + 2)))?;
                Ok(freedom::exact::rational_to_f64(&r))
            };
            Ok((get(bi)?, get(ni)?))
        })
        .collect()
}

pub fn fit(cfg: &RunConfig) -> Outcome {
    let input = cfg.require("input")?.to_string();
    let series = read_series(&input)?;
    let f = fit_asymptotic(&series)?;
    invariant(f.residual_norm.is_finite(), "fit residual is not finite")?;
    let mut written = Vec::new();
    if cfg.format.csv() {
        let mut s = String::from("C,a,b,residual_norm\n");
        writeln!(s, "{},{},{},{}", fmt_f64(f.c), fmt_f64(f.a), fmt_f64(f.b), fmt_f64(f.residual_norm)).unwrap();
        write_file(&cfg.out, "fit.csv", &s)?;
        written.push("fit.csv");
    }
    if cfg.format.json() {
        let j = json!({
            "points": series.iter().map(|(b, n)| json!([b, n])).collect::<Vec<_>>(),
            "fit": f.to_json(),
            "model": "N(B) = C B^a (ln B)^(b-1)",
            "caveat": freedom::counting::LN_LN_CAVEAT,
            "provenance": cfg.provenance(),
        });
        write_file(&cfg.out, "fit.json", &pretty(&j))?;
        written.push("fit.json");
    }
    Ok(format!("C = {}, a = {}, b = {}, residual norm = {}\n{}", fmt_f64(f.c), fmt_f64(f.a), fmt_f64(f.b), fmt_f64(f.residual_norm), summary(&cfg.out, &written)))
}

pub fn fiber_scan(cfg: &RunConfig) -> Outcome {
    let v = cfg.variety()?;
    let fib = Fibration::for_variety(&v)?;
    let base = ProjectivePoint::parse(cfg.require("point")?)?;
    let bounds = cfg.bounds()?;
    let [b] = bounds.as_slice() else {
        return Err(Failure::Input("fiber-scan takes a single bound".into()));
    };
    let eps = EpsilonFunction::new(cfg.alpha.clone())?;
    let report: FiberReport = fiber_decay_report(&fib, &base, b, &eps, cfg.rounding, &cfg.options())?;
    invariant(report.envelope_nonincreasing(), "suffix envelope is not nonincreasing")?;
    let mut written = Vec::new();
    if cfg.format.csv() {
        let mut s = String::from(FiberReport::CSV_HEADER);
        s.push('\n');
        for row in report.csv_rows() {
            s.push_str(&row);
            s.push('\n');
        }
        write_file(&cfg.out, "fiber.csv", &s)?;
        written.push("fiber.csv");
    }
    if cfg.format.json() {
        let mut j = report.to_json();
        j["provenance"] = cfg.provenance();
        write_file(&cfg.out, "fiber.json", &pretty(&j))?;
        written.push("fiber.json");
    }
    Ok(format!("points: {}, free: {}, deciles nonincreasing: {}\n{}", report.points.len(), report.free_count(), report.deciles_nonincreasing(), summary(&cfg.out, &written)))
}
