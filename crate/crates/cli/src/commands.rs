//! Command implementations. Each returns an [`Outcome`]: a JSON summary plus
//! named output files, so results can be cached and replayed verbatim.

use std::collections::BTreeMap;
use std::fmt::Write;

use finsler_robin::fem::{mesh_polygon, solve_rayleigh};
use finsler_robin::radial::{fd_annulus, radial_fd, GammaRow, GammaTable};
use finsler_robin::verify::{
    annulus_eigenvalue, asymptotics_check, chain, norm_identity_suite, parallel_bound, summary_csv,
    to_json_lines, verify_area_theorem, verify_perimeter_theorem, wulff_eigenvalue,
};
use finsler_robin::{AnnulusSpec, Eigenpair1D, Verdict, VerificationRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{DomainSpec, RunConfig};
use crate::error::CliError;
use crate::svg::{line_chart, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Perimeter,
    Area,
    Parallel,
    Asymptotics,
    Chain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eig,
    Verify(Check),
    Curves,
    Geom,
    NormCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub summary: Value,
    /// File name to contents, written under the output directory.
    pub files: BTreeMap<String, String>,
}

impl Outcome {
    fn ok(summary: Value) -> Self {
        Self {
            status: Status::Pass,
            summary,
            files: BTreeMap::new(),
        }
    }

    fn with_file(mut self, name: impl Into<String>, contents: String) -> Self {
        self.files.insert(name.into(), contents);
        self
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Eig => eig(cfg),
        Command::Verify(check) => verify(cfg, check),
        Command::Curves => curves(cfg),
        Command::Geom => geom(cfg),
        Command::NormCheck => norm_check(cfg),
    }
}

fn eigenfunction_name(i: usize, n: usize) -> String {
    if n == 1 {
        "eigenfunction.csv".into()
    } else {
        format!("eigenfunction_{i:03}.csv")
    }
}

fn radial_csv(pair: &Eigenpair1D) -> String {
    let mut out = String::from("r,phi\n");
    for (r, p) in pair.grid.iter().zip(&pair.phi) {
        let _ = writeln!(out, "{r},{p}");
    }
    out
}

pub fn eig(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let norm = cfg.finsler_norm()?;
    let alphas = cfg.alphas()?;
    let want_u = cfg.output.eigenfunction;
    let n_nodes = cfg.solver.n_nodes;

    let (kind, method, results): (&str, &str, Vec<(Value, Option<String>)>) = match cfg.domain()? {
        DomainSpec::Wulff { wulff } => {
            let r = wulff.radius;
            let results = alphas
                .par_iter()
                .map(|&alpha| {
                    let lambda = wulff_eigenvalue(r, alpha)?;
                    let u = match want_u && alpha < 0.0 {
                        true => Some(radial_csv(&radial_fd(r, alpha, n_nodes)?)),
                        false => None,
                    };
                    Ok((json!({ "alpha": alpha, "lambda": lambda }), u))
                })
                .collect::<finsler_robin::Result<Vec<_>>>()?;
            ("wulff", "secular", results)
        }
        DomainSpec::Annulus { annulus } => {
            let ann = AnnulusSpec::new(annulus.r1, annulus.r2)?;
            let results = alphas
                .par_iter()
                .map(|&alpha| {
                    let lambda = annulus_eigenvalue(&ann, alpha)?;
                    let u = match want_u && alpha < 0.0 {
                        true => Some(radial_csv(&fd_annulus(&ann, alpha, n_nodes)?)),
                        false => None,
                    };
                    Ok((json!({ "alpha": alpha, "lambda": lambda }), u))
                })
                .collect::<finsler_robin::Result<Vec<_>>>()?;
            ("annulus", "secular", results)
        }
        DomainSpec::Polygon(_) => {
            let poly = cfg.polygon(&norm)?;
            let mesh = mesh_polygon(&poly, cfg.solver.refinements)?;
            let opts = cfg.solver.harness().solver;
            let results = alphas
                .par_iter()
                .map(|&alpha| {
                    let sol = solve_rayleigh(&mesh, &norm, alpha, &opts)?;
                    let u = want_u.then(|| sol.to_csv(&mesh));
                    Ok((
                        serde_json::to_value(sol.summary(&mesh, &norm))
                            .expect("summary serializes"),
                        u,
                    ))
                })
                .collect::<finsler_robin::Result<Vec<_>>>()?;
            ("polygon", "fem", results)
        }
    };

    let n = results.len();
    let mut outcome = Outcome::ok(Value::Null);
    let mut rows = Vec::with_capacity(n);
    for (i, (row, u)) in results.into_iter().enumerate() {
        if let Some(u) = u {
            outcome = outcome.with_file(eigenfunction_name(i, n), u);
        }
        rows.push(row);
    }
    outcome.summary = json!({
        "command": "eig",
        "domain": kind,
        "method": method,
        "results": rows,
    });
    Ok(outcome)
}

fn status_of(records: &[VerificationRecord]) -> Status {
    if records.iter().any(|r| r.verdict == Verdict::Fail) {
        Status::Fail
    } else if records.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

pub fn verify(cfg: &RunConfig, check: Check) -> Result<Outcome, CliError> {
    let norm = cfg.finsler_norm()?;
    let alphas = cfg.alphas()?;
    let harness = cfg.solver.harness();
    let mut extra = serde_json::Map::new();

    let records: Vec<VerificationRecord> = match check {
        Check::Asymptotics => alphas
            .iter()
            .map(|&a| asymptotics_check(cfg.checks.r3, cfg.checks.epsilon, a, harness.tolerance))
            .collect(),
        Check::Area => {
            let poly = cfg.polygon(&norm)?;
            let (records, bracket) = verify_area_theorem(&poly, &norm, &alphas, &harness);
            extra.insert("alpha_star_hat".into(), json!(bracket.alpha_star_hat));
            extra.insert("first_failure".into(), json!(bracket.first_failure));
            records
        }
        Check::Perimeter | Check::Parallel | Check::Chain => {
            let poly = cfg.polygon(&norm)?;
            let hole = cfg.checks.hole_perimeter;
            alphas
                .par_iter()
                .map(|&a| match check {
                    Check::Perimeter => verify_perimeter_theorem(&poly, &norm, a, &harness),
                    Check::Parallel => parallel_bound(&poly, &norm, a, &harness),
                    _ => chain(&poly, &norm, a, hole, &harness),
                })
                .collect()
        }
    };

    let status = status_of(&records);
    let count = |v: Verdict| records.iter().filter(|r| r.verdict == v).count();
    let worst = records
        .iter()
        .filter_map(VerificationRecord::margin)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    let mut summary = json!({
        "command": "verify",
        "check": check,
        "status": status,
        "records": records.len(),
        "passed": count(Verdict::Pass),
        "failed": count(Verdict::Fail),
        "inconclusive": count(Verdict::Inconclusive),
        "worst_margin": worst,
    });
    summary.as_object_mut().expect("object").extend(extra);
    Ok(Outcome {
        status,
        summary,
        files: BTreeMap::new(),
    }
    .with_file("records.jsonl", to_json_lines(&records))
    .with_file("summary.csv", summary_csv(&records)))
}

pub fn curves(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = cfg.alpha.ok_or_else(|| CliError::Config {
        field: "alpha".into(),
        message: "curves need an alpha sweep".into(),
    })?;
    if !alpha.is_sweep() {
        return Err(CliError::Config {
            field: "alpha".into(),
            message: "curves need {\"sweep\": {...}}, got a scalar".into(),
        });
    }
    let (r3, eps) = (cfg.checks.r3, cfg.checks.epsilon);
    let annulus = AnnulusSpec::from_epsilon(r3, eps)?;
    let rows = alpha
        .values()
        .par_iter()
        .map(|&a| {
            Ok(GammaRow {
                alpha: a,
                gamma_a: annulus_eigenvalue(&annulus, a)?,
                gamma_b: wulff_eigenvalue(r3, a)?,
            })
        })
        .collect::<finsler_robin::Result<Vec<_>>>()?;
    let table = GammaTable {
        r3,
        epsilon: eps,
        annulus,
        rows,
    };
    let below = table.rows.iter().filter(|r| r.gamma_a <= r.gamma_b).count();
    let max_diff = table
        .rows
        .iter()
        .map(GammaRow::diff)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut outcome = Outcome::ok(json!({
        "command": "curves",
        "r3": r3,
        "epsilon": eps,
        "annulus": annulus,
        "points": table.rows.len(),
        "gamma_a_below_gamma_b": below,
        "max_gamma_a_minus_gamma_b": max_diff,
    }))
    .with_file("curves.csv", table.to_csv());
    if cfg.output.svg {
        let series = [
            Series {
                label: "Gamma_A (annulus)",
                color: "#1f77b4",
                points: table.rows.iter().map(|r| (r.alpha, r.gamma_a)).collect(),
            },
            Series {
                label: "Gamma_B (Wulff)",
                color: "#d62728",
                points: table.rows.iter().map(|r| (r.alpha, r.gamma_b)).collect(),
            },
        ];
        let title = format!("r3 = {r3}, epsilon = {eps}");
        outcome = outcome.with_file(
            "curves.svg",
            line_chart(&title, "alpha", "eigenvalue", &series),
        );
    }
    Ok(outcome)
}

pub fn geom(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let norm = cfg.finsler_norm()?;
    let poly = cfg.polygon(&norm)?;
    let profile = poly.profile(&norm, cfg.checks.samples)?;
    let (inradius, center) = poly.inradius_with_center(&norm);
    Ok(Outcome::ok(json!({
        "command": "geom",
        "vertices": poly.len(),
        "area": poly.area(),
        "perimeter": poly.perimeter(),
        "anis_perimeter": poly.anis_perimeter(&norm),
        "wulff_area": norm.wulff_area(),
        "inradius": inradius,
        "incenter": center,
        "radii": poly.parallel_radii(&norm),
        "isoperimetric_deficit": poly.isoperimetric_deficit(&norm),
    }))
    .with_file("profile.csv", profile.to_csv()))
}

pub fn norm_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let norm = cfg.finsler_norm()?;
    let seed = cfg.seed.ok_or_else(|| CliError::Config {
        field: "seed".into(),
        message: "randomized suites need an explicit seed".into(),
    })?;
    let checks = norm_identity_suite(&norm, cfg.checks.samples, seed);
    let status = if checks.iter().all(|c| c.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Outcome {
        status,
        summary: json!({
            "command": "norm-check",
            "norm": cfg.norm,
            "seed": seed,
            "status": status,
            "identities": checks,
        }),
        files: BTreeMap::new(),
    })
}
