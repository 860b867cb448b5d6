//! Checks of the eigenvalue inequalities, producing serializable records.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fem::{mesh_polygon, solve_rayleigh, SolverOptions};
use crate::geometry::ConvexPolygon;
use crate::norm::{numeric_dual, FinslerNorm};
use crate::radial::{annulus_secular, wulff_secular, AnnulusSpec};
use crate::vec2::{self, Vec2};

pub const DEFAULT_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_REFINEMENTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub check_id: String,
    pub inputs: Value,
    pub quantities: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationRecord {
    /// Record with `quantities["margin"] = margin`; passes iff
    /// `margin ≥ −tolerance`.
    pub fn from_margin(
        check_id: &str,
        inputs: Value,
        mut quantities: BTreeMap<String, f64>,
        margin: f64,
        tolerance: f64,
    ) -> Self {
        quantities.insert("margin".into(), margin);
        let verdict = if margin >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            check_id: check_id.into(),
            inputs,
            quantities,
            tolerance,
            verdict,
            note: None,
        }
    }

    pub fn inconclusive(check_id: &str, inputs: Value, tolerance: f64, err: &Error) -> Self {
        Self {
            check_id: check_id.into(),
            inputs,
            quantities: BTreeMap::new(),
            tolerance,
            verdict: Verdict::Inconclusive,
            note: Some(err.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn margin(&self) -> Option<f64> {
        self.quantities.get("margin").copied()
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }
}

/// One JSON object per line.
pub fn to_json_lines(records: &[VerificationRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}

/// `check_id,verdict,margin,tolerance` rows.
pub fn summary_csv(records: &[VerificationRecord]) -> String {
    let mut out = String::from("check_id,verdict,margin,tolerance\n");
    for r in records {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        let margin = r.margin().map(|m| m.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.check_id, verdict, margin, r.tolerance
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    pub refinements: usize,
    pub tolerance: f64,
    pub solver: SolverOptions,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            refinements: DEFAULT_REFINEMENTS,
            tolerance: DEFAULT_TOLERANCE,
            solver: SolverOptions::default(),
        }
    }
}

fn inputs(poly: &ConvexPolygon, norm: &FinslerNorm, alpha: f64, cfg: &HarnessConfig) -> Value {
    json!({
        "norm": norm.spec(),
        "domain": poly,
        "alpha": alpha,
        "refinements": cfg.refinements,
    })
}

fn quantities<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `λ_FEM(α, Ω)` on the uniformly refined centroid-fan mesh.
pub fn fem_eigenvalue(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    cfg: &HarnessConfig,
) -> Result<f64> {
    let mesh = mesh_polygon(poly, cfg.refinements)?;
    Ok(solve_rayleigh(&mesh, norm, alpha, &cfg.solver)?.lambda)
}

/// `λ(α, 𝒲_R)`, with the trivial value at `α = 0`.
pub fn wulff_eigenvalue(radius: f64, alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        return Ok(0.0);
    }
    wulff_secular(radius, alpha)
}

/// `μ(α, A_{r1,r2})`, with the trivial value at `α = 0`.
pub fn annulus_eigenvalue(ann: &AnnulusSpec, alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        AnnulusSpec::new(ann.r1, ann.r2)?;
        return Ok(0.0);
    }
    annulus_secular(ann, alpha)
}

fn with_fem(
    check_id: &str,
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    cfg: &HarnessConfig,
    body: impl FnOnce(f64) -> Result<(BTreeMap<String, f64>, f64)>,
) -> VerificationRecord {
    let inp = inputs(poly, norm, alpha, cfg);
    let run = || -> Result<(BTreeMap<String, f64>, f64)> {
        if !(alpha <= 0.0) {
            return Err(Error::Domain(format!(
                "alpha must be non-positive, got {alpha}"
            )));
        }
        let lambda = fem_eigenvalue(poly, norm, alpha, cfg)?;
        let (mut q, margin) = body(lambda)?;
        q.insert("lambda_fem".into(), lambda);
        Ok((q, margin))
    };
    match run() {
        Ok((q, margin)) => VerificationRecord::from_margin(check_id, inp, q, margin, cfg.tolerance),
        Err(e) => VerificationRecord::inconclusive(check_id, inp, cfg.tolerance, &e),
    }
}

/// `λ_FEM(α, Ω) ≤ μ(α, A_{r1,r2})` with the radii of the parallel-set
/// profile.
pub fn parallel_bound(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    cfg: &HarnessConfig,
) -> VerificationRecord {
    with_fem("parallel_bound", poly, norm, alpha, cfg, |lambda| {
        let radii = poly.parallel_radii(norm);
        let mu = annulus_eigenvalue(&AnnulusSpec::new(radii.r1, radii.r2)?, alpha)?;
        Ok((
            quantities([("mu_annulus", mu), ("r1", radii.r1), ("r2", radii.r2)]),
            mu - lambda,
        ))
    })
}

/// `λ(α, Ω) ≤ λ(α, 𝒲_{P_F(Ω)/2κ})`.
pub fn verify_perimeter_theorem(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    cfg: &HarnessConfig,
) -> VerificationRecord {
    with_fem("perimeter_theorem", poly, norm, alpha, cfg, |lambda| {
        let radius = poly.anis_perimeter(norm) / (2.0 * norm.wulff_area());
        let wulff = wulff_eigenvalue(radius, alpha)?;
        Ok((
            quantities([("lambda_wulff_perimeter", wulff), ("radius", radius)]),
            wulff - lambda,
        ))
    })
}

/// Grid bracket for the threshold below which the area inequality may fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaStarBracket {
    /// Most negative grid value from which every margin up to 0 passes.
    pub alpha_star_hat: Option<f64>,
    /// The next grid value below it, where a check did not pass.
    pub first_failure: Option<f64>,
}

/// `λ(α, Ω) ≤ λ(α, 𝒲_{√(A0/κ)})` over an ascending grid of `α ≤ 0`.
pub fn verify_area_theorem(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha_grid: &[f64],
    cfg: &HarnessConfig,
) -> (Vec<VerificationRecord>, AlphaStarBracket) {
    let radius = (poly.area() / norm.wulff_area()).sqrt();
    let records: Vec<VerificationRecord> = alpha_grid
        .par_iter()
        .map(|&alpha| {
            with_fem("area_theorem", poly, norm, alpha, cfg, |lambda| {
                let wulff = wulff_eigenvalue(radius, alpha)?;
                Ok((
                    quantities([("lambda_wulff_area", wulff), ("radius", radius)]),
                    wulff - lambda,
                ))
            })
        })
        .collect();

    let mut order: Vec<usize> = (0..alpha_grid.len()).collect();
    order.sort_by(|&a, &b| alpha_grid[b].total_cmp(&alpha_grid[a]));
    let mut bracket = AlphaStarBracket {
        alpha_star_hat: None,
        first_failure: None,
    };
    for i in order {
        if records[i].passed() {
            bracket.alpha_star_hat = Some(alpha_grid[i]);
        } else {
            bracket.first_failure = Some(alpha_grid[i]);
            break;
        }
    }
    (records, bracket)
}

/// Small-`α` expansions `λ ≈ 2α/r3` (Wulff) and `μ ≈ 2α r2/r3²` (annulus
/// of the same area with `r2 = r3 + ε`), with quadratic remainders.
pub fn asymptotics_check(
    r3: f64,
    epsilon: f64,
    alpha_small: f64,
    tolerance: f64,
) -> VerificationRecord {
    let inp = json!({ "r3": r3, "epsilon": epsilon, "alpha": alpha_small });
    let run = || -> Result<(BTreeMap<String, f64>, f64)> {
        if !(-1e-2..0.0).contains(&alpha_small) {
            return Err(Error::Domain(format!(
                "alpha_small must lie in [-1e-2, 0), got {alpha_small}"
            )));
        }
        let ann = AnnulusSpec::from_epsilon(r3, epsilon)?;
        let rem_wulff = |a: f64| -> Result<f64> { Ok(wulff_secular(r3, a)? - 2.0 * a / r3) };
        let rem_annulus = |a: f64| -> Result<f64> {
            Ok(annulus_secular(&ann, a)? - 2.0 * a * ann.r2 / (r3 * r3))
        };
        let (w1, w2) = (rem_wulff(alpha_small)?, rem_wulff(2.0 * alpha_small)?);
        let (a1, a2) = (rem_annulus(alpha_small)?, rem_annulus(2.0 * alpha_small)?);
        let (ratio_w, ratio_a) = (w2 / w1, a2 / a1);
        let ratio_margin = [ratio_w, ratio_a]
            .iter()
            .map(|r| (r - 3.0).min(5.0 - r))
            .fold(f64::INFINITY, f64::min);
        let margin = (-w1.abs()).min(-a1.abs()).min(ratio_margin);
        let q = quantities([
            ("lambda_wulff", w1 + 2.0 * alpha_small / r3),
            ("mu_annulus", a1 + 2.0 * alpha_small * ann.r2 / (r3 * r3)),
            ("remainder_wulff", w1),
            ("remainder_annulus", a1),
            ("remainder_ratio_wulff", ratio_w),
            ("remainder_ratio_annulus", ratio_a),
            ("c_wulff", w1 / (alpha_small * alpha_small)),
            ("c_annulus", a1 / (alpha_small * alpha_small)),
        ]);
        Ok((q, if margin.is_finite() { margin } else { -1.0 }))
    };
    match run() {
        Ok((q, m)) => VerificationRecord::from_margin("asymptotics", inp, q, m, tolerance),
        Err(e) => VerificationRecord::inconclusive("asymptotics", inp, tolerance, &e),
    }
}

/// Monotonicity step for domains with holes:
/// `λ(α, 𝒲_{r2}) ≤ λ(α, 𝒲_{r3'})`, `r3' = (P_F(Ω) + hole_perimeter)/2κ`.
pub fn multiply_connected_note(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    hole_perimeter: f64,
    tolerance: f64,
) -> VerificationRecord {
    let inp = json!({
        "norm": norm.spec(),
        "domain": poly,
        "alpha": alpha,
        "hole_perimeter": hole_perimeter,
    });
    let run = || -> Result<(BTreeMap<String, f64>, f64)> {
        if !(hole_perimeter >= 0.0) || !(alpha <= 0.0) {
            return Err(Error::Domain(format!(
                "need hole_perimeter >= 0 and alpha <= 0, got {hole_perimeter} and {alpha}"
            )));
        }
        let two_kappa = 2.0 * norm.wulff_area();
        let r2 = poly.anis_perimeter(norm) / two_kappa;
        let r3p = r2 + hole_perimeter / two_kappa;
        let (l2, l3) = (wulff_eigenvalue(r2, alpha)?, wulff_eigenvalue(r3p, alpha)?);
        Ok((
            quantities([
                ("r2", r2),
                ("r3_prime", r3p),
                ("lambda_wulff_r2", l2),
                ("lambda_wulff_r3_prime", l3),
            ]),
            l3 - l2,
        ))
    };
    match run() {
        Ok((q, m)) => VerificationRecord::from_margin("multiply_connected", inp, q, m, tolerance),
        Err(e) => VerificationRecord::inconclusive("multiply_connected", inp, tolerance, &e),
    }
}

/// `λ_FEM ≤ μ(annulus) ≤ λ(𝒲_{r2}) ≤ λ(𝒲_{r3'})`; the margin is the
/// smallest of the three gaps.
pub fn chain(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    alpha: f64,
    hole_perimeter: f64,
    cfg: &HarnessConfig,
) -> VerificationRecord {
    with_fem("chain", poly, norm, alpha, cfg, |lambda| {
        let radii = poly.parallel_radii(norm);
        let mu = annulus_eigenvalue(&AnnulusSpec::new(radii.r1, radii.r2)?, alpha)?;
        let w2 = wulff_eigenvalue(radii.r2, alpha)?;
        let r3p = radii.r2 + hole_perimeter / (2.0 * norm.wulff_area());
        let w3 = wulff_eigenvalue(r3p, alpha)?;
        let gaps = [mu - lambda, w2 - mu, w3 - w2];
        Ok((
            quantities([
                ("mu_annulus", mu),
                ("lambda_wulff_r2", w2),
                ("lambda_wulff_r3_prime", w3),
                ("r1", radii.r1),
                ("r2", radii.r2),
                ("r3_prime", r3p),
                ("margin_parallel", gaps[0]),
                ("margin_annulus_wulff", gaps[1]),
                ("margin_monotone", gaps[2]),
            ]),
            gaps.iter().copied().fold(f64::INFINITY, f64::min),
        ))
    })
}

/// Worst observed error of one norm identity over random inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vec2 {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = 10f64.powf(rng.gen_range(-2.0..2.0));
    vec2::scale(r, vec2::unit_from_angle(theta))
}

/// Homogeneity, Euler, duality, inversion, Cauchy–Schwarz and bipolar
/// identities on `samples` seeded random inputs each.
pub fn norm_identity_suite(norm: &FinslerNorm, samples: usize, seed: u64) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = |identity: &str, tolerance: f64, f: &mut dyn FnMut(&mut ChaCha8Rng) -> f64| {
        let max_error = (0..samples).map(|_| f(&mut rng)).fold(0.0f64, f64::max);
        IdentityCheck {
            identity: identity.into(),
            samples,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    };
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    vec![
        run("homogeneity", 1e-12, &mut |rng| {
            let xi = random_vector(rng);
            let t = rng.gen_range(-10.0..10.0);
            let lhs = norm.eval(vec2::scale(t, xi));
            (lhs - t.abs() * norm.eval(xi)).abs() / (1.0 + lhs.abs())
        }),
        run("euler", 1e-8, &mut |rng| {
            let xi = random_vector(rng);
            let g = norm.grad(xi).expect("nonzero input");
            let gp = norm.polar_grad(xi).expect("nonzero input");
            rel(vec2::dot(g, xi), norm.eval(xi)).max(rel(vec2::dot(gp, xi), norm.polar_eval(xi)))
        }),
        run("duality", 1e-8, &mut |rng| {
            let xi = random_vector(rng);
            let a = norm.eval(norm.polar_grad(xi).expect("nonzero input"));
            let b = norm.polar_eval(norm.grad(xi).expect("nonzero input"));
            (a - 1.0).abs().max((b - 1.0).abs())
        }),
        run("inversion", 1e-7, &mut |rng| {
            let xi = random_vector(rng);
            let inner = norm.polar_grad(xi).expect("nonzero input");
            let back = vec2::scale(
                norm.polar_eval(xi),
                norm.grad(inner).expect("nonzero input"),
            );
            vec2::norm(vec2::sub(back, xi)) / vec2::norm(xi)
        }),
        run("cauchy_schwarz", 1e-12, &mut |rng| {
            let (xi, eta) = (random_vector(rng), random_vector(rng));
            let bound = norm.eval(xi) * norm.polar_eval(eta);
            ((vec2::dot(xi, eta).abs() - bound) / bound).max(0.0)
        }),
        run("bipolar", 1e-8, &mut |rng| {
            let xi = random_vector(rng);
            rel(numeric_dual(|v| norm.polar_eval(v), xi), norm.eval(xi))
        }),
    ]
}
