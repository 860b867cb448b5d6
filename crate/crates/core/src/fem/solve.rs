use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::assemble::Discretization;
use crate::fem::mesh::TriMesh;
use crate::fem::sparse::{CsrMatrix, LdlSymbolic, SparseLdl};
use crate::fem::FemSolution;
use crate::norm::FinslerNorm;

const MAX_SHIFT_TRIES: usize = 64;
const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Relative quotient decrease counted as stagnation.
    pub stall_tol: f64,
    /// Consecutive stagnating iterations that end the descent.
    pub stall_iters: usize,
    /// Largest final decrease accepted when `max_iters` is reached.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            stall_tol: 1e-10,
            stall_iters: 5,
            residual_tol: 1e-6,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha <= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be non-positive, got {alpha}"
        )));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| a * p + q).collect()
}

/// Mass normalization with a positive sum.
fn normalize(u: &mut [f64], mass: &CsrMatrix) -> f64 {
    let s = mass.bilinear(u, u).sqrt();
    let s = if u.iter().sum::<f64>() < 0.0 { -s } else { s };
    u.iter_mut().for_each(|v| *v /= s);
    s
}

fn constant_solution(n: usize, disc: &Discretization, alpha: f64) -> FemSolution {
    let mut u = vec![1.0; n];
    normalize(&mut u, &disc.mass);
    FemSolution {
        u,
        lambda: 0.0,
        alpha,
        iterations: 0,
        residual: 0.0,
    }
}

/// Factorizes `A − σM`, lowering `σ` until no eigenvalue lies below it.
fn factor_below<'s>(
    a: &CsrMatrix,
    mass: &CsrMatrix,
    symbolic: &'s LdlSymbolic,
    mut sigma: f64,
) -> Result<(f64, SparseLdl<'s>)> {
    for _ in 0..MAX_SHIFT_TRIES {
        let ldl = SparseLdl::factor(&CsrMatrix::combine(&[(1.0, a), (-sigma, mass)]), symbolic);
        if ldl.negative_count() == 0 {
            return Ok((sigma, ldl));
        }
        sigma = 2.0 * sigma - 1.0;
    }
    Err(Error::Solver(format!(
        "no shift below the spectrum found (last {sigma})"
    )))
}

/// Smallest generalized eigenpair for a quadratic norm `F(ξ)² = ξᵀMξ`.
///
/// Spectrum slicing with inertia counts isolates `λ₁` in a bracket
/// `[σ_lo, σ_hi]` holding exactly one eigenvalue; inverse iteration from
/// `σ_lo` then converges even when `λ₂` is close to `λ₁`.
pub fn solve_linear_quadratic(mesh: &TriMesh, m: [[f64; 2]; 2], alpha: f64) -> Result<FemSolution> {
    check_alpha(alpha)?;
    let norm = FinslerNorm::quadratic(m)?;
    let disc = Discretization::new(mesh, &norm);
    let n = mesh.n_vertices();
    if alpha == 0.0 {
        return Ok(constant_solution(n, &disc, alpha));
    }
    let a = CsrMatrix::combine(&[(1.0, &disc.stiffness(m)), (alpha, &disc.boundary)]);
    let bound = disc.constant_bound(alpha);
    let (mut lo, mut ldl) = factor_below(&a, &disc.mass, &disc.symbolic, 2.0 * bound - 1.0)?;
    let count = |s: f64| {
        let f = SparseLdl::factor(
            &CsrMatrix::combine(&[(1.0, &a), (-s, &disc.mass)]),
            &disc.symbolic,
        );
        (f.negative_count(), f)
    };
    let mut hi = bound + 1e-12 * bound.abs();
    let mut hi_count = count(hi).0;
    let mut width_target = 1e-3;
    let mut iterations = 0;

    loop {
        let mut guard = 0;
        while hi_count != 1 || hi - lo > width_target * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || guard > 200 {
                break;
            }
            guard += 1;
            let (c, f) = count(mid);
            if c == 0 {
                lo = mid;
                ldl = f;
            } else {
                hi = mid;
                hi_count = c;
            }
        }

        let mut u = vec![1.0; n];
        normalize(&mut u, &disc.mass);
        let mut theta = a.bilinear(&u, &u);
        let mut change = f64::INFINITY;
        let mut settled = 0;
        for _ in 0..400 {
            iterations += 1;
            u = ldl.solve(&disc.mass.mul_vec(&u));
            normalize(&mut u, &disc.mass);
            let next = a.bilinear(&u, &u);
            change = ((theta - next) / next).abs();
            theta = next;
            settled = if change <= 1e-14 { settled + 1 } else { 0 };
            if settled >= 2 {
                return Ok(FemSolution {
                    u,
                    lambda: theta,
                    alpha,
                    iterations,
                    residual: change,
                });
            }
        }
        if width_target < 1e-12 {
            let last = FemSolution {
                u,
                lambda: theta,
                alpha,
                iterations,
                residual: change,
            };
            return Err(Error::NonConvergence {
                iterations,
                residual: change,
                last: Box::new(last),
            });
        }
        width_target *= 1e-3;
    }
}

/// Ritz value step for the pencil restricted to `span{u, d}`.
fn ritz_step(e: [f64; 3], m: [f64; 3]) -> Option<f64> {
    let qa = m[0] * m[2] - m[1] * m[1];
    let qb = -(e[0] * m[2] + e[2] * m[0] - 2.0 * e[1] * m[1]);
    let qc = e[0] * e[2] - e[1] * e[1];
    if !(qa > 0.0) {
        return None;
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let theta = (-qb - disc.sqrt()) / (2.0 * qa);
    let r0 = [e[0] - theta * m[0], e[1] - theta * m[1]];
    let r1 = [e[1] - theta * m[1], e[2] - theta * m[2]];
    let t = if r0[1].abs() >= r1[1].abs() {
        -r0[0] / r0[1]
    } else {
        -r1[0] / r1[1]
    };
    (t.is_finite() && t > 0.0).then_some(t)
}

/// Minimizes the discrete Rayleigh quotient for any supported norm.
///
/// Preconditioned nonlinear conjugate gradients (Polak–Ribière+) starting
/// from the constant. The preconditioner is a factorization of
/// `K + αB − σM` with `K` the stiffness of a quadratic norm comparable to
/// `F` and `σ` below its spectrum. Steps come from a two-dimensional Ritz
/// model, then Armijo backtracking on the true quotient, so the quotient
/// never increases.
pub fn solve_rayleigh(
    mesh: &TriMesh,
    norm: &FinslerNorm,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<FemSolution> {
    check_alpha(alpha)?;
    let disc = Discretization::new(mesh, norm);
    let n = mesh.n_vertices();
    if alpha == 0.0 {
        return Ok(constant_solution(n, &disc, alpha));
    }
    let reference = match norm.quadratic_matrix() {
        Some(m) => m,
        None => {
            let (a, b) = norm.norm_bounds();
            let c = 0.5 * (a * a + b * b);
            [[c, 0.0], [0.0, c]]
        }
    };
    let lin = CsrMatrix::combine(&[(1.0, &disc.stiffness(reference)), (alpha, &disc.boundary)]);
    let (_, precond) = factor_below(
        &lin,
        &disc.mass,
        &disc.symbolic,
        2.0 * disc.constant_bound(alpha) - 1.0,
    )?;

    let mut u = vec![1.0; n];
    normalize(&mut u, &disc.mass);
    let mut j = disc.quotient(alpha, &u);

    let gradients = |u: &[f64], j: f64| -> (Vec<f64>, Vec<f64>) {
        let mut gn = disc.energy_gradient(u);
        let bu = disc.boundary.mul_vec(u);
        gn.iter_mut()
            .zip(&bu)
            .for_each(|(g, b)| *g += 2.0 * alpha * b);
        let mu = disc.mass.mul_vec(u);
        let mass = dot(u, &mu);
        let g = gn
            .iter()
            .zip(&mu)
            .map(|(a, b)| (a - 2.0 * j * b) / mass)
            .collect();
        (gn, g)
    };

    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None; // (g, z, d)
    let mut stall = 0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let (gn, g) = gradients(&u, j);
        let z = precond.solve(&g);
        let mut d: Vec<f64> = z.iter().map(|v| -v).collect();
        let mut steepest = true;
        if let Some((g0, z0, d0)) = &prev {
            let denom = dot(z0, g0);
            let beta = if denom != 0.0 {
                (dot(&z, &g) - dot(&z, g0)) / denom
            } else {
                0.0
            };
            if beta > 0.0 {
                let cand = axpy(beta, d0, &d);
                if dot(&cand, &g) < 0.0 {
                    d = cand;
                    steepest = false;
                }
            }
        }

        let accepted = loop {
            let slope = dot(&g, &d);
            if !(slope < 0.0) {
                break None;
            }
            let e = [j, 0.5 * dot(&gn, &d), disc.numerator(alpha, &d)];
            let md = disc.mass.mul_vec(&d);
            let m = [1.0, dot(&u, &md), dot(&d, &md)];
            let mut t = ritz_step(e, m).unwrap_or(1.0);
            let mut found = None;
            for _ in 0..MAX_HALVINGS {
                let trial = axpy(t, &d, &u);
                let jt = disc.quotient(alpha, &trial);
                if jt <= j + ARMIJO_C * t * slope {
                    found = Some((trial, jt));
                    break;
                }
                t *= 0.5;
            }
            if found.is_some() || steepest {
                break found;
            }
            d = z.iter().map(|v| -v).collect();
            steepest = true;
        };

        let Some((mut next, j_next)) = accepted else {
            residual = 0.0;
            break;
        };
        if j_next > j {
            return Err(Error::Solver(format!(
                "quotient increased from {j} to {j_next} at iteration {iterations}"
            )));
        }
        let s = normalize(&mut next, &disc.mass);
        d.iter_mut().for_each(|v| *v /= s);
        residual = (j - j_next) / j_next.abs();
        j = disc.quotient(alpha, &next);
        u = next;
        prev = Some((g, z, d));
        stall = if residual < opts.stall_tol {
            stall + 1
        } else {
            0
        };
        if stall >= opts.stall_iters {
            break;
        }
    }

    let sol = FemSolution {
        u,
        lambda: j,
        alpha,
        iterations,
        residual,
    };
    if stall < opts.stall_iters && iterations >= opts.max_iters && residual > opts.residual_tol {
        return Err(Error::NonConvergence {
            iterations,
            residual,
            last: Box::new(sol),
        });
    }
    Ok(sol)
}

/// `Σ_e F(ν_e) ∫_e u²` for the mass-normalized `u`, i.e. `dλ/dα`.
pub fn eigen_derivative(sol: &FemSolution, mesh: &TriMesh, norm: &FinslerNorm) -> f64 {
    let disc = Discretization::new(mesh, norm);
    disc.boundary.bilinear(&sol.u, &sol.u) / disc.mass.bilinear(&sol.u, &sol.u)
}
