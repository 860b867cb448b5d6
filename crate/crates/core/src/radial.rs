//! Radial eigenproblems for the Robin Wulff shape and the Neumann–Robin
//! anisotropic annulus.
//!
//! Every first eigenvalue is available two ways: as `λ = −k²` from a secular
//! equation in modified Bessel functions, and from a weighted P1 finite
//! element discretization solved by Sturm bisection.

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_all, bessel_i0, bessel_i1, MAX_ARGUMENT};
use crate::error::{Error, Result};

const K_MIN: f64 = 1e-8;
const K_LIMIT_FACTOR: f64 = 1e4;
const SECULAR_RTOL: f64 = 1e-13;
const STURM_RTOL: f64 = 1e-13;
const INVERSE_ITERATIONS: usize = 4;
const INTERSECTION_GRID: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub r1: f64,
    pub r2: f64,
}

impl AnnulusSpec {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r2.is_finite()) || r1 < 0.0 || r1 >= r2 {
            return Err(Error::Domain(format!(
                "annulus needs 0 <= r1 < r2, got r1 = {r1}, r2 = {r2}"
            )));
        }
        Ok(Self { r1, r2 })
    }

    /// Annulus with `r1 = √(2εr3 + ε²)`, `r2 = r3 + ε`, whose area matches
    /// the Wulff shape of radius `r3`.
    pub fn from_epsilon(r3: f64, epsilon: f64) -> Result<Self> {
        if !(r3 > 0.0 && epsilon > 0.0) || !(r3 + epsilon).is_finite() {
            return Err(Error::Domain(format!(
                "need r3 > 0 and epsilon > 0, got r3 = {r3}, epsilon = {epsilon}"
            )));
        }
        let ann = Self::new(
            (2.0 * epsilon * r3 + epsilon * epsilon).sqrt(),
            r3 + epsilon,
        )?;
        let defect = ann.r2 * ann.r2 - ann.r1 * ann.r1 - r3 * r3;
        if defect.abs() > 1e-12 * ann.r2 * ann.r2 {
            return Err(Error::Domain(format!(
                "annulus area mismatch {defect:e} for r3 = {r3}, epsilon = {epsilon}"
            )));
        }
        Ok(ann)
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.r1, self.r2).map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair1D {
    pub lambda: f64,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha < 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be negative, got {alpha}"
        )));
    }
    Ok(())
}

/// `k I₁(kr) / I₀(kr)` without overflow.
fn i_ratio(k: f64, r: f64) -> Result<f64> {
    let x = k * r;
    if x > MAX_ARGUMENT {
        return Err(Error::Range {
            function: "I1/I0",
            x,
        });
    }
    Ok(k * bessel_i1(x)? / bessel_i0(x)?)
}

/// Wulff secular function divided by `I₀(k r3)`.
fn wulff_residual(r3: f64, alpha: f64, k: f64) -> Result<f64> {
    Ok(i_ratio(k, r3)? + alpha)
}

/// Annulus secular function divided by `K₁(k r1) I₀(k r2)`.
fn annulus_residual(ann: &AnnulusSpec, alpha: f64, k: f64) -> Result<f64> {
    let [i0b, i1b, k0b, k1b] = bessel_all(k * ann.r2)?;
    let [_, i1a, _, k1a] = bessel_all(k * ann.r1)?;
    Ok(k * i1b / i0b + alpha - (i1a / k1a) * (k * k1b - alpha * k0b) / i0b)
}

fn secular_root(equation: &'static str, r: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let k_limit = (K_LIMIT_FACTOR / r).min(MAX_ARGUMENT / r);
    let mut lo = K_MIN / r;
    if f(lo)? >= 0.0 {
        return Err(Error::NoRoot {
            equation,
            k_max: lo,
        });
    }
    let mut hi = (1.0 / r).max(2.0 * lo);
    loop {
        if f(hi)? > 0.0 {
            break;
        }
        lo = hi;
        if hi >= k_limit {
            return Err(Error::NoRoot {
                equation,
                k_max: hi,
            });
        }
        hi = (2.0 * hi).min(k_limit);
    }
    while hi - lo > SECULAR_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn wulff_k(r3: f64, alpha: f64) -> Result<f64> {
    if !(r3 > 0.0) || !r3.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {r3}")));
    }
    check_alpha(alpha)?;
    secular_root("wulff", r3, |k| wulff_residual(r3, alpha, k))
}

fn annulus_k(ann: &AnnulusSpec, alpha: f64) -> Result<f64> {
    ann.validate()?;
    if ann.r1 == 0.0 {
        return wulff_k(ann.r2, alpha);
    }
    check_alpha(alpha)?;
    secular_root("annulus", ann.r2, |k| annulus_residual(ann, alpha, k))
}

/// First Robin eigenvalue of the Wulff shape of radius `r3`.
pub fn wulff_secular(r3: f64, alpha: f64) -> Result<f64> {
    let k = wulff_k(r3, alpha)?;
    Ok(-k * k)
}

/// First Neumann–Robin eigenvalue of the annulus (Neumann at `r1`).
pub fn annulus_secular(ann: &AnnulusSpec, alpha: f64) -> Result<f64> {
    let k = annulus_k(ann, alpha)?;
    Ok(-k * k)
}

/// `dμ/dα = r2 φ(r2)²` with `∫ φ² r dr = 1`, evaluated in closed form.
///
/// With `Z = I₀ + c K₀`, `∫ x Z² dx = x²/2 (Z² − Z′²)`, and the boundary
/// conditions give `Z′(k r1) = 0`, `k Z′(k r2) = −α Z(k r2)`.
pub fn mu_derivative(ann: &AnnulusSpec, alpha: f64) -> Result<f64> {
    let k = annulus_k(ann, alpha)?;
    let x2 = k * ann.r2;
    let robin = 1.0 - (alpha / k).powi(2);
    let inner = if ann.r1 == 0.0 {
        0.0
    } else {
        let x1 = k * ann.r1;
        let [i0a, i1a, k0a, k1a] = bessel_all(x1)?;
        let [i0b, _, k0b, _] = bessel_all(x2)?;
        let c = i1a / k1a;
        let ratio = (i0a + c * k0a) / (i0b + c * k0b);
        0.5 * x1 * x1 * ratio * ratio
    };
    Ok(ann.r2 * k * k / (0.5 * x2 * x2 * robin - inner))
}

/// `dλ/dα` for the Wulff shape of radius `r3`.
pub fn wulff_derivative(r3: f64, alpha: f64) -> Result<f64> {
    let k = wulff_k(r3, alpha)?;
    Ok(2.0 / (r3 * (1.0 - (alpha / k).powi(2))))
}

/// Symmetric tridiagonal pencil `(A, M)`.
struct Pencil {
    a_diag: Vec<f64>,
    a_off: Vec<f64>,
    m_diag: Vec<f64>,
    m_off: Vec<f64>,
    robin: f64,
}

impl Pencil {
    fn assemble(grid: &[f64], robin: f64) -> Self {
        let n = grid.len();
        let mut p = Pencil {
            a_diag: vec![0.0; n],
            a_off: vec![0.0; n - 1],
            m_diag: vec![0.0; n],
            m_off: vec![0.0; n - 1],
            robin,
        };
        for i in 0..n - 1 {
            let (ra, rb) = (grid[i], grid[i + 1]);
            let h = rb - ra;
            let stiff = 0.5 * (ra + rb) / h;
            p.a_diag[i] += stiff;
            p.a_diag[i + 1] += stiff;
            p.a_off[i] = -stiff;
            p.m_diag[i] += h * (3.0 * ra + rb) / 12.0;
            p.m_diag[i + 1] += h * (ra + 3.0 * rb) / 12.0;
            p.m_off[i] = h * (ra + rb) / 12.0;
        }
        p.a_diag[n - 1] += robin;
        p
    }

    fn len(&self) -> usize {
        self.a_diag.len()
    }

    /// Pivots of the `LDLᵀ` factorization of `A − σM`.
    fn pivots(&self, sigma: f64) -> Vec<f64> {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let mut prev = self.a_diag[0] - sigma * self.m_diag[0];
        d.push(prev);
        for i in 1..n {
            let e = self.a_off[i - 1] - sigma * self.m_off[i - 1];
            let diag = self.a_diag[i] - sigma * self.m_diag[i];
            if prev == 0.0 {
                prev = f64::EPSILON * (diag.abs() + e.abs()).max(f64::MIN_POSITIVE);
            }
            prev = diag - e * e / prev;
            d.push(prev);
        }
        d
    }

    /// Number of generalized eigenvalues below `σ`.
    fn count_below(&self, sigma: f64) -> usize {
        self.pivots(sigma).iter().filter(|&&p| p < 0.0).count()
    }

    fn mass_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.m_diag[i] * x[i];
                if i > 0 {
                    y += self.m_off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.m_off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Solves `(A − σM) x = b` by the tridiagonal `LDLᵀ` recurrence.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let d = self.pivots(sigma);
        let l: Vec<f64> = (1..n)
            .map(|i| (self.a_off[i - 1] - sigma * self.m_off[i - 1]) / d[i - 1])
            .collect();
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= l[i] * y[i + 1];
        }
        y
    }

    /// `xᵀAx / xᵀMx` with the energy summed over differences, which keeps
    /// relative accuracy when `x` is nearly constant.
    fn rayleigh(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let energy: f64 = (0..n - 1)
            .map(|i| {
                let d = x[i + 1] - x[i];
                -self.a_off[i] * d * d
            })
            .sum::<f64>();
        let m = self.mass_norm(x);
        (energy + self.robin * x[n - 1] * x[n - 1]) / (m * m)
    }

    fn mass_norm(&self, x: &[f64]) -> f64 {
        let mx = self.mass_apply(x);
        x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>().sqrt()
    }
}

fn uniform_grid(r1: f64, r2: f64, n: usize) -> Vec<f64> {
    let h = (r2 - r1) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| r1 + i as f64 * h).collect();
    grid[n - 1] = r2;
    grid
}

fn solve_radial(r1: f64, r2: f64, alpha: f64, n_nodes: usize) -> Result<Eigenpair1D> {
    if n_nodes < 16 {
        return Err(Error::Domain(format!(
            "need at least 16 nodes, got {n_nodes}"
        )));
    }
    if !(alpha <= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be non-positive, got {alpha}"
        )));
    }
    let grid = uniform_grid(r1, r2, n_nodes);
    let pencil = Pencil::assemble(&grid, alpha * r2);
    let mut phi = vec![1.0; n_nodes];

    let lambda = if alpha == 0.0 {
        0.0
    } else {
        // Constant test function: λ₁ ≤ α r2 / ∫ r dr < 0.
        let q = alpha * r2 / (0.5 * (r2 * r2 - r1 * r1));
        let mut hi = q * (1.0 - 1e-12);
        while pencil.count_below(hi) == 0 {
            hi *= 1.0 - 1e-6;
        }
        let mut lo = 2.0 * q;
        while pencil.count_below(lo) > 0 {
            lo *= 2.0;
        }
        while hi - lo > STURM_RTOL * lo.abs() {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if pencil.count_below(mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Inertia counts are only accurate to roundoff, so the shift may land
        // on the eigenvalue itself; back off until the iterates stay finite.
        let mut offset = 1e-9;
        loop {
            let sigma = lo - offset * lo.abs();
            phi = vec![1.0; n_nodes];
            for _ in 0..INVERSE_ITERATIONS {
                let rhs = pencil.mass_apply(&phi);
                phi = pencil.solve_shifted(sigma, &rhs);
                let norm = pencil.mass_norm(&phi);
                phi.iter_mut().for_each(|v| *v /= norm);
            }
            if phi.iter().all(|v| v.is_finite()) {
                break;
            }
            if offset > 1e-2 {
                return Err(Error::Solver(format!(
                    "inverse iteration broke down near {lo}"
                )));
            }
            offset *= 1e3;
        }
        pencil.rayleigh(&phi)
    };

    let norm = pencil.mass_norm(&phi);
    let sign = if phi[n_nodes - 1] < 0.0 { -1.0 } else { 1.0 };
    phi.iter_mut().for_each(|v| *v *= sign / norm);
    Ok(Eigenpair1D {
        lambda,
        grid,
        phi,
        alpha,
    })
}

/// P1 discretization of the annulus quotient on `n_nodes` uniform nodes.
pub fn fd_annulus(ann: &AnnulusSpec, alpha: f64, n_nodes: usize) -> Result<Eigenpair1D> {
    ann.validate()?;
    solve_radial(ann.r1, ann.r2, alpha, n_nodes)
}

/// P1 discretization of the radial Wulff problem on `[0, r3]`.
pub fn radial_fd(r3: f64, alpha: f64, n_nodes: usize) -> Result<Eigenpair1D> {
    if !(r3 > 0.0) || !r3.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {r3}")));
    }
    solve_radial(0.0, r3, alpha, n_nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub alpha: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl GammaRow {
    pub fn diff(&self) -> f64 {
        self.gamma_a - self.gamma_b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTable {
    pub r3: f64,
    pub epsilon: f64,
    pub annulus: AnnulusSpec,
    pub rows: Vec<GammaRow>,
}

impl GammaTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,gamma_A,gamma_B,diff\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.alpha,
                row.gamma_a,
                row.gamma_b,
                row.diff()
            ));
        }
        out
    }
}

/// Samples `Γ_A(α) = μ(α, annulus)` and `Γ_B(α) = λ(α, 𝒲_{r3})`.
pub fn gamma_curves(r3: f64, epsilon: f64, alpha_grid: &[f64]) -> Result<GammaTable> {
    let annulus = AnnulusSpec::from_epsilon(r3, epsilon)?;
    let rows = alpha_grid
        .iter()
        .map(|&alpha| {
            Ok(GammaRow {
                alpha,
                gamma_a: annulus_secular(&annulus, alpha)?,
                gamma_b: wulff_secular(r3, alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaTable {
        r3,
        epsilon,
        annulus,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub alpha: f64,
    pub k: f64,
    pub lambda: f64,
    /// Normalized Wulff and annulus secular residuals at `(k, α)`.
    pub wulff_residual: f64,
    pub annulus_residual: f64,
}

/// Where `Γ_A` and `Γ_B` meet, closest to `α = 0`; `None` when no crossing
/// is found for `k ∈ [1e-6, 10³/r3]`.
pub fn intersection_alpha(r3: f64, epsilon: f64) -> Result<Option<Intersection>> {
    let annulus = AnnulusSpec::from_epsilon(r3, epsilon)?;
    let alpha_of = |k: f64| -> Result<f64> { Ok(-i_ratio(k, r3)?) };
    let g = |k: f64| -> Result<f64> { annulus_residual(&annulus, alpha_of(k)?, k) };

    let k_lo = 1e-6;
    let k_hi = (1e3 / r3).min(MAX_ARGUMENT / annulus.r2);
    if k_hi <= k_lo {
        return Ok(None);
    }
    let ratio = (k_hi / k_lo).powf(1.0 / INTERSECTION_GRID as f64);
    let mut a = k_lo;
    let mut ga = g(a)?;
    for j in 1..=INTERSECTION_GRID {
        let b = if j == INTERSECTION_GRID {
            k_hi
        } else {
            k_lo * ratio.powi(j as i32)
        };
        let gb = g(b)?;
        if ga == 0.0 || ga.signum() != gb.signum() {
            let (mut lo, mut hi, g_lo) = (a, if ga == 0.0 { a } else { b }, ga);
            if ga != 0.0 {
                while hi - lo > 1e-15 * hi {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid)?.signum() == g_lo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            let k = 0.5 * (lo + hi);
            let alpha = alpha_of(k)?;
            return Ok(Some(Intersection {
                alpha,
                k,
                lambda: -k * k,
                wulff_residual: wulff_residual(r3, alpha, k)?,
                annulus_residual: annulus_residual(&annulus, alpha, k)?,
            }));
        }
        a = b;
        ga = gb;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn annulus_spec_validation() {
        assert!(AnnulusSpec::new(0.5, 0.5).is_err());
        assert!(AnnulusSpec::new(-0.1, 1.0).is_err());
        let ann = AnnulusSpec::from_epsilon(1.0, 0.3).unwrap();
        assert!((ann.r2 * ann.r2 - ann.r1 * ann.r1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_alpha_limits() {
        let lam = wulff_secular(1.0, -1e-3).unwrap();
        assert!((lam + 2e-3).abs() < 1e-5);
        assert!(wulff_secular(1.0, -1e-12).unwrap().abs() < 1e-10);
        let ann = AnnulusSpec::new(0.5, 1.0).unwrap();
        assert!(annulus_secular(&ann, -1e-12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(wulff_secular(1.0, 0.0).is_err());
        assert!(wulff_secular(0.0, -1.0).is_err());
        assert!(fd_annulus(&AnnulusSpec::new(0.5, 1.0).unwrap(), -1.0, 8).is_err());
        assert!(radial_fd(1.0, 0.5, 100).is_err());
    }

    #[test]
    fn fd_at_zero_alpha_is_constant() {
        let ep = fd_annulus(&AnnulusSpec::new(0.2, 1.0).unwrap(), 0.0, 50).unwrap();
        assert_eq!(ep.lambda, 0.0);
        let c = ep.phi[0];
        assert!(ep.phi.iter().all(|v| (v - c).abs() < 1e-14));
        // ∫ c² r dr = 1 over [0.2, 1]
        assert!((c * c * 0.48 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn secular_matches_fd() {
        let ann = AnnulusSpec::new(0.5, 1.0).unwrap();
        let fd = fd_annulus(&ann, -1.0, 100_000).unwrap().lambda;
        assert!(rel(annulus_secular(&ann, -1.0).unwrap(), fd) < 1e-6);
        let fd = radial_fd(1.0, -1.0, 100_000).unwrap().lambda;
        assert!(rel(wulff_secular(1.0, -1.0).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn second_order_convergence() {
        let ann = AnnulusSpec::new(0.5, 1.0).unwrap();
        let exact = annulus_secular(&ann, -1.0).unwrap();
        let err = |n| (fd_annulus(&ann, -1.0, n).unwrap().lambda - exact).abs();
        let (e1, e2, e3) = (err(101), err(201), err(401));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn thin_hole_tends_to_wulff() {
        let ann = AnnulusSpec::new(1e-4, 1.0).unwrap();
        let mu = annulus_secular(&ann, -1.0).unwrap();
        assert!((mu - wulff_secular(1.0, -1.0).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn radial_eigenfunction_is_positive_and_monotone() {
        let ep = radial_fd(1.0, -3.0, 2000).unwrap();
        assert!(ep.phi.iter().all(|&v| v > 0.0));
        assert!(ep.phi.windows(2).all(|w| w[1] >= w[0]));
        assert!(ep.lambda < 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for (r1, r2, alpha) in [(0.5, 1.0, -1.0), (0.1, 2.0, -5.0), (0.9, 1.0, -0.3)] {
            let ann = AnnulusSpec::new(r1, r2).unwrap();
            let fd = (annulus_secular(&ann, alpha + h).unwrap()
                - annulus_secular(&ann, alpha - h).unwrap())
                / (2.0 * h);
            let d = mu_derivative(&ann, alpha).unwrap();
            assert!(d > 0.0);
            assert!(rel(d, fd) < 1e-5, "{r1} {r2} {alpha}: {d} vs {fd}");
        }
        let fd = (wulff_secular(1.5, -2.0 + h).unwrap() - wulff_secular(1.5, -2.0 - h).unwrap())
            / (2.0 * h);
        assert!(rel(wulff_derivative(1.5, -2.0).unwrap(), fd) < 1e-5);
    }

    #[test]
    fn derivative_from_fd_eigenfunction() {
        let ann = AnnulusSpec::new(0.3, 1.2).unwrap();
        let ep = fd_annulus(&ann, -2.0, 20_000).unwrap();
        let boundary = ann.r2 * ep.phi.last().unwrap().powi(2);
        assert!(rel(boundary, mu_derivative(&ann, -2.0).unwrap()) < 1e-6);
    }

    #[test]
    fn gamma_slopes_at_zero() {
        let (r3, eps) = (1.0, 0.2);
        let table = gamma_curves(r3, eps, &[-1e-6]).unwrap();
        let row = table.rows[0];
        let r2 = r3 + eps;
        assert!(rel(row.gamma_a / row.alpha, 2.0 * r2 / (r3 * r3)) < 1e-4);
        assert!(rel(row.gamma_b / row.alpha, 2.0 / r3) < 1e-4);
        assert!(row.gamma_a < row.gamma_b);
        assert!(table.to_csv().starts_with("alpha,gamma_A,gamma_B,diff\n"));
    }

    #[test]
    fn intersection_satisfies_both_equations() {
        let hit = intersection_alpha(1.0, 0.1).unwrap().expect("crossing");
        assert!(hit.alpha < 0.0);
        assert!(hit.wulff_residual.abs() <= 1e-9);
        assert!(hit.annulus_residual.abs() <= 1e-9);
        let ann = AnnulusSpec::from_epsilon(1.0, 0.1).unwrap();
        let mu = annulus_secular(&ann, hit.alpha).unwrap();
        assert!(rel(mu, hit.lambda) < 1e-8);
    }
}
