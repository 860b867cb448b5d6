use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::assemble::Discretization;
use crate::fem::mesh::mesh_polygon;
use crate::geometry::ConvexPolygon;
use crate::norm::FinslerNorm;

const PROFILE_SAMPLES: usize = 4096;

/// Continuous piecewise-linear function, constant beyond its end knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::Domain(format!(
                "need matching knots and values (at least 2), got {} and {}",
                knots.len(),
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "knots must increase strictly, values be finite".into(),
            ));
        }
        Ok(Self { knots, values })
    }

    /// Values on a uniform grid over `[0, length]`.
    pub fn uniform(length: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len().max(2);
        let knots = (0..values.len())
            .map(|i| length * i as f64 / (n - 1) as f64)
            .collect();
        Self::new(knots, values)
    }

    fn segment(&self, s: f64) -> usize {
        match self.knots.partition_point(|&k| k <= s) {
            0 => 0,
            i => (i - 1).min(self.knots.len() - 2),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if s <= self.knots[0] {
            return self.values[0];
        }
        if s >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = self.segment(s);
        let w = (s - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    /// Slope of the segment containing `s`; zero outside the knots.
    pub fn slope(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if s < self.knots[0] || s > self.knots[n - 1] {
            return 0.0;
        }
        let i = self.segment(s);
        (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i])
    }

    /// `∫_a^b f²` (exact), with `f` extended by constants.
    pub fn integral_of_square(&self, a: f64, b: f64) -> f64 {
        let mut points = vec![a];
        points.extend(self.knots.iter().copied().filter(|&k| k > a && k < b));
        points.push(b);
        points
            .windows(2)
            .map(|w| {
                let (p, q) = (self.eval(w[0]), self.eval(w[1]));
                (w[1] - w[0]) * (p * p + p * q + q * q) / 3.0
            })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushforwardQuotient {
    /// Discrete quotient of `u = φ ∘ A_F ∘ ρ_F` on the mesh.
    pub lhs: f64,
    /// One-dimensional expression through the parallel-set profile.
    pub rhs: f64,
}

/// Compares the quotient of the parallel-coordinate test function with its
/// reduced one-dimensional form.
pub fn pushforward_quotient(
    poly: &ConvexPolygon,
    norm: &FinslerNorm,
    phi: &PiecewiseLinear,
    alpha: f64,
    refinements: usize,
) -> Result<PushforwardQuotient> {
    if phi.is_zero() {
        return Err(Error::Domain("test profile is identically zero".into()));
    }
    if !(alpha <= 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be non-positive, got {alpha}"
        )));
    }
    let a0 = poly.area();
    let mesh = mesh_polygon(poly, refinements)?;
    let u = mesh
        .vertices
        .iter()
        .map(|&x| {
            let t = poly.anis_distance(x, norm).unwrap_or(0.0).max(0.0);
            let inner = poly.inner_parallel(norm, t).map_or(0.0, |p| p.area());
            phi.eval(a0 - inner)
        })
        .collect::<Vec<f64>>();
    let lhs = Discretization::new(&mesh, norm).quotient(alpha, &u);

    let profile = poly.profile(norm, PROFILE_SAMPLES)?;
    let mut energy = 0.0;
    for i in 0..profile.t_grid.len() - 1 {
        let dt = profile.t_grid[i + 1] - profile.t_grid[i];
        let slope = phi.slope(0.5 * (profile.a[i] + profile.a[i + 1]));
        let l3 = 0.5 * (profile.l[i].powi(3) + profile.l[i + 1].powi(3));
        energy += slope * slope * l3 * dt;
    }
    let phi0 = phi.eval(0.0);
    let rhs = (energy + alpha * phi0 * phi0 * profile.l0) / phi.integral_of_square(0.0, a0);
    Ok(PushforwardQuotient { lhs, rhs })
}
