//! P1 finite elements for the first Robin eigenvalue of the anisotropic
//! Laplacian on planar triangle meshes.

mod assemble;
pub mod mesh;
mod pushforward;
mod solve;
pub mod sparse;

use serde::{Deserialize, Serialize};

use crate::norm::FinslerNorm;

pub use assemble::{discrete_quotient, Discretization};
pub use mesh::{mesh_polygon, mesh_wulff, BoundaryEdge, TriMesh};
pub use pushforward::{pushforward_quotient, PiecewiseLinear, PushforwardQuotient};
pub use solve::{eigen_derivative, solve_linear_quadratic, solve_rayleigh, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FemSolution {
    /// Nodal values with unit discrete `L²` norm and positive sum.
    pub u: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
    pub iterations: usize,
    /// Final relative change of the quotient.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FemSummary {
    pub lambda: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub residual: f64,
    /// `α P_F / V` of the meshed domain, an upper bound for `lambda`.
    pub pf_over_v_bound: f64,
}

impl FemSolution {
    pub fn summary(&self, mesh: &TriMesh, norm: &FinslerNorm) -> FemSummary {
        FemSummary {
            lambda: self.lambda,
            alpha: self.alpha,
            iterations: self.iterations,
            residual: self.residual,
            pf_over_v_bound: self.alpha * mesh.anis_boundary_length(norm) / mesh.area(),
        }
    }

    /// `x,y,u` rows, one per mesh node.
    pub fn to_csv(&self, mesh: &TriMesh) -> String {
        let mut out = String::from("x,y,u\n");
        for (v, u) in mesh.vertices.iter().zip(&self.u) {
            out.push_str(&format!("{},{},{}\n", v[0], v[1], u));
        }
        out
    }

    /// True when no two nodal values have strictly opposite signs.
    pub fn is_single_signed(&self) -> bool {
        self.u.iter().all(|&v| v >= 0.0) || self.u.iter().all(|&v| v <= 0.0)
    }
}
