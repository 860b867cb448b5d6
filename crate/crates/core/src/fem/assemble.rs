use crate::fem::mesh::TriMesh;
use crate::fem::sparse::{nested_dissection, CsrMatrix, LdlSymbolic};
use crate::norm::FinslerNorm;
use crate::vec2::{self, Vec2};

/// Gradients below this size contribute nothing to `∇(F²)`.
const FLAT_GRADIENT: f64 = 1e-14;

/// Per-mesh data for the discrete Rayleigh quotient
/// `J(u) = [Σ_T |T| F²(∇u_T) + α uᵀBu] / uᵀMu`.
#[derive(Clone, Debug)]
pub struct Discretization<'a> {
    pub mesh: &'a TriMesh,
    pub norm: FinslerNorm,
    areas: Vec<f64>,
    grads: Vec<[Vec2; 3]>,
    /// P1 mass matrix.
    pub mass: CsrMatrix,
    /// Boundary mass weighted by `F(ν_e)`.
    pub boundary: CsrMatrix,
    /// Ordering and factor pattern shared by every factorization on this mesh.
    pub symbolic: LdlSymbolic,
}

impl<'a> Discretization<'a> {
    pub fn new(mesh: &'a TriMesh, norm: &FinslerNorm) -> Self {
        let n = mesh.n_vertices();
        let mut mass = CsrMatrix::pattern(n, &mesh.triangles);
        let mut areas = Vec::with_capacity(mesh.triangles.len());
        let mut grads = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let [p0, p1, p2] = tri.map(|i| mesh.vertices[i]);
            let area = mesh.triangle_area(t);
            let s = 1.0 / (2.0 * area);
            grads.push([
                [s * (p1[1] - p2[1]), s * (p2[0] - p1[0])],
                [s * (p2[1] - p0[1]), s * (p0[0] - p2[0])],
                [s * (p0[1] - p1[1]), s * (p1[0] - p0[0])],
            ]);
            areas.push(area);
            for a in 0..3 {
                for b in 0..3 {
                    let w = if a == b { 2.0 } else { 1.0 };
                    mass.add(tri[a], tri[b], area * w / 12.0);
                }
            }
        }
        let mut boundary = mass.zeros_like();
        for e in &mesh.boundary_edges {
            let w = norm.eval(e.normal) * e.length / 6.0;
            let [i, j] = e.nodes;
            boundary.add(i, i, 2.0 * w);
            boundary.add(j, j, 2.0 * w);
            boundary.add(i, j, w);
            boundary.add(j, i, w);
        }
        let symbolic = LdlSymbolic::analyze(&mass, nested_dissection(&mass, &mesh.vertices));
        Self {
            mesh,
            norm: norm.clone(),
            areas,
            grads,
            mass,
            boundary,
            symbolic,
        }
    }

    /// Stiffness `∫ ∇φ_iᵀ A ∇φ_j` for a constant symmetric matrix `A`.
    pub fn stiffness(&self, a: [[f64; 2]; 2]) -> CsrMatrix {
        let mut k = self.mass.zeros_like();
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let g = &self.grads[t];
            for p in 0..3 {
                let ag = [
                    a[0][0] * g[p][0] + a[0][1] * g[p][1],
                    a[1][0] * g[p][0] + a[1][1] * g[p][1],
                ];
                for q in 0..3 {
                    k.add(tri[p], tri[q], self.areas[t] * vec2::dot(ag, g[q]));
                }
            }
        }
        k
    }

    fn cell_gradient(&self, t: usize, u: &[f64]) -> Vec2 {
        let tri = &self.mesh.triangles[t];
        let g = &self.grads[t];
        let mut xi = [0.0, 0.0];
        for p in 0..3 {
            xi[0] += u[tri[p]] * g[p][0];
            xi[1] += u[tri[p]] * g[p][1];
        }
        xi
    }

    /// `Σ_T |T| F²(∇u_T)`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        (0..self.areas.len())
            .map(|t| self.areas[t] * self.norm.eval(self.cell_gradient(t, u)).powi(2))
            .sum()
    }

    /// Gradient of [`Self::energy`]: `Σ_T 2|T| F(ξ_T) ∇F(ξ_T)·∇φ_i`.
    pub fn energy_gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let xi = self.cell_gradient(t, u);
            if vec2::norm(xi) <= FLAT_GRADIENT {
                continue;
            }
            let Ok(dir) = self.norm.grad(xi) else {
                continue;
            };
            let c = 2.0 * self.areas[t] * self.norm.eval(xi);
            let g = &self.grads[t];
            for p in 0..3 {
                out[tri[p]] += c * vec2::dot(dir, g[p]);
            }
        }
        out
    }

    /// Numerator of the quotient.
    pub fn numerator(&self, alpha: f64, u: &[f64]) -> f64 {
        self.energy(u) + alpha * self.boundary.bilinear(u, u)
    }

    pub fn quotient(&self, alpha: f64, u: &[f64]) -> f64 {
        self.numerator(alpha, u) / self.mass.bilinear(u, u)
    }

    /// `α P_F / V` for the meshed domain, the value of the quotient at a
    /// constant.
    pub fn constant_bound(&self, alpha: f64) -> f64 {
        alpha * self.mesh.anis_boundary_length(&self.norm) / self.areas.iter().sum::<f64>()
    }
}

/// The discrete quotient `J(u)` on `mesh`.
pub fn discrete_quotient(mesh: &TriMesh, norm: &FinslerNorm, alpha: f64, u: &[f64]) -> f64 {
    Discretization::new(mesh, norm).quotient(alpha, u)
}
