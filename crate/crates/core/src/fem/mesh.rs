use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::norm::FinslerNorm;
use crate::vec2::{self, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    /// Endpoints in the orientation of the owning triangle.
    pub nodes: [usize; 2],
    /// Outward unit normal.
    pub normal: Vec2,
    pub length: f64,
}

/// Conforming P1 triangulation with counter-clockwise triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshJson", into = "MeshJson")]
pub struct TriMesh {
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Longest edge.
    pub h: f64,
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
}

impl TryFrom<MeshJson> for TriMesh {
    type Error = Error;

    fn try_from(m: MeshJson) -> Result<Self> {
        TriMesh::new(m.vertices, m.triangles)
    }
}

impl From<TriMesh> for MeshJson {
    fn from(m: TriMesh) -> Self {
        MeshJson {
            vertices: m.vertices,
            triangles: m.triangles,
        }
    }
}

impl TriMesh {
    /// Validates connectivity and derives boundary edges and `h`.
    pub fn new(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(v) = vertices
            .iter()
            .find(|v| !(v[0].is_finite() && v[1].is_finite()))
        {
            return Err(Error::InvalidMesh(format!("non-finite vertex {v:?}")));
        }
        let mut directed: HashSet<(usize, usize)> = HashSet::with_capacity(3 * triangles.len());
        let mut h: f64 = 0.0;
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has an out-of-range index"
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let area2 = vec2::cross(vec2::sub(b, a), vec2::sub(c, a));
            if !(area2 > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counter-clockwise (signed area {})",
                    0.5 * area2
                )));
            }
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                if !directed.insert((i, j)) {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({i}, {j}) appears twice with the same orientation"
                    )));
                }
                h = h.max(vec2::norm(vec2::sub(vertices[j], vertices[i])));
            }
        }

        let mut boundary_edges = Vec::new();
        let mut balance: HashMap<usize, i64> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                if directed.contains(&(j, i)) {
                    continue;
                }
                let t = vec2::sub(vertices[j], vertices[i]);
                let length = vec2::norm(t);
                boundary_edges.push(BoundaryEdge {
                    nodes: [i, j],
                    normal: [t[1] / length, -t[0] / length],
                    length,
                });
                *balance.entry(i).or_default() += 1;
                *balance.entry(j).or_default() -= 1;
            }
        }
        if boundary_edges.is_empty() || balance.values().any(|&b| b != 0) {
            return Err(Error::InvalidMesh(
                "boundary edges do not form closed loops".into(),
            ));
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_edges,
            h,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        0.5 * vec2::cross(vec2::sub(b, a), vec2::sub(c, a))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// `F(ν_e)` for every boundary edge.
    pub fn boundary_weights(&self, norm: &FinslerNorm) -> Vec<f64> {
        self.boundary_edges
            .iter()
            .map(|e| norm.eval(e.normal))
            .collect()
    }

    /// `Σ_e F(ν_e)|e|`.
    pub fn anis_boundary_length(&self, norm: &FinslerNorm) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| norm.eval(e.normal) * e.length)
            .sum()
    }

    /// Image under `x ↦ A x`; `det A` must be positive to keep orientation.
    pub fn transformed(&self, a: [[f64; 2]; 2]) -> Result<TriMesh> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                [
                    a[0][0] * v[0] + a[0][1] * v[1],
                    a[1][0] * v[0] + a[1][1] * v[1],
                ]
            })
            .collect();
        TriMesh::new(vertices, self.triangles.clone())
    }

    /// One round of 4-way subdivision. New boundary midpoints pass through
    /// `snap`.
    pub fn refine_with(&self, snap: impl Fn(Vec2) -> Vec2) -> Result<TriMesh> {
        let boundary: HashSet<(usize, usize)> = self
            .boundary_edges
            .iter()
            .map(|e| (e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1])))
            .collect();
        let mut vertices = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |i: usize, j: usize, vertices: &mut Vec<Vec2>| -> usize {
            let key = (i.min(j), i.max(j));
            *midpoints.entry(key).or_insert_with(|| {
                let m = vec2::midpoint(vertices[i], vertices[j]);
                vertices.push(if boundary.contains(&key) { snap(m) } else { m });
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        TriMesh::new(vertices, triangles)
    }

    pub fn refine(&self) -> Result<TriMesh> {
        self.refine_with(|m| m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mesh serializes")
    }

    pub fn from_json(s: &str) -> Result<TriMesh> {
        serde_json::from_str(s).map_err(|e| Error::InvalidMesh(e.to_string()))
    }
}

fn fan(center: Vec2, ring: &[Vec2]) -> Result<TriMesh> {
    let n = ring.len();
    let mut vertices = ring.to_vec();
    vertices.push(center);
    let triangles = (0..n).map(|i| [n, i, (i + 1) % n]).collect();
    TriMesh::new(vertices, triangles)
}

/// Centroid fan followed by `refinements` rounds of uniform subdivision.
pub fn mesh_polygon(poly: &ConvexPolygon, refinements: usize) -> Result<TriMesh> {
    let mut mesh = fan(poly.centroid(), poly.vertices())?;
    for _ in 0..refinements {
        mesh = mesh.refine()?;
    }
    Ok(mesh)
}

/// Mesh of the Wulff shape `{F° < R}`: a fan over `n_boundary` boundary
/// points, refined with new boundary nodes projected onto `{F° = R}`.
pub fn mesh_wulff(
    norm: &FinslerNorm,
    radius: f64,
    n_boundary: usize,
    refinements: usize,
) -> Result<TriMesh> {
    if n_boundary < 16 {
        return Err(Error::InvalidMesh(format!(
            "need at least 16 boundary points, got {n_boundary}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let ring = norm.wulff_boundary(radius, n_boundary)?;
    let mut mesh = fan([0.0, 0.0], &ring.vertices)?;
    for _ in 0..refinements {
        mesh = mesh.refine_with(|m| norm.project_to_wulff(m, radius))?;
    }
    Ok(mesh)
}
