//! Convex polygonal domains measured with a Finsler norm.
//!
//! Every quantity of the parallel-coordinate method is exact on convex
//! polygons: the anisotropic distance to the boundary is the minimum of the
//! affine functions `(c_i - ⟨x, ν_i⟩) / F(ν_i)`, so the inner parallel set
//! `{d_F > t}` is the intersection of the edge half-planes moved inward by
//! `t·F(ν_i)`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{shoelace, FinslerNorm, WulffApprox};
use crate::vec2::{self, Vec2};

/// Inner parallel sets with less area than this are reported as empty.
pub const DEGENERATE_AREA: f64 = 1e-14;

const DUPLICATE_TOL: f64 = 1e-12;
const INRADIUS_TOL: f64 = 1e-14;

/// Edge `i` runs from vertex `i` to vertex `i + 1` and lies on `{⟨x, ν⟩ = offset}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub normal: Vec2,
    pub length: f64,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<Vec2>,
}

impl Serialize for ConvexPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolygonJson {
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolygonJson::deserialize(d)?;
        ConvexPolygon::new(raw.vertices).map_err(serde::de::Error::custom)
    }
}

/// Sampled `t ↦ (A_F(t), L_F(t), R(t))` on `[0, r_F]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelProfile {
    pub t_grid: Vec<f64>,
    pub a: Vec<f64>,
    pub l: Vec<f64>,
    pub r: Vec<f64>,
    pub l0: f64,
    pub a0: f64,
    pub r_f: f64,
    pub kappa: f64,
}

impl ParallelProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,A,L,R\n");
        for i in 0..self.t_grid.len() {
            let _ = writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e}",
                self.t_grid[i], self.a[i], self.l[i], self.r[i]
            );
        }
        out
    }
}

/// Radii of the annulus and the equal-area Wulff shape attached to a domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelRadii {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerCheck {
    pub v_measured: f64,
    pub v_formula: f64,
    pub p_measured: f64,
    pub p_formula: f64,
}

impl SteinerCheck {
    pub fn max_relative_error(&self) -> f64 {
        let v = ((self.v_measured - self.v_formula) / self.v_formula).abs();
        let p = ((self.p_measured - self.p_formula) / self.p_formula).abs();
        v.max(p)
    }
}

#[derive(Clone, Copy, Debug)]
struct Line {
    point: Vec2,
    dir: Vec2,
}

impl Line {
    /// Half-plane `{⟨x, ν⟩ ≤ c}`; the interior lies to the left of `dir`.
    fn from_half_plane(normal: Vec2, c: f64) -> Self {
        Self {
            point: vec2::scale(c, normal),
            dir: [-normal[1], normal[0]],
        }
    }

    fn side(&self, x: Vec2) -> f64 {
        vec2::cross(self.dir, vec2::sub(x, self.point))
    }

    fn intersect(&self, other: &Line) -> Vec2 {
        let s = vec2::cross(vec2::sub(other.point, self.point), other.dir)
            / vec2::cross(self.dir, other.dir);
        vec2::add(self.point, vec2::scale(s, self.dir))
    }
}

impl ConvexPolygon {
    /// Validates a CCW, strictly convex vertex list.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let mut turning = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e1 = vec2::sub(b, a);
            let e2 = vec2::sub(c, b);
            if vec2::norm(e1) <= DUPLICATE_TOL {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
            let cr = vec2::cross(e1, e2);
            if cr <= 0.0 {
                return Err(Error::InvalidPolygon(format!(
                    "vertex {} is not a strictly convex CCW turn",
                    (i + 1) % n
                )));
            }
            turning += cr.atan2(vec2::dot(e1, e2));
        }
        if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return Err(Error::InvalidPolygon(
                "boundary winds more than once".into(),
            ));
        }
        let edges = (0..n)
            .map(|i| {
                let a = vertices[i];
                let e = vec2::sub(vertices[(i + 1) % n], a);
                let length = vec2::norm(e);
                let normal = [e[1] / length, -e[0] / length];
                Edge {
                    normal,
                    length,
                    offset: vec2::dot(a, normal),
                }
            })
            .collect();
        Ok(Self { vertices, edges })
    }

    /// Removes near-duplicate and collinear vertices from a convex chain
    /// produced by clipping, then validates it.
    fn from_chain(chain: Vec<Vec2>) -> Option<Self> {
        let mut pts: Vec<Vec2> = Vec::with_capacity(chain.len());
        for p in chain {
            if pts
                .last()
                .is_none_or(|q| vec2::norm(vec2::sub(p, *q)) > DUPLICATE_TOL)
            {
                pts.push(p);
            }
        }
        while pts.len() > 1 && vec2::norm(vec2::sub(pts[0], *pts.last().unwrap())) <= DUPLICATE_TOL
        {
            pts.pop();
        }
        loop {
            let n = pts.len();
            if n < 3 {
                return None;
            }
            let drop = (0..n).find(|&i| {
                let a = pts[(i + n - 1) % n];
                let b = pts[i];
                let c = pts[(i + 1) % n];
                let e1 = vec2::sub(b, a);
                let e2 = vec2::sub(c, b);
                vec2::cross(e1, e2) <= 1e-14 * vec2::norm(e1) * vec2::norm(e2)
            });
            match drop {
                Some(i) => {
                    pts.remove(i);
                }
                None => break,
            }
        }
        Self::new(pts).ok()
    }

    pub fn unit_square() -> Self {
        Self::rectangle(1.0, 1.0).expect("unit square is valid")
    }

    /// Axis-aligned `[0, width] × [0, height]`.
    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        Self::new(vec![
            [0.0, 0.0],
            [width, 0.0],
            [width, height],
            [0.0, height],
        ])
    }

    /// Regular `n`-gon inscribed in the circle of radius `circumradius`,
    /// with a vertex on the positive x-axis.
    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        let vertices = (0..n)
            .map(|j| {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec2::scale(circumradius, vec2::unit_from_angle(th))
            })
            .collect();
        Self::new(vertices)
    }

    pub fn from_wulff(w: &WulffApprox) -> Result<Self> {
        Self::new(w.vertices.clone())
    }

    /// Convex hull (Andrew's monotone chain); collinear points are dropped.
    pub fn convex_hull(points: &[Vec2]) -> Result<Self> {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup_by(|a, b| vec2::norm(vec2::sub(*a, *b)) <= DUPLICATE_TOL);
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("hull of fewer than 3 points".into()));
        }
        let turn = |o: Vec2, a: Vec2, b: Vec2| vec2::cross(vec2::sub(a, o), vec2::sub(b, o));
        let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
        for &p in &pts {
            while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        Self::from_chain(hull).ok_or_else(|| Error::InvalidPolygon("degenerate point set".into()))
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// `P_F(Ω) = Σ F(ν_i)·|e_i|`.
    pub fn anis_perimeter(&self, norm: &FinslerNorm) -> f64 {
        self.edges
            .iter()
            .map(|e| norm.eval(e.normal) * e.length)
            .sum()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        let o = self.vertices[0];
        for i in 1..n - 1 {
            let p = vec2::sub(self.vertices[i], o);
            let q = vec2::sub(self.vertices[i + 1], o);
            let w = vec2::cross(p, q);
            a2 += w;
            cx += w * (p[0] + q[0]) / 3.0;
            cy += w * (p[1] + q[1]) / 3.0;
        }
        [o[0] + cx / a2, o[1] + cy / a2]
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(vec2::norm(vec2::sub(*a, *b)));
            }
        }
        d
    }

    /// Signed half-plane distance, without the inside check.
    fn signed_distance(&self, x: Vec2, norm: &FinslerNorm) -> (f64, usize, f64) {
        let mut best = f64::INFINITY;
        let mut second = f64::INFINITY;
        let mut idx = 0;
        for (i, e) in self.edges.iter().enumerate() {
            let d = (e.offset - vec2::dot(x, e.normal)) / norm.eval(e.normal);
            if d < best {
                second = best;
                best = d;
                idx = i;
            } else if d < second {
                second = d;
            }
        }
        (best, idx, second)
    }

    /// `d_F(x, ∂Ω) = min_i (c_i - ⟨x, ν_i⟩) / F(ν_i)`.
    pub fn anis_distance(&self, x: Vec2, norm: &FinslerNorm) -> Result<f64> {
        let (d, _, _) = self.signed_distance(x, norm);
        if d < -1e-12 {
            return Err(Error::OutsideDomain {
                x: x[0],
                y: x[1],
                distance: d,
            });
        }
        Ok(d.max(0.0))
    }

    fn offset_lines(&self, norm: &FinslerNorm, t: f64) -> Vec<Line> {
        self.edges
            .iter()
            .map(|e| Line::from_half_plane(e.normal, e.offset - t * norm.eval(e.normal)))
            .collect()
    }

    /// Vertex chain of `{d_F > t}` before degeneracy filtering.
    fn inner_parallel_chain(&self, norm: &FinslerNorm, t: f64) -> Option<Vec<Vec2>> {
        let scale = self
            .vertices
            .iter()
            .fold(1.0f64, |s, v| s.max(v[0].abs()).max(v[1].abs()));
        half_plane_intersection(self.offset_lines(norm, t), 1e-14 * scale)
    }

    /// `Ω̃_t = {x ∈ Ω : d_F(x, ∂Ω) > t}`, or `None` when empty or degenerate.
    pub fn inner_parallel(&self, norm: &FinslerNorm, t: f64) -> Option<ConvexPolygon> {
        if t <= 0.0 {
            return Some(self.clone());
        }
        let chain = self.inner_parallel_chain(norm, t)?;
        if shoelace(&chain) < DEGENERATE_AREA {
            return None;
        }
        Self::from_chain(chain)
    }

    /// Anisotropic inradius `r_F`, with a point where `d_F` attains it.
    pub fn inradius_with_center(&self, norm: &FinslerNorm) -> (f64, Vec2) {
        // r_F ≤ min_i (c_i − min_v ⟨v, ν_i⟩) / F(ν_i)
        let mut hi = f64::INFINITY;
        for e in &self.edges {
            let lowest = self
                .vertices
                .iter()
                .map(|v| vec2::dot(*v, e.normal))
                .fold(f64::INFINITY, f64::min);
            hi = hi.min((e.offset - lowest) / norm.eval(e.normal));
        }
        let mut lo = 0.0;
        let mut center = self.centroid();
        while hi - lo > INRADIUS_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.inner_parallel_chain(norm, mid) {
                Some(chain) if shoelace(&chain) > 0.0 => {
                    lo = mid;
                    center = chain_centroid(&chain);
                }
                _ => hi = mid,
            }
        }
        self.refine_inradius(norm, lo, center)
    }

    /// Polish the bisection result by solving `⟨x, ν_i⟩ + t F(ν_i) = c_i` over
    /// triples of nearly active constraints; the bisection alone loses digits
    /// when the inner set collapses to a point.
    fn refine_inradius(&self, norm: &FinslerNorm, lo: f64, center: Vec2) -> (f64, Vec2) {
        let scale = self.diameter().max(f64::MIN_POSITIVE);
        let weights: Vec<f64> = self.edges.iter().map(|e| norm.eval(e.normal)).collect();
        let slack = |x: Vec2, i: usize| {
            (self.edges[i].offset - vec2::dot(x, self.edges[i].normal)) / weights[i]
        };
        let mut active: Vec<(f64, usize)> = (0..self.edges.len())
            .map(|i| (slack(center, i) - lo, i))
            .filter(|(gap, _)| *gap < 1e-6 * scale)
            .collect();
        active.sort_by(|a, b| a.0.total_cmp(&b.0));
        active.truncate(8);

        let mut best = (lo, center);
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                for c in b + 1..active.len() {
                    let rows = [active[a].1, active[b].1, active[c].1].map(|i| {
                        let e = &self.edges[i];
                        [e.normal[0], e.normal[1], weights[i], e.offset]
                    });
                    let Some([x, y, t]) = solve3(rows) else {
                        continue;
                    };
                    let feasible =
                        (0..self.edges.len()).all(|i| slack([x, y], i) >= t - 1e-13 * scale);
                    if feasible && t > best.0 && t - lo < 1e-6 * scale {
                        best = (t, [x, y]);
                    }
                }
            }
        }
        best
    }

    pub fn inradius(&self, norm: &FinslerNorm) -> f64 {
        self.inradius_with_center(norm).0
    }

    /// `P_F` of the possibly degenerate set `{d_F > t}` (0 when empty).
    fn parallel_length(&self, norm: &FinslerNorm, t: f64) -> f64 {
        match self.inner_parallel_chain(norm, t) {
            Some(chain) => chain_anis_perimeter(&chain, norm),
            None => 0.0,
        }
    }

    /// Parallel-coordinate profile on `n_samples` uniform points of
    /// `[0, r_F)` plus the endpoint `r_F`.
    pub fn profile(&self, norm: &FinslerNorm, n_samples: usize) -> Result<ParallelProfile> {
        if n_samples < 64 {
            return Err(Error::Domain(format!(
                "profile needs at least 64 samples, got {n_samples}"
            )));
        }
        let kappa = norm.wulff_area();
        let a0 = self.area();
        let l0 = self.anis_perimeter(norm);
        let r_f = self.inradius(norm);
        let mut t_grid = Vec::with_capacity(n_samples + 1);
        let mut a = Vec::with_capacity(n_samples + 1);
        let mut l = Vec::with_capacity(n_samples + 1);
        for j in 0..n_samples {
            let t = r_f * j as f64 / n_samples as f64;
            let (area_t, len_t) = match self.inner_parallel_chain(norm, t) {
                Some(chain) => (
                    shoelace(&chain).max(0.0),
                    chain_anis_perimeter(&chain, norm),
                ),
                None => (0.0, 0.0),
            };
            t_grid.push(t);
            a.push((a0 - area_t).max(0.0));
            l.push(len_t);
        }
        t_grid.push(r_f);
        a.push(a0);
        l.push(self.parallel_length(norm, r_f * (1.0 - 1e-9)));
        a[0] = 0.0;
        l[0] = l0;
        let mut profile = ParallelProfile {
            t_grid,
            a,
            l,
            r: Vec::new(),
            l0,
            a0,
            r_f,
            kappa,
        };
        profile.r = r_transform(&profile, kappa)?;
        Ok(profile)
    }

    /// `r1 = √(L0² − 4κA0)/(2κ)`, `r2 = L0/(2κ)`, `r3 = √(A0/κ)`.
    pub fn parallel_radii(&self, norm: &FinslerNorm) -> ParallelRadii {
        let kappa = norm.wulff_area();
        let a0 = self.area();
        let l0 = self.anis_perimeter(norm);
        ParallelRadii {
            r1: (l0 * l0 - 4.0 * kappa * a0).max(0.0).sqrt() / (2.0 * kappa),
            r2: l0 / (2.0 * kappa),
            r3: (a0 / kappa).sqrt(),
        }
    }

    /// `P_F(Ω)² − 4κ V(Ω)`.
    pub fn isoperimetric_deficit(&self, norm: &FinslerNorm) -> f64 {
        let p = self.anis_perimeter(norm);
        p * p - 4.0 * norm.wulff_area() * self.area()
    }

    /// Minkowski sum of two convex polygons by merging edge sequences.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let start = |v: &[Vec2]| {
            (0..v.len())
                .min_by(|&i, &j| {
                    v[i][1]
                        .total_cmp(&v[j][1])
                        .then(v[i][0].total_cmp(&v[j][0]))
                })
                .unwrap()
        };
        let (p, q) = (&self.vertices, &other.vertices);
        let (n, m) = (p.len(), q.len());
        let (sp, sq) = (start(p), start(q));
        let pv = |i: usize| p[(sp + i) % n];
        let qv = |j: usize| q[(sq + j) % m];
        let mut out = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0usize, 0usize);
        while i < n || j < m {
            out.push(vec2::add(pv(i), qv(j)));
            let ep = vec2::sub(pv(i + 1), pv(i));
            let eq = vec2::sub(qv(j + 1), qv(j));
            let c = vec2::cross(ep, eq);
            if j >= m || (i < n && c > 0.0) {
                i += 1;
            } else if i >= n || c < 0.0 {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        Self::from_chain(out).expect("sum of convex polygons is convex")
    }

    /// Compares `K + δ𝒲` (with `𝒲` replaced by an `n_wulff`-vertex polygon)
    /// against the Steiner formulas `V + P_F δ + κδ²` and `P_F + 2κδ`.
    pub fn steiner_check(
        &self,
        norm: &FinslerNorm,
        delta: f64,
        n_wulff: usize,
    ) -> Result<SteinerCheck> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!(
                "delta must be positive, got {delta}"
            )));
        }
        let w = Self::from_wulff(&norm.wulff_boundary(delta, n_wulff)?)?;
        let sum = self.minkowski_sum(&w);
        let kappa = norm.wulff_area();
        let pf = self.anis_perimeter(norm);
        Ok(SteinerCheck {
            v_measured: sum.area(),
            v_formula: self.area() + pf * delta + kappa * delta * delta,
            p_measured: sum.anis_perimeter(norm),
            p_formula: pf + 2.0 * kappa * delta,
        })
    }

    /// Largest `|F(∇d_F) − 1|` over up to `n_points` interior points with a
    /// unique nearest edge; gradients by central differences.
    pub fn eikonal_check(&self, norm: &FinslerNorm, n_points: usize) -> f64 {
        let (lo, hi) = self.bounding_box();
        let h = 1e-7;
        let mut worst: f64 = 0.0;
        let mut accepted = 0;
        let mut index = 1u64;
        while accepted < n_points && index < 1000 * n_points as u64 + 1000 {
            let x = [
                lo[0] + (hi[0] - lo[0]) * halton(index, 2),
                lo[1] + (hi[1] - lo[1]) * halton(index, 3),
            ];
            index += 1;
            let (d, _, second) = self.signed_distance(x, norm);
            if d <= 10.0 * h || second - d < 1e-6 {
                continue;
            }
            let f = |p: Vec2| self.signed_distance(p, norm).0;
            let g = [
                (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h),
                (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h),
            ];
            worst = worst.max((norm.eval(g) - 1.0).abs());
            accepted += 1;
        }
        worst
    }
}

/// `R(t) = √(L0² − 4κ A_F(t)) / (2κ)`; small negative radicands clamp to 0.
pub fn r_transform(profile: &ParallelProfile, kappa: f64) -> Result<Vec<f64>> {
    let l0 = profile.l0;
    profile
        .a
        .iter()
        .map(|&a| {
            let radicand = l0 * l0 - 4.0 * kappa * a;
            if radicand < -1e-9 {
                Err(Error::IsoperimetricViolation { radicand })
            } else {
                Ok(radicand.max(0.0).sqrt() / (2.0 * kappa))
            }
        })
        .collect()
}

fn chain_centroid(chain: &[Vec2]) -> Vec2 {
    let n = chain.len() as f64;
    let s = chain.iter().fold([0.0, 0.0], |s, p| vec2::add(s, *p));
    vec2::scale(1.0 / n, s)
}

fn chain_anis_perimeter(chain: &[Vec2], norm: &FinslerNorm) -> f64 {
    let n = chain.len();
    (0..n)
        .map(|i| {
            let e = vec2::sub(chain[(i + 1) % n], chain[i]);
            // F(ν)|e| = F(rotated edge) by homogeneity
            norm.eval([e[1], -e[0]])
        })
        .sum()
}

/// Bounded intersection of half-planes (interior to the left of each line),
/// by angular sort and a deque sweep. `None` when empty or degenerate.
/// Cramer's rule on an augmented 3×4 system; `None` when nearly singular.
fn solve3(m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let det = |c: [usize; 3]| {
        m[0][c[0]] * (m[1][c[1]] * m[2][c[2]] - m[1][c[2]] * m[2][c[1]])
            - m[0][c[1]] * (m[1][c[0]] * m[2][c[2]] - m[1][c[2]] * m[2][c[0]])
            + m[0][c[2]] * (m[1][c[0]] * m[2][c[1]] - m[1][c[1]] * m[2][c[0]])
    };
    let d = det([0, 1, 2]);
    let size = m
        .iter()
        .flat_map(|r| r[..3].iter())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if d.abs() <= 1e-12 * size.powi(3) {
        return None;
    }
    Some([det([3, 1, 2]) / d, det([0, 3, 2]) / d, det([0, 1, 3]) / d])
}

fn half_plane_intersection(mut lines: Vec<Line>, eps: f64) -> Option<Vec<Vec2>> {
    lines.sort_by(|a, b| {
        a.dir[1]
            .atan2(a.dir[0])
            .total_cmp(&b.dir[1].atan2(b.dir[0]))
    });
    let mut dq: VecDeque<Line> = VecDeque::with_capacity(lines.len());
    let mut pts: VecDeque<Vec2> = VecDeque::with_capacity(lines.len());
    for line in lines {
        while dq.len() >= 2 && line.side(*pts.back().unwrap()) < -eps {
            dq.pop_back();
            pts.pop_back();
        }
        while dq.len() >= 2 && line.side(*pts.front().unwrap()) < -eps {
            dq.pop_front();
            pts.pop_front();
        }
        if let Some(back) = dq.back() {
            let cr = vec2::cross(back.dir, line.dir);
            if cr.abs() <= 1e-15 * vec2::norm(back.dir) * vec2::norm(line.dir) {
                if vec2::dot(back.dir, line.dir) > 0.0 {
                    // same direction: keep the tighter one
                    if line.side(back.point) < 0.0 {
                        dq.pop_back();
                        if !pts.is_empty() {
                            pts.pop_back();
                        }
                    } else {
                        continue;
                    }
                } else {
                    // antiparallel neighbours leave no bounded region
                    return None;
                }
            }
        }
        if let Some(back) = dq.back() {
            pts.push_back(back.intersect(&line));
        }
        dq.push_back(line);
    }
    while dq.len() >= 3 && dq.front().unwrap().side(*pts.back().unwrap()) < -eps {
        dq.pop_back();
        pts.pop_back();
    }
    while dq.len() >= 3 && dq.back().unwrap().side(*pts.front().unwrap()) < -eps {
        dq.pop_front();
        pts.pop_front();
    }
    if dq.len() < 3 {
        return None;
    }
    let (first, last) = (dq.front().unwrap(), dq.back().unwrap());
    if vec2::cross(last.dir, first.dir).abs() <= 1e-15 {
        return None;
    }
    let mut chain: Vec<Vec2> = pts.into_iter().collect();
    chain.push(last.intersect(first));
    if shoelace(&chain) <= 0.0 {
        return None;
    }
    // An empty intersection can leave a spurious chain; its vertex average
    // then violates one of the kept constraints.
    let c = chain_centroid(&chain);
    if dq.iter().any(|l| l.side(c) < -eps.max(1e-12)) {
        return None;
    }
    Some(chain)
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}
