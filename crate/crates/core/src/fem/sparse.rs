//! Symmetric sparse matrices on a fixed mesh pattern, a geometric nested
//! dissection ordering, and a sparse `LDLᵀ` factorization that also reports
//! inertia.

use crate::vec2::Vec2;

/// CSR matrix whose rows hold sorted column indices, diagonal included.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the vertex-adjacency pattern of `cells`.
    pub fn pattern<const K: usize>(n: usize, cells: &[[usize; K]]) -> Self {
        let mut adj: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for cell in cells {
            for &i in cell {
                adj[i].extend_from_slice(cell);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    fn position(&self, i: usize, j: usize) -> usize {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        self.row_ptr[i] + row.binary_search(&j).expect("entry in pattern")
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.position(i, j);
        self.values[p] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|p| self.values[p] * x[self.col_idx[p]])
                    .sum()
            })
            .collect()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// `Σ_k c_k A_k` over matrices sharing one pattern.
    pub fn combine(terms: &[(f64, &CsrMatrix)]) -> Self {
        let mut out = terms[0].1.zeros_like();
        for (c, m) in terms {
            debug_assert_eq!(m.col_idx, out.col_idx);
            for (o, v) in out.values.iter_mut().zip(&m.values) {
                *o += c * v;
            }
        }
        out
    }

    fn neighbours(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }
}

const LEAF_SIZE: usize = 32;

/// Nested dissection guided by node coordinates, `perm[new] = old`.
///
/// Each subset is split at the median of its longer bounding-box side; the
/// nodes of the first half adjacent to the second form the separator and
/// are numbered last.
pub fn nested_dissection(a: &CsrMatrix, coords: &[Vec2]) -> Vec<usize> {
    let mut order = Vec::with_capacity(a.n);
    let mut side = vec![0u8; a.n];
    let mut stack = vec![Task::Split((0..a.n).collect())];
    while let Some(task) = stack.pop() {
        let nodes = match task {
            Task::Emit(nodes) => {
                order.extend(nodes);
                continue;
            }
            Task::Split(nodes) => nodes,
        };
        if nodes.len() <= LEAF_SIZE {
            order.extend(nodes);
            continue;
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for &i in &nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(coords[i][k]);
                hi[k] = hi[k].max(coords[i][k]);
            }
        }
        let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
        let mut nodes = nodes;
        let mid = nodes.len() / 2;
        nodes.select_nth_unstable_by(mid, |&i, &j| {
            coords[i][axis].total_cmp(&coords[j][axis]).then(i.cmp(&j))
        });
        let right = nodes.split_off(mid);
        for &i in &right {
            side[i] = 2;
        }
        let (separator, left): (Vec<usize>, Vec<usize>) = nodes
            .into_iter()
            .partition(|&i| a.neighbours(i).iter().any(|&j| side[j] == 2));
        for &i in &right {
            side[i] = 0;
        }
        // Popped in reverse: left, right, then the separator.
        stack.push(Task::Emit(separator));
        stack.push(Task::Split(right));
        stack.push(Task::Split(left));
    }
    order
}

enum Task {
    Split(Vec<usize>),
    Emit(Vec<usize>),
}

/// Elimination tree and column counts of `L` for `P A Pᵀ`, reusable for
/// every matrix with the pattern of `A`.
#[derive(Clone, Debug)]
pub struct LdlSymbolic {
    perm: Vec<usize>,
    inv: Vec<usize>,
    parent: Vec<usize>,
    col_ptr: Vec<usize>,
}

const NO_PARENT: usize = usize::MAX;

impl LdlSymbolic {
    pub fn analyze(a: &CsrMatrix, perm: Vec<usize>) -> Self {
        let n = a.n;
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut parent = vec![NO_PARENT; n];
        let mut flag = vec![NO_PARENT; n];
        let mut count = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for &j in a.neighbours(perm[k]) {
                let mut i = inv[j];
                if i >= k {
                    continue;
                }
                while flag[i] != k {
                    if parent[i] == NO_PARENT {
                        parent[i] = k;
                    }
                    count[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for k in 0..n {
            col_ptr.push(col_ptr[k] + count[k]);
        }
        Self {
            perm,
            inv,
            parent,
            col_ptr,
        }
    }

    /// Stored entries of the strict lower factor.
    pub fn factor_nnz(&self) -> usize {
        self.col_ptr[self.col_ptr.len() - 1]
    }
}

/// `LDLᵀ` of `P A Pᵀ` without pivoting (up-looking, column storage of `L`).
#[derive(Clone, Debug)]
pub struct SparseLdl<'s> {
    sym: &'s LdlSymbolic,
    rows: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl<'s> SparseLdl<'s> {
    /// Zero pivots are replaced by `ε·max|a_ij|` so the factorization always
    /// completes; the inertia count is then still reliable away from them.
    pub fn factor(a: &CsrMatrix, sym: &'s LdlSymbolic) -> Self {
        let n = a.n;
        let nnz = sym.factor_nnz();
        let mut rows = vec![0usize; nnz];
        let mut lower = vec![0.0; nnz];
        let mut diag = vec![0.0; n];
        let mut fill = vec![0usize; n];
        let mut y = vec![0.0; n];
        let mut flag = vec![NO_PARENT; n];
        let mut pattern = vec![0usize; n];
        let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        for k in 0..n {
            flag[k] = k;
            let mut top = n;
            let old = sym.perm[k];
            for p in a.row_ptr[old]..a.row_ptr[old + 1] {
                let mut i = sym.inv[a.col_idx[p]];
                if i > k {
                    continue;
                }
                y[i] += a.values[p];
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = sym.parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut d = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let (start, end) = (sym.col_ptr[i], sym.col_ptr[i] + fill[i]);
                for p in start..end {
                    y[rows[p]] -= lower[p] * yi;
                }
                let l = yi / diag[i];
                d -= l * yi;
                rows[end] = k;
                lower[end] = l;
                fill[i] += 1;
            }
            if d == 0.0 || !d.is_finite() {
                d = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
            }
            diag[k] = d;
        }
        Self {
            sym,
            rows,
            lower,
            diag,
        }
    }

    /// Negative pivots, i.e. eigenvalues of `A` below zero.
    pub fn negative_count(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let cp = &self.sym.col_ptr;
        let mut x: Vec<f64> = self.sym.perm.iter().map(|&old| b[old]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in cp[j]..cp[j + 1] {
                x[self.rows[p]] -= self.lower[p] * xj;
            }
        }
        for (v, d) in x.iter_mut().zip(&self.diag) {
            *v /= d;
        }
        for j in (0..n).rev() {
            let s: f64 = (cp[j]..cp[j + 1])
                .map(|p| self.lower[p] * x[self.rows[p]])
                .sum();
            x[j] -= s;
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.sym.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}
