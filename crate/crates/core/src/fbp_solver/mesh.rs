use crate::error::{Error, Result};
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, SparseColMatRef, Triplet};
use faer::prelude::*;
use faer::Side;

/// Layers of fixed nodes outside the unit circle.
const GHOST: usize = 3;
const SUBSAMPLE: usize = 32;
const FIXED: usize = usize::MAX;

/// Cartesian lattice x_i = (i − c)h on [−1 − 3h, 1 + 3h]², h = 1/n_r.
///
/// Nodes inside the open unit disk are unknowns, the others carry the
/// extension of the boundary data. The linear solve minimizes h²Σ(Δ_h u)²
/// over every node touching an unknown, which is the 13-point stencil
/// Δ_h²u = 0 at the unknowns. Energies are reported as
/// Σ_q w_q (Δ_h u)_q² + λ Σ_{p ∈ M} w_p with w the cell ∩ disk areas.
pub(crate) struct Mesh {
    pub n_r: usize,
    pub side: usize,
    pub h: f64,
    pub w: Vec<f64>,
    /// unknown index per node, FIXED for boundary nodes
    pub unknown: Vec<usize>,
    /// node per unknown
    pub nodes: Vec<usize>,
    /// values of fixed nodes (0 at unknowns)
    pub fixed: Vec<f64>,
    pub rows: Vec<usize>,
    a: SparseColMat<usize, f64>,
    symbolic: SymbolicLlt<usize>,
    b: Vec<f64>,
}

fn cell_area(x: f64, y: f64, h: f64) -> f64 {
    let half = 0.5 * h;
    let far = (x.abs() + half).hypot(y.abs() + half);
    if far <= 1.0 {
        return h * h;
    }
    let near_x = (x.abs() - half).max(0.0);
    let near_y = (y.abs() - half).max(0.0);
    if near_x.hypot(near_y) >= 1.0 {
        return 0.0;
    }
    let s = h / SUBSAMPLE as f64;
    let mut inside = 0usize;
    for a in 0..SUBSAMPLE {
        for b in 0..SUBSAMPLE {
            let px = x - half + (a as f64 + 0.5) * s;
            let py = y - half + (b as f64 + 0.5) * s;
            if px * px + py * py < 1.0 {
                inside += 1;
            }
        }
    }
    inside as f64 * s * s
}

fn stencil(side: usize, h: f64, k: usize) -> [(usize, f64); 5] {
    let h2 = 1.0 / (h * h);
    [(k, -4.0 * h2), (k + 1, h2), (k - 1, h2), (k + side, h2), (k - side, h2)]
}

/// Normal equations of h²Σ(Δ_h u)² over the nodes touching an unknown.
fn assemble(
    side: usize,
    h: f64,
    unknown: &[usize],
    nodes: &[usize],
    fixed: &[f64],
) -> Result<(SparseColMat<usize, f64>, Vec<f64>)> {
    let m = nodes.len();
    let mut trip = Vec::with_capacity(m * 25);
    let mut b = vec![0.0; m];
    let mut touched = vec![false; unknown.len()];
    for &k in nodes {
        for q in [k, k + 1, k - 1, k + side, k - side] {
            touched[q] = true;
        }
    }
    let wq = h * h;
    for q in (0..unknown.len()).filter(|&q| touched[q]) {
        let st = stencil(side, h, q);
        let f: f64 = st
            .iter()
            .filter(|(s, _)| unknown[*s] == FIXED)
            .map(|(s, c)| c * fixed[*s])
            .sum();
        for &(s1, c1) in &st {
            let p1 = unknown[s1];
            if p1 == FIXED {
                continue;
            }
            b[p1] -= wq * c1 * f;
            for &(s2, c2) in &st {
                let p2 = unknown[s2];
                if p2 != FIXED {
                    trip.push(Triplet::new(p1, p2, wq * c1 * c2));
                }
            }
        }
    }
    let a = SparseColMat::try_new_from_triplets(m, m, &trip)
        .map_err(|e| Error::Numerical(format!("assembly failed: {e:?}")))?;
    Ok((a, b))
}

impl Mesh {
    pub fn new(n_r: usize, ext: &dyn Fn(f64, f64) -> f64) -> Result<Self> {
        let side = 2 * n_r + 2 * GHOST + 1;
        let h = 1.0 / n_r as f64;
        let c = (n_r + GHOST) as f64;
        let n = side * side;
        let mut w = vec![0.0; n];
        let mut unknown = vec![FIXED; n];
        let mut nodes = Vec::new();
        let mut fixed = vec![0.0; n];
        for j in 0..side {
            for i in 0..side {
                let k = j * side + i;
                let (x, y) = ((i as f64 - c) * h, (j as f64 - c) * h);
                w[k] = cell_area(x, y, h);
                if x * x + y * y < 1.0 - 1e-12 {
                    unknown[k] = nodes.len();
                    nodes.push(k);
                } else {
                    fixed[k] = ext(x, y);
                }
            }
        }
        let rows: Vec<usize> = (0..n).filter(|&k| w[k] > 0.0).collect();
        let (a, b) = assemble(side, h, &unknown, &nodes, &fixed)?;
        let symbolic = SymbolicLlt::try_new(a.symbolic(), Side::Lower)
            .map_err(|e| Error::Numerical(format!("symbolic factorization failed: {e:?}")))?;
        Ok(Mesh {
            n_r,
            side,
            h,
            w,
            unknown,
            nodes,
            fixed,
            rows,
            a,
            symbolic,
            b,
        })
    }

    pub fn xy(&self, k: usize) -> (f64, f64) {
        let c = (self.n_r + GHOST) as f64;
        let (i, j) = (k % self.side, k / self.side);
        ((i as f64 - c) * self.h, (j as f64 - c) * self.h)
    }

    pub fn stencil(&self, k: usize) -> [(usize, f64); 5] {
        stencil(self.side, self.h, k)
    }

    /// 4-neighbours of a node.
    pub fn neighbours(&self, k: usize) -> [usize; 4] {
        [k + 1, k - 1, k + self.side, k - self.side]
    }

    /// Minimizer of the quadratic part with u = 0 at unknowns outside `mask`
    /// (indexed by unknown); returns all node values.
    pub fn solve(&self, mask: &[bool]) -> Result<Vec<f64>> {
        let sym = self.a.symbolic();
        let cp = sym.col_ptr();
        let ri = sym.row_idx();
        let av = self.a.val();
        let mut vals = vec![0.0; av.len()];
        for j in 0..self.nodes.len() {
            for idx in cp[j]..cp[j + 1] {
                let i = ri[idx];
                vals[idx] = if mask[i] && mask[j] {
                    av[idx]
                } else if i == j {
                    1.0
                } else {
                    0.0
                };
            }
        }
        let am = SparseColMatRef::new(sym, &vals);
        let llt = Llt::try_new_with_symbolic(self.symbolic.clone(), am, Side::Lower)
            .map_err(|e| Error::Numerical(format!("linear solve failure: {e:?}")))?;
        let rhs = Col::<f64>::from_fn(self.nodes.len(), |p| if mask[p] { self.b[p] } else { 0.0 });
        let x = llt.solve(&rhs);
        let mut u = self.fixed.clone();
        for (p, &k) in self.nodes.iter().enumerate() {
            u[k] = if mask[p] { x[p] } else { 0.0 };
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("linear solve returned non-finite values".into()));
        }
        Ok(u)
    }

    pub fn laplacian(&self, u: &[f64], q: usize) -> f64 {
        self.stencil(q).iter().map(|(s, c)| c * u[*s]).sum()
    }

    /// Σ_q w_q (Δ_h u)_q².
    pub fn bending(&self, u: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|&q| {
                let l = self.laplacian(u, q);
                self.w[q] * l * l
            })
            .sum()
    }

    /// Area of the mask plus the cut cells of fixed nodes with nonzero data.
    pub fn area(&self, mask: &[bool]) -> f64 {
        let inner: f64 = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(p, _)| mask[*p])
            .map(|(_, &k)| self.w[k])
            .sum();
        let outer: f64 = self
            .rows
            .iter()
            .filter(|&&k| self.unknown[k] == FIXED && self.fixed[k] != 0.0)
            .map(|&k| self.w[k])
            .sum();
        inner + outer
    }

    pub fn is_fixed(&self, k: usize) -> bool {
        self.unknown[k] == FIXED
    }
}

/// Order-3 Lagrange interpolation of node values at (x, y).
pub(crate) fn interpolate(mesh: &Mesh, u: &[f64], x: f64, y: f64) -> f64 {
    let c = (mesh.n_r + GHOST) as f64;
    let gx = x / mesh.h + c;
    let gy = y / mesh.h + c;
    let max = (mesh.side - 4) as f64;
    let i0 = (gx.floor() - 1.0).clamp(0.0, max);
    let j0 = (gy.floor() - 1.0).clamp(0.0, max);
    let wx = crate::quad::lagrange4([i0, i0 + 1.0, i0 + 2.0, i0 + 3.0], gx);
    let wy = crate::quad::lagrange4([j0, j0 + 1.0, j0 + 2.0, j0 + 3.0], gy);
    let (i0, j0) = (i0 as usize, j0 as usize);
    let mut s = 0.0;
    for b in 0..4 {
        for a in 0..4 {
            s += wx[a] * wy[b] * u[(j0 + b) * mesh.side + i0 + a];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_disk_area() {
        let m = Mesh::new(24, &|_, _| 0.0).unwrap();
        let a: f64 = m.w.iter().sum();
        assert!((a - std::f64::consts::PI).abs() < 2e-4, "{a}");
    }

    #[test]
    fn quadratic_data_is_reproduced() {
        // biharmonic quartic, annihilated by the 13-point stencil
        let f = |x: f64, y: f64| x * x + 3.0 * y * y + x.powi(3) * y - x * y.powi(3);
        let m = Mesh::new(16, &f).unwrap();
        let u = m.solve(&vec![true; m.nodes.len()]).unwrap();
        for &k in &m.nodes {
            let (x, y) = m.xy(k);
            assert!((u[k] - f(x, y)).abs() < 1e-9);
        }
        let lap = m.rows.iter().map(|&q| m.laplacian(&u, q)).fold(0.0, f64::max);
        assert!(lap.is_finite());
    }
}
