use super::domain::PlateDomain;
use crate::error::{Error, Result};
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const MAX_ITERS: usize = 300;
/// Relative change of the Rayleigh quotient at which the iteration stops;
/// round-off in uᵀAu sits near 1e-8 · Λ on fine meshes.
const LAMBDA_TOL: f64 = 1e-13;

/// Pullback of a star domain to the unit disk by the radial stretch
/// x = ρ(s, θ)(cos θ, sin θ), ρ = Ls + (R(θ) − L)s³, L the equivalent radius.
/// The cubic blend keeps the map close to a dilation near the origin.
///
/// Rings s_i = (i + ½)δ, i = 0..N, with δ = 1/(N + ½) so that ring N is the
/// boundary; ring N + 1 is a ghost mirroring ring N − 1 (∂_s u = 0).
#[derive(Debug, Clone)]
pub(crate) struct MappedGrid {
    pub n_s: usize,
    pub n_theta: usize,
    pub ds: f64,
    pub dt: f64,
    scale: f64,
    domain: PlateDomain,
}

struct Metric {
    /// J g^{ss}, J g^{sθ}, J g^{θθ}, J
    a: f64,
    b: f64,
    c: f64,
    jac: f64,
}

impl MappedGrid {
    pub fn new(domain: &PlateDomain, n_s: usize, n_theta: usize) -> Result<Self> {
        let scale = domain.equivalent_radius();
        let r_min = (0..n_theta.max(256))
            .map(|k| domain.radius(TAU * k as f64 / n_theta.max(256) as f64))
            .fold(f64::INFINITY, f64::min);
        if r_min <= 2.0 / 3.0 * scale {
            return Err(Error::Domain(format!(
                "{} is too far from a disk for the radial stretch",
                domain.describe()
            )));
        }
        Ok(MappedGrid {
            n_s,
            n_theta,
            ds: 1.0 / (n_s as f64 + 0.5),
            dt: TAU / n_theta as f64,
            scale,
            domain: domain.clone(),
        })
    }

    pub fn s(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.ds
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    fn rho(&self, s: f64, t: f64) -> (f64, f64, f64) {
        let (r, dr) = self.domain.radius_jet(t);
        let l = self.scale;
        (l * s + (r - l) * s.powi(3), l + 3.0 * (r - l) * s * s, dr * s.powi(3))
    }

    pub fn xy(&self, s: f64, t: f64) -> (f64, f64) {
        let rho = self.rho(s, t).0;
        (rho * t.cos(), rho * t.sin())
    }

    fn metric(&self, s: f64, t: f64) -> Metric {
        let (rho, rs, rt) = self.rho(s, t);
        if rho == 0.0 {
            return Metric { a: 0.0, b: 0.0, c: 0.0, jac: 0.0 };
        }
        Metric {
            a: (rt * rt + rho * rho) / (rs * rho),
            b: -rt / rho,
            c: rs / rho,
            jac: rs * rho,
        }
    }

    /// Unknown index of a (possibly ghost or mirrored) node, None on the
    /// boundary ring.
    fn resolve(&self, i: isize, j: isize) -> Option<usize> {
        let n = self.n_s as isize;
        let nt = self.n_theta as isize;
        let (i, j) = match i {
            -1 => (0, j + nt / 2),
            i if i == n + 1 => (n - 1, j),
            i => (i, j),
        };
        if i >= n {
            return None;
        }
        Some((i * nt + j.rem_euclid(nt)) as usize)
    }

    pub fn unknowns(&self) -> usize {
        self.n_s * self.n_theta
    }

    /// Δ_h at node (i, j), i ≤ N, in divergence form.
    pub fn laplacian_row(&self, i: usize, j: usize) -> Vec<(usize, f64)> {
        let (ds, dt) = (self.ds, self.dt);
        let (s, t) = (self.s(i), self.theta(j));
        let inv = 1.0 / (self.metric(s, t).jac * ds * dt);
        let (ii, jj) = (i as isize, j as isize);
        let mut row: Vec<(isize, isize, f64)> = Vec::with_capacity(24);
        // s-faces
        for (side, sf, inner) in [(1.0, s + 0.5 * ds, ii), (-1.0, s - 0.5 * ds, ii - 1)] {
            if sf <= 0.0 {
                continue;
            }
            let m = self.metric(sf, t);
            let w = side * inv * dt;
            let outer = inner + 1;
            row.push((outer, jj, w * m.a / ds));
            row.push((inner, jj, -w * m.a / ds));
            let q = w * m.b / (4.0 * dt);
            for k in [inner, outer] {
                row.push((k, jj + 1, q));
                row.push((k, jj - 1, -q));
            }
        }
        // θ-faces
        for (side, lo) in [(1.0, jj), (-1.0, jj - 1)] {
            let m = self.metric(s, t + side * 0.5 * dt);
            let w = side * inv * ds;
            row.push((ii, lo + 1, w * m.c / dt));
            row.push((ii, lo, -w * m.c / dt));
            let q = w * m.b / (4.0 * ds);
            for k in [lo, lo + 1] {
                row.push((ii + 1, k, q));
                row.push((ii - 1, k, -q));
            }
        }
        merge(row.into_iter().filter_map(|(a, b, c)| self.resolve(a, b).map(|p| (p, c))))
    }

    /// Quadrature weight of node (i, j) for ∫|Δu|².
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let w = self.metric(self.s(i), self.theta(j)).jac * self.ds * self.dt;
        if i == self.n_s {
            0.5 * w
        } else {
            w
        }
    }

    /// Rows of both quadratic forms: Σ w(Δ_h u)² and the corner-centred
    /// Dirichlet form Σ δ dθ (a u_s² + 2b u_s u_θ + c u_θ²).
    pub fn forms(&self) -> Forms {
        let mut lap = Vec::with_capacity((self.n_s + 1) * self.n_theta);
        for i in 0..=self.n_s {
            for j in 0..self.n_theta {
                lap.push((self.weight(i, j), self.laplacian_row(i, j)));
            }
        }
        let mut grad = Vec::with_capacity(self.unknowns());
        let (ds, dt) = (self.ds, self.dt);
        for i in 0..self.n_s as isize {
            for j in 0..self.n_theta as isize {
                let m = self.metric((i + 1) as f64 * ds, (j as f64 + 0.5) * dt);
                let us = merge(
                    [(i + 1, j, 1.0), (i + 1, j + 1, 1.0), (i, j, -1.0), (i, j + 1, -1.0)]
                        .into_iter()
                        .filter_map(|(a, b, c)| self.resolve(a, b).map(|p| (p, c / (2.0 * ds)))),
                );
                let ut = merge(
                    [(i, j + 1, 1.0), (i + 1, j + 1, 1.0), (i, j, -1.0), (i + 1, j, -1.0)]
                        .into_iter()
                        .filter_map(|(a, b, c)| self.resolve(a, b).map(|p| (p, c / (2.0 * dt)))),
                );
                let w = ds * dt;
                grad.push(([w * m.a, w * m.b, w * m.c], us, ut));
            }
        }
        Forms {
            n: self.unknowns(),
            lap,
            grad,
        }
    }
}

type Row = Vec<(usize, f64)>;

pub(crate) struct Forms {
    n: usize,
    lap: Vec<(f64, Row)>,
    grad: Vec<([f64; 3], Row, Row)>,
}

fn apply(row: &Row, x: &[f64]) -> f64 {
    row.iter().map(|&(p, c)| c * x[p]).sum()
}

impl Forms {
    pub fn bending(&self, x: &[f64]) -> f64 {
        self.lap.iter().map(|(w, r)| w * apply(r, x).powi(2)).sum()
    }

    pub fn dirichlet(&self, x: &[f64]) -> f64 {
        self.grad
            .iter()
            .map(|(k, us, ut)| {
                let (a, b) = (apply(us, x), apply(ut, x));
                k[0] * a * a + 2.0 * k[1] * a * b + k[2] * b * b
            })
            .sum()
    }

    /// A − σB, A and B as sparse matrices.
    pub fn matrices(&self, shift: f64) -> Result<[SparseColMat<usize, f64>; 3]> {
        let mut ta = Vec::new();
        for (w, row) in &self.lap {
            for &(p, cp) in row {
                for &(q, cq) in row {
                    ta.push(Triplet::new(p, q, w * cp * cq));
                }
            }
        }
        let mut tb = Vec::new();
        for (k, us, ut) in &self.grad {
            for (x, y, c) in [(us, us, k[0]), (us, ut, k[1]), (ut, us, k[1]), (ut, ut, k[2])] {
                for &(p, cp) in x {
                    for &(q, cq) in y {
                        tb.push(Triplet::new(p, q, c * cp * cq));
                    }
                }
            }
        }
        let shifted: Vec<_> = ta
            .iter()
            .cloned()
            .chain(tb.iter().map(|t| Triplet::new(t.row, t.col, -shift * t.val)))
            .collect();
        let build = |t: &[Triplet<usize, usize, f64>]| {
            SparseColMat::try_new_from_triplets(self.n, self.n, t)
                .map_err(|e| Error::Numerical(format!("assembly failed: {e:?}")))
        };
        Ok([build(&ta)?, build(&tb)?, build(&shifted)?])
    }
}

fn merge(entries: impl Iterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = entries.collect();
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
    for (p, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == p => last.1 += c,
            _ => out.push((p, c)),
        }
    }
    out
}

fn inf_norm(m: &SparseColMat<usize, f64>) -> f64 {
    let sym = m.symbolic();
    let (cp, ri, v) = (sym.col_ptr(), sym.row_idx(), m.val());
    let mut rows = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        for k in cp[j]..cp[j + 1] {
            rows[ri[k]] += v[k].abs();
        }
    }
    rows.into_iter().fold(0.0, f64::max)
}

pub(crate) fn matvec(m: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let sym = m.symbolic();
    let (cp, ri, v) = (sym.col_ptr(), sym.row_idx(), m.val());
    let mut y = vec![0.0; x.len()];
    for j in 0..x.len() {
        for k in cp[j]..cp[j + 1] {
            y[ri[k]] += v[k] * x[j];
        }
    }
    y
}

/// Eigenfield on the mapped grid, boundary ring included, normalized by
/// ∫|∇u|² = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MappedField {
    pub n_s: usize,
    pub n_theta: usize,
    /// physical node coordinates, ring-major
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<f64>,
    /// Δ_h u at the nodes
    pub laplacian: Vec<f64>,
    /// quadrature weights of the nodes
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigResult {
    pub domain: PlateDomain,
    pub mesh: usize,
    pub lambda1: f64,
    /// |∫|Δu|² − Λ∫|∇u|²| / ∫|∇u|²
    pub rayleigh_residual: f64,
    /// backward error ‖Au − ΛBu‖∞ / ((‖A‖∞ + Λ‖B‖∞)‖u‖∞)
    pub pencil_residual: f64,
    pub shift: f64,
    pub iterations: usize,
    pub eigenfield: MappedField,
}

enum Factor {
    Llt(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
}

/// Shifted inverse iteration for the smallest eigenvalue of A u = Λ B u.
pub(crate) fn inverse_iteration(
    grid: &MappedGrid,
    shift: f64,
    domain: &PlateDomain,
    mesh: usize,
) -> Result<EigResult> {
    let forms = grid.forms();
    let n = grid.unknowns();
    let [a, b, shifted] = forms.matrices(shift)?;
    // A − σB is positive definite when σ is below Λ₁
    let solver = match shifted.sp_cholesky(Side::Lower) {
        Ok(llt) => Factor::Llt(llt),
        Err(_) => Factor::Lu(
            shifted
                .sp_lu()
                .map_err(|e| Error::Numerical(format!("factorization of A − σB failed: {e:?}")))?,
        ),
    };

    let mut x: Vec<f64> = (0..n)
        .map(|p| {
            let s = grid.s(p / grid.n_theta);
            (1.0 - s * s).powi(2)
        })
        .collect();
    let mut lambda = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERS {
        iterations += 1;
        let bx = matvec(&b, &x);
        let rhs = Col::<f64>::from_fn(n, |p| bx[p]);
        let z = match &solver {
            Factor::Llt(f) => f.solve(&rhs),
            Factor::Lu(f) => f.solve(&rhs),
        };
        let mut y: Vec<f64> = (0..n).map(|p| z[p]).collect();
        let norm = forms.dirichlet(&y).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let next = forms.bending(&y);
        x = y;
        if (next - lambda).abs() <= LAMBDA_TOL * next.abs() {
            lambda = next;
            converged = true;
            break;
        }
        lambda = next;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "eigensolve did not converge in {MAX_ITERS} iterations"
        )));
    }
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let ax = matvec(&a, &x);
    let bx = matvec(&b, &x);
    let num = forms.bending(&x);
    let den = forms.dirichlet(&x);
    let r = ax.iter().zip(&bx).map(|(p, q)| (p - lambda * q).abs()).fold(0.0, f64::max);
    let xmax = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let pencil_residual = r / ((inf_norm(&a) + lambda * inf_norm(&b)) * xmax);
    let eigenfield = mapped_field(grid, &x);
    Ok(EigResult {
        domain: domain.clone(),
        mesh,
        lambda1: lambda,
        rayleigh_residual: (num - lambda * den).abs() / den,
        pencil_residual,
        shift,
        iterations,
        eigenfield,
    })
}

fn mapped_field(grid: &MappedGrid, x: &[f64]) -> MappedField {
    let nt = grid.n_theta;
    let total = (grid.n_s + 1) * nt;
    let mut f = MappedField {
        n_s: grid.n_s,
        n_theta: nt,
        x: Vec::with_capacity(total),
        y: Vec::with_capacity(total),
        values: Vec::with_capacity(total),
        laplacian: Vec::with_capacity(total),
        weights: Vec::with_capacity(total),
    };
    for i in 0..=grid.n_s {
        for j in 0..nt {
            let (px, py) = grid.xy(grid.s(i), grid.theta(j));
            f.x.push(px);
            f.y.push(py);
            f.values.push(if i < grid.n_s { x[i * nt + j] } else { 0.0 });
            f.laplacian.push(grid.laplacian_row(i, j).iter().map(|&(p, c)| c * x[p]).sum());
            f.weights.push(grid.weight(i, j));
        }
    }
    f
}
