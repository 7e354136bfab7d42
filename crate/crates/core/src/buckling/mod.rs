//! First buckling eigenvalue Λ₁(Ω) = inf ∫|Δu|² / ∫|∇u|² over H²₀(Ω) for
//! clamped plates: the disk through Bessel zeros, star domains through a
//! mapped finite-volume grid, plus shape scans and a quasiminimality probe.

mod bessel;
mod domain;
mod pencil;
mod quasimin;

pub use bessel::{bessel_j, first_zero_j1};
pub use domain::{DomainKind, PlateDomain};
pub use pencil::{EigResult, MappedField};
pub use quasimin::{bump_library, quasiminimality_check, quasiminimality_sweep, Bump, BumpMargin, QuasiminReport};

use crate::error::{Error, Result};
use crate::quad::Rule;
use pencil::{inverse_iteration, MappedGrid};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MIN_MESH: usize = 64;
/// Shift of the inverse iteration relative to the disk of equal area.
pub const SHIFT_FACTOR: f64 = 0.9;
pub const SCAN_SCHEMA: &str = "fbplab.buckling-scan.v1";

/// Λ₁ of the unit disk, j₁,₁², with the root of J₁ located to relative `tol`.
pub fn lambda1_disk(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol = {tol} must be positive")));
    }
    let j = first_zero_j1(tol.min(1e-3))?;
    Ok(j * j)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiskEig {
    pub radius: f64,
    pub lambda1: f64,
    pub rayleigh_residual: f64,
}

/// Λ₁ of the disk of radius R with the Rayleigh residual of
/// u(r) = J₀(jr/R) − J₀(j) measured by quadrature.
pub fn disk_eig(radius: f64, tol: f64) -> Result<DiskEig> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let j = first_zero_j1(tol.clamp(1e-15, 1e-3))?;
    let rule = Rule::composite(0.0, radius, 32, 12, &[]);
    let k = j / radius;
    let bend = rule.integrate(|r| (k * k * bessel_j(0, k * r)).powi(2) * 2.0 * PI * r);
    let grad = rule.integrate(|r| (k * bessel_j(1, k * r)).powi(2) * 2.0 * PI * r);
    let lambda1 = k * k;
    let res = (bend - lambda1 * grad).abs() / grad;
    if res > tol {
        return Err(Error::Numerical(format!("disk Rayleigh residual {res:e} exceeds {tol:e}")));
    }
    Ok(DiskEig {
        radius,
        lambda1,
        rayleigh_residual: res,
    })
}

/// Smallest eigenvalue of the mapped-grid pencil. A mesh of size n has n/2
/// rings and 2n angles (n² nodes).
pub fn lambda1_numeric(domain: &PlateDomain, mesh: usize) -> Result<EigResult> {
    if mesh < MIN_MESH || mesh % 2 != 0 {
        return Err(Error::Domain(format!("mesh {mesh} must be even and ≥ {MIN_MESH}")));
    }
    let grid = MappedGrid::new(domain, mesh / 2, 2 * mesh)?;
    let shift = SHIFT_FACTOR * lambda1_disk(1e-14)? * PI / domain.area;
    inverse_iteration(&grid, shift, domain, mesh)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub family_param: f64,
    pub area: f64,
    pub lambda1: f64,
    pub area_lambda1: f64,
    pub mesh: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    /// parameter with the smallest |Ω|Λ₁
    pub argmin: f64,
    /// whether the minimum sits at the disk member of the family
    pub disk_minimal: bool,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# schema={SCAN_SCHEMA}\nfamily_param,area,lambda1,area_lambda1,mesh,residual\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{:e}\n",
                r.family_param, r.area, r.lambda1, r.area_lambda1, r.mesh, r.residual
            ));
        }
        s
    }
}

/// |Ω|Λ₁ over a family of (parameter, domain) pairs, `jobs` domains at a
/// time. Rows keep the order of the family.
pub fn disk_optimality_scan(family: &[(f64, PlateDomain)], mesh: usize, jobs: usize) -> Result<ScanTable> {
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let jobs = jobs.max(1);
    let mut rows: Vec<Option<Result<ScanRow>>> = (0..family.len()).map(|_| None).collect();
    for (chunk, out) in family.chunks(jobs).zip(rows.chunks_mut(jobs)) {
        std::thread::scope(|sc| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|(param, d)| {
                    sc.spawn(move || {
                        lambda1_numeric(d, mesh).map(|e| ScanRow {
                            family_param: *param,
                            area: d.area,
                            lambda1: e.lambda1,
                            area_lambda1: d.area * e.lambda1,
                            mesh,
                            residual: e.pencil_residual,
                        })
                    })
                })
                .collect();
            for (h, slot) in handles.into_iter().zip(out.iter_mut()) {
                *slot = Some(h.join().unwrap_or_else(|_| Err(Error::Numerical("scan worker panicked".into()))));
            }
        });
    }
    let rows: Vec<ScanRow> = rows.into_iter().map(|r| r.expect("every slot is filled")).collect::<Result<_>>()?;
    let best = rows
        .iter()
        .zip(family)
        .min_by(|a, b| a.0.area_lambda1.total_cmp(&b.0.area_lambda1))
        .expect("nonempty");
    let disk_minimal = is_disk(&best.1 .1);
    Ok(ScanTable {
        argmin: best.0.family_param,
        disk_minimal,
        rows,
    })
}

fn is_disk(d: &PlateDomain) -> bool {
    match d.kind {
        DomainKind::Disk => true,
        DomainKind::Ellipse => (d.params[0] - d.params[1]).abs() <= 1e-12 * d.params[0],
        DomainKind::Star => d.params[1..].iter().all(|c| *c == 0.0),
    }
}

/// Area-π ellipses with the given axis ratios.
pub fn ellipse_family(ratios: &[f64]) -> Result<Vec<(f64, PlateDomain)>> {
    ratios.iter().map(|&q| Ok((q, PlateDomain::ellipse_with_ratio(q)?))).collect()
}
