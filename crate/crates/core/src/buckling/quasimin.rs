use super::pencil::{EigResult, MappedGrid};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, lagrange4};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const PANELS: usize = 4;
const ORDER: usize = 8;
const AREA_SUBSAMPLE: usize = 64;

/// φ(x, y) = A b((x − c_x)/w) b((y − c_y)/w) with b(t) = (1 − t²)⁴ on |t| < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: (f64, f64),
    pub width: f64,
    pub amplitude: f64,
}

fn b(t: f64) -> f64 {
    (1.0 - t * t).max(0.0).powi(4)
}

fn b2(t: f64) -> f64 {
    let q = (1.0 - t * t).max(0.0);
    -8.0 * q.powi(3) + 48.0 * t * t * q * q
}

impl Bump {
    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        let (u, v) = ((x - self.center.0) / self.width, (y - self.center.1) / self.width);
        self.amplitude * (b2(u) * b(v) + b(u) * b2(v)) / (self.width * self.width)
    }

    /// (‖φ‖², ‖Δφ‖²) from the one-dimensional moments.
    fn norms(&self) -> (f64, f64) {
        let (x, w) = gauss_legendre(24);
        let m = |f: &dyn Fn(f64) -> f64| x.iter().zip(&w).map(|(t, wt)| wt * f(*t)).sum::<f64>();
        let i0 = m(&|t| b(t) * b(t));
        let i2 = m(&|t| b2(t) * b2(t));
        let i02 = m(&|t| b(t) * b2(t));
        let (a, w) = (self.amplitude, self.width);
        (a * a * w * w * i0 * i0, a * a / (w * w) * 2.0 * (i2 * i0 + i02 * i02))
    }

    fn scaled(&self, s: f64) -> Bump {
        Bump {
            amplitude: s * self.amplitude,
            ..*self
        }
    }
}

/// Tensor bumps at 3 widths × 5 centres inside D_{p,r}.
pub fn bump_library(p: (f64, f64), r: f64, amplitude: f64) -> Vec<Bump> {
    let mut out = Vec::new();
    for w in [0.15, 0.25, 0.4] {
        for (dx, dy) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)] {
            out.push(Bump {
                center: (p.0 + 0.4 * r * dx, p.1 + 0.4 * r * dy),
                width: w * r,
                amplitude,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpMargin {
    pub bump: Bump,
    /// E(u; D) − E(u + φ; D)
    pub energy_drop: f64,
    pub l2: f64,
    /// energy_drop − μ‖φ‖, nonpositive when the inequality holds
    pub margin: f64,
    /// (margin at amplitude sA)/s for s = 1e-3, the first-order slope
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiminReport {
    pub center: (f64, f64),
    pub radius: f64,
    pub mu: f64,
    pub margins: Vec<BumpMargin>,
    pub worst_margin: f64,
    pub passed: bool,
}

struct Probe<'a> {
    eig: &'a EigResult,
    grid: MappedGrid,
}

impl Probe<'_> {
    /// (s, θ) of a physical point; None outside the plate.
    fn invert(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let t = y.atan2(x).rem_euclid(TAU);
        let d = x.hypot(y);
        if !self.eig.domain.contains(x, y) {
            return None;
        }
        // ρ(·, θ) is increasing on [0, 1]
        let f = |s: f64| self.grid.xy(s, t).0.hypot(self.grid.xy(s, t).1) - d;
        let s = crate::quad::bisect(f, 0.0, 1.0, 60).ok()?;
        Some((s, t))
    }

    /// Δ_h u interpolated at a physical point, zero outside the plate.
    fn laplacian(&self, x: f64, y: f64) -> f64 {
        let Some((s, t)) = self.invert(x, y) else { return 0.0 };
        let f = &self.eig.eigenfield;
        let (nt, n) = (f.n_theta as isize, f.n_s as isize);
        let ds = self.grid.ds;
        let at = |i: isize, j: isize| {
            let (i, j) = if i < 0 { (-i - 1, j + nt / 2) } else { (i, j) };
            f.laplacian[(i * nt + j.rem_euclid(nt)) as usize]
        };
        let i0 = ((s / ds - 0.5).floor() as isize - 1).clamp(-2, n - 3);
        let si = |i: isize| (i as f64 + 0.5) * ds;
        let ws = lagrange4([si(i0), si(i0 + 1), si(i0 + 2), si(i0 + 3)], s);
        let xt = t / self.grid.dt;
        let j0 = xt.floor() as isize - 1;
        let wt = lagrange4([-1.0, 0.0, 1.0, 2.0], xt - xt.floor());
        let mut acc = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                acc += ws[a] * wt[c] * at(i0 + a as isize, j0 + c as isize);
            }
        }
        acc
    }

    /// ∫ Δu Δφ over the bump square.
    fn cross(&self, bump: &Bump) -> f64 {
        let (x, w) = gauss_legendre(ORDER);
        let h = 2.0 * bump.width / PANELS as f64;
        let mut acc = 0.0;
        for pa in 0..PANELS {
            for pb in 0..PANELS {
                let x0 = bump.center.0 - bump.width + (pa as f64 + 0.5) * h;
                let y0 = bump.center.1 - bump.width + (pb as f64 + 0.5) * h;
                for (xa, wa) in x.iter().zip(&w) {
                    for (yb, wb) in x.iter().zip(&w) {
                        let (px, py) = (x0 + 0.5 * h * xa, y0 + 0.5 * h * yb);
                        acc += wa * wb * 0.25 * h * h * self.laplacian(px, py) * bump.laplacian(px, py);
                    }
                }
            }
        }
        acc
    }

    /// Area of the bump square outside the plate, where u + φ gains support.
    fn outside_area(&self, bump: &Bump) -> f64 {
        let h = 2.0 * bump.width / AREA_SUBSAMPLE as f64;
        let mut n = 0usize;
        for a in 0..AREA_SUBSAMPLE {
            for c in 0..AREA_SUBSAMPLE {
                let x = bump.center.0 - bump.width + (a as f64 + 0.5) * h;
                let y = bump.center.1 - bump.width + (c as f64 + 0.5) * h;
                if !self.eig.domain.contains(x, y) {
                    n += 1;
                }
            }
        }
        n as f64 * h * h
    }

    fn margin(&self, bump: &Bump, cross: f64, outside: f64, mu: f64) -> (f64, f64, f64) {
        if bump.amplitude == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let (l2sq, lap2) = bump.norms();
        // cross is linear in the amplitude
        let drop = -(2.0 * cross + lap2) - outside;
        let l2 = l2sq.sqrt();
        (drop, l2, drop - mu * l2)
    }
}

/// E(u; D) − E(u + φ; D) − μ‖φ‖_{L²} for each perturbation, D = D_{p,r}.
/// The support of u + φ inside the plate is taken equal to that of u.
pub fn quasiminimality_check(
    eig: &EigResult,
    perturbations: &[Bump],
    disk: ((f64, f64), f64),
    mu: f64,
) -> Result<QuasiminReport> {
    let (p, r) = disk;
    if !(r > 0.0 && mu >= 0.0) {
        return Err(Error::Domain(format!("need r > 0 and μ ≥ 0 (r = {r}, μ = {mu})")));
    }
    let f = &eig.eigenfield;
    let probe = Probe {
        eig,
        grid: MappedGrid::new(&eig.domain, f.n_s, f.n_theta)?,
    };
    let mut margins = Vec::with_capacity(perturbations.len());
    for bump in perturbations {
        let reach = (bump.center.0 - p.0).hypot(bump.center.1 - p.1) + bump.width * 2f64.sqrt();
        if !(bump.width > 0.0) || reach >= r {
            return Err(Error::Domain(format!(
                "perturbation at {:?} of width {} is not compactly supported in D(({}, {}), {r})",
                bump.center, bump.width, p.0, p.1
            )));
        }
        let cross = probe.cross(bump);
        let outside = probe.outside_area(bump);
        let (energy_drop, l2, margin) = probe.margin(bump, cross, outside, mu);
        let s = 1e-3;
        let small = bump.scaled(s);
        let slope = probe.margin(&small, s * cross, outside, mu).2 / s;
        margins.push(BumpMargin {
            bump: *bump,
            energy_drop,
            l2,
            margin,
            slope,
        });
    }
    let worst_margin = margins.iter().map(|m| m.margin).reduce(f64::max).unwrap_or(0.0);
    Ok(QuasiminReport {
        center: p,
        radius: r,
        mu,
        passed: worst_margin <= 0.0,
        worst_margin,
        margins,
    })
}

/// Per-radius reports with μ = 1/r, the constant for which u_r is a
/// quasiminimizer on D_{p/r, 1} with unit constant.
pub fn quasiminimality_sweep(eig: &EigResult, p: (f64, f64), radii: &[f64], amplitude: f64) -> Result<Vec<QuasiminReport>> {
    radii
        .iter()
        .map(|&r| quasiminimality_check(eig, &bump_library(p, r, amplitude), (p, r), 1.0 / r))
        .collect()
}
