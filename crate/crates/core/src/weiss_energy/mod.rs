//! Energies and monotone quantities on the disk and the half-cylinder.

pub mod cylinder;
mod field;
pub mod goursat;
pub mod io;

pub use cylinder::{cylinder_g, cylinder_w, to_cylinder, CylJet, CylinderField};
pub use field::{DiskField, Jet, PolarGrid, SupportRule, TAU_SUPP};
pub use goursat::{biharmonic_extension_energy, goursat_from_boundary, BoundaryTrace, GoursatCoefficients};

use crate::error::{Error, Result};
use crate::quad::radial_moment;
use serde::{Deserialize, Serialize};

/// ∫_{D_r} (|Δu|² + λχ_{u≠0}), trapezoid in θ and piecewise linear in r.
pub fn energy_e(field: &DiskField, lambda: f64, r: f64) -> f64 {
    let g = field.grid();
    let nt = g.n_theta;
    let dt = g.dtheta();
    let mask = field.support_mask();
    let ring: Vec<f64> = (0..g.n_r())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..nt {
                let l = field.laplacian(i, j);
                s += l * l;
                if mask[i * nt + j] {
                    s += lambda;
                }
            }
            s * dt
        })
        .collect();
    radial_moment(&g.radii, &ring, r)
}

fn check_radius(field: &DiskField, r: f64) -> Result<f64> {
    if !field.center_flat() {
        return Err(Error::Precondition(
            "field is not flat at the origin (u(0) or ∇u(0) nonzero)".into(),
        ));
    }
    let g = field.grid();
    let h = g.spacing_at(r);
    if r < 3.0 * h {
        return Err(Error::Resolution(format!(
            "radius {r} is below three radial cells (h = {h})"
        )));
    }
    let last = *g.radii.last().unwrap();
    if r + h > last + 1e-12 {
        return Err(Error::Domain(format!(
            "radius {r} too close to the outer edge {last}"
        )));
    }
    Ok(h)
}

/// ∫₀^{2π} f(jet, r) dθ on the interpolated ring of radius r.
fn ring_integral(field: &DiskField, r: f64, f: impl Fn(&Jet, f64) -> f64) -> f64 {
    let dt = field.grid().dtheta();
    field.ring_at(r).iter().map(|j| f(j, r)).sum::<f64>() * dt
}

/// Mean of a ring integral over the shell {r − h, r, r + h}.
fn shell(field: &DiskField, r: f64, h: f64, f: impl Fn(&Jet, f64) -> f64) -> f64 {
    (ring_integral(field, r - h, &f) + ring_integral(field, r, &f) + ring_integral(field, r + h, &f)) / 3.0
}

fn explicit_corrector(j: &Jet, r: f64) -> f64 {
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    2.0 * (j.ur * j.urr / r - 2.0 * j.u * j.urr / r2 + j.ut * j.urt / r3 - 4.0 * j.ur * j.ur / r2
        + 10.0 * j.u * j.ur / r3
        - j.ut * j.ut / r4
        - 8.0 * j.u * j.u / r4)
}

fn dkv_corrector(j: &Jet, r: f64) -> f64 {
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    let lap = j.laplacian(r);
    2.0 * j.ur * lap / r - 10.0 * j.ur * j.ur / r2 - 4.0 * j.u * lap / r2 + 24.0 * j.u * j.ur / r3
        + 4.0 * j.ut * j.urt / r3
        - 16.0 * j.u * j.u / r4
        - 6.0 * j.ut * j.ut / r4
}

fn n_density(j: &Jet, r: f64) -> f64 {
    let r2 = r * r;
    let r4 = r2 * r2;
    (j.ur / r - 2.0 * j.u / r2).powi(2) + j.ut * j.ut / r4 + j.u * j.u / r4
}

fn r_density(j: &Jet, r: f64) -> f64 {
    let r2 = r * r;
    let r4 = r2 * r2;
    2.0 * (j.ut * j.ut / r4 - j.ur * j.ur / r2 + 2.0 * j.u * j.u / r4 - j.u * j.ur / (r2 * r))
}

/// dN/dr from traces of the rescaling u_r(x) = u(rx)/r² and its derivatives
/// at |x| = 1.
fn n_prime_density(j: &Jet, r: f64) -> f64 {
    let v = j.u / (r * r);
    let vr = j.ur / r;
    let vrr = j.urr;
    let vt = j.ut / (r * r);
    let vrt = j.urt / r;
    (2.0 / r)
        * (vr * vrr - 2.0 * v * vrr + vt * vrt - 3.0 * vr * vr + 11.0 * v * vr
            - 2.0 * vt * vt
            - 10.0 * v * v)
}

/// Boundary corrector D(u, r) so that W = r⁻²E(u; D_r) + D(u, r).
pub fn corrector(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    Ok(shell(field, r, h, explicit_corrector))
}

/// The corrector in its divergence form; equal to [`corrector`] after
/// integration by parts in θ.
pub fn corrector_dkv(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    Ok(shell(field, r, h, dkv_corrector))
}

/// W(u, r) with unit area weight.
pub fn weiss_w(field: &DiskField, r: f64) -> Result<f64> {
    weiss_w_lambda(field, r, 1.0)
}

/// W(u, r) with area weight λ; λ = 0 gives the purely biharmonic part W₀.
pub fn weiss_w_lambda(field: &DiskField, r: f64, lambda: f64) -> Result<f64> {
    let d = corrector(field, r)?;
    Ok(energy_e(field, lambda, r) / (r * r) + d)
}

pub fn n_functional(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    Ok(shell(field, r, h, n_density))
}

pub fn r_functional(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    Ok(shell(field, r, h, r_density))
}

/// N'(u, r) by centred differences with a one-shell step.
pub fn n_prime_fd(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    let lo = ring_integral(field, r - h, n_density);
    let hi = ring_integral(field, r + h, n_density);
    Ok((hi - lo) / (2.0 * h))
}

/// N'(u, r) from the closed form in second-derivative traces.
pub fn n_prime_closed(field: &DiskField, r: f64) -> Result<f64> {
    let h = check_radius(field, r)?;
    Ok(shell(field, r, h, n_prime_density))
}

/// All terms of the identity W = E/r² + rN' + R at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeissBreakdown {
    pub r: f64,
    pub w: f64,
    pub n: f64,
    pub r_term: f64,
    pub e_over_r2: f64,
    pub n_prime_fd: f64,
    pub n_prime_closed: f64,
}

impl WeissBreakdown {
    /// |W − (E/r² + rN' + R)| with the differenced N'.
    pub fn identity_residual(&self) -> f64 {
        (self.w - (self.e_over_r2 + self.r * self.n_prime_fd + self.r_term)).abs()
    }
}

pub fn weiss_breakdown(field: &DiskField, r: f64, lambda: f64) -> Result<WeissBreakdown> {
    let e_over_r2 = energy_e(field, lambda, r) / (r * r);
    Ok(WeissBreakdown {
        r,
        w: e_over_r2 + corrector(field, r)?,
        n: n_functional(field, r)?,
        r_term: r_functional(field, r)?,
        e_over_r2,
        n_prime_fd: n_prime_fd(field, r)?,
        n_prime_closed: n_prime_closed(field, r)?,
    })
}

/// Empirical sup of |R|/N over the given radii; radii where N vanishes are skipped.
pub fn kappa_empirical(field: &DiskField, radii: &[f64]) -> Result<f64> {
    let mut k: f64 = 0.0;
    for &r in radii {
        let n = n_functional(field, r)?;
        if n > 1e-14 {
            k = k.max(r_functional(field, r)?.abs() / n);
        }
    }
    Ok(k)
}
