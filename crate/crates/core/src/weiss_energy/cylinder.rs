use super::field::{DiskField, Jet};
use crate::error::{Error, Result};
use crate::quad::{exp2_linear, lagrange4, stencil4_start, Rule};
use std::f64::consts::TAU;

/// Largest admitted weight e^{−2T} of the untabulated tail.
pub const TAIL_TOL: f64 = 1e-5;

/// Jet of v(t, θ) on the half-cylinder.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CylJet {
    pub v: f64,
    pub vt: f64,
    pub vth: f64,
    pub vtt: f64,
    pub vtth: f64,
    pub vthth: f64,
}

impl CylJet {
    /// v(t, θ) = e^{2t} u(e^{−t}, θ) from the disk jet at r = e^{−t}.
    pub fn from_disk(j: &Jet, t: f64) -> Self {
        let e2 = (2.0 * t).exp();
        let e1 = t.exp();
        CylJet {
            v: e2 * j.u,
            vt: 2.0 * e2 * j.u - e1 * j.ur,
            vth: e2 * j.ut,
            vtt: 4.0 * e2 * j.u - 3.0 * e1 * j.ur + j.urr,
            vtth: 2.0 * e2 * j.ut - e1 * j.urt,
            vthth: e2 * j.utt,
        }
    }

    /// Integrand of 𝒢 without the weight and the area term.
    pub fn g_density(&self) -> f64 {
        self.vtt * self.vtt + 2.0 * self.vtth * self.vtth + self.vthth * self.vthth
            - 4.0 * self.vth * self.vth
    }

    fn axpy(&mut self, w: f64, o: &CylJet) {
        self.v += w * o.v;
        self.vt += w * o.vt;
        self.vth += w * o.vth;
        self.vtt += w * o.vtt;
        self.vtth += w * o.vtth;
        self.vthth += w * o.vthth;
    }
}

/// v(t, θ) = e^{2t}u(e^{−t+iθ}) tabulated on t-nodes (increasing) × a
/// uniform θ grid.
#[derive(Debug, Clone)]
pub struct CylinderField {
    pub t_grid: Vec<f64>,
    pub n_theta: usize,
    jets: Vec<CylJet>,
    support: Vec<bool>,
    pub growth_constant: f64,
}

/// Transfers a disk field to the cylinder, keeping t ≤ t_max.
pub fn to_cylinder(field: &DiskField, t_max: f64) -> Result<CylinderField> {
    if !field.center_flat() {
        return Err(Error::Precondition("field is not flat at the origin".into()));
    }
    let g = field.grid();
    let nt = g.n_theta;
    let mut t_grid = Vec::new();
    let mut jets = Vec::new();
    let mut support = Vec::new();
    for i in (0..g.n_r()).rev() {
        let t = -g.radii[i].ln();
        if t > t_max {
            break;
        }
        t_grid.push(t);
        for j in 0..nt {
            jets.push(CylJet::from_disk(field.jet(i, j), t));
            support.push(field.support_mask()[i * nt + j]);
        }
    }
    if t_grid.len() < 4 {
        return Err(Error::Resolution("fewer than four t-nodes on the cylinder".into()));
    }
    let t_end = *t_grid.last().unwrap();
    if (-2.0 * t_end).exp() > TAIL_TOL {
        return Err(Error::Truncation(format!(
            "cylinder ends at t = {t_end}; tail weight {} exceeds {TAIL_TOL}",
            (-2.0 * t_end).exp()
        )));
    }
    let mut cyl = CylinderField {
        t_grid,
        n_theta: nt,
        jets,
        support,
        growth_constant: 0.0,
    };
    cyl.growth_constant = cyl.estimate_growth();
    Ok(cyl)
}

impl CylinderField {
    /// Tabulates a closed-form field; `jets` and `support` are row-major in (t, θ).
    pub fn from_jets(t_grid: Vec<f64>, n_theta: usize, jets: Vec<CylJet>, support: Vec<bool>) -> Result<Self> {
        if t_grid.len() < 4 || jets.len() != t_grid.len() * n_theta || support.len() != jets.len() {
            return Err(Error::Resolution("inconsistent cylinder table".into()));
        }
        let mut cyl = CylinderField {
            t_grid,
            n_theta,
            jets,
            support,
            growth_constant: 0.0,
        };
        cyl.growth_constant = cyl.estimate_growth();
        Ok(cyl)
    }

    pub fn jet(&self, k: usize, j: usize) -> &CylJet {
        &self.jets[k * self.n_theta + j]
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_grid[0], *self.t_grid.last().unwrap())
    }

    fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Jets on the circle {t} × S¹, cubic in t.
    pub fn ring_at(&self, t: f64) -> Vec<CylJet> {
        let tg = &self.t_grid;
        let s = stencil4_start(tg, t);
        let w = lagrange4([tg[s], tg[s + 1], tg[s + 2], tg[s + 3]], t);
        (0..self.n_theta)
            .map(|j| {
                let mut acc = CylJet::default();
                for k in 0..4 {
                    acc.axpy(w[k], self.jet(s + k, j));
                }
                acc
            })
            .collect()
    }

    /// Per-node ring integrals ∫(g_density + χ) dθ.
    fn ring_density(&self) -> Vec<f64> {
        let nt = self.n_theta;
        let dt = self.dtheta();
        (0..self.t_grid.len())
            .map(|k| {
                (0..nt)
                    .map(|j| {
                        let c = if self.support[k * nt + j] { 1.0 } else { 0.0 };
                        self.jet(k, j).g_density() + c
                    })
                    .sum::<f64>()
                    * dt
            })
            .collect()
    }

    /// sup over unit slabs [k, k+1] of ‖v‖_{H²(slab)}/(k+1).
    fn estimate_growth(&self) -> f64 {
        let nt = self.n_theta;
        let dt = self.dtheta();
        let (t0, t1) = self.t_range();
        let dens: Vec<f64> = (0..self.t_grid.len())
            .map(|k| {
                (0..nt)
                    .map(|j| {
                        let c = self.jet(k, j);
                        c.v * c.v
                            + c.vt * c.vt
                            + c.vth * c.vth
                            + c.vtt * c.vtt
                            + 2.0 * c.vtth * c.vtth
                            + c.vthth * c.vthth
                    })
                    .sum::<f64>()
                    * dt
            })
            .collect();
        let mut best: f64 = 0.0;
        let mut k = t0.floor().max(0.0);
        while k < t1 {
            let mut s = 0.0;
            for w in 0..self.t_grid.len() - 1 {
                let (a, b) = (self.t_grid[w].max(k), self.t_grid[w + 1].min(k + 1.0));
                if b > a {
                    s += 0.5 * (b - a) * (dens[w] + dens[w + 1]);
                }
            }
            best = best.max(s.sqrt() / (k + 1.0));
            k += 1.0;
        }
        best
    }
}

/// ∫_τ^∞ e^{−2(t−τ)}A(t) dt for A piecewise linear on `nodes`, held at its
/// last value beyond the table.
fn exp_weighted(nodes: &[f64], vals: &[f64], tau: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..nodes.len() - 1 {
        let (a, b) = (nodes[k], nodes[k + 1]);
        if b <= tau {
            continue;
        }
        let slope = (vals[k + 1] - vals[k]) / (b - a);
        let a0 = a.max(tau);
        let alpha = vals[k] + slope * (tau - a);
        s += exp2_linear(a0 - tau, b - tau, alpha, slope);
    }
    let last = *nodes.last().unwrap();
    s + 0.5 * vals.last().unwrap() * (-2.0 * (last - tau)).exp()
}

fn check_tau(v: &CylinderField, tau: f64) -> Result<()> {
    let (t0, t1) = v.t_range();
    if tau < t0 - 1e-12 || tau > t1 {
        return Err(Error::Domain(format!("τ = {tau} outside the tabulated range [{t0}, {t1}]")));
    }
    Ok(())
}

/// 𝒢(v, τ) = ∫_{Cy_τ} e^{−2(t−τ)}(v_tt² + 2v_tθ² + v_θθ² − 4v_θ² + χ).
pub fn cylinder_g(v: &CylinderField, tau: f64) -> Result<f64> {
    check_tau(v, tau)?;
    Ok(exp_weighted(&v.t_grid, &v.ring_density(), tau))
}

/// 𝒲(v, τ) = 𝒢(v, τ) + 2∫_{{τ}×S¹} v_t(v_t − v_tt).
pub fn cylinder_w(v: &CylinderField, tau: f64) -> Result<f64> {
    let g = cylinder_g(v, tau)?;
    let dt = v.dtheta();
    let b: f64 = v.ring_at(tau).iter().map(|c| c.vt * (c.vt - c.vtt)).sum::<f64>() * dt;
    Ok(g + 2.0 * b)
}

/// −4∫_{{τ}×S¹}(v_tt² + v_tθ²), the derivative of 𝒲 for biharmonic v.
pub fn cylinder_w_slope(v: &CylinderField, tau: f64) -> Result<f64> {
    check_tau(v, tau)?;
    let dt = v.dtheta();
    Ok(-4.0 * v.ring_at(tau).iter().map(|c| c.vtt * c.vtt + c.vtth * c.vtth).sum::<f64>() * dt)
}

/// 𝒢 of a closed-form cylinder field that is t-independent beyond `t_settle`.
/// `chi(t, θ)` is the support indicator.
pub fn cylinder_g_closed(
    jet: impl Fn(f64, f64) -> CylJet,
    chi: impl Fn(f64, f64) -> f64,
    n_theta: usize,
    tau: f64,
    t_settle: f64,
    breakpoints: &[f64],
) -> f64 {
    let dt = TAU / n_theta as f64;
    let ring = |t: f64| {
        (0..n_theta)
            .map(|j| {
                let th = dt * j as f64;
                jet(t, th).g_density() + chi(t, th)
            })
            .sum::<f64>()
            * dt
    };
    let mut s = 0.0;
    if t_settle > tau {
        let panels = ((t_settle - tau) * 32.0).ceil().max(4.0) as usize;
        let rule = Rule::composite(tau, t_settle, panels, 8, breakpoints);
        s += rule.integrate(|t| (-2.0 * (t - tau)).exp() * ring(t));
    }
    let t_end = t_settle.max(tau);
    s + 0.5 * ring(t_end) * (-2.0 * (t_end - tau)).exp()
}
