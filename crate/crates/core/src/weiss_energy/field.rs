use crate::angular_modes::HomogeneousProfile;
use crate::error::{Error, Result};
use crate::quad::{lagrange4, stencil4_start};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Default support threshold τ_supp for sampled fields.
pub const TAU_SUPP: f64 = 10.0;

/// Value and derivatives up to order two in polar coordinates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub u: f64,
    pub ur: f64,
    pub ut: f64,
    pub urr: f64,
    pub urt: f64,
    pub utt: f64,
}

impl Jet {
    pub fn from_array(a: [f64; 6]) -> Self {
        Jet {
            u: a[0],
            ur: a[1],
            ut: a[2],
            urr: a[3],
            urt: a[4],
            utt: a[5],
        }
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        self.urr + self.ur / r + self.utt / (r * r)
    }

    pub fn grad_norm(&self, r: f64) -> f64 {
        (self.ur * self.ur + (self.ut / r).powi(2)).sqrt()
    }

    fn axpy(&mut self, w: f64, o: &Jet) {
        self.u += w * o.u;
        self.ur += w * o.ur;
        self.ut += w * o.ut;
        self.urr += w * o.urr;
        self.urt += w * o.urt;
        self.utt += w * o.utt;
    }
}

/// Polar lattice: node radii (strictly increasing, positive) times a
/// uniform periodic angular grid θ_j = 2πj/n_θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    pub r_max: f64,
}

impl PolarGrid {
    /// Cell-centred radii (i + ½)/n_r on [0, 1].
    pub fn uniform(n_r: usize, n_theta: usize) -> Self {
        Self::with_radius(n_r, n_theta, 1.0)
    }

    pub fn with_radius(n_r: usize, n_theta: usize, r_max: f64) -> Self {
        let h = r_max / n_r as f64;
        PolarGrid {
            radii: (0..n_r).map(|i| (i as f64 + 0.5) * h).collect(),
            n_theta,
            r_max,
        }
    }

    /// `n_log` geometric shells on [r_min, 0.1] followed by `n_r` uniform
    /// shells on (0.1, 1].
    pub fn refined(n_r: usize, n_theta: usize, n_log: usize, r_min: f64) -> Self {
        let mut radii = Vec::with_capacity(n_r + n_log);
        let q = (0.1 / r_min).powf(1.0 / n_log as f64);
        for k in 0..n_log {
            radii.push(r_min * q.powi(k as i32));
        }
        let h = 0.9 / n_r as f64;
        for i in 0..n_r {
            radii.push(0.1 + (i as f64 + 0.5) * h);
        }
        PolarGrid {
            radii,
            n_theta,
            r_max: 1.0,
        }
    }

    pub fn n_r(&self) -> usize {
        self.radii.len()
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_theta as f64
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Local radial spacing at node i.
    pub fn spacing(&self, i: usize) -> f64 {
        let n = self.radii.len();
        if n == 1 {
            return self.r_max;
        }
        if i + 1 < n {
            self.radii[i + 1] - self.radii[i]
        } else {
            self.radii[i] - self.radii[i - 1]
        }
    }

    /// Radial spacing near an arbitrary radius.
    pub fn spacing_at(&self, r: f64) -> f64 {
        let k = self.radii.partition_point(|&p| p < r).min(self.radii.len() - 1);
        self.spacing(k.saturating_sub(1).max(0))
            .max(self.spacing(k))
    }

    fn validate(&self) -> Result<()> {
        if self.radii.len() < 4 || self.n_theta < 8 {
            return Err(Error::Domain("polar grid needs ≥4 radii and ≥8 angles".into()));
        }
        if self.radii[0] <= 0.0 || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("radii must be positive and increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SupportRule {
    /// Nonzero test at round-off level; for fields known in closed form.
    Exact,
    /// |u| > τh² or |∇u| > τh.
    Threshold { tau: f64 },
}

/// Sampled field on a polar grid with second-order jets and support mask.
#[derive(Debug, Clone)]
pub struct DiskField {
    grid: PolarGrid,
    jets: Vec<Jet>,
    support: Vec<bool>,
    center_flat: bool,
    rule: SupportRule,
}

impl DiskField {
    /// Field from a closed-form jet (r, θ) ↦ (u, u_r, u_θ, u_rr, u_rθ, u_θθ).
    pub fn from_jet(grid: PolarGrid, f: impl Fn(f64, f64) -> [f64; 6]) -> Result<Self> {
        grid.validate()?;
        let nt = grid.n_theta;
        let mut jets = Vec::with_capacity(grid.len());
        for &r in &grid.radii {
            for j in 0..nt {
                jets.push(Jet::from_array(f(r, grid.theta(j))));
            }
        }
        let scale = jets.iter().map(|j| j.u.abs()).fold(1.0, f64::max);
        let c0 = f(0.0, 0.0);
        let c1 = f(0.0, 0.5 * PI);
        let grad0 = (c0[1] * c0[1] + c1[1] * c1[1]).sqrt();
        let center_flat = c0[0].abs() <= 1e-12 * scale && grad0 <= 1e-12 * scale;
        let mut field = DiskField {
            grid,
            jets,
            support: Vec::new(),
            center_flat,
            rule: SupportRule::Exact,
        };
        field.recompute_support();
        Ok(field)
    }

    pub fn from_profile(grid: PolarGrid, p: &HomogeneousProfile) -> Result<Self> {
        DiskField::from_jet(grid, |r, t| p.jet(r, t))
    }

    /// Field from node values; derivatives by second-order differences
    /// (non-uniform three-point in r, centred periodic in θ).
    pub fn from_samples(grid: PolarGrid, values: &[f64], tau_supp: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let (nr, nt) = (grid.n_r(), grid.n_theta);
        let dt = grid.dtheta();
        let at = |i: usize, j: usize| values[i * nt + (j % nt)];
        let mut jets = vec![Jet::default(); grid.len()];
        let rr = &grid.radii;
        // three-point weights for first and second derivatives at x0 from (xa, xb, xc)
        let weights = |xs: [f64; 3], x0: f64| {
            let mut d1 = [0.0; 3];
            let mut d2 = [0.0; 3];
            for k in 0..3 {
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                let den = (xs[k] - xs[a]) * (xs[k] - xs[b]);
                d1[k] = ((x0 - xs[a]) + (x0 - xs[b])) / den;
                d2[k] = 2.0 / den;
            }
            (d1, d2)
        };
        for i in 0..nr {
            let idx = if i == 0 {
                [0, 1, 2]
            } else if i + 1 == nr {
                [nr - 3, nr - 2, nr - 1]
            } else {
                [i - 1, i, i + 1]
            };
            let (w1, w2) = weights([rr[idx[0]], rr[idx[1]], rr[idx[2]]], rr[i]);
            for j in 0..nt {
                let jp = j + 1;
                let jm = j + nt - 1;
                let u = at(i, j);
                let ut = |ii: usize| (at(ii, jp) - at(ii, jm)) / (2.0 * dt);
                let mut jet = Jet {
                    u,
                    utt: (at(i, jp) - 2.0 * u + at(i, jm)) / (dt * dt),
                    ut: ut(i),
                    ..Jet::default()
                };
                for k in 0..3 {
                    jet.ur += w1[k] * at(idx[k], j);
                    jet.urr += w2[k] * at(idx[k], j);
                    jet.urt += w1[k] * ut(idx[k]);
                }
                jets[i * nt + j] = jet;
            }
        }
        let mut field = DiskField {
            grid,
            jets,
            support: Vec::new(),
            center_flat: false,
            rule: SupportRule::Threshold { tau: tau_supp },
        };
        field.recompute_support();
        field.center_flat = field.estimate_center_flat();
        Ok(field)
    }

    fn recompute_support(&mut self) {
        let nt = self.grid.n_theta;
        let scale = self.jets.iter().map(|j| j.u.abs()).fold(0.0, f64::max).max(1e-300);
        self.support = self
            .jets
            .iter()
            .enumerate()
            .map(|(k, jet)| {
                let i = k / nt;
                let r = self.grid.radii[i];
                match self.rule {
                    SupportRule::Exact => {
                        let eps = 1e-14 * scale;
                        jet.u.abs() > eps || jet.grad_norm(r) > eps
                    }
                    SupportRule::Threshold { tau } => {
                        let h = self.grid.spacing(i);
                        jet.u.abs() > tau * h * h || jet.grad_norm(r) > tau * h
                    }
                }
            })
            .collect();
    }

    /// u(0) and ∇u(0) extrapolated from the innermost ring, compared with
    /// the size the innermost ring allows for a C^{1,1} field.
    fn estimate_center_flat(&self) -> bool {
        let nt = self.grid.n_theta;
        let r0 = self.grid.radii[0];
        let ring = &self.jets[..nt];
        let mean_u = ring.iter().map(|j| j.u).sum::<f64>() / nt as f64;
        let mean_lap = ring.iter().map(|j| j.laplacian(r0)).sum::<f64>() / nt as f64;
        let u0 = mean_u - 0.25 * r0 * r0 * mean_lap;
        let (mut gx, mut gy) = (0.0, 0.0);
        for (j, jet) in ring.iter().enumerate() {
            let t = self.grid.theta(j);
            gx += jet.u * t.cos();
            gy += jet.u * t.sin();
        }
        let g0 = 2.0 * (gx * gx + gy * gy).sqrt() / (nt as f64 * r0);
        let m = self.jets[..3 * nt]
            .iter()
            .enumerate()
            .map(|(k, j)| {
                let r = self.grid.radii[k / nt];
                j.urr.abs() + (j.utt / (r * r)).abs() + (j.ur / r).abs()
            })
            .fold(0.0, f64::max);
        let m = 2.0 * m.max(1e-300);
        u0.abs() <= m * r0 * r0 && g0 <= m * r0
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub fn jet(&self, i: usize, j: usize) -> &Jet {
        &self.jets[i * self.grid.n_theta + j]
    }

    pub fn values(&self) -> Vec<f64> {
        self.jets.iter().map(|j| j.u).collect()
    }

    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        self.jet(i, j).laplacian(self.grid.radii[i])
    }

    pub fn support_mask(&self) -> &[bool] {
        &self.support
    }

    pub fn support_rule(&self) -> SupportRule {
        self.rule
    }

    pub fn center_flat(&self) -> bool {
        self.center_flat
    }

    /// Overrides the centre test, e.g. when the field is known to vanish
    /// near the origin.
    pub fn set_center_flat(&mut self, flat: bool) {
        self.center_flat = flat;
    }

    /// Replaces the support mask, e.g. by one carried over from a solver.
    pub fn set_support(&mut self, mask: Vec<bool>) -> Result<()> {
        if mask.len() != self.jets.len() {
            return Err(Error::Domain(format!(
                "mask has {} entries, field has {}",
                mask.len(),
                self.jets.len()
            )));
        }
        self.support = mask;
        Ok(())
    }

    /// Measure of the support mask (trapezoid in θ, piecewise linear in r).
    pub fn support_area(&self, r: f64) -> f64 {
        let nt = self.grid.n_theta;
        let dt = self.grid.dtheta();
        let ring: Vec<f64> = (0..self.grid.n_r())
            .map(|i| self.support[i * nt..(i + 1) * nt].iter().filter(|&&s| s).count() as f64 * dt)
            .collect();
        crate::quad::radial_moment(&self.grid.radii, &ring, r)
    }

    /// Jets on the ring of radius r, by cubic interpolation across radii.
    pub fn ring_at(&self, r: f64) -> Vec<Jet> {
        let nt = self.grid.n_theta;
        let rr = &self.grid.radii;
        let s = stencil4_start(rr, r);
        let w = lagrange4([rr[s], rr[s + 1], rr[s + 2], rr[s + 3]], r);
        (0..nt)
            .map(|j| {
                let mut acc = Jet::default();
                for k in 0..4 {
                    acc.axpy(w[k], &self.jets[(s + k) * nt + j]);
                }
                acc
            })
            .collect()
    }

    /// Value at (r, θ): cubic in r (continued through the origin) times
    /// cubic periodic in θ.
    pub fn interpolate(&self, r: f64, theta: f64) -> f64 {
        let nt = self.grid.n_theta;
        let rr = &self.grid.radii;
        let ang = |i: usize, t: f64| {
            let x = t.rem_euclid(TAU) / self.grid.dtheta();
            let j0 = x.floor() as isize - 1;
            let w = lagrange4([-1.0, 0.0, 1.0, 2.0], x - x.floor());
            (0..4)
                .map(|k| {
                    let j = (j0 + k as isize).rem_euclid(nt as isize) as usize;
                    w[k] * self.jets[i * nt + j].u
                })
                .sum::<f64>()
        };
        if r < rr[1] {
            // nodes −r₁, −r₀, r₀, r₁ with the mirrored rings read at θ + π
            let xs = [-rr[1], -rr[0], rr[0], rr[1]];
            let w = lagrange4(xs, r);
            return w[0] * ang(1, theta + PI)
                + w[1] * ang(0, theta + PI)
                + w[2] * ang(0, theta)
                + w[3] * ang(1, theta);
        }
        let s = stencil4_start(rr, r);
        let w = lagrange4([rr[s], rr[s + 1], rr[s + 2], rr[s + 3]], r);
        (0..4).map(|k| w[k] * ang(s + k, theta)).sum()
    }

    /// Value at the Cartesian point (x, y).
    pub fn sample_xy(&self, x: f64, y: f64) -> f64 {
        self.interpolate(x.hypot(y), y.atan2(x))
    }

    /// The rescaling z ↦ u(p + s z)/s² resampled on `grid`.
    pub fn rescale(&self, p: (f64, f64), s: f64, grid: PolarGrid) -> Result<DiskField> {
        let reach = (p.0 * p.0 + p.1 * p.1).sqrt() + s * grid.r_max;
        if reach > self.grid.r_max + 1e-12 {
            return Err(Error::Precondition(format!(
                "disk of radius {} around ({}, {}) leaves the grid",
                s * grid.r_max,
                p.0,
                p.1
            )));
        }
        let h_new = grid.spacing(0).min(grid.radii[0]) * s;
        if h_new < 0.25 * self.grid.spacing_at(s) {
            return Err(Error::Resolution(format!(
                "rescaling radius {s} is below the source resolution"
            )));
        }
        let mut vals = Vec::with_capacity(grid.len());
        for &r in &grid.radii {
            for j in 0..grid.n_theta {
                let t = grid.theta(j);
                let (x, y) = (p.0 + s * r * t.cos(), p.1 + s * r * t.sin());
                vals.push(self.sample_xy(x, y) / (s * s));
            }
        }
        let tau = match self.rule {
            SupportRule::Threshold { tau } => tau,
            SupportRule::Exact => TAU_SUPP,
        };
        let mut out = DiskField::from_samples(grid, &vals, tau)?;
        // the support of u_{p,s} at z is the support of u at p + s z
        match self.rule {
            SupportRule::Exact => {
                out.rule = SupportRule::Exact;
                out.recompute_support();
            }
            SupportRule::Threshold { .. } => {
                let nt = out.grid.n_theta;
                let mut mask = Vec::with_capacity(out.jets.len());
                for &r in &out.grid.radii {
                    for j in 0..nt {
                        let t = out.grid.theta(j);
                        mask.push(self.support_near(p.0 + s * r * t.cos(), p.1 + s * r * t.sin()));
                    }
                }
                out.support = mask;
            }
        }
        if p == (0.0, 0.0) && self.center_flat {
            out.center_flat = true;
        }
        Ok(out)
    }

    /// Support flag of the node nearest to (x, y).
    pub fn support_near(&self, x: f64, y: f64) -> bool {
        let r = x.hypot(y);
        let rr = &self.grid.radii;
        let k = rr.partition_point(|&q| q < r).min(rr.len() - 1);
        let i = if k > 0 && (r - rr[k - 1]) < (rr[k] - r) { k - 1 } else { k };
        let nt = self.grid.n_theta;
        let j = (y.atan2(x).rem_euclid(TAU) / self.grid.dtheta()).round() as usize % nt;
        self.support[i * nt + j]
    }
}
