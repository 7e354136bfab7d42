use crate::angular_modes::{AngularFunction, Interval};
use crate::error::Result;
use crate::quad::{simpson_weights, Rule, T_CUTOFF};
use crate::weiss_energy::{CylJet, CylinderField};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    SingleMode,
    Double,
    HigherMode,
    DerivativeRemoval,
    BiharmonicExtension,
    Stitched,
}

pub type JetFn = Arc<dyn Fn(f64, f64) -> CylJet + Send + Sync>;
pub type SupportFn = Arc<dyn Fn(f64) -> Vec<Interval> + Send + Sync>;

/// A competitor U on the half-cylinder given in closed form.
#[derive(Clone)]
pub struct CompetitorField {
    pub construction: Construction,
    pub params: serde_json::Value,
    /// 𝒢(U, 0) as computed by the construction
    pub energy: f64,
    jet: JetFn,
    support: SupportFn,
    /// boundary data (u, v) at t = 0
    pub u: AngularFunction,
    pub v: AngularFunction,
}

impl fmt::Debug for CompetitorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompetitorField")
            .field("construction", &self.construction)
            .field("params", &self.params)
            .field("energy", &self.energy)
            .finish()
    }
}

impl CompetitorField {
    pub fn new(
        construction: Construction,
        params: serde_json::Value,
        energy: f64,
        jet: JetFn,
        support: SupportFn,
        u: AngularFunction,
        v: AngularFunction,
    ) -> Self {
        CompetitorField {
            construction,
            params,
            energy,
            jet,
            support,
            u,
            v,
        }
    }

    pub fn jet(&self, t: f64, theta: f64) -> CylJet {
        (self.jet)(t, theta)
    }

    pub fn support_at(&self, t: f64) -> Vec<Interval> {
        (self.support)(t)
    }

    /// max_θ |U(0,θ) − u(θ)| and max_θ |∂_tU(0,θ) − v(θ)| on `n` samples.
    pub fn boundary_residual(&self, n: usize) -> (f64, f64) {
        let mut r = (0.0f64, 0.0f64);
        for j in 0..n {
            let th = TAU * (j as f64 + 0.5) / n as f64;
            let c = self.jet(0.0, th);
            r.0 = r.0.max((c.v - self.u.value(th)).abs());
            r.1 = r.1.max((c.vt - self.v.value(th)).abs());
        }
        r
    }

    /// 𝒢(U, 0) by direct quadrature: Simpson on every support arc in θ
    /// (`n_arc` intervals each) and composite Gauss-Legendre in t.
    pub fn energy_by_quadrature(&self, n_arc: usize) -> f64 {
        let rule = Rule::composite(0.0, T_CUTOFF, 160, 8, &[1.0, 2.0]);
        let ring = |t: f64| {
            let mut s = 0.0;
            for iv in self.support_at(t) {
                if iv.len <= 0.0 {
                    continue;
                }
                let n = n_arc + n_arc % 2;
                let h = iv.len / n as f64;
                let w = simpson_weights(n, h);
                for (k, wk) in w.iter().enumerate() {
                    s += wk * self.jet(t, iv.start + k as f64 * h).g_density();
                }
                s += iv.len;
            }
            s
        };
        rule.integrate(|t| (-2.0 * t).exp() * ring(t)) + 0.5 * ring(T_CUTOFF) * (-2.0 * T_CUTOFF).exp()
    }

    /// Tabulates U on `t_grid` × a uniform θ grid.
    pub fn tabulate(&self, t_grid: &[f64], n_theta: usize) -> Result<CylinderField> {
        let mut jets = Vec::with_capacity(t_grid.len() * n_theta);
        let mut supp = Vec::with_capacity(jets.capacity());
        for &t in t_grid {
            let arcs = self.support_at(t);
            for j in 0..n_theta {
                let th = TAU * j as f64 / n_theta as f64;
                jets.push(self.jet(t, th));
                supp.push(arcs.iter().any(|iv| iv.contains_open(th)));
            }
        }
        CylinderField::from_jets(t_grid.to_vec(), n_theta, jets, supp)
    }
}
