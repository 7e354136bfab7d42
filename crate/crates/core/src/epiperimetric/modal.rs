use super::competitor::{CompetitorField, Construction};
use super::profile::DecayProfile;
use super::qform::profile_rule;
use crate::angular_modes::{AngularFunction, BucklingMode, Interval};
use crate::error::Result;
use crate::quad::simpson_weights;
use crate::weiss_energy::CylJet;
use std::sync::Arc;

/// Buckling modes b_{1..N, ω} of one arc with their L² Gram matrix.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub omega: f64,
    pub modes: Vec<BucklingMode>,
    /// row-major ⟨b_n, b_m⟩
    pub gram: Vec<f64>,
}

impl ModeSet {
    pub fn new(omega: f64, n: usize) -> Result<Self> {
        let modes: Vec<BucklingMode> = (1..=n)
            .map(|k| BucklingMode::with_grid(k, omega, 64))
            .collect::<Result<_>>()?;
        let nq = 4096;
        let h = omega / nq as f64;
        let w = simpson_weights(nq, h);
        let vals: Vec<Vec<f64>> = modes
            .iter()
            .map(|m| (0..=nq).map(|k| m.value(k as f64 * h)).collect())
            .collect();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..=nq).map(|k| w[k] * vals[i][k] * vals[j][k]).sum();
                gram[i * n + j] = s;
                gram[j * n + i] = s;
            }
        }
        Ok(ModeSet { omega, modes, gram })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mu(&self, i: usize) -> f64 {
        self.modes[i].mu
    }
}

/// 𝒢(U, 0) for U(t, θ) = Σ_n g_n(t) b_n(θ) on a fixed arc:
/// ∫e^{−2t}[ω·1_{t<area_end} + Σ I_nm g_n''g_m'' + 2Σ g_n'² + Σ(μ_n − 4)g_n²].
///
/// Counting the whole arc as support while U ≠ 0 makes this an upper bound.
pub fn modal_energy(set: &ModeSet, g: &[DecayProfile], area_end: f64) -> f64 {
    let n = g.len().min(set.len());
    let mut bp: Vec<f64> = g.iter().flat_map(|p| p.breakpoints.iter().copied()).collect();
    bp.push(area_end);
    let settle = g.iter().map(|p| p.settle).filter(|s| s.is_finite()).fold(0.0, f64::max);
    let (rule, end) = profile_rule(&bp, settle);
    let mut s = 0.0;
    let mut d2 = vec![0.0; n];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut r = 0.0;
        for k in 0..n {
            let d = g[k].eval(t);
            d2[k] = d[2];
            r += 2.0 * d[1] * d[1] + (set.mu(k) - 4.0) * d[0] * d[0];
        }
        for i in 0..n {
            if d2[i] == 0.0 {
                continue;
            }
            let row = &set.gram[i * set.len()..];
            let mut q = 0.0;
            for j in 0..n {
                q += row[j] * d2[j];
            }
            r += d2[i] * q;
        }
        s += w * (-2.0 * t).exp() * r;
    }
    let tail: f64 = (0..n).map(|k| (set.mu(k) - 4.0) * g[k].value(end).powi(2)).sum();
    s += 0.5 * tail * (-2.0 * end).exp();
    let area = if area_end.is_finite() {
        0.5 * (1.0 - (-2.0 * area_end).exp())
    } else {
        0.5
    };
    s + set.omega * area
}

/// The closed-form field Σ g_n(t) b_n(θ − offset).
#[allow(clippy::too_many_arguments)]
pub fn modal_field(
    set: &ModeSet,
    offset: f64,
    g: Vec<DecayProfile>,
    area_end: f64,
    construction: Construction,
    params: serde_json::Value,
    u: AngularFunction,
    v: AngularFunction,
) -> CompetitorField {
    let energy = modal_energy(set, &g, area_end);
    let modes = set.modes.clone();
    let omega = set.omega;
    let jet = move |t: f64, th: f64| {
        let x = (th - offset).rem_euclid(std::f64::consts::TAU);
        let mut c = CylJet::default();
        if x > omega {
            return c;
        }
        for (m, p) in modes.iter().zip(&g) {
            let f = p.eval(t);
            if f == [0.0; 3] {
                continue;
            }
            let b = m.derivs(x);
            c.v += f[0] * b[0];
            c.vt += f[1] * b[0];
            c.vth += f[0] * b[1];
            c.vtt += f[2] * b[0];
            c.vtth += f[1] * b[1];
            c.vthth += f[0] * b[2];
        }
        c
    };
    let support = move |t: f64| {
        if t < area_end {
            vec![Interval::new(offset, omega)]
        } else {
            vec![]
        }
    };
    CompetitorField::new(construction, params, energy, Arc::new(jet), Arc::new(support), u, v)
}
