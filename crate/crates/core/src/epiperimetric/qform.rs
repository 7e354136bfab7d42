use super::profile::DecayProfile;
use crate::angular_modes::{base_eigenvalue, BucklingMode};
use crate::error::{Error, Result};
use crate::quad::{Rule, T_CUTOFF};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Weighted moments ∫e^{−2t}f''², ∫e^{−2t}f'², ∫e^{−2t}f² of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub d2: f64,
    pub d1: f64,
    pub d0: f64,
}

/// Composite rule on [0, L] with L = max(settle, 40) and ~13 panels per unit.
pub(crate) fn profile_rule(breakpoints: &[f64], settle: f64) -> (Rule, f64) {
    let end = if settle.is_finite() { settle.max(T_CUTOFF) } else { T_CUTOFF };
    let panels = ((512.0 * end / T_CUTOFF).ceil() as usize).max(512);
    (Rule::composite(0.0, end, panels, 8, breakpoints), end)
}

pub fn moments(f: &DecayProfile) -> Moments {
    let (rule, end) = profile_rule(&f.breakpoints, f.settle);
    let mut m = Moments { d2: 0.0, d1: 0.0, d0: 0.0 };
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let d = f.eval(t);
        let e = w * (-2.0 * t).exp();
        m.d2 += e * d[2] * d[2];
        m.d1 += e * d[1] * d[1];
        m.d0 += e * d[0] * d[0];
    }
    // f is constant (or negligible) past `end`.
    let fe = f.value(end);
    m.d0 += 0.5 * fe * fe * (-2.0 * end).exp();
    m
}

impl Moments {
    pub fn q(&self, lambda: f64, c0: f64) -> f64 {
        c0 * self.d2 + 2.0 * self.d1 + lambda * self.d0
    }
}

/// Q_λ(f) = ∫e^{−2t}(C₀f''² + 2f'² + λf²).
pub fn q_form(f: &DecayProfile, lambda: f64, c0: f64) -> f64 {
    moments(f).q(lambda, c0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct C0Report {
    /// partial sup plus the asymptotic tail estimate
    pub c0: f64,
    pub partial: f64,
    pub argmax_omega: f64,
    pub n_max: usize,
    /// Σ_{n>N} ‖b_{n,ω}‖² from the exact ratios μ‖b‖² ∈ {3, 5/3}
    pub tail_estimate: f64,
    /// (ω/π)² Σ_{n>N} 8/μ_n ≤ (ω/π)²·8/N
    pub tail_bound: f64,
    /// C₀ + tail_bound, an upper bound for the true supremum
    pub c0_upper: f64,
}

/// sup over the ω grid of Σ_n ‖b_{n,ω}‖².
///
/// ‖b_{n,ω}‖² = (ω/π)²‖b_{n,π}‖², so the supremum sits at the largest ω;
/// the grid is still swept to report the maximiser.
pub fn compute_c0(omega_grid: &[f64], n_max: usize) -> Result<C0Report> {
    if n_max < 32 {
        return Err(Error::Domain(format!("n_max = {n_max} is below 32")));
    }
    if omega_grid.is_empty() {
        return Err(Error::Domain("empty ω grid".into()));
    }
    let mut base = 0.0;
    for n in 1..=n_max {
        base += BucklingMode::with_grid(n, PI, 64)?.l2_norm_sq();
    }
    let tail = tail_sum(n_max)?;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &w in omega_grid {
        if !(w > 0.0 && w <= 2.0 * PI + 1e-12) {
            return Err(Error::Domain(format!("ω = {w} outside (0, 2π]")));
        }
        let s = (w / PI).powi(2) * base;
        if s > best.0 {
            best = (s, w);
        }
    }
    let scale = (best.1 / PI).powi(2);
    let tail_estimate = scale * tail;
    let tail_bound = scale * 8.0 * tail_inv_sq(n_max);
    Ok(C0Report {
        c0: best.0 + tail_estimate,
        partial: best.0,
        argmax_omega: best.1,
        n_max,
        tail_estimate,
        tail_bound,
        c0_upper: best.0 + tail_bound,
    })
}

/// Σ_{n>N} 1/n², using μ_n ≥ n².
fn tail_inv_sq(n: usize) -> f64 {
    let m = 100_000usize;
    let s: f64 = (n + 1..=m).map(|k| 1.0 / (k * k) as f64).sum();
    s + 1.0 / m as f64
}

/// Σ_{n>N} ‖b_{n,π}‖² with μ‖b‖² = 3 (odd n) and 5/3 (even n).
fn tail_sum(n: usize) -> Result<f64> {
    let m = 4096usize.max(n + 2);
    let mut s = 0.0;
    for k in n + 1..=m {
        let c = if k % 2 == 1 { 3.0 } else { 5.0 / 3.0 };
        s += c / base_eigenvalue(k)?;
    }
    // μ_k ≈ (k+1)² beyond the table
    Ok(s + (3.0 + 5.0 / 3.0) / 2.0 / (m + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile() {
        for l in [-8.0, 1.0, 100.0] {
            assert!((q_form(&DecayProfile::constant(1.0), l, 3.0) - l / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_norm_ratios() {
        for n in 1..=12 {
            let m = BucklingMode::new(n, PI).unwrap();
            let c = if n % 2 == 1 { 3.0 } else { 5.0 / 3.0 };
            assert!((m.l2_norm_sq() * m.mu - c).abs() < 1e-10, "n = {n}");
        }
    }
}
