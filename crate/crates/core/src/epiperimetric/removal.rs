use super::competitor::{CompetitorField, Construction};
use super::modal::{modal_field, ModeSet};
use super::profile::{removal_profile, smoothstep, DecayProfile};
use crate::angular_modes::{decompose_h1, decompose_with, mode_index, t1, AngularFunction, Interval, MAX_MODE};
use crate::error::{Error, Result};
use crate::quad::Rule;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

const BUMP_CENTERS: [f64; 3] = [0.25, 0.5, 0.75];
const BUMP_HALF_WIDTH: f64 = 0.125;
/// Openings below this reuse χ_{ω_min}.
pub const CHI_OMEGA_MIN: f64 = 0.5 * PI;

/// (1 − ((t − c)/w)²)³ on |t − c| < w.
fn bump(t: f64, c: f64) -> [f64; 3] {
    let w = BUMP_HALF_WIDTH;
    let z = (t - c) / w;
    if z.abs() >= 1.0 {
        return [0.0; 3];
    }
    let q = 1.0 - z * z;
    let q1 = -2.0 * z / w;
    let q2 = -2.0 / (w * w);
    [q * q * q, 3.0 * q * q * q1, 6.0 * q * q1 * q1 + 3.0 * q * q * q2]
}

/// C² cutoff: 1 on [0, 1/2], 0 on [1, ∞).
fn base_cutoff(t: f64) -> [f64; 3] {
    let s = smoothstep(2.0 * (t - 1.0));
    [s[0], 2.0 * s[1], 4.0 * s[2]]
}

fn unit_rule() -> Rule {
    Rule::composite(0.0, 1.0, 64, 8, &[0.125, 0.375, 0.5, 0.625, 0.875])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiOmega {
    pub omega: f64,
    /// opening actually used for the constraints
    pub omega_used: f64,
    pub coeffs: [f64; 3],
    /// ∫te^{−(2+μ_n^{1/3})t}χ_ω dt for n = 1, 2, 3
    pub residuals: [f64; 3],
    #[serde(skip)]
    pub profile: Option<DecayProfile>,
}

impl ChiOmega {
    pub fn profile(&self) -> &DecayProfile {
        self.profile.as_ref().expect("constructed profile")
    }
}

/// χ_ω = h − Σ a_m σ_m with ∫te^{−(2+μ_{n,ω}^{1/3})t}χ_ω = 0 for n = 1, 2, 3.
pub fn chi_omega(omega: f64) -> Result<ChiOmega> {
    if !(omega > 0.0 && omega <= TAU + 1e-12) {
        return Err(Error::Domain(format!("ω = {omega} outside (0, 2π]")));
    }
    let used = omega.max(CHI_OMEGA_MIN);
    let rule = unit_rule();
    let mut ks = [0.0; 3];
    for (n, k) in ks.iter_mut().enumerate() {
        *k = crate::angular_modes::buckling_eigenvalue(n + 1, used)?.cbrt();
    }
    let weight = |n: usize, t: f64| t * (-(2.0 + ks[n]) * t).exp();
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for n in 0..3 {
        rhs[n] = rule.integrate(|t| weight(n, t) * base_cutoff(t)[0]);
        for (j, &c) in BUMP_CENTERS.iter().enumerate() {
            m[(n, j)] = rule.integrate(|t| weight(n, t) * bump(t, c)[0]);
        }
    }
    let a = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical(format!("singular constraint system at ω = {used}")))?;
    let coeffs = [a[0], a[1], a[2]];
    let eval = move |t: f64| {
        let mut v = base_cutoff(t);
        for (j, &c) in BUMP_CENTERS.iter().enumerate() {
            let b = bump(t, c);
            for q in 0..3 {
                v[q] -= coeffs[j] * b[q];
            }
        }
        v
    };
    let mut residuals = [0.0; 3];
    for (n, r) in residuals.iter_mut().enumerate() {
        *r = rule.integrate(|t| weight(n, t) * eval(t)[0]);
    }
    let profile = DecayProfile::new(
        format!("chi_omega({used:.6})"),
        eval,
        1.0,
        0.0,
        vec![0.125, 0.375, 0.5, 0.625, 0.875, 1.0],
    );
    Ok(ChiOmega {
        omega,
        omega_used: used,
        coeffs,
        residuals,
        profile: Some(profile),
    })
}

/// sup |χ| + |χ'| + |χ''| sampled on [0, 1].
pub fn c2_norm(p: &DecayProfile) -> f64 {
    (0..=4000)
        .map(|k| {
            let d = p.eval(k as f64 / 4000.0);
            d[0].abs() + d[1].abs() + d[2].abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovalReport {
    pub omega: f64,
    pub n_modes: usize,
    /// 𝒢(u, 0)
    pub g_u: f64,
    /// 𝒢(U, 0)
    pub actual: f64,
    pub bound_general: f64,
    /// present when |ω − Θ| ≤ 0.1Θ for an admissible Θ
    pub bound_improved: Option<f64>,
    pub theta: Option<f64>,
    pub k1: f64,
    pub k1_improved: f64,
    pub k2: f64,
    pub k3: f64,
    pub grad_v: f64,
    pub second_u: f64,
    /// (μ_n − 4)·2∫e^{−2t}χ_ω f_{n,ω} for n = 1, 2, 3
    pub cross_low: [f64; 3],
}

fn nearest_theta(omega: f64) -> Option<f64> {
    [PI, t1(), TAU]
        .into_iter()
        .find(|&th| (omega - th).abs() <= 0.1 * th)
}

/// Builds U(t, θ) = Σ(u_n + χ_ω(t)f_{n,ω}(t)v_n)b_{n,ω}(θ) and compares
/// 𝒢(U, 0) with the bounds 𝒢(u,0) + K₁‖u''‖‖v'‖ + (K₂ + K₃)‖v'‖².
pub fn derivative_removal_gap(
    u: &AngularFunction,
    v: &AngularFunction,
    omega: f64,
) -> Result<(RemovalReport, CompetitorField)> {
    let arc = u
        .support()
        .iter()
        .copied()
        .max_by(|a, b| a.len.total_cmp(&b.len))
        .unwrap_or(Interval::new(0.0, omega));
    if (arc.len - omega).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "support of u has length {}, expected ω = {omega}",
            arc.len
        )));
    }
    let cu = decompose_with(u, &[arc], MAX_MODE)?.remove(0).coeffs;
    let cv = decompose_h1(v, &[arc], MAX_MODE)?.remove(0).coeffs;
    let n = cu.len().max(cv.len()).max(3);
    let get = |c: &[f64], k: usize| c.get(k).copied().unwrap_or(0.0);
    let set = ModeSet::new(omega, n)?;
    let chi = chi_omega(omega)?;
    let rule = unit_rule();

    let mut profiles = Vec::with_capacity(n);
    let (mut k1, mut k1_imp, mut k2, mut k3) = (0.0f64, 0.0f64, 0.0f64, 0.0);
    let mut cross_low = [0.0; 3];
    let lower = nearest_theta(omega).and_then(mode_index);
    for k in 0..n {
        let mu = set.mu(k);
        let p = chi.profile().product(&removal_profile(mu));
        let i0 = rule.integrate(|t| (-2.0 * t).exp() * p.value(t));
        let cross = (mu - 4.0) * 2.0 * i0;
        if k < 3 {
            cross_low[k] = cross;
        }
        k1 = k1.max(cross.abs() / mu.sqrt());
        if lower.map_or(false, |i| k + 1 > i) {
            k1_imp = k1_imp.max(cross.abs() / mu.sqrt());
        }
        let e = rule.integrate(|t| {
            let d = p.eval(t);
            (-2.0 * t).exp() * (2.0 * d[1] * d[1] + (mu - 4.0).max(0.0) * d[0] * d[0])
        });
        k2 = k2.max(e);
        let j = rule.integrate(|t| (-2.0 * t).exp() * p.eval(t)[2].powi(2));
        k3 += j * set.gram[k * n + k];
        let (uk, vk) = (get(&cu, k), get(&cv, k));
        let pp = p.clone();
        let bp = p.breakpoints.clone();
        profiles.push(DecayProfile::new(
            format!("removal[{}]", k + 1),
            move |t| {
                let d = pp.eval(t);
                [uk + vk * d[0], vk * d[1], vk * d[2]]
            },
            1.0,
            uk,
            bp,
        ));
    }
    let g_u = 0.5 * (omega + (0..n).map(|k| (set.mu(k) - 4.0) * get(&cu, k).powi(2)).sum::<f64>());
    let grad_v = (0..n).map(|k| get(&cv, k).powi(2)).sum::<f64>().sqrt();
    let second_u = (0..n).map(|k| set.mu(k) * get(&cu, k).powi(2)).sum::<f64>().sqrt();
    let field = modal_field(
        &set,
        arc.start,
        profiles,
        f64::INFINITY,
        Construction::DerivativeRemoval,
        serde_json::json!({"omega": omega, "modes": n, "chi_omega_used": chi.omega_used}),
        u.clone(),
        v.clone(),
    );
    let actual = field.energy;
    let bound_general = g_u + k1 * second_u * grad_v + (k2 + k3) * grad_v * grad_v;
    let theta = nearest_theta(omega);
    let bound_improved = lower.map(|i| {
        let rest = (i..n).map(|k| set.mu(k) * get(&cu, k).powi(2)).sum::<f64>().sqrt();
        g_u + k1_imp * rest * grad_v + (k2 + k3) * grad_v * grad_v
    });
    if actual > bound_general * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Numerical(format!(
            "removal competitor energy {actual} exceeds its bound {bound_general}"
        )));
    }
    Ok((
        RemovalReport {
            omega,
            n_modes: n,
            g_u,
            actual,
            bound_general,
            bound_improved,
            theta,
            k1,
            k1_improved: k1_imp,
            k2,
            k3,
            grad_v,
            second_u,
            cross_low,
        },
        field,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_c2() {
        for e in [0.125, 0.375] {
            let l = bump(e - 1e-12, 0.25);
            let r = bump(e + 1e-12, 0.25);
            for q in 0..3 {
                assert!((l[q] - r[q]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn removal_profile_starts_with_unit_slope() {
        let p = removal_profile(9.0);
        assert_eq!(p.f0(), 0.0);
        assert_eq!(p.fp0(), 1.0);
    }
}
