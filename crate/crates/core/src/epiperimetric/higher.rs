use super::modal::ModeSet;
use super::profile::{negative_profile, positive_profile, DecayProfile};
use super::qform::{moments, Moments};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const POSITIVE_LAMBDAS: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 1e2, 1e4];
pub const NEGATIVE_LAMBDAS: [f64; 4] = [-1.0, -2.0, -4.0, -8.0];
const POS_EPS: [f64; 6] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
const POS_T: [f64; 5] = [5.0, 8.0, 10.0, 15.0, 20.0];
const NEG_EPS: [f64; 5] = [0.01, 0.02, 0.05, 0.1, 0.15];
const NEG_T: [f64; 4] = [10.0, 15.0, 20.0, 30.0];

/// λ on a log grid of [1, 10⁶], 10 points per decade.
pub fn lambda_log_grid() -> Vec<f64> {
    (0..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect()
}

fn eta_of(m: &Moments, c0: f64, lambdas: &[f64]) -> f64 {
    lambdas
        .iter()
        .map(|&l| 1.0 - m.q(l, c0) / (0.5 * l))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositiveSearch {
    pub eps: f64,
    pub t_cut: f64,
    /// min over the λ grids of 1 − Q_λ(f)/Q_λ(1)
    pub eta: f64,
    pub c0: f64,
    /// Q₁(f_ε)/Q₁(1) and the bound 1 − ε²/4
    pub est_i: (f64, f64),
    /// empirical C in Q₁(f_{ε,T}) ≤ (1 + Ce^{−2T})Q₁(f_ε), maximised over the T grid
    pub est_ii_c: f64,
    /// 2∫e^{−2t}f², the λ → ∞ limit of Q_λ(f)/Q_λ(1)
    pub large_lambda_limit: f64,
    #[serde(skip)]
    pub profile: Option<DecayProfile>,
}

/// Finds (ε, T) with Q_λ(f_{ε,T}) ≤ (1 − η)Q_λ(1) for all λ ≥ 1, among the
/// ε for which Q₁(f_ε) ≤ (1 − ε²/4)Q₁(1).
///
/// Q_λ(f)/Q_λ(1) = 2(C₀m₂ + 2m₁)/λ + 2m₀ is decreasing in λ, so λ = 1 is
/// the binding case; the grids are still evaluated explicitly.
pub fn positive_profile_search(c0: f64) -> Result<PositiveSearch> {
    let mut lambdas: Vec<f64> = lambda_log_grid();
    lambdas.extend_from_slice(&POSITIVE_LAMBDAS);
    let mut best: Option<PositiveSearch> = None;
    for &eps in &POS_EPS {
        let m_inf = moments(&positive_profile(eps, f64::INFINITY));
        let q_inf = m_inf.q(1.0, c0);
        // estimate (i) only holds for small ε; larger ε are not candidates
        if q_inf / 0.5 > 1.0 - eps * eps / 4.0 {
            continue;
        }
        let mut c_emp: f64 = 0.0;
        let mut cands = Vec::new();
        for &t in &POS_T {
            let f = positive_profile(eps, t);
            let m = moments(&f);
            c_emp = c_emp.max((m.q(1.0, c0) / q_inf - 1.0) * (2.0 * t).exp());
            cands.push((t, f, m));
        }
        for (t, f, m) in cands {
            let eta = eta_of(&m, c0, &lambdas);
            if best.as_ref().map_or(true, |b| eta > b.eta) {
                best = Some(PositiveSearch {
                    eps,
                    t_cut: t,
                    eta,
                    c0,
                    est_i: (q_inf / 0.5, 1.0 - eps * eps / 4.0),
                    est_ii_c: c_emp,
                    large_lambda_limit: 2.0 * m.d0,
                    profile: Some(f),
                });
            }
        }
    }
    match best {
        Some(b) if b.eta > 0.0 => Ok(b),
        _ => Err(Error::Numerical("no positive-eigenvalue profile found on the grid".into())),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegativeSearch {
    pub eps: f64,
    pub t_cut: f64,
    pub c0: f64,
    /// min over λ of (λ/2 − Q_λ(f))/|λ|
    pub margin: f64,
    pub q_values: Vec<(f64, f64)>,
    /// ∫e^{−2t}f_ε² for the untruncated profile and the bound (1 + ε²/3)/2
    pub mass: (f64, f64),
    #[serde(skip)]
    pub profile: Option<DecayProfile>,
}

/// Finds (ε, T) with Q_λ(f) ≤ λ/2 for λ ∈ {−1, −2, −4, −8}.
pub fn negative_profile_search(c0: f64) -> Result<NegativeSearch> {
    let mut best: Option<NegativeSearch> = None;
    for &eps in &NEG_EPS {
        let m_inf = moments(&negative_profile(eps, f64::INFINITY));
        for &t in &NEG_T {
            let f = negative_profile(eps, t);
            let m = moments(&f);
            let q_values: Vec<(f64, f64)> = NEGATIVE_LAMBDAS.iter().map(|&l| (l, m.q(l, c0))).collect();
            let margin = q_values
                .iter()
                .map(|&(l, q)| (0.5 * l - q) / l.abs())
                .fold(f64::INFINITY, f64::min);
            if best.as_ref().map_or(true, |b| margin > b.margin) {
                best = Some(NegativeSearch {
                    eps,
                    t_cut: t,
                    c0,
                    margin,
                    q_values,
                    mass: (m_inf.d0, 0.5 * (1.0 + eps * eps / 3.0)),
                    profile: Some(f),
                });
            }
        }
    }
    match best {
        Some(b) if b.margin > 0.0 => Ok(b),
        _ => Err(Error::Numerical("no negative-eigenvalue profile found on the grid".into())),
    }
}

/// Time profiles u_n·f_n(t) of the higher-mode competitor on one arc:
/// f_n = g when μ_n ≥ 5, h when μ_n ≤ 3, and 1 for the mode `lower`.
pub fn higher_mode_profiles(
    set: &ModeSet,
    coeffs: &[f64],
    lower: Option<usize>,
    g: &DecayProfile,
    h: &DecayProfile,
) -> Result<Vec<DecayProfile>> {
    let mut out = Vec::with_capacity(coeffs.len());
    for (k, &c) in coeffs.iter().enumerate().take(set.len()) {
        let n = k + 1;
        let mu = set.mu(k);
        let base = if Some(n) == lower {
            DecayProfile::constant(1.0)
        } else if mu >= 5.0 {
            g.clone()
        } else if mu <= 3.0 {
            h.clone()
        } else {
            return Err(Error::Precondition(format!(
                "mode {n} has μ = {mu:.4} in (3, 5) on an arc of length {:.6}",
                set.omega
            )));
        };
        out.push(base.product(&DecayProfile::constant(c)));
    }
    Ok(out)
}
