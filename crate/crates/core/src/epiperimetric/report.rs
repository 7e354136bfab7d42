use super::bihext::{biharmonic_comparison, BihextReport};
use super::higher::{higher_mode_profiles, negative_profile_search, positive_profile_search};
use super::modal::{modal_energy, ModeSet};
use super::qform::compute_c0;
use super::removal::derivative_removal_gap;
use super::single::{double_sector_with_eps, SingleModeCompetitor, SINGLE_MODE_EPS};
use crate::angular_modes::{decompose_h1, decompose_with, mode_index, AngularFunction, Interval, MAX_MODE};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Support-condition constant as a fraction of Θ.
pub const SUPPORT_C_FRACTION: f64 = 0.05;
/// Coefficients below this are treated as zero.
const COEFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentReport {
    pub interval: Interval,
    pub theta: f64,
    pub lower_mode: Option<usize>,
    pub g_u: f64,
    /// 𝒢 after the derivative-removal step (equal to g_u when v = 0 here)
    pub g_removal: f64,
    pub removal_bound: f64,
    /// 𝒢 of the higher-mode competitor restarted at t = 1
    pub g_higher: f64,
    /// 𝒢(U, 0) − 𝒢(u, 0) of the single-mode step, weighted e^{−2T}
    pub lower_gain: f64,
    /// false when keeping U = u beyond t = 1 was cheaper
    pub competitor_used: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpiReport {
    pub theta: f64,
    pub support_c: f64,
    /// translation putting the support in the normalised position
    pub shift: f64,
    pub construction: String,
    pub components: Vec<ComponentReport>,
    pub g_u: f64,
    pub g_competitor: f64,
    /// ‖v'‖²
    pub grad_v_sq: f64,
    /// (𝒢(u) − 𝒢(U))/(𝒢(u) − Θ/2) when 𝒢(u) > Θ/2
    pub eta_empirical: Option<f64>,
    pub decay_holds: bool,
    pub profile_eps: (f64, f64),
    pub profile_t: (f64, f64),
    /// start of the single-mode step, measured from t = 1
    pub t_switch: f64,
    pub c0: f64,
    pub w_values: Option<(f64, f64)>,
    /// 𝒲(u, 1) ≥ Θ/2
    pub w_hypothesis_met: Option<bool>,
    /// W(u, e⁻¹) − Θ/2 ≤ (1 − η)(W(u, 1) − Θ/2)
    pub w_decay_holds: Option<bool>,
    pub bihext: Option<BihextReport>,
}

/// Arc containment with a small slack for floating-point endpoints.
fn arc_contains(outer: &Interval, a: f64, b: f64) -> bool {
    if outer.len >= TAU {
        return true;
    }
    let s = (a - outer.start).rem_euclid(TAU);
    s + (b - a) <= outer.len + 1e-12 && s >= -1e-12
}

fn window_covered(arcs: &[Interval], a: f64, b: f64) -> bool {
    b <= a || arcs.iter().any(|iv| arc_contains(iv, a, b))
}

/// Finds s with (s + c, s + Θ − c) ⊂ Spt ⊂ (s − c, s + Θ + c).
fn locate_sector(arcs: &[Interval], theta: f64, c: f64) -> Option<f64> {
    let main = arcs.iter().copied().max_by(|a, b| a.len.total_cmp(&b.len))?;
    let m = main.start + 0.5 * main.len;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for iv in arcs {
        let centre = iv.start + 0.5 * iv.len;
        let d = (centre - m + PI).rem_euclid(TAU) - PI;
        let start = m + d - 0.5 * iv.len;
        lo = lo.min(start);
        hi = hi.max(start + iv.len);
    }
    let s_lo = (main.start - c).max(hi - theta - c);
    let s_hi = (main.end() - theta + c).min(lo + c);
    if s_lo < s_hi {
        Some(0.5 * (s_lo + s_hi))
    } else {
        None
    }
}

/// Finds s outside Spt with both half-windows covered.
fn locate_double(arcs: &[Interval], c: f64) -> Option<f64> {
    let mut cands = Vec::new();
    for iv in arcs {
        for k in 0..=16 {
            cands.push(iv.end() + c * k as f64 / 16.0);
        }
    }
    cands.into_iter().find(|&s| {
        let free = !arcs.iter().any(|iv| iv.contains_open(s));
        free && window_covered(arcs, s + c, s + PI - c) && window_covered(arcs, s + PI + c, s + TAU - c)
    })
}

struct Profiles {
    g: super::profile::DecayProfile,
    h: super::profile::DecayProfile,
    eps: (f64, f64),
    t: (f64, f64),
    c0: f64,
}

fn profiles() -> Result<Profiles> {
    let c0 = compute_c0(&[TAU], 64)?.c0_upper;
    let pos = positive_profile_search(c0)?;
    let neg = negative_profile_search(c0)?;
    Ok(Profiles {
        eps: (pos.eps, neg.eps),
        t: (pos.t_cut, neg.t_cut),
        g: pos.profile.unwrap(),
        h: neg.profile.unwrap(),
        c0,
    })
}

fn fourier(f: &AngularFunction, n_max: usize) -> Vec<Complex64> {
    let m = 4096;
    let s = f.samples(m);
    (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            s.iter()
                .enumerate()
                .map(|(j, d)| d[0] * Complex64::from_polar(1.0, -(n as f64) * TAU * j as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        })
        .collect()
}

/// Stitched competitor for boundary data (u, v) and the resulting decay.
pub fn epiperimetric_report(
    u: &AngularFunction,
    v: &AngularFunction,
    theta: f64,
    w_values: Option<(f64, f64)>,
) -> Result<EpiReport> {
    mode_index(theta).ok_or_else(|| Error::Domain(format!("Θ = {theta} is not an admissible opening")))?;
    let c = SUPPORT_C_FRACTION * theta;
    let arcs: Vec<Interval> = u.support().to_vec();
    if arcs.is_empty() {
        return Err(Error::Precondition("u vanishes identically".into()));
    }
    let grad_v_sq = v.grad_norm_sq();
    let full = arcs.iter().any(|iv| iv.len >= TAU);
    if full {
        if theta != TAU {
            return Err(Error::Precondition(format!(
                "support of u is the whole circle, not within (−c, Θ + c) for Θ = {theta}"
            )));
        }
        return bihext_report(u, v, theta, c, grad_v_sq, w_values);
    }
    let shift = if theta < TAU {
        locate_sector(&arcs, theta, c)
    } else {
        locate_double(&arcs, c)
    }
    .ok_or_else(|| {
        let list: Vec<String> = arcs.iter().map(|iv| iv.to_string()).collect();
        Error::Precondition(format!(
            "support {} violates the support condition for Θ = {theta:.6} with c = {c:.4}",
            list.join(" ∪ ")
        ))
    })?;

    let prof = profiles()?;
    // The single-mode step starts once every decaying profile in use has settled.
    let mut t_switch: f64 = 0.0;

    // Main arcs carry the lowest mode; with Θ = 2π and two arcs each counts as a half-circle.
    let mut sorted = arcs.clone();
    sorted.sort_by(|a, b| b.len.total_cmp(&a.len));
    let two_halves = theta == TAU && sorted.len() >= 2 && sorted[1].len >= PI - 2.0 * c;
    let main_count = if two_halves { 2 } else { 1 };
    let theta_main = if two_halves { PI } else { theta };

    let mut comps = Vec::new();
    let mut lower_coeffs = Vec::new();
    for (k, iv) in sorted.iter().enumerate() {
        let uk = restrict(u, iv);
        let vk = restrict(v, iv);
        let cu = decompose_with(&uk, &[*iv], MAX_MODE)?.remove(0).coeffs;
        let cv = decompose_h1(&vk, &[*iv], MAX_MODE)?.remove(0).coeffs;
        let g_u_k;
        let (g_rem, rem_bound);
        if cv.iter().any(|x| x.abs() > COEFF_TOL) {
            let (r, _) = derivative_removal_gap(&uk, &vk, iv.len)?;
            g_u_k = r.g_u;
            g_rem = r.actual;
            rem_bound = r.bound_general;
        } else {
            let set = ModeSet::new(iv.len, cu.len())?;
            g_u_k = 0.5 * (iv.len + cu.iter().enumerate().map(|(n, x)| (set.mu(n) - 4.0) * x * x).sum::<f64>());
            g_rem = g_u_k;
            rem_bound = g_u_k;
        }
        let is_main = k < main_count;
        let lower = if is_main { mode_index(theta_main) } else { None };
        let n = cu.len().max(lower.unwrap_or(1));
        let set = ModeSet::new(iv.len, n)?;
        let mut coeffs = cu.clone();
        coeffs.resize(n, 0.0);
        let profs = higher_mode_profiles(&set, &coeffs, lower, &prof.g, &prof.h)?;
        for (j, &x) in coeffs.iter().enumerate() {
            if Some(j + 1) != lower && x.abs() > COEFF_TOL {
                let s = if set.mu(j) >= 5.0 { prof.g.settle } else { prof.h.settle };
                t_switch = t_switch.max(s);
            }
        }
        let g_hi = modal_energy(&set, &profs, f64::INFINITY);
        let a = lower.map(|i| coeffs[i - 1]).unwrap_or(0.0);
        lower_coeffs.push((a, *iv));
        comps.push(ComponentReport {
            interval: *iv,
            theta: if is_main { theta_main } else { iv.len },
            lower_mode: lower,
            g_u: g_u_k,
            g_removal: g_rem,
            removal_bound: rem_bound,
            g_higher: g_hi,
            lower_gain: 0.0,
            competitor_used: true,
        });
    }

    // Single-mode step for t ≥ 1 + T on the main arcs, T the switch time above.
    let w = (-2.0 * t_switch).exp();
    if two_halves {
        let (a1, i1) = lower_coeffs[0];
        let (a2, i2) = lower_coeffs[1];
        let (first, second, a_f, a_s) = if (i1.start - shift).rem_euclid(TAU) <= (i2.start - shift).rem_euclid(TAU) {
            (i1, i2, a1, a2)
        } else {
            (i2, i1, a2, a1)
        };
        let beta = (second.start - first.end()).rem_euclid(TAU);
        let (dr, _) = double_sector_with_eps(a_f, a_s, first.len, second.len, beta, SINGLE_MODE_EPS)?;
        let gain = w * (dr.g_c1 + dr.g_c2 - dr.g_u1 - dr.g_u2);
        comps[0].lower_gain = 0.5 * gain;
        comps[1].lower_gain = 0.5 * gain;
    } else {
        let (a, iv) = lower_coeffs[0];
        let s = SingleModeCompetitor::new(theta_main, a, iv.len, SINGLE_MODE_EPS)?;
        comps[0].lower_gain = w * (s.energy() - s.g_u());
    }

    let e2 = (-2.0f64).exp();
    let mut g_u = 0.0;
    let mut g_c = 0.0;
    for comp in comps.iter_mut() {
        let stage2 = comp.g_higher + comp.lower_gain;
        if stage2 > comp.g_u {
            comp.competitor_used = false;
        }
        g_u += comp.g_u;
        g_c += comp.g_removal + e2 * (stage2.min(comp.g_u) - comp.g_u);
    }
    let penalty: f64 = comps.iter().map(|c| c.removal_bound - c.g_u).sum();
    let excess = g_u - 0.5 * theta;
    let eta = (excess > COEFF_TOL).then(|| (g_u - g_c) / excess);
    // With v ≠ 0 the removal step may cost up to `penalty`, the C‖v'‖² term.
    let decay_holds = if excess > COEFF_TOL {
        g_c < g_u + penalty.max(0.0)
    } else {
        g_c <= g_u + penalty.max(0.0) + 1e-12
    };
    let (w_hyp, w_decay) = w_checks(w_values, theta, eta.unwrap_or(0.0));
    Ok(EpiReport {
        theta,
        support_c: c,
        shift,
        construction: "stitched".into(),
        components: comps,
        g_u,
        g_competitor: g_c,
        grad_v_sq,
        eta_empirical: eta,
        decay_holds,
        profile_eps: prof.eps,
        profile_t: prof.t,
        t_switch,
        c0: prof.c0,
        w_values,
        w_hypothesis_met: w_hyp,
        w_decay_holds: w_decay,
        bihext: None,
    })
}

fn w_checks(w: Option<(f64, f64)>, theta: f64, eta: f64) -> (Option<bool>, Option<bool>) {
    match w {
        Some((w1, we)) => (
            Some(w1 >= 0.5 * theta),
            Some(we - 0.5 * theta <= (1.0 - eta) * (w1 - 0.5 * theta) + 1e-12),
        ),
        None => (None, None),
    }
}

/// f restricted to one arc of its support.
fn restrict(f: &AngularFunction, iv: &Interval) -> AngularFunction {
    let g = f.clone();
    let iv2 = *iv;
    AngularFunction::from_fn(
        move |t| if iv2.contains(t) { g.eval(t) } else { [0.0; 3] },
        vec![*iv],
    )
}

fn bihext_report(
    u: &AngularFunction,
    v: &AngularFunction,
    theta: f64,
    c: f64,
    grad_v_sq: f64,
    w_values: Option<(f64, f64)>,
) -> Result<EpiReport> {
    let x = fourier(u, 32);
    let y = fourier(v, 32);
    let b = biharmonic_comparison(&x, &y)?;
    let g_u = PI + b.g_v0_minus_pi;
    let g_c = PI + b.g_v_minus_pi;
    let excess = g_u - PI;
    let eta = (excess > COEFF_TOL).then(|| (g_u - g_c) / excess);
    let (w_hyp, w_decay) = w_checks(w_values, theta, 0.1);
    Ok(EpiReport {
        theta,
        support_c: c,
        shift: 0.0,
        construction: "biharmonic-extension".into(),
        components: Vec::new(),
        g_u,
        g_competitor: g_c,
        grad_v_sq,
        eta_empirical: eta,
        decay_holds: b.holds,
        profile_eps: (0.0, 0.0),
        profile_t: (0.0, 0.0),
        t_switch: 0.0,
        c0: 0.0,
        w_values,
        w_hypothesis_met: w_hyp,
        w_decay_holds: w_decay,
        bihext: Some(b),
    })
}
