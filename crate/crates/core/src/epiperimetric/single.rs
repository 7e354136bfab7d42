use super::competitor::{CompetitorField, Construction};
use super::profile::{chi_eps, DecayProfile};
use crate::angular_modes::{mode_index, AngularFunction, BucklingMode, Interval};
use crate::error::{Error, Result};
use crate::quad::{simpson_weights, t_rule, T_CUTOFF};
use crate::weiss_energy::CylJet;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// ε used by the single-mode and double-sector constructions.
pub const SINGLE_MODE_EPS: f64 = 0.02;
/// Largest |δ₀| = |ω/Θ − 1| for which the competitor is asserted to win.
pub const SINGLE_MODE_DELTA_MAX: f64 = 0.05;

/// f(δ) = Θδ + ‖B''‖²(1+δ)⁻³ − 4‖B'‖²(1+δ)⁻¹ with B = b_{i(Θ),Θ}; with
/// exact norms this is Θδ + 4((1+δ)⁻³ − (1+δ)⁻¹).
pub fn f_delta(theta: f64, delta: f64) -> f64 {
    let s = 1.0 + delta;
    theta * delta + 4.0 * (s.powi(-3) - 1.0 / s)
}

/// F_ε(δ) = ∫e^{−2t}(f(δχ_ε(t)) − (1 − ε)f(δ)).
pub fn f_eps(theta: f64, eps: f64, delta: f64) -> Result<f64> {
    let chi = chi_eps(eps)?;
    let rule = t_rule(&[]);
    let fd = f_delta(theta, delta);
    let s = rule.integrate(|t| (-2.0 * t).exp() * (f_delta(theta, delta * chi.value(t)) - (1.0 - eps) * fd));
    let tail = (f_delta(theta, delta * chi.value(T_CUTOFF)) - (1.0 - eps) * fd) * 0.5 * (-2.0 * T_CUTOFF).exp();
    Ok(s + tail)
}

/// Central second difference of F_ε at 0.
pub fn f_eps_second_fd(theta: f64, eps: f64, h: f64) -> Result<f64> {
    Ok((f_eps(theta, eps, h)? - 2.0 * f_eps(theta, eps, 0.0)? + f_eps(theta, eps, -h)?) / (h * h))
}

/// −20(1 − 45ε/16)ε.
pub fn f_eps_second_closed(eps: f64) -> f64 {
    -20.0 * (1.0 - 45.0 * eps / 16.0) * eps
}

/// θ-moments of B = b_{i,Θ} in the variable x ∈ [0, Θ], with g = xB'.
#[derive(Debug, Clone, Copy)]
struct ShapeMoments {
    gg: f64,
    xggp: f64,
    xxgpgp: f64,
    gpgp: f64,
    bpp: f64,
    bp: f64,
}

fn shape_moments(mode: &BucklingMode) -> ShapeMoments {
    let n = 8192;
    let h = mode.omega / n as f64;
    let w = simpson_weights(n, h);
    let mut m = ShapeMoments {
        gg: 0.0,
        xggp: 0.0,
        xxgpgp: 0.0,
        gpgp: 0.0,
        bpp: 0.0,
        bp: 0.0,
    };
    for (k, wk) in w.iter().enumerate() {
        let x = k as f64 * h;
        let d = mode.derivs(x);
        let g = x * d[1];
        let gp = d[1] + x * d[2];
        m.gg += wk * g * g;
        m.xggp += wk * x * g * gp;
        m.xxgpgp += wk * x * x * gp * gp;
        m.gpgp += wk * gp * gp;
        m.bpp += wk * d[2] * d[2];
        m.bp += wk * d[1] * d[1];
    }
    m
}

/// U(t, θ) = A·B(θ/σ(t)) on [offset, offset + Θσ(t)], σ = 1 + δ₀χ_ε,
/// A = a√(1+δ₀); or U = u for all t when the construction is not needed.
#[derive(Debug, Clone)]
pub struct SingleModeCompetitor {
    pub theta: f64,
    pub a: f64,
    pub omega: f64,
    pub eps: f64,
    pub delta0: f64,
    /// U(t, ·) = u for all t
    pub trivial: bool,
    mode: BucklingMode,
    chi: DecayProfile,
    moments: ShapeMoments,
}

impl SingleModeCompetitor {
    pub fn new(theta: f64, a: f64, omega: f64, eps: f64) -> Result<Self> {
        let i = mode_index(theta)
            .ok_or_else(|| Error::Domain(format!("Θ = {theta} is not an admissible opening")))?;
        let delta0 = omega / theta - 1.0;
        if delta0.abs() > 0.5 {
            return Err(Error::Domain(format!("ω = {omega} is too far from Θ = {theta}")));
        }
        let mode = BucklingMode::new(i, theta)?;
        let moments = shape_moments(&mode);
        let mut c = SingleModeCompetitor {
            theta,
            a,
            omega,
            eps,
            delta0,
            trivial: false,
            mode,
            chi: chi_eps(eps)?,
            moments,
        };
        c.trivial = c.g_u() - 0.5 * theta <= 0.0;
        Ok(c)
    }

    /// 𝒢(u, 0) = (ω + a²(μ_{i,ω} − 4))/2 for u = a·b_{i,ω}.
    pub fn g_u(&self) -> f64 {
        let mu = 4.0 * (self.theta / self.omega).powi(2);
        0.5 * (self.omega + self.a * self.a * (mu - 4.0))
    }

    fn amp(&self) -> f64 {
        self.a * (1.0 + self.delta0).sqrt()
    }

    /// σ, σ', σ''.
    fn sigma(&self, t: f64) -> [f64; 3] {
        let c = self.chi.eval(t);
        [1.0 + self.delta0 * c[0], self.delta0 * c[1], self.delta0 * c[2]]
    }

    pub fn support_len(&self, t: f64) -> f64 {
        if self.trivial {
            self.omega
        } else {
            self.theta * self.sigma(t)[0]
        }
    }

    /// Jet of U at (t, θ), θ measured from the left end of the sector and
    /// assumed to lie in [0, support_len(t)].
    pub fn jet(&self, t: f64, theta: f64) -> CylJet {
        if self.trivial {
            let ratio = self.theta / self.omega;
            let d = self.mode.derivs((theta * ratio).clamp(0.0, self.theta));
            let s = ratio.sqrt().recip();
            return CylJet {
                v: self.a * s * d[0],
                vt: 0.0,
                vth: self.a * s * ratio * d[1],
                vtt: 0.0,
                vtth: 0.0,
                vthth: self.a * s * ratio * ratio * d[2],
            };
        }
        let [s, s1, s2] = self.sigma(t);
        // clamp so that rounding at the moving endpoint stays inside the mode's domain
        let x = (theta / s).clamp(0.0, self.theta);
        let d = self.mode.derivs(x);
        let a = self.amp();
        let g = x * d[1];
        let gp = d[1] + x * d[2];
        let r = s1 / s;
        CylJet {
            v: a * d[0],
            vt: -a * r * g,
            vth: a * d[1] / s,
            vtt: -a * ((s2 / s - r * r) * g - r * r * x * gp),
            vtth: -a * r * gp / s,
            vthth: a * d[2] / (s * s),
        }
    }

    /// ∫(U_tt² + 2U_tθ² + U_θθ² − 4U_θ²)dθ + |supp U(t, ·)| from the moments.
    fn ring(&self, t: f64) -> f64 {
        let m = &self.moments;
        let [s, s1, s2] = self.sigma(t);
        let a2 = self.amp().powi(2);
        let c1 = s2 / s - (s1 / s).powi(2);
        let c2 = (s1 / s).powi(2);
        s * a2
            * (c1 * c1 * m.gg - 2.0 * c1 * c2 * m.xggp + c2 * c2 * m.xxgpgp + 2.0 * c2 * m.gpgp / (s * s)
                + m.bpp / s.powi(4)
                - 4.0 * m.bp / (s * s))
            + self.theta * s
    }

    /// 𝒢(U, 0).
    pub fn energy(&self) -> f64 {
        if self.trivial {
            return self.g_u();
        }
        let rule = t_rule(&[]);
        rule.integrate(|t| (-2.0 * t).exp() * self.ring(t)) + 0.5 * self.ring(T_CUTOFF) * (-2.0 * T_CUTOFF).exp()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleModeReport {
    pub construction: String,
    pub theta: f64,
    pub a: f64,
    pub omega: f64,
    pub eps: f64,
    pub delta0: f64,
    pub trivial: bool,
    pub g_u: f64,
    pub g_competitor: f64,
    /// 𝒢(U,0) − 𝒢(u,0) + ε(𝒢(u,0) − Θ/2)₊
    pub gap: f64,
    /// |𝒢(U,0) from the moments − 𝒢(U,0) by 2-D quadrature|
    pub quadrature_check: f64,
}

pub fn single_mode_energy_gap(theta: f64, a: f64, omega: f64, eps: f64) -> Result<SingleModeReport> {
    let c = SingleModeCompetitor::new(theta, a, omega, eps)?;
    let g_u = c.g_u();
    let g_c = c.energy();
    let field = single_mode_field(c.clone());
    let quad = field.energy_by_quadrature(1024);
    if !quad.is_finite() || !g_c.is_finite() {
        return Err(Error::Numerical("single-mode energy is not finite".into()));
    }
    Ok(SingleModeReport {
        construction: "single-mode".into(),
        theta,
        a,
        omega,
        eps,
        delta0: c.delta0,
        trivial: c.trivial,
        g_u,
        g_competitor: g_c,
        gap: g_c - g_u + eps * (g_u - 0.5 * theta).max(0.0),
        quadrature_check: (quad - g_c).abs(),
    })
}

fn single_mode_field(c: SingleModeCompetitor) -> CompetitorField {
    let u = {
        let c0 = c.clone();
        AngularFunction::from_fn(
            move |th| {
                let j = c0.jet(0.0, th);
                [j.v, j.vth, j.vthth]
            },
            vec![Interval::new(0.0, c.omega)],
        )
    };
    let (cj, cs) = (c.clone(), c.clone());
    CompetitorField::new(
        Construction::SingleMode,
        serde_json::json!({"theta": c.theta, "a": c.a, "omega": c.omega, "eps": c.eps}),
        c.energy(),
        Arc::new(move |t, th| if th <= cj.support_len(t) { cj.jet(t, th) } else { CylJet::default() }),
        Arc::new(move |t| vec![Interval::new(0.0, cs.support_len(t))]),
        u,
        AngularFunction::zero(),
    )
}

/// Two single-mode competitors on sectors [0, ω₁] and the mirrored
/// [ω₁ + β, ω₁ + ω₂ + β], both built with Θ = π.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoubleSectorReport {
    pub omega1: f64,
    pub omega2: f64,
    pub beta: f64,
    pub eps: f64,
    /// sectors were relabelled so that the wide gap is on the far side
    pub swapped: bool,
    pub g_u: f64,
    pub g_u1: f64,
    pub g_u2: f64,
    pub g_c1: f64,
    pub g_c2: f64,
    /// independent quadrature of the stitched field
    pub g_stitched: f64,
    pub gap: f64,
    /// min over t of the distance between the two supports
    pub min_separation: f64,
}

pub fn double_sector_competitor(
    a1: f64,
    a2: f64,
    omega1: f64,
    omega2: f64,
    beta: f64,
) -> Result<(DoubleSectorReport, CompetitorField)> {
    double_sector_with_eps(a1, a2, omega1, omega2, beta, SINGLE_MODE_EPS)
}

pub fn double_sector_with_eps(
    a1: f64,
    a2: f64,
    omega1: f64,
    omega2: f64,
    beta: f64,
    eps: f64,
) -> Result<(DoubleSectorReport, CompetitorField)> {
    let gap_total = TAU - omega1 - omega2;
    if gap_total < -1e-12 {
        return Err(Error::Domain("ω₁ + ω₂ exceeds 2π".into()));
    }
    if beta < -1e-12 || beta > gap_total + 1e-12 {
        return Err(Error::Domain(format!("β = {beta} outside [0, {gap_total}]")));
    }
    // Up to relabelling, the gap adjacent to the start of sector 2 is the larger one.
    let swapped = beta < 0.5 * gap_total;
    let (a1, a2, w1, w2, b) = if swapped {
        (a2, a1, omega2, omega1, gap_total - beta)
    } else {
        (a1, a2, omega1, omega2, beta)
    };
    let c1 = SingleModeCompetitor::new(PI, a1, w1, eps)?;
    let c2 = SingleModeCompetitor::new(PI, a2, w2, eps)?;
    let far = w1 + w2 + b;
    let mut min_sep = f64::INFINITY;
    let rule = t_rule(&[]);
    for &t in rule.nodes.iter().chain([0.0, T_CUTOFF, 1e3].iter()) {
        let sep = (far - c2.support_len(t)) - c1.support_len(t);
        min_sep = min_sep.min(sep);
        // wrap-around gap between the end of sector 2 and the start of sector 1
        min_sep = min_sep.min(TAU - far);
    }
    if min_sep < -1e-12 {
        return Err(Error::Domain(format!(
            "sector supports overlap (separation {min_sep:.3e}); ε = {eps} is too large"
        )));
    }
    let (g_u1, g_u2) = (c1.g_u(), c2.g_u());
    let (g_c1, g_c2) = (c1.energy(), c2.energy());
    let g_u = g_u1 + g_u2;
    let (j1, j2, s1, s2) = (c1.clone(), c2.clone(), c1.clone(), c2.clone());
    let jet = move |t: f64, th: f64| {
        let th = th.rem_euclid(TAU);
        let mut out = CylJet::default();
        if th <= j1.support_len(t) {
            out = j1.jet(t, th);
        }
        let m = far - th;
        if m >= 0.0 && m <= j2.support_len(t) {
            let q = j2.jet(t, m);
            // θ ↦ far − θ flips odd θ-derivatives
            out.v += q.v;
            out.vt += q.vt;
            out.vth -= q.vth;
            out.vtt += q.vtt;
            out.vtth -= q.vtth;
            out.vthth += q.vthth;
        }
        out
    };
    let support = move |t: f64| {
        let l2 = s2.support_len(t);
        vec![Interval::new(0.0, s1.support_len(t)), Interval::new(far - l2, l2)]
    };
    let u = {
        let jj = jet.clone();
        AngularFunction::from_fn(
            move |th| {
                let j = jj(0.0, th);
                [j.v, j.vth, j.vthth]
            },
            vec![Interval::new(0.0, w1), Interval::new(w1 + b, w2)],
        )
    };
    let field = CompetitorField::new(
        Construction::Double,
        serde_json::json!({"a1": a1, "a2": a2, "omega1": w1, "omega2": w2, "beta": b, "eps": eps}),
        g_c1 + g_c2,
        Arc::new(jet),
        Arc::new(support),
        u,
        AngularFunction::zero(),
    );
    let g_stitched = field.energy_by_quadrature(1024);
    let report = DoubleSectorReport {
        omega1,
        omega2,
        beta,
        eps,
        swapped,
        g_u,
        g_u1,
        g_u2,
        g_c1,
        g_c2,
        g_stitched,
        gap: g_c1 + g_c2 - g_u + eps * (g_u - PI).max(0.0),
        min_separation: min_sep,
    };
    Ok((report, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular_modes::t1;

    #[test]
    fn f_jets_at_zero() {
        for th in [PI, t1()] {
            assert!(f_delta(th, 0.0).abs() < 1e-15);
            let h = 1e-4;
            let f2 = (f_delta(th, h) - 2.0 * f_delta(th, 0.0) + f_delta(th, -h)) / (h * h);
            assert!((f2 - 40.0).abs() < 1e-5);
        }
    }

    #[test]
    fn moments_match_mode_norms() {
        let m = BucklingMode::new(1, PI).unwrap();
        let s = shape_moments(&m);
        assert!((s.bp - 1.0).abs() < 1e-10);
        assert!((s.bpp - 4.0).abs() < 1e-10);
    }

    #[test]
    fn unperturbed_sector_is_trivial() {
        let r = single_mode_energy_gap(PI, 1.0, PI, SINGLE_MODE_EPS).unwrap();
        assert!(r.trivial);
        assert!((r.g_u - 0.5 * PI).abs() < 1e-14);
        assert_eq!(r.gap, 0.0);
    }
}
