//! Buckling eigenbasis on segments, the critical angle t₁, admissible
//! openings and the explicit 2-homogeneous profiles.

use crate::error::{Error, Result};
use crate::quad::{bisect, simpson};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Default number of angular samples per 2π.
pub const ANGULAR_SAMPLES: usize = 4096;
/// Largest mode index for which the eigenvalue bracket is guaranteed.
pub const MAX_MODE: usize = 64;
/// Empirical bound on ‖b_n‖²·μ_n asserted by the mode tables.
pub const L2_MU_BOUND: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAngle {
    pub t1: f64,
}

fn t1_residual(t: f64) -> f64 {
    t * t.cos() - t.sin()
}

/// Root of tan t = t in (π, 2π).
///
/// The function t cos t − sin t changes sign on (π, 3π/2) and has no pole
/// there, so plain bisection reaches machine precision; `tol` is only
/// checked afterwards.
pub fn solve_t1(tol: f64) -> CriticalAngle {
    assert!(tol > 0.0);
    let t1 = bisect(t1_residual, PI, 1.5 * PI, 200).expect("bracketed");
    debug_assert!((t1.tan() - t1).abs() <= tol.max(1e-12));
    CriticalAngle { t1 }
}

/// Cached critical angle.
pub fn t1() -> f64 {
    static T1: OnceLock<f64> = OnceLock::new();
    *T1.get_or_init(|| solve_t1(1e-12).t1)
}

/// Root x of tan x = x in (mπ, mπ + π/2), m ≥ 1.
fn tan_fixed_point(m: usize) -> Result<f64> {
    let lo = m as f64 * PI;
    bisect(t1_residual, lo, lo + 0.5 * PI, 200)
}

/// μ_n on the reference segment [0, π].
pub fn base_eigenvalue(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("mode index starts at 1".into()));
    }
    if n % 2 == 1 {
        return Ok(((n + 1) * (n + 1)) as f64);
    }
    let x = tan_fixed_point(n / 2)?;
    let mu = (2.0 * x / PI).powi(2);
    let (lo, hi) = ((n * n) as f64, ((n + 2) * (n + 2)) as f64);
    if !(mu > lo && mu < hi) {
        return Err(Error::Numerical(format!(
            "even eigenvalue {mu} for n={n} left its bracket ({lo}, {hi})"
        )));
    }
    Ok(mu)
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega <= TAU + 1e-12) {
        return Err(Error::Domain(format!("opening {omega} not in (0, 2π]")));
    }
    Ok(())
}

/// μ_{n,ω} = (π/ω)² μ_n.
pub fn buckling_eigenvalue(n: usize, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    Ok((PI / omega).powi(2) * base_eigenvalue(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// odd n: b ∝ 1 − cos((n+1)θ), symmetric about the midpoint
    Odd,
    /// even n: b ∝ sin(√μ s) − β s in the centred variable s
    Even,
}

/// Eigenpair of b'''' + μ b'' = 0 on [0, ω] with clamped ends.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BucklingMode {
    pub omega: f64,
    pub n: usize,
    pub mu: f64,
    pub parity: Parity,
    pub beta: f64,
    /// |∫(b')² − 1| measured by Simpson quadrature.
    pub norm_check: f64,
    k: f64,
    amp: f64,
}

impl BucklingMode {
    pub fn new(n: usize, omega: f64) -> Result<Self> {
        Self::with_grid(n, omega, ANGULAR_SAMPLES)
    }

    pub fn with_grid(n: usize, omega: f64, grid: usize) -> Result<Self> {
        check_omega(omega)?;
        let mu0 = base_eigenvalue(n)?;
        let k = mu0.sqrt();
        let (parity, beta, amp) = if n % 2 == 1 {
            (Parity::Odd, 0.0, (2.0 / PI).sqrt() / k)
        } else {
            let a = 0.5 * PI;
            let beta = (k * a).sin() / a;
            // ∫_{-a}^{a} (k cos ks − β)² ds
            let grad2 = k * k * (a + (2.0 * k * a).sin() / (2.0 * k))
                - 4.0 * beta * (k * a).sin()
                + 2.0 * a * beta * beta;
            (Parity::Even, beta, beta.signum() / grad2.sqrt())
        };
        let mut mode = BucklingMode {
            omega,
            n,
            mu: (PI / omega).powi(2) * mu0,
            parity,
            beta,
            norm_check: 0.0,
            k,
            amp,
        };
        let g = simpson(|t| mode.derivs(t)[1].powi(2), 0.0, omega, grid.max(64));
        mode.norm_check = (g - 1.0).abs();
        Ok(mode)
    }

    /// Derivatives of order 0..=4 of the reference mode on [0, π].
    fn base_derivs(&self, x: f64) -> [f64; 5] {
        let k = self.k;
        match self.parity {
            Parity::Odd => {
                let c = self.amp;
                let (s, co) = (k * x).sin_cos();
                [
                    c * (1.0 - co),
                    c * k * s,
                    c * k * k * co,
                    -c * k.powi(3) * s,
                    -c * k.powi(4) * co,
                ]
            }
            Parity::Even => {
                let a = self.amp;
                let s = x - 0.5 * PI;
                let (sn, co) = (k * s).sin_cos();
                [
                    a * (sn - self.beta * s),
                    a * (k * co - self.beta),
                    -a * k * k * sn,
                    -a * k.powi(3) * co,
                    a * k.powi(4) * sn,
                ]
            }
        }
    }

    /// b, b', b'', b''', b'''' at θ; zero outside [0, ω].
    pub fn derivs(&self, theta: f64) -> [f64; 5] {
        if !(0.0..=self.omega).contains(&theta) {
            return [0.0; 5];
        }
        let q = PI / self.omega;
        let d = self.base_derivs(theta * q);
        let mut out = [0.0; 5];
        let mut f = (1.0 / q).sqrt();
        for j in 0..5 {
            out[j] = f * d[j];
            f *= q;
        }
        out
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.derivs(theta)[0]
    }

    /// ‖b_{n,ω}‖²_{L²} in closed form.
    pub fn l2_norm_sq(&self) -> f64 {
        let base = match self.parity {
            Parity::Odd => 3.0 / (self.k * self.k),
            Parity::Even => {
                let (k, a, b) = (self.k, 0.5 * PI, self.beta);
                let ss = a - (2.0 * k * a).sin() / (2.0 * k);
                let xs = 2.0 * (-a * (k * a).cos() / k + (k * a).sin() / (k * k));
                let xx = 2.0 * a.powi(3) / 3.0;
                self.amp * self.amp * (ss - 2.0 * b * xs + b * b * xx)
            }
        };
        (self.omega / PI).powi(2) * base
    }

    /// Angular function supported on [offset, offset + ω].
    pub fn placed(&self, offset: f64) -> AngularFunction {
        let m = self.clone();
        AngularFunction::from_fn(
            move |t| {
                let d = m.derivs((t - offset).rem_euclid(TAU));
                [d[0], d[1], d[2]]
            },
            vec![Interval::new(offset, self.omega)],
        )
    }
}

/// Roots of sin ω (ω cos ω − sin ω) in (0, 2π].
///
/// The sine factor contributes π and 2π exactly; the second factor is
/// scanned for sign changes and refined by bisection.
pub fn admissible_openings(tol: f64) -> Vec<f64> {
    assert!(tol > 0.0);
    let mut roots = vec![PI, TAU];
    let step = 1e-3;
    let mut a = 0.01;
    while a < TAU {
        let b = (a + step).min(TAU);
        if t1_residual(a).signum() != t1_residual(b).signum() {
            if let Ok(r) = bisect(t1_residual, a, b, 200) {
                roots.push(r);
            }
        }
        a = b;
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup_by(|x, y| (*x - *y).abs() < tol);
    roots
}

/// i(Θ): the mode whose eigenvalue equals 4 at opening Θ.
pub fn mode_index(theta: f64) -> Option<usize> {
    let t = t1();
    if (theta - PI).abs() < 1e-9 {
        Some(1)
    } else if (theta - t).abs() < 1e-9 {
        Some(2)
    } else if (theta - TAU).abs() < 1e-9 {
        Some(3)
    } else {
        None
    }
}

/// Arc of the circle starting at `start` with length `len` ∈ (0, 2π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub len: f64,
}

impl Interval {
    pub fn new(start: f64, len: f64) -> Self {
        Interval {
            start: start.rem_euclid(TAU),
            len: len.min(TAU),
        }
    }

    pub fn full() -> Self {
        Interval::new(0.0, TAU)
    }

    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    /// Offset of θ from the start, in [0, 2π).
    pub fn local(&self, theta: f64) -> f64 {
        (theta - self.start).rem_euclid(TAU)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.len >= TAU || self.local(theta) <= self.len
    }

    pub fn contains_open(&self, theta: f64) -> bool {
        let l = self.local(theta);
        self.len >= TAU || (l > 0.0 && l < self.len)
    }

    /// Sort as components are indexed: decreasing length, then left endpoint.
    pub fn sort(list: &mut [Interval]) {
        list.sort_by(|a, b| b.len.total_cmp(&a.len).then(a.start.total_cmp(&b.start)));
    }

    /// Union of arcs, merged where they overlap or touch.
    pub fn union(list: &[Interval]) -> Vec<Interval> {
        if list.iter().any(|i| i.len >= TAU - 1e-14) {
            return vec![Interval::full()];
        }
        let mut segs: Vec<(f64, f64)> = list.iter().map(|i| (i.start, i.end())).collect();
        segs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in segs {
            match merged.last_mut() {
                Some(last) if a <= last.1 + 1e-14 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if last.1 >= first.0 + TAU - 1e-14 {
                merged.pop();
                merged[0] = (last.0, last.1.max(first.1 + TAU));
            }
        }
        let mut out: Vec<Interval> = merged
            .into_iter()
            .map(|(a, b)| {
                if b - a >= TAU - 1e-14 {
                    Interval::full()
                } else {
                    Interval::new(a, b - a)
                }
            })
            .collect();
        if out.iter().any(|i| i.len >= TAU) {
            out = vec![Interval::full()];
        }
        Interval::sort(&mut out);
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.start, self.end())
    }
}

type AngularEval = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// Real function on the circle with two weak derivatives.
///
/// Values come from a closed-form evaluator (or a trigonometric
/// interpolant of samples); the support is kept as exact arcs.
#[derive(Clone)]
pub struct AngularFunction {
    eval: AngularEval,
    support: Vec<Interval>,
}

impl fmt::Debug for AngularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularFunction")
            .field("support", &self.support)
            .finish()
    }
}

impl AngularFunction {
    /// `f` returns (b, b', b'') and must vanish outside `support`.
    pub fn from_fn(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static, support: Vec<Interval>) -> Self {
        let mut support = Interval::union(&support);
        Interval::sort(&mut support);
        AngularFunction {
            eval: Arc::new(f),
            support,
        }
    }

    pub fn zero() -> Self {
        AngularFunction::from_fn(|_| [0.0; 3], Vec::new())
    }

    /// Trigonometric interpolant of equispaced samples on [0, 2π),
    /// truncated at |n| ≤ `n_max`. The support is the full circle.
    pub fn from_samples(values: &[f64], n_max: usize) -> Self {
        let m = values.len();
        let nm = n_max.min((m - 1) / 2);
        let mut coef = vec![(0.0, 0.0); nm + 1];
        for (n, c) in coef.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let a = -(n as f64) * TAU * j as f64 / m as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            *c = (re / m as f64, im / m as f64);
        }
        AngularFunction::from_fn(
            move |t| {
                let mut out = [coef[0].0, 0.0, 0.0];
                for (n, &(re, im)) in coef.iter().enumerate().skip(1) {
                    let nf = n as f64;
                    let (s, c) = (nf * t).sin_cos();
                    // 2 Re(c_n e^{inθ})
                    let v = 2.0 * (re * c - im * s);
                    let d = 2.0 * nf * (-re * s - im * c);
                    out[0] += v;
                    out[1] += d;
                    out[2] -= nf * nf * v;
                }
                out
            },
            vec![Interval::full()],
        )
    }

    pub fn eval(&self, theta: f64) -> [f64; 3] {
        (self.eval)(theta)
    }

    pub fn value(&self, theta: f64) -> f64 {
        (self.eval)(theta)[0]
    }

    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    pub fn support_measure(&self) -> f64 {
        self.support.iter().map(|i| i.len).sum()
    }

    pub fn add(&self, other: &AngularFunction) -> AngularFunction {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut sup = self.support.clone();
        sup.extend_from_slice(&other.support);
        AngularFunction::from_fn(
            move |t| {
                let (a, b) = (f(t), g(t));
                [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
            },
            sup,
        )
    }

    pub fn scale(&self, c: f64) -> AngularFunction {
        let f = self.eval.clone();
        let sup = if c == 0.0 { Vec::new() } else { self.support.clone() };
        AngularFunction::from_fn(
            move |t| {
                let a = f(t);
                [c * a[0], c * a[1], c * a[2]]
            },
            sup,
        )
    }

    /// θ ↦ f(θ − φ).
    pub fn rotate(&self, phi: f64) -> AngularFunction {
        let f = self.eval.clone();
        let sup = self
            .support
            .iter()
            .map(|i| Interval::new(i.start + phi, i.len))
            .collect();
        AngularFunction::from_fn(move |t| f(t - phi), sup)
    }

    /// ∫ over the support of g(θ, f, f', f'') by Simpson on each arc.
    pub fn integrate(&self, g: impl Fn(f64, [f64; 3]) -> f64) -> f64 {
        self.support
            .iter()
            .map(|iv| {
                let n = ((ANGULAR_SAMPLES as f64 * iv.len / TAU).ceil() as usize).max(64);
                simpson(|t| g(t, self.eval(t)), iv.start, iv.start + iv.len, n)
            })
            .sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.integrate(|_, d| d[0] * d[0])
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.integrate(|_, d| d[1] * d[1])
    }

    pub fn second_norm_sq(&self) -> f64 {
        self.integrate(|_, d| d[2] * d[2])
    }

    pub fn samples(&self, n: usize) -> Vec<[f64; 3]> {
        (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Flat,
    Angular,
    Nodal,
    Isolated,
}

/// Parameters of a homogeneous profile; fields unused by a kind are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub sign: f64,
    pub rotation: f64,
    pub lambda: f64,
    pub abc: (f64, f64, f64),
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            sign: 1.0,
            rotation: 0.0,
            lambda: 1.0,
            abc: (1.0, 0.0, 0.0),
        }
    }
}

/// u(re^{iθ}) = r² b(θ).
#[derive(Debug, Clone)]
pub struct HomogeneousProfile {
    pub kind: ProfileKind,
    pub params: ProfileParams,
    pub angular: AngularFunction,
}

/// b^II on [0, t₁] with derivatives.
pub fn b_angular(phi: f64) -> [f64; 3] {
    let t = t1();
    if !(0.0..=t).contains(&phi) {
        return [0.0; 3];
    }
    let (s, c) = (2.0 * phi).sin_cos();
    [
        0.25 * (1.0 - c - (2.0 / t) * (phi - 0.5 * s)),
        0.25 * (2.0 * s - (2.0 / t) * (1.0 - c)),
        c - s / t,
    ]
}

/// b^I = sin(θ)₊²/2 with derivatives.
pub fn b_flat(phi: f64) -> [f64; 3] {
    let p = phi.rem_euclid(TAU);
    if p > PI {
        return [0.0; 3];
    }
    let (s, c) = (2.0 * p).sin_cos();
    [0.5 * p.sin().powi(2), 0.5 * s, c]
}

pub fn homogeneous_profile(kind: ProfileKind, params: ProfileParams) -> Result<HomogeneousProfile> {
    let sg = params.sign;
    if sg != 1.0 && sg != -1.0 {
        return Err(Error::Domain(format!("sign must be ±1, got {sg}")));
    }
    let rot = params.rotation;
    let angular = match kind {
        ProfileKind::Flat => AngularFunction::from_fn(
            move |t| {
                let d = b_flat(t - rot);
                [sg * d[0], sg * d[1], sg * d[2]]
            },
            vec![Interval::new(rot, PI)],
        ),
        ProfileKind::Angular => AngularFunction::from_fn(
            move |t| {
                let d = b_angular((t - rot).rem_euclid(TAU));
                [sg * d[0], sg * d[1], sg * d[2]]
            },
            vec![Interval::new(rot, t1())],
        ),
        ProfileKind::Nodal => {
            let l = params.lambda;
            if l.abs() < 1.0 {
                return Err(Error::Domain(format!("nodal multiplier |λ| = {} < 1", l.abs())));
            }
            let c = sg * l;
            AngularFunction::from_fn(
                move |t| {
                    let p = t - rot;
                    let (s, co) = (2.0 * p).sin_cos();
                    [0.5 * c * p.sin().powi(2), 0.5 * c * s, c * co]
                },
                vec![Interval::full()],
            )
        }
        ProfileKind::Isolated => {
            let (a, b, c) = params.abc;
            let gap = a * a - (b * b + c * c);
            if gap.abs() <= 1e-12 * (a * a + b * b + c * c).max(1e-300) {
                return Err(Error::Domain(
                    "a² = b² + c² is the nodal family, not an isolated point".into(),
                ));
            }
            AngularFunction::from_fn(
                move |t| {
                    let p = t - rot;
                    let (s, co) = (2.0 * p).sin_cos();
                    [
                        sg * (a + b * co + c * s),
                        sg * 2.0 * (-b * s + c * co),
                        sg * -4.0 * (b * co + c * s),
                    ]
                },
                vec![Interval::full()],
            )
        }
    };
    Ok(HomogeneousProfile {
        kind,
        params,
        angular,
    })
}

/// For a² = b² + c² the quadratic a r² + r²(b cos 2θ + c sin 2θ) is the
/// nodal profile λ sin(θ − φ)²/2; returns (λ, φ).
pub fn nodal_equivalent(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let rho = (b * b + c * c).sqrt();
    if (a.abs() - rho).abs() > 1e-12 * a.abs().max(1.0) || a == 0.0 {
        return None;
    }
    // a + ρ cos(2θ − 2ψ) with ρ = |a|
    let psi = 0.5 * c.atan2(b);
    if a > 0.0 {
        // 2a cos²(θ − ψ) = 2a sin²(θ − ψ + π/2)
        Some((4.0 * a, psi - 0.5 * PI))
    } else {
        // a(1 − cos(2θ − 2ψ)) = 2a sin²(θ − ψ)
        Some((4.0 * a, psi))
    }
}

impl HomogeneousProfile {
    /// u, u_r, u_θ, u_rr, u_rθ, u_θθ at (r, θ).
    pub fn jet(&self, r: f64, theta: f64) -> [f64; 6] {
        let [b, b1, b2] = self.angular.eval(theta);
        [r * r * b, 2.0 * r * b, r * r * b1, 2.0 * b, 2.0 * r * b1, r * r * b2]
    }

    /// Expected value of the Weiss quantity: half the support measure.
    pub fn weiss_value(&self) -> f64 {
        0.5 * self.angular.support_measure()
    }
}

/// Coefficients of a function in the buckling basis of one support arc.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportComponent {
    pub interval: Interval,
    /// u_n for n = 1, 2, ... in the gradient inner product.
    pub coeffs: Vec<f64>,
}

impl SupportComponent {
    pub fn omega(&self) -> f64 {
        self.interval.len
    }

    pub fn grad_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Decomposes f on each arc of `support` as Σ u_n^k b_{n,ω_k}(θ − θ_k).
pub fn decompose_on_support(f: &AngularFunction, support: &[Interval]) -> Result<Vec<SupportComponent>> {
    decompose_with(f, support, MAX_MODE)
}

pub fn decompose_with(f: &AngularFunction, support: &[Interval], n_max: usize) -> Result<Vec<SupportComponent>> {
    decompose_impl(f, support, n_max, true)
}

/// As [`decompose_with`] for H¹₀ data: only the values must vanish at the
/// arc endpoints.
pub fn decompose_h1(f: &AngularFunction, support: &[Interval], n_max: usize) -> Result<Vec<SupportComponent>> {
    decompose_impl(f, support, n_max, false)
}

fn decompose_impl(
    f: &AngularFunction,
    support: &[Interval],
    n_max: usize,
    clamped: bool,
) -> Result<Vec<SupportComponent>> {
    let mut arcs = support.to_vec();
    Interval::sort(&mut arcs);
    let scale = (0..ANGULAR_SAMPLES)
        .map(|j| {
            let d = f.eval(TAU * j as f64 / ANGULAR_SAMPLES as f64);
            d[0].abs().max(d[1].abs())
        })
        .fold(0.0, f64::max)
        .max(1e-300);
    let tol = 1e-8 * scale;
    for j in 0..ANGULAR_SAMPLES {
        let t = TAU * (j as f64 + 0.5) / ANGULAR_SAMPLES as f64;
        if arcs.iter().any(|iv| iv.contains(t)) {
            continue;
        }
        let d = f.eval(t);
        if d[0].abs() > tol || (clamped && d[1].abs() > tol) {
            return Err(Error::Domain(format!(
                "function is nonzero at θ = {t:.6}, outside the given support"
            )));
        }
    }
    let mut out = Vec::with_capacity(arcs.len());
    for iv in &arcs {
        if iv.len < TAU {
            for &e in &[iv.start, iv.end()] {
                let d = f.eval(e);
                if d[0].abs() > 1e-6 * scale || (clamped && d[1].abs() > 1e-6 * scale) {
                    return Err(Error::Precondition(format!(
                        "function is not clamped at endpoint {e:.6} of {iv}"
                    )));
                }
            }
        }
        let omega = iv.len;
        let nq = ((ANGULAR_SAMPLES as f64 * omega / TAU).ceil() as usize).max(256) * 2;
        let h = omega / nq as f64;
        let w = crate::quad::simpson_weights(nq, h);
        let fp: Vec<f64> = (0..=nq).map(|k| f.eval(iv.start + k as f64 * h)[1]).collect();
        let mut coeffs = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let m = BucklingMode::with_grid(n, omega, 64)?;
            let c: f64 = (0..=nq).map(|k| w[k] * fp[k] * m.derivs(k as f64 * h)[1]).sum();
            coeffs.push(c);
        }
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.abs() < 1e-12) {
            coeffs.pop();
        }
        out.push(SupportComponent { interval: *iv, coeffs });
    }
    Ok(out)
}
