use super::field::{DiskField, Jet, PolarGrid};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Coefficients of u = Σ (a_n r^{|n|+2} + b_n r^{|n|}) e^{inθ}, n ∈ [−N, N].
#[derive(Debug, Clone, PartialEq)]
pub struct GoursatCoefficients {
    pub n_max: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct GoursatJson {
    n_max: usize,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
}

/// m(m−1)…(m−d+1) r^{m−d}, zero when the falling factorial vanishes.
fn dpow(m: i32, r: f64, d: i32) -> f64 {
    let mut c = 1.0;
    for k in 0..d {
        c *= (m - k) as f64;
    }
    if c == 0.0 {
        0.0
    } else {
        c * r.powi(m - d)
    }
}

impl GoursatCoefficients {
    pub fn zeros(n_max: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        GoursatCoefficients {
            n_max,
            a: z.clone(),
            b: z,
        }
    }

    fn idx(&self, n: i64) -> usize {
        assert!(n.unsigned_abs() as usize <= self.n_max, "mode {n} out of range");
        (n + self.n_max as i64) as usize
    }

    pub fn a(&self, n: i64) -> Complex64 {
        self.a[self.idx(n)]
    }

    pub fn b(&self, n: i64) -> Complex64 {
        self.b[self.idx(n)]
    }

    /// Sets (a_n, b_n) and the conjugate pair at −n so the field stays real.
    pub fn set(&mut self, n: i64, a: Complex64, b: Complex64) {
        let (i, k) = (self.idx(n), self.idx(-n));
        self.a[i] = a;
        self.b[i] = b;
        if n == 0 {
            self.a[i].im = 0.0;
            self.b[i].im = 0.0;
        } else {
            self.a[k] = a.conj();
            self.b[k] = b.conj();
        }
    }

    /// u(0) = b₀ and ∇u(0) is carried by b_{±1}.
    pub fn is_center_flat(&self) -> bool {
        let n = self.n_max as i64;
        let mut m = self.b(0).norm();
        if n >= 1 {
            m = m.max(self.b(1).norm()).max(self.b(-1).norm());
        }
        m == 0.0
    }

    /// Random real coefficients with entries uniform in the unit square.
    /// `center_flat` zeroes b₀ and b_{±1}.
    pub fn random<R: Rng>(rng: &mut R, n_max: usize, center_flat: bool) -> Self {
        let mut c = GoursatCoefficients::zeros(n_max);
        let draw = |rng: &mut R| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for n in 0..=n_max as i64 {
            let a = draw(rng);
            let mut b = draw(rng);
            if center_flat && n <= 1 {
                b = Complex64::new(0.0, 0.0);
            }
            c.set(n, a, b);
        }
        c
    }

    /// Complex radial factors for one mode: value and r-derivatives up to 2.
    fn radial(&self, n: i64, r: f64) -> [Complex64; 3] {
        let k = n.abs() as i32;
        let (a, b) = (self.a(n), self.b(n));
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (d, o) in out.iter_mut().enumerate() {
            *o = a * dpow(k + 2, r, d as i32) + b * dpow(k, r, d as i32);
        }
        out
    }

    pub fn jet(&self, r: f64, theta: f64) -> [f64; 6] {
        let mut out = [0.0; 6];
        let nm = self.n_max as i64;
        for n in -nm..=nm {
            let e = Complex64::from_polar(1.0, n as f64 * theta);
            let [c0, c1, c2] = self.radial(n, r);
            let i_n = Complex64::new(0.0, n as f64);
            out[0] += (c0 * e).re;
            out[1] += (c1 * e).re;
            out[2] += (i_n * c0 * e).re;
            out[3] += (c2 * e).re;
            out[4] += (i_n * c1 * e).re;
            out[5] += (-(n * n) as f64 * c0 * e).re;
        }
        out
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        self.jet(r, theta)[0]
    }

    pub fn to_field(&self, grid: PolarGrid) -> Result<DiskField> {
        DiskField::from_jet(grid, |r, t| self.jet(r, t))
    }

    /// W₀(u, r): the Weiss quantity without the area term, in closed form.
    pub fn w0(&self, r: f64) -> f64 {
        let nm = self.n_max as i64;
        let mut s = 0.0;
        for n in -nm..=nm {
            let k = n.abs() as i32;
            let kf = k as f64;
            let (a, b) = (self.a(n), self.b(n));
            s += kf.powi(3) * r.powi(2 * k) * a.norm_sqr();
            if k != 2 && k != 0 {
                s += 2.0 * kf * kf * (kf - 2.0) * r.powi(2 * k - 2) * (a.conj() * b).re;
            }
            if k != 2 {
                s += (kf - 2.0) * (kf * kf - 2.0 * kf + 2.0) * r.powi(2 * k - 4) * b.norm_sqr();
            }
        }
        8.0 * PI * s
    }

    /// dW₀/dr, a sum of nonnegative Hermitian forms.
    pub fn w0_prime(&self, r: f64) -> f64 {
        let nm = self.n_max as i64;
        let mut s = 0.0;
        for n in -nm..=nm {
            let k = n.abs() as i32;
            let kf = k as f64;
            let (a, b) = (self.a(n), self.b(n));
            s += kf.powi(4) * r.powi(2 * k) * a.norm_sqr();
            if k >= 3 {
                s += 2.0 * kf * kf * (kf - 1.0) * (kf - 2.0) * r.powi(2 * k - 2) * (a.conj() * b).re;
            }
            if k != 2 {
                s += (kf - 2.0).powi(2) * (kf * kf - 2.0 * kf + 2.0) * r.powi(2 * k - 4) * b.norm_sqr();
            }
        }
        16.0 * PI * s / r
    }

    pub fn to_json(&self) -> Result<String> {
        let pack = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
        Ok(serde_json::to_string_pretty(&GoursatJson {
            n_max: self.n_max,
            a: pack(&self.a),
            b: pack(&self.b),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: GoursatJson = serde_json::from_str(s)?;
        let len = 2 * j.n_max + 1;
        if j.a.len() != len || j.b.len() != len {
            return Err(Error::Domain(format!("expected {len} coefficients per family")));
        }
        let unpack = |v: &[[f64; 2]]| v.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Ok(GoursatCoefficients {
            n_max: j.n_max,
            a: unpack(&j.a),
            b: unpack(&j.b),
        })
    }
}

/// Fourier coefficients c_n = (1/2π)∫ e^{−inθ} f of u, ∂_r u, ∂_rr u on a circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub radius: f64,
    pub n_max: usize,
    pub cu: Vec<Complex64>,
    pub cur: Vec<Complex64>,
    pub curr: Vec<Complex64>,
}

impl BoundaryTrace {
    /// From closed-form traces θ ↦ (u, ∂_r u, ∂_rr u), sampled at `m` points.
    pub fn from_fn(radius: f64, n_max: usize, m: usize, f: impl Fn(f64) -> [f64; 3]) -> Self {
        let samples: Vec<[f64; 3]> = (0..m).map(|j| f(TAU * j as f64 / m as f64)).collect();
        Self::from_samples(radius, n_max, &samples)
    }

    pub fn from_samples(radius: f64, n_max: usize, samples: &[[f64; 3]]) -> Self {
        let m = samples.len();
        let len = 2 * n_max + 1;
        let mut c = [vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len]];
        for n in -(n_max as i64)..=n_max as i64 {
            let i = (n + n_max as i64) as usize;
            for (j, s) in samples.iter().enumerate() {
                let e = Complex64::from_polar(1.0, -(n as f64) * TAU * j as f64 / m as f64);
                for q in 0..3 {
                    c[q][i] += s[q] * e;
                }
            }
            for q in 0..3 {
                c[q][i] /= m as f64;
            }
        }
        let [cu, cur, curr] = c;
        BoundaryTrace {
            radius,
            n_max,
            cu,
            cur,
            curr,
        }
    }

    /// Trace of a sampled field on the circle of radius r.
    pub fn from_field(field: &DiskField, r: f64, n_max: usize) -> Self {
        let ring: Vec<Jet> = field.ring_at(r);
        let samples: Vec<[f64; 3]> = ring.iter().map(|j| [j.u, j.ur, j.urr]).collect();
        Self::from_samples(r, n_max, &samples)
    }

    pub fn c(&self, v: &[Complex64], n: i64) -> Complex64 {
        v[(n + self.n_max as i64) as usize]
    }

    /// 2π Σ |c_n[u]|², which equals ‖u‖²_{L²(circle)} for band-limited data.
    pub fn parseval_u(&self) -> f64 {
        TAU * self.cu.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let m = |v: &[Complex64]| v.iter().map(|c| c * s).collect();
        BoundaryTrace {
            radius: self.radius,
            n_max: self.n_max,
            cu: m(&self.cu),
            cur: m(&self.cur),
            curr: m(&self.curr),
        }
    }
}

/// Coefficients of the biharmonic extension of (u, ∂_r u) on the unit circle.
pub fn goursat_from_boundary(trace: &BoundaryTrace) -> Result<GoursatCoefficients> {
    if (trace.radius - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "trace taken at radius {}, expected 1",
            trace.radius
        )));
    }
    let nm = trace.n_max as i64;
    let mut g = GoursatCoefficients::zeros(trace.n_max);
    for n in -nm..=nm {
        let i = g.idx(n);
        let a = (trace.c(&trace.cur, n) - n.abs() as f64 * trace.c(&trace.cu, n)) / 2.0;
        g.a[i] = a;
        g.b[i] = trace.c(&trace.cu, n) - a;
    }
    Ok(g)
}

/// E(ũ; D₁) with full support for the biharmonic extension ũ of the trace.
pub fn biharmonic_extension_energy(trace: &BoundaryTrace) -> Result<f64> {
    if (trace.radius - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "trace taken at radius {}, expected 1",
            trace.radius
        )));
    }
    let nm = trace.n_max as i64;
    let mut s = 0.0;
    for n in -nm..=nm {
        let k = n.abs() as f64;
        let d = trace.c(&trace.cur, n) - k * trace.c(&trace.cu, n);
        s += 2.0 * (k + 1.0) * d.norm_sqr();
    }
    Ok(PI + TAU * s)
}
