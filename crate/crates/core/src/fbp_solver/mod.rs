//! Candidate minimizers of E_λ(u; D₁) = ∫|Δu|² + λ|{u ≠ 0}| with clamped
//! data on ∂D₁, by alternating a biharmonic solve on a fixed support with
//! support updates. The support update is a heuristic: outputs are
//! candidate minimizers, not certified ones.

mod experiments;
mod mesh;
pub mod radial;

pub use experiments::{blow_up_sequence, monotonicity_experiment, BlowUp, MonotonicityReport, Violation, SLACK_PER_H};
pub use radial::{annulus_energy, radial_oracle, RadialSolution, RadialSupport};

use crate::error::{Error, Result};
use crate::weiss_energy::{goursat_from_boundary, weiss_w_lambda, BoundaryTrace, DiskField, PolarGrid, TAU_SUPP};
use mesh::{interpolate, Mesh};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::sync::Arc;

/// A cell re-enters the support only if (Δu)² at its neighbour exceeds this
/// multiple of λ.
pub const HYSTERESIS: f64 = 2.0;
/// Cells that changed state this often are frozen.
const MAX_FLIPS: u8 = 3;
const MAX_STRIDE: usize = 16;
const SINGLE_FLIP_TRIES: usize = 8;
pub const SOLUTION_LABEL: &str = "candidate minimizer";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportUpdateRule {
    /// front moves driven by (Δu)² against λ, from several initial supports
    CellwiseThreshold,
    /// supports restricted to annuli {r ≥ ρ}, ρ optimized by a 1-D search
    RadialExact,
}

impl std::str::FromStr for SupportUpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cellwise-threshold" => Ok(Self::CellwiseThreshold),
            "radial-exact" => Ok(Self::RadialExact),
            _ => Err(Error::Domain(format!("unknown support update rule '{s}'"))),
        }
    }
}

/// `n_r` cells per unit length on the Cartesian mesh, so the disk sits in a
/// (2n_r)² box; the output field is resampled on an n_r × n_θ polar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub max_outer_iters: usize,
    pub support_update_rule: SupportUpdateRule,
    pub tol_energy: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 1.0,
            n_r: 64,
            n_theta: 128,
            max_outer_iters: 400,
            support_update_rule: SupportUpdateRule::CellwiseThreshold,
            tol_energy: 1e-10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!("λ = {} must be finite and ≥ 0", self.lambda)));
        }
        if self.n_r < 16 || self.n_theta < 16 {
            return Err(Error::Domain(format!(
                "grid sizes must be ≥ 16 (n_r = {}, n_θ = {})",
                self.n_r, self.n_theta
            )));
        }
        if !(self.tol_energy > 0.0) {
            return Err(Error::Domain("tol_energy must be positive".into()));
        }
        Ok(())
    }
}

/// Clamped data (u, ∂_r u) on ∂D₁ together with the smooth extension used
/// on the nodes outside the disk.
#[derive(Clone)]
pub struct BoundaryData {
    pub label: String,
    pub trace: BoundaryTrace,
    ext: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryData")
            .field("label", &self.label)
            .field("n_max", &self.trace.n_max)
            .finish()
    }
}

impl BoundaryData {
    /// Band-limited traces; extended by their biharmonic (Goursat) extension.
    pub fn from_trace(label: impl Into<String>, trace: BoundaryTrace) -> Result<Self> {
        let g = goursat_from_boundary(&trace)?;
        Ok(BoundaryData {
            label: label.into(),
            trace,
            ext: Arc::new(move |x, y| g.value(x.hypot(y), y.atan2(x))),
        })
    }

    /// (u, ∂_r u) = (g0, h0) on the whole circle.
    pub fn radial(g0: f64, h0: f64) -> Self {
        let trace = BoundaryTrace::from_fn(1.0, 0, 8, |_| [g0, h0, 0.0]);
        BoundaryData {
            label: format!("radial({g0}, {h0})"),
            trace,
            ext: Arc::new(move |x, y| {
                let r2 = x * x + y * y;
                g0 - 0.5 * h0 + 0.5 * h0 * r2
            }),
        }
    }

    /// Traces and extension of a field known in closed form, (r, θ) ↦ jet.
    pub fn from_jet(
        label: impl Into<String>,
        n_max: usize,
        f: impl Fn(f64, f64) -> [f64; 6] + Send + Sync + 'static,
    ) -> Self {
        let trace = BoundaryTrace::from_fn(1.0, n_max, 4 * n_max.max(16) + 1, |t| {
            let j = f(1.0, t);
            [j[0], j[1], j[3]]
        });
        BoundaryData {
            label: label.into(),
            trace,
            ext: Arc::new(move |x, y| f(x.hypot(y), y.atan2(x))[0]),
        }
    }

    pub fn extension(&self, x: f64, y: f64) -> f64 {
        (self.ext)(x, y)
    }

    /// (g, h) at angle θ from the Fourier data.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        let nm = self.trace.n_max as i64;
        let (mut g, mut h) = (0.0, 0.0);
        for n in -nm..=nm {
            let e = Complex64::from_polar(1.0, n as f64 * theta);
            g += (self.trace.c(&self.trace.cu, n) * e).re;
            h += (self.trace.c(&self.trace.cur, n) * e).re;
        }
        (g, h)
    }

    /// ‖(g, h)‖ as the max over the circle of |g| + |h|.
    pub fn sup_norm(&self) -> f64 {
        (0..720)
            .map(|k| {
                let (g, h) = self.eval(TAU * k as f64 / 720.0);
                g.abs() + h.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Node values and support on the Cartesian mesh.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CartesianSolution {
    pub n_r: usize,
    pub h: f64,
    pub side: usize,
    pub values: Vec<f64>,
    /// interior nodes in the support
    pub support: Vec<bool>,
}

impl CartesianSolution {
    fn xy(&self, k: usize) -> (f64, f64) {
        let c = (self.side / 2) as f64;
        ((( k % self.side) as f64 - c) * self.h, ((k / self.side) as f64 - c) * self.h)
    }

    /// Number of support nodes in the open disk of radius r.
    pub fn support_within(&self, r: f64) -> usize {
        (0..self.values.len())
            .filter(|&k| {
                let (x, y) = self.xy(k);
                self.support[k] && x * x + y * y < r * r
            })
            .count()
    }

    /// max |u| over nodes in the open disk of radius r.
    pub fn max_abs_within(&self, r: f64) -> f64 {
        (0..self.values.len())
            .filter(|&k| {
                let (x, y) = self.xy(k);
                x * x + y * y < r * r
            })
            .map(|k| self.values[k].abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartSummary {
    pub label: String,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub field: DiskField,
    pub energy_history: Vec<f64>,
    pub energy: f64,
    /// Σ w(Δ_h u)², the energy without the area term
    pub bending: f64,
    pub support_area: f64,
    pub converged: bool,
    /// (r, W(u, r)) where W is defined
    pub w_profile: Vec<(f64, f64)>,
    pub starts: Vec<StartSummary>,
    pub flags: Vec<String>,
    pub mesh: CartesianSolution,
    pub config: SolverConfig,
}

/// The JSON part of a run: everything except the fields themselves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub label: String,
    pub boundary: String,
    pub config: SolverConfig,
    pub energy: f64,
    pub bending: f64,
    pub support_area: f64,
    pub converged: bool,
    pub energy_history: Vec<f64>,
    pub w_profile: Vec<(f64, f64)>,
    pub starts: Vec<StartSummary>,
    pub flags: Vec<String>,
}

impl SolveResult {
    pub fn summary(&self, boundary: &BoundaryData) -> SolveSummary {
        SolveSummary {
            label: SOLUTION_LABEL.into(),
            boundary: boundary.label.clone(),
            config: self.config.clone(),
            energy: self.energy,
            bending: self.bending,
            support_area: self.support_area,
            converged: self.converged,
            energy_history: self.energy_history.clone(),
            w_profile: self.w_profile.clone(),
            starts: self.starts.clone(),
            flags: self.flags.clone(),
        }
    }
}

struct Run {
    mask: Vec<bool>,
    u: Vec<f64>,
    energy: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    rejected: usize,
}

struct Problem<'a> {
    mesh: &'a Mesh,
    lambda: f64,
    /// active exterior nodes: fixed, nonzero data
    live_fixed: Vec<bool>,
    order: Vec<usize>,
}

impl Problem<'_> {
    fn energy(&self, u: &[f64], mask: &[bool]) -> f64 {
        self.mesh.bending(u) + self.lambda * self.mesh.area(mask)
    }

    fn evaluate(&self, mask: &[bool]) -> Result<(Vec<f64>, f64)> {
        let u = self.mesh.solve(mask)?;
        let e = self.energy(&u, mask);
        Ok((u, e))
    }

    fn in_support(&self, mask: &[bool], k: usize) -> bool {
        let p = self.mesh.unknown[k];
        if self.mesh.is_fixed(k) {
            self.live_fixed[k]
        } else {
            mask[p]
        }
    }

    /// Removal and addition candidates with their margins.
    fn candidates(&self, mask: &[bool], u: &[f64], frozen: &[bool], stride: usize) -> Vec<(usize, f64)> {
        let m = self.mesh;
        let lam = self.lambda;
        let lap2 = |k: usize| m.laplacian(u, k).powi(2);
        let mut out = Vec::new();
        // front cells of the support where shrinking lowers the energy
        let mut depth = vec![usize::MAX; m.nodes.len()];
        let mut queue = VecDeque::new();
        for (p, &k) in m.nodes.iter().enumerate() {
            if !mask[p] || frozen[p] {
                continue;
            }
            let front = m.neighbours(k).iter().any(|&nb| !self.in_support(mask, nb));
            if front && lap2(k) < lam {
                depth[p] = 1;
                queue.push_back(p);
            }
        }
        while let Some(p) = queue.pop_front() {
            out.push((p, lam - lap2(m.nodes[p])));
            if depth[p] >= stride {
                continue;
            }
            for nb in m.neighbours(m.nodes[p]) {
                if m.is_fixed(nb) {
                    continue;
                }
                let q = m.unknown[nb];
                if mask[q] && !frozen[q] && depth[q] == usize::MAX && lap2(nb) < lam {
                    depth[q] = depth[p] + 1;
                    queue.push_back(q);
                }
            }
        }
        // cells outside the support next to a neighbour with large (Δu)²
        for (p, &k) in m.nodes.iter().enumerate() {
            if mask[p] || frozen[p] {
                continue;
            }
            let best = m
                .neighbours(k)
                .iter()
                .filter(|&&nb| self.in_support(mask, nb))
                .map(|&nb| lap2(nb))
                .fold(0.0, f64::max);
            if best > HYSTERESIS * lam && best > 0.0 {
                out.push((p, best - HYSTERESIS * lam));
            }
        }
        // largest margins first, ties in the seeded order
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then(self.order[a.0].cmp(&self.order[b.0])));
        out
    }

    fn greedy(&self, init: Vec<bool>, config: &SolverConfig) -> Result<Run> {
        let n = self.mesh.nodes.len();
        let mut mask = init;
        let (mut u, mut energy) = self.evaluate(&mask)?;
        let mut history = vec![energy];
        let mut flips = vec![0u8; n];
        let mut stride = 1;
        let mut converged = false;
        let mut rejected = 0;
        let mut iterations = 0;
        while iterations < config.max_outer_iters {
            iterations += 1;
            let frozen: Vec<bool> = flips.iter().map(|&f| f >= MAX_FLIPS).collect();
            let mut cands = self.candidates(&mask, &u, &frozen, stride);
            if cands.is_empty() {
                converged = true;
                break;
            }
            let mut take = cands.len();
            let mut accepted = None;
            loop {
                let mut trial = mask.clone();
                for &(p, _) in &cands[..take] {
                    trial[p] = !trial[p];
                }
                let (tu, te) = self.evaluate(&trial)?;
                if te < energy - 1e-14 * energy.abs().max(1.0) {
                    accepted = Some((trial, tu, te));
                    break;
                }
                rejected += 1;
                if stride > 1 {
                    stride /= 2;
                    cands = self.candidates(&mask, &u, &frozen, stride);
                    take = cands.len();
                    if take == 0 {
                        break;
                    }
                    continue;
                }
                if take == 1 {
                    break;
                }
                take /= 2;
            }
            match accepted {
                Some((trial, tu, te)) => {
                    for p in 0..n {
                        if trial[p] != mask[p] {
                            flips[p] = flips[p].saturating_add(1);
                        }
                    }
                    let drop = energy - te;
                    mask = trial;
                    u = tu;
                    energy = te;
                    history.push(energy);
                    stride = (stride * 2).min(MAX_STRIDE);
                    if drop < config.tol_energy {
                        converged = true;
                        break;
                    }
                }
                None => match self.single_flip(&mask, energy, &cands)? {
                    Some((p, tu, te)) => {
                        flips[p] = flips[p].saturating_add(1);
                        mask[p] = !mask[p];
                        u = tu;
                        energy = te;
                        history.push(energy);
                    }
                    None => {
                        converged = true;
                        break;
                    }
                },
            }
        }
        Ok(Run {
            mask,
            u,
            energy,
            history,
            iterations,
            converged,
            rejected,
        })
    }

    /// First candidate whose flip alone lowers the energy, among the
    /// leading SINGLE_FLIP_TRIES.
    fn single_flip(&self, mask: &[bool], energy: f64, cands: &[(usize, f64)]) -> Result<Option<(usize, Vec<f64>, f64)>> {
        for &(p, _) in cands.iter().take(SINGLE_FLIP_TRIES) {
            let mut trial = mask.to_vec();
            trial[p] = !trial[p];
            let (tu, te) = self.evaluate(&trial)?;
            if te < energy - 1e-14 * energy.abs().max(1.0) {
                return Ok(Some((p, tu, te)));
            }
        }
        Ok(None)
    }

    /// Supports {r ≥ ρ}; golden-section search over ρ on [0, 1].
    fn radial_search(&self, config: &SolverConfig) -> Result<Run> {
        let m = self.mesh;
        let annulus = |rho: f64| -> Vec<bool> {
            m.nodes
                .iter()
                .map(|&k| {
                    let (x, y) = m.xy(k);
                    x * x + y * y >= rho * rho
                })
                .collect()
        };
        let mut history = Vec::new();
        let mut best: Option<(Vec<bool>, Vec<f64>, f64)> = None;
        let mut eval = |rho: f64, best: &mut Option<(Vec<bool>, Vec<f64>, f64)>| -> Result<f64> {
            let mask = annulus(rho);
            let (u, e) = self.evaluate(&mask)?;
            if best.as_ref().map_or(true, |b| e < b.2) {
                *best = Some((mask, u, e));
                history.push(e);
            }
            Ok(e)
        };
        let mut scan = Vec::new();
        for k in 0..=20 {
            let rho = k as f64 / 20.0;
            scan.push((rho, eval(rho, &mut best)?));
        }
        let k = scan
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let (mut a, mut b) = (scan[k.saturating_sub(1)].0, scan[(k + 1).min(20)].0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut iterations = scan.len();
        while b - a > 0.25 * m.h && iterations < config.max_outer_iters {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            let (f1, f2) = (eval(x1, &mut best)?, eval(x2, &mut best)?);
            if f1 < f2 {
                b = x2;
            } else {
                a = x1;
            }
            iterations += 2;
        }
        let (mask, u, energy) = best.ok_or_else(|| Error::Numerical("empty radial search".into()))?;
        Ok(Run {
            mask,
            u,
            energy,
            history,
            iterations,
            converged: b - a <= 0.25 * m.h,
            rejected: 0,
        })
    }
}

fn initial_supports(mesh: &Mesh, boundary: &BoundaryData) -> Vec<(String, Vec<bool>)> {
    let radius = |k: usize| {
        let (x, y) = mesh.xy(k);
        x.hypot(y)
    };
    let mut out = vec![("full".to_string(), vec![true; mesh.nodes.len()])];
    for rho in [0.5, 0.8, 0.9, 0.95] {
        out.push((
            format!("annulus({rho})"),
            mesh.nodes.iter().map(|&k| radius(k) >= rho).collect(),
        ));
    }
    // sector under the angular support of the data, plus an outer ring
    let bins = 720;
    let scale = boundary.sup_norm();
    if scale > 0.0 {
        let live: Vec<bool> = (0..bins)
            .map(|b| {
                let (g, h) = boundary.eval(TAU * (b as f64 + 0.5) / bins as f64);
                g.abs() + h.abs() > 1e-6 * scale
            })
            .collect();
        if live.iter().any(|&l| !l) && live.iter().any(|&l| l) {
            let mask = mesh
                .nodes
                .iter()
                .map(|&k| {
                    let (x, y) = mesh.xy(k);
                    let b = ((y.atan2(x).rem_euclid(TAU) / TAU * bins as f64) as usize).min(bins - 1);
                    live[b] || radius(k) >= 0.95
                })
                .collect();
            out.push(("sector".to_string(), mask));
        }
    }
    out
}

/// Discrete energy and support area of the clamped solution on a prescribed
/// support {(x, y) : inside(x, y)} ∩ D₁.
pub fn energy_on_support(
    boundary: &BoundaryData,
    config: &SolverConfig,
    inside: impl Fn(f64, f64) -> bool,
) -> Result<(f64, f64)> {
    config.validate()?;
    let ext = |x: f64, y: f64| boundary.extension(x, y);
    let mesh = Mesh::new(config.n_r, &ext)?;
    let mask: Vec<bool> = mesh
        .nodes
        .iter()
        .map(|&k| {
            let (x, y) = mesh.xy(k);
            inside(x, y)
        })
        .collect();
    let u = mesh.solve(&mask)?;
    Ok((mesh.bending(&u) + config.lambda * mesh.area(&mask), mesh.area(&mask)))
}

/// Alternating minimization of the discrete E_λ with clamped data.
pub fn minimize_energy(boundary: &BoundaryData, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let ext = |x: f64, y: f64| boundary.extension(x, y);
    let mesh = Mesh::new(config.n_r, &ext)?;
    let scale = mesh.fixed.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let live_fixed = mesh
        .fixed
        .iter()
        .enumerate()
        .map(|(k, v)| mesh.is_fixed(k) && v.abs() > 1e-12 * scale.max(1e-300))
        .collect();
    let mut order: Vec<usize> = (0..mesh.nodes.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let problem = Problem {
        mesh: &mesh,
        lambda: config.lambda,
        live_fixed,
        order,
    };

    let mut starts = Vec::new();
    let mut flags = Vec::new();
    let mut best: Option<Run> = None;
    let runs: Vec<(String, Result<Run>)> = match config.support_update_rule {
        SupportUpdateRule::RadialExact => vec![("radial-search".to_string(), problem.radial_search(config))],
        SupportUpdateRule::CellwiseThreshold => initial_supports(&mesh, boundary)
            .into_iter()
            .map(|(label, init)| {
                let r = problem.greedy(init, config);
                (label, r)
            })
            .collect(),
    };
    for (label, run) in runs {
        let run = run?;
        if run.history.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Numerical(format!("energy increased during start '{label}'")));
        }
        if run.rejected > 0 {
            flags.push(format!("{label}: {} rejected support updates", run.rejected));
        }
        starts.push(StartSummary {
            label,
            energy: run.energy,
            iterations: run.iterations,
            converged: run.converged,
        });
        if best.as_ref().map_or(true, |b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    let run = best.ok_or_else(|| Error::Numerical("no start produced a solution".into()))?;
    if !run.converged {
        flags.push(format!("stopped after {} outer iterations", config.max_outer_iters));
    }

    let mut support = vec![false; mesh.w.len()];
    for (p, &k) in mesh.nodes.iter().enumerate() {
        support[k] = run.mask[p];
    }
    let cart = CartesianSolution {
        n_r: mesh.n_r,
        h: mesh.h,
        side: mesh.side,
        values: run.u.clone(),
        support,
    };
    let field = polar_field(&mesh, &run.u, &cart, config)?;
    let mut w_profile = Vec::new();
    if field.center_flat() {
        for k in 1..10 {
            let r = k as f64 / 10.0;
            if let Ok(w) = weiss_w_lambda(&field, r, config.lambda) {
                w_profile.push((r, w));
            }
        }
    }
    Ok(SolveResult {
        energy_history: run.history,
        energy: run.energy,
        bending: mesh.bending(&run.u),
        // cut-cell quadrature can push the sum slightly past π
        support_area: mesh.area(&run.mask).min(std::f64::consts::PI),
        converged: run.converged,
        w_profile,
        starts,
        flags,
        field,
        mesh: cart,
        config: config.clone(),
    })
}

/// Resamples the Cartesian solution on the polar grid by order-3
/// interpolation; polar nodes take the support state of the nearest node.
fn polar_field(mesh: &Mesh, u: &[f64], cart: &CartesianSolution, config: &SolverConfig) -> Result<DiskField> {
    let grid = PolarGrid::uniform(config.n_r, config.n_theta);
    let mut vals = Vec::with_capacity(grid.len());
    let mut mask = Vec::with_capacity(grid.len());
    let c = (mesh.side / 2) as f64;
    for &r in &grid.radii {
        for j in 0..grid.n_theta {
            let t = grid.theta(j);
            let (x, y) = (r * t.cos(), r * t.sin());
            vals.push(interpolate(mesh, u, x, y));
            let i = (x / mesh.h + c).round() as usize;
            let jj = (y / mesh.h + c).round() as usize;
            let k = jj * mesh.side + i;
            mask.push(if mesh.is_fixed(k) { mesh.fixed[k] != 0.0 } else { cart.support[k] });
        }
    }
    let mut field = DiskField::from_samples(grid, &vals, TAU_SUPP)?;
    field.set_support(mask)?;
    if cart.support_within(2.5 * mesh.h) == 0 {
        field.set_center_flat(true);
    }
    Ok(field)
}
