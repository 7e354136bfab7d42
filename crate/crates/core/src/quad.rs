//! Quadrature rules and scalar root finding shared by all modules.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A fixed set of nodes and weights on an interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss-Legendre with `panels` equal panels of `order` nodes,
    /// refined so that every breakpoint inside (a, b) is a panel edge.
    pub fn composite(a: f64, b: f64, panels: usize, order: usize, breakpoints: &[f64]) -> Rule {
        let (gx, gw) = gauss_legendre(order);
        let mut edges: Vec<f64> = (0..=panels)
            .map(|k| a + (b - a) * k as f64 / panels as f64)
            .collect();
        for &p in breakpoints {
            if p > a && p < b {
                edges.push(p);
            }
        }
        edges.sort_by(|x, y| x.total_cmp(y));
        edges.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for e in edges.windows(2) {
            let (lo, hi) = (e[0], e[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for k in 0..order {
                nodes.push(mid + half * gx[k]);
                weights.push(half * gw[k]);
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Default rule for t-integrals against e^{-2t}: 512 panels of 8 nodes on [0, 40].
pub fn t_rule(breakpoints: &[f64]) -> Rule {
    Rule::composite(0.0, T_CUTOFF, 512, 8, breakpoints)
}

/// Truncation point of all half-line integrals.
pub const T_CUTOFF: f64 = 40.0;

/// Composite Simpson on [a, b] with `n` subintervals (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let c = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += c * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Simpson weights for `n` (even) subintervals of width h.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n % 2 == 0 && n >= 2);
    (0..=n)
        .map(|k| {
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Bisection for a sign change of `f` on [lo, hi].
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, max_iter: usize) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ∫_a^b e^{-2s}(α + β s) ds.
pub fn exp2_linear(a: f64, b: f64, alpha: f64, beta: f64) -> f64 {
    let e = |s: f64| (-2.0 * s).exp();
    let i0 = 0.5 * (e(a) - e(b));
    let i1 = (a / 2.0 + 0.25) * e(a) - (b / 2.0 + 0.25) * e(b);
    alpha * i0 + beta * i1
}

/// ∫ over [0, r] of ρ·A(ρ) where A is the piecewise-linear interpolant of
/// `vals` at `nodes`, held constant outside the node range.
pub fn radial_moment(nodes: &[f64], vals: &[f64], r: f64) -> f64 {
    debug_assert_eq!(nodes.len(), vals.len());
    if r <= 0.0 || nodes.is_empty() {
        return 0.0;
    }
    let piece = |a: f64, b: f64, xa: f64, ya: f64, xb: f64, yb: f64| {
        let slope = if xb > xa { (yb - ya) / (xb - xa) } else { 0.0 };
        let c0 = ya - slope * xa;
        c0 * (b * b - a * a) / 2.0 + slope * (b * b * b - a * a * a) / 3.0
    };
    let mut total = 0.0;
    let first = nodes[0];
    let upto = r.min(first);
    total += vals[0] * upto * upto / 2.0;
    if r <= first {
        return total;
    }
    for k in 0..nodes.len() - 1 {
        let (xa, xb) = (nodes[k], nodes[k + 1]);
        if r <= xa {
            return total;
        }
        let b = r.min(xb);
        total += piece(xa, b, xa, vals[k], xb, vals[k + 1]);
    }
    let last = *nodes.last().unwrap();
    if r > last {
        let v = *vals.last().unwrap();
        total += v * (r * r - last * last) / 2.0;
    }
    total
}

/// Linear interpolation of tabulated data, clamped at the ends.
pub fn lerp_table(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    if x <= nodes[0] {
        return vals[0];
    }
    if x >= nodes[n - 1] {
        return vals[n - 1];
    }
    let k = match nodes.binary_search_by(|p| p.total_cmp(&x)) {
        Ok(k) => return vals[k],
        Err(k) => k - 1,
    };
    let s = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    vals[k] * (1.0 - s) + vals[k + 1] * s
}

/// Weights of the cubic Lagrange interpolant at `x` through 4 nodes.
pub fn lagrange4(xs: [f64; 4], x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                w[i] *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
    }
    w
}

/// Index of the first of four consecutive stencil nodes around `x`.
pub fn stencil4_start(nodes: &[f64], x: f64) -> usize {
    let n = nodes.len();
    assert!(n >= 4);
    let k = nodes.partition_point(|&p| p <= x);
    k.saturating_sub(2).min(n - 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_respects_breakpoints() {
        let rule = Rule::composite(0.0, 1.0, 4, 4, &[0.3]);
        let v = rule.integrate(|t| if t < 0.3 { 1.0 } else { 0.0 });
        assert!((v - 0.3).abs() < 1e-14);
    }

    #[test]
    fn exp_linear_matches_quadrature() {
        let exact = exp2_linear(0.5, 2.0, 1.5, -0.7);
        let num = simpson(|s| (-2.0 * s).exp() * (1.5 - 0.7 * s), 0.5, 2.0, 2000);
        assert!((exact - num).abs() < 1e-12);
    }

    #[test]
    fn radial_moment_of_constant() {
        let nodes: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let vals = vec![3.0; 10];
        assert!((radial_moment(&nodes, &vals, 0.73) - 1.5 * 0.73 * 0.73).abs() < 1e-14);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }
}
