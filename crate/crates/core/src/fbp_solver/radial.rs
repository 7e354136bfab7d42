use crate::quad::Rule;
use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SCAN: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialSupport {
    Empty,
    Annulus,
    Full,
}

/// Exact minimizer among radial fields with (u, ∂_r u) = (g0, h0) on ∂D₁.
///
/// On the annulus {ρ < r < 1}, u = c₀ + c₁r² + c₂ log r + c₃r² log r with
/// u = u' = 0 at ρ; on the full disk u = c₀ + c₁r².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSolution {
    pub g0: f64,
    pub h0: f64,
    pub lambda: f64,
    pub support: RadialSupport,
    /// inner radius of the annulus
    pub rho: Option<f64>,
    pub coeffs: [f64; 4],
    pub energy: f64,
    pub bending: f64,
    pub support_area: f64,
    /// energy of the full-support candidate
    pub full_energy: f64,
}

impl RadialSolution {
    pub fn value(&self, r: f64) -> f64 {
        self.jet(r)[0]
    }

    /// (u, u', u'') at radius r.
    pub fn jet(&self, r: f64) -> [f64; 3] {
        let c = self.coeffs;
        match self.support {
            RadialSupport::Empty => [0.0; 3],
            RadialSupport::Full => [c[0] + c[1] * r * r, 2.0 * c[1] * r, 2.0 * c[1]],
            RadialSupport::Annulus => {
                if r <= self.rho.unwrap_or(0.0) {
                    return [0.0; 3];
                }
                let l = r.ln();
                [
                    c[0] + c[1] * r * r + c[2] * l + c[3] * r * r * l,
                    2.0 * c[1] * r + c[2] / r + c[3] * (2.0 * r * l + r),
                    2.0 * c[1] - c[2] / (r * r) + c[3] * (2.0 * l + 3.0),
                ]
            }
        }
    }
}

fn annulus_coeffs(rho: f64, g0: f64, h0: f64) -> Option<[f64; 4]> {
    let l = rho.ln();
    let m = Matrix4::new(
        1.0, rho * rho, l, rho * rho * l,
        0.0, 2.0 * rho, 1.0 / rho, 2.0 * rho * l + rho,
        1.0, 1.0, 0.0, 0.0,
        0.0, 2.0, 1.0, 1.0,
    );
    let c = m.lu().solve(&Vector4::new(0.0, 0.0, g0, h0))?;
    Some([c[0], c[1], c[2], c[3]])
}

/// ∫_ρ^1 |Δu|² 2πr dr with Δu = 4c₁ + 4c₃(1 + log r).
fn annulus_bending(rho: f64, c: &[f64; 4]) -> f64 {
    let rule = Rule::composite(rho, 1.0, 16, 8, &[]);
    rule.integrate(|r| {
        let lap = 4.0 * c[1] + 4.0 * c[3] * (1.0 + r.ln());
        lap * lap * 2.0 * PI * r
    })
}

/// Total energy of the annulus candidate with inner radius ρ.
pub fn annulus_energy(rho: f64, g0: f64, h0: f64, lambda: f64) -> f64 {
    match annulus_coeffs(rho, g0, h0) {
        Some(c) => annulus_bending(rho, &c) + lambda * PI * (1.0 - rho * rho),
        None => f64::INFINITY,
    }
}

pub fn radial_oracle(g0: f64, h0: f64, lambda: f64) -> RadialSolution {
    let full_bending = 4.0 * PI * h0 * h0;
    let full_energy = full_bending + lambda * PI;
    let base = RadialSolution {
        g0,
        h0,
        lambda,
        support: RadialSupport::Full,
        rho: None,
        coeffs: [g0 - 0.5 * h0, 0.5 * h0, 0.0, 0.0],
        energy: full_energy,
        bending: full_bending,
        support_area: PI,
        full_energy,
    };
    if g0 == 0.0 && h0 == 0.0 {
        return RadialSolution {
            support: RadialSupport::Empty,
            coeffs: [0.0; 4],
            energy: 0.0,
            bending: 0.0,
            support_area: 0.0,
            ..base
        };
    }
    let e = |rho: f64| annulus_energy(rho, g0, h0, lambda);
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..SCAN {
        let rho = k as f64 / SCAN as f64;
        let v = e(rho);
        if v < best.0 {
            best = (v, rho);
        }
    }
    // golden section on the bracketing cells
    let (mut a, mut b) = (best.1 - 1.0 / SCAN as f64, (best.1 + 1.0 / SCAN as f64).min(1.0 - 1e-12));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (e(x1), e(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = e(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = e(x2);
        }
    }
    let rho = 0.5 * (a + b);
    let ea = e(rho);
    if ea < full_energy {
        let c = annulus_coeffs(rho, g0, h0).unwrap_or([0.0; 4]);
        let bending = annulus_bending(rho, &c);
        RadialSolution {
            support: RadialSupport::Annulus,
            rho: Some(rho),
            coeffs: c,
            energy: ea,
            bending,
            support_area: PI * (1.0 - rho * rho),
            ..base
        }
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_meets_clamped_conditions() {
        let c = annulus_coeffs(0.4, 0.3, -0.2).unwrap();
        let s = RadialSolution {
            g0: 0.3,
            h0: -0.2,
            lambda: 1.0,
            support: RadialSupport::Annulus,
            rho: Some(0.4),
            coeffs: c,
            energy: 0.0,
            bending: 0.0,
            support_area: 0.0,
            full_energy: 0.0,
        };
        let j = s.jet(0.4 + 1e-12);
        assert!(j[0].abs() < 1e-10 && j[1].abs() < 1e-10);
        let j = s.jet(1.0);
        assert!((j[0] - 0.3).abs() < 1e-12 && (j[1] + 0.2).abs() < 1e-12);
    }
}
