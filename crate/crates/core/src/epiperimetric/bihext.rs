use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BihextTerm {
    pub n: i64,
    /// 4n²(|n|−2)|x|² + 4|n|(|n|−2)Re(x̄y) + 4(|n|−1)|y|²
    pub left: f64,
    /// n²(n²−4)|x|²
    pub right: f64,
    /// left/right for y = 0, when right ≠ 0
    pub ratio_y0: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BihextReport {
    pub terms: Vec<BihextTerm>,
    /// bound on 𝒢(v,0) − π
    pub g_v_minus_pi: f64,
    /// 𝒢(v(0,·),0) − π
    pub g_v0_minus_pi: f64,
    /// 2πΣn²|y_n|²
    pub dt_theta_sq: f64,
    /// 2πΣ|y_n|²
    pub dt_sq: f64,
    /// 𝒢(v(0,·)) − 0.1(𝒢(v(0,·)) − π)₊ + 6‖∂_tθv‖² − 2‖∂_tv‖² − π
    pub final_rhs_minus_pi: f64,
    pub holds: bool,
    /// max over |n| ≥ 3 of left/right at y = 0
    pub max_ratio_y0: f64,
}

/// Compares the energy of the biharmonic extension on the cylinder with the
/// angular energy of its trace, mode by mode. `x[k]`, `y[k]` hold the
/// coefficients of n = k − N.
pub fn biharmonic_comparison(x: &[Complex64], y: &[Complex64]) -> Result<BihextReport> {
    if x.len() != y.len() || x.len() % 2 == 0 {
        return Err(Error::Domain("x and y must have equal odd length 2N + 1".into()));
    }
    let nm = (x.len() / 2) as i64;
    let mut terms = Vec::with_capacity(x.len());
    let (mut left, mut right, mut dtt, mut dt) = (0.0, 0.0, 0.0, 0.0);
    let mut max_ratio: f64 = 0.0;
    for (k, (xn, yn)) in x.iter().zip(y).enumerate() {
        let n = k as i64 - nm;
        let a = n.abs() as f64;
        let nf = n as f64;
        let l = if n == 0 {
            0.0
        } else {
            4.0 * nf * nf * (a - 2.0) * xn.norm_sqr()
                + 4.0 * a * (a - 2.0) * (xn.conj() * yn).re
                + 4.0 * (a - 1.0) * yn.norm_sqr()
        };
        let r = nf * nf * (nf * nf - 4.0) * xn.norm_sqr();
        let ratio = if a >= 3.0 {
            let q = 4.0 * nf * nf * (a - 2.0) / (nf * nf * (nf * nf - 4.0));
            max_ratio = max_ratio.max(q);
            Some(q)
        } else {
            None
        };
        terms.push(BihextTerm {
            n,
            left: l,
            right: r,
            ratio_y0: ratio,
        });
        left += l;
        right += r;
        dtt += nf * nf * yn.norm_sqr();
        dt += yn.norm_sqr();
    }
    let g_v = PI * left;
    let g_v0 = PI * right;
    let (dtt, dt) = (2.0 * PI * dtt, 2.0 * PI * dt);
    let rhs = g_v0 - 0.1 * g_v0.max(0.0) + 6.0 * dtt - 2.0 * dt;
    Ok(BihextReport {
        terms,
        g_v_minus_pi: g_v,
        g_v0_minus_pi: g_v0,
        dt_theta_sq: dtt,
        dt_sq: dt,
        final_rhs_minus_pi: rhs,
        holds: g_v <= rhs + 1e-12 * (1.0 + rhs.abs()),
        max_ratio_y0: max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(nm: usize, n: i64) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 2 * nm + 1];
        v[(n + nm as i64) as usize] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn third_mode_ratio() {
        let x = unit(4, 3);
        let y = vec![Complex64::new(0.0, 0.0); 9];
        let r = biharmonic_comparison(&x, &y).unwrap();
        let t = &r.terms[7];
        assert_eq!(t.left, 36.0);
        assert_eq!(t.right, 45.0);
        assert!(r.holds);
    }

    #[test]
    fn zero_mode_contributes_nothing() {
        let x = unit(3, 0);
        let r = biharmonic_comparison(&x, &x.clone()).unwrap();
        assert_eq!(r.g_v_minus_pi, 0.0);
        assert_eq!(r.g_v0_minus_pi, 0.0);
    }
}
