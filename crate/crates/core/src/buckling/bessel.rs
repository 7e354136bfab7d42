use crate::error::{Error, Result};

/// J_n(x) by its power series; accurate for |x| ≲ 20.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -h * h / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// First positive zero of J₁ by Newton steps safeguarded on [3, 4.5].
pub fn first_zero_j1(tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (3.0, 4.5);
    let mut x = 3.8;
    for _ in 0..100 {
        let f = bessel_j(1, x);
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // J₁' = J₀ − J₁/x
        let df = bessel_j(0, x) - f / x;
        let mut next = x - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * x {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Numerical("zero of J₁ did not converge".into()))
}
