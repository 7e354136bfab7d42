#![allow(dead_code)]

/// Smallest eigenvalue of the radial reduction for v = u':
/// min ∫((rv)')²/r dr / ∫ r v² dr with v(0) = v(1) = 0, on n cells.
/// The pencil is tridiagonal over diagonal, so after symmetric scaling a
/// Sturm count bisection finds the bottom of the spectrum.
pub fn radial_buckling_oracle(n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let m = n - 1;
    let r = |i: usize| i as f64 * h;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    for cell in 0..n {
        // cell [r_c, r_{c+1}] couples unknowns c and c+1 (index k = node − 1)
        let w = 1.0 / (h * (r(cell) + 0.5 * h));
        let (a, b) = (cell, cell + 1);
        if a >= 1 {
            diag[a - 1] += w * r(a) * r(a);
        }
        if b <= m {
            diag[b - 1] += w * r(b) * r(b);
        }
        if a >= 1 && b <= m {
            off[a - 1] -= w * r(a) * r(b);
        }
    }
    let mass: Vec<f64> = (1..=m).map(|i| r(i) * h).collect();
    let d: Vec<f64> = (0..m).map(|k| diag[k] / mass[k]).collect();
    let e: Vec<f64> = (0..m - 1).map(|k| off[k] / (mass[k] * mass[k + 1]).sqrt()).collect();
    let below = |x: f64| {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for k in 1..m {
            let qq = if q == 0.0 { 1e-300 } else { q };
            q = d[k] - x - e[k - 1] * e[k - 1] / qq;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (0.0, 100.0);
    assert!(below(hi) >= 1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
