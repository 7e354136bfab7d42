use crate::error::{Error, Result};
use crate::weiss_energy::{weiss_w_lambda, DiskField, PolarGrid};
use serde::{Deserialize, Serialize};

/// Outer radius of the grids carrying rescaled fields, so that W(·, 1) is
/// away from the edge.
const BLOW_UP_RMAX: f64 = 1.25;
/// Slack per unit of radial spacing and of |W| in the monotonicity test.
pub const SLACK_PER_H: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct BlowUp {
    pub radius: f64,
    pub field: DiskField,
    /// W(u_{p,r}, 1), absent when the rescaled field is not flat at 0
    pub w1: Option<f64>,
}

/// Rescalings u_{p,r}(z) = u(p + rz)/r² on polar grids of radius 1.25.
pub fn blow_up_sequence(
    field: &DiskField,
    lambda: f64,
    p: (f64, f64),
    radii: &[f64],
    n_r: usize,
    n_theta: usize,
) -> Result<Vec<BlowUp>> {
    radii
        .iter()
        .map(|&s| {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("radius {s} must be positive")));
            }
            let grid = PolarGrid::with_radius(n_r, n_theta, BLOW_UP_RMAX);
            let f = field.rescale(p, s, grid)?;
            let w1 = if f.center_flat() { weiss_w_lambda(&f, 1.0, lambda).ok() } else { None };
            Ok(BlowUp {
                radius: s,
                field: f,
                w1,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    /// W(r_i) − W(r_{i+1})
    pub drop: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub radii: Vec<f64>,
    pub w: Vec<f64>,
    /// allowed decrease between consecutive radii
    pub slack: Vec<f64>,
    pub violations: Vec<Violation>,
    pub max_drop: f64,
    pub monotone: bool,
}

/// Checks W(u, r_i) ≤ W(u, r_{i+1}) + slack_i with
/// slack_i = SLACK_PER_H · h(r_i) · (1 + |W(u, r_i)|), h the radial spacing.
pub fn monotonicity_experiment(field: &DiskField, lambda: f64, r_grid: &[f64]) -> Result<MonotonicityReport> {
    if !field.center_flat() {
        return Err(Error::Precondition("field is not flat at the origin".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("radii must be increasing".into()));
    }
    let w = r_grid
        .iter()
        .map(|&r| weiss_w_lambda(field, r, lambda))
        .collect::<Result<Vec<f64>>>()?;
    let mut slack = Vec::new();
    let mut violations = Vec::new();
    let mut max_drop = f64::NEG_INFINITY;
    for i in 0..w.len().saturating_sub(1) {
        let s = SLACK_PER_H * field.grid().spacing_at(r_grid[i]) * (1.0 + w[i].abs());
        let drop = w[i] - w[i + 1];
        max_drop = max_drop.max(drop);
        if drop > s {
            violations.push(Violation { index: i, drop, slack: s });
        }
        slack.push(s);
    }
    Ok(MonotonicityReport {
        radii: r_grid.to_vec(),
        monotone: violations.is_empty(),
        w,
        slack,
        violations,
        max_drop,
    })
}
