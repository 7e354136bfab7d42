use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Disk,
    Ellipse,
    Star,
}

/// Star-shaped plate {r < R(θ)} centred at the origin.
///
/// params: disk [radius]; ellipse [a, b]; star [r0, a1, b1, a2, b2, …]
/// with R = r0 + Σ a_k cos kθ + b_k sin kθ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateDomain {
    pub kind: DomainKind,
    pub params: Vec<f64>,
    pub area: f64,
}

impl PlateDomain {
    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(DomainKind::Disk, vec![radius])
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(DomainKind::Ellipse, vec![a, b])
    }

    pub fn star(r0: f64, modes: &[(f64, f64)]) -> Result<Self> {
        let mut p = vec![r0];
        for &(a, b) in modes {
            p.push(a);
            p.push(b);
        }
        Self::new(DomainKind::Star, p)
    }

    /// Ellipse of area π with axis ratio a/b.
    pub fn ellipse_with_ratio(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0) {
            return Err(Error::Domain(format!("axis ratio {ratio} must be positive")));
        }
        Self::ellipse(ratio.sqrt(), 1.0 / ratio.sqrt())
    }

    pub fn new(kind: DomainKind, params: Vec<f64>) -> Result<Self> {
        let ok = match kind {
            DomainKind::Disk => params.len() == 1 && params[0] > 0.0,
            DomainKind::Ellipse => params.len() == 2 && params[0] > 0.0 && params[1] > 0.0,
            DomainKind::Star => params.len() % 2 == 1,
        };
        if !ok || params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("invalid {kind:?} parameters {params:?}")));
        }
        let area = match kind {
            DomainKind::Disk => PI * params[0] * params[0],
            DomainKind::Ellipse => PI * params[0] * params[1],
            DomainKind::Star => PI * params[0] * params[0] + 0.5 * PI * params[1..].iter().map(|c| c * c).sum::<f64>(),
        };
        let d = PlateDomain { kind, params, area };
        if (0..4096).any(|k| d.radius(TAU * k as f64 / 4096.0) <= 0.0) {
            return Err(Error::Domain("boundary radius must stay positive".into()));
        }
        Ok(d)
    }

    /// The domain dilated by t.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("scale {t} must be positive")));
        }
        Self::new(self.kind, self.params.iter().map(|p| p * t).collect())
    }

    /// Boundary radius R(θ) and R'(θ).
    pub fn radius_jet(&self, t: f64) -> (f64, f64) {
        let p = &self.params;
        match self.kind {
            DomainKind::Disk => (p[0], 0.0),
            DomainKind::Ellipse => {
                let (a, b) = (p[0], p[1]);
                let (s, c) = t.sin_cos();
                let q = b * b * c * c + a * a * s * s;
                let r = a * b / q.sqrt();
                (r, -a * b * (a * a - b * b) * s * c / q.powf(1.5))
            }
            DomainKind::Star => {
                let (mut r, mut dr) = (p[0], 0.0);
                for (k, ab) in p[1..].chunks(2).enumerate() {
                    let m = (k + 1) as f64;
                    let (s, c) = (m * t).sin_cos();
                    r += ab[0] * c + ab[1] * s;
                    dr += m * (ab[1] * c - ab[0] * s);
                }
                (r, dr)
            }
        }
    }

    pub fn radius(&self, t: f64) -> f64 {
        self.radius_jet(t).0
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.hypot(y) < self.radius(y.atan2(x))
    }

    /// Radius of the disk with the same area.
    pub fn equivalent_radius(&self) -> f64 {
        (self.area / PI).sqrt()
    }

    /// Family label used in scan tables.
    pub fn describe(&self) -> String {
        let p: Vec<String> = self.params.iter().map(|v| format!("{v}")).collect();
        format!("{:?}({})", self.kind, p.join(",")).to_lowercase()
    }
}
