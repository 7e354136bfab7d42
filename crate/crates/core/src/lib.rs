//! Numerical laboratory for the fourth-order Alt–Caffarelli functional
//! E(u; D) = ∫_D |Δu|² + χ_{u≠0}.

pub mod angular_modes;
pub mod buckling;
pub mod epiperimetric;
pub mod error;
pub mod fbp_solver;
pub mod quad;
pub mod weiss_energy;

pub use error::{Error, Result};
