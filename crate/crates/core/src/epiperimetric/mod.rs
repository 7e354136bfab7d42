//! Competitor constructions on the half-cylinder and the resulting
//! energy-decay checks.

pub mod bihext;
pub mod competitor;
pub mod higher;
pub mod modal;
pub mod profile;
pub mod qform;
pub mod removal;
pub mod report;
pub mod single;

pub use bihext::{biharmonic_comparison, BihextReport};
pub use competitor::{CompetitorField, Construction};
pub use higher::{negative_profile_search, positive_profile_search, NegativeSearch, PositiveSearch};
pub use profile::{chi_eps, negative_profile, positive_profile, removal_profile, DecayProfile};
pub use qform::{compute_c0, moments, q_form, C0Report};
pub use removal::{chi_omega, derivative_removal_gap, ChiOmega, RemovalReport};
pub use report::{epiperimetric_report, EpiReport};
pub use single::{double_sector_competitor, single_mode_energy_gap, DoubleSectorReport, SingleModeReport};
