//! Discounting, default intensities and joint default-time simulation.

mod curve;
mod defaults;
mod grid;
mod hazard;
pub mod normal;
mod partition;
mod party;
pub mod quadrature;

pub use curve::DiscountCurve;
pub use defaults::{simulate_default_times, DefaultScenario};
pub use grid::TimeGrid;
pub use hazard::{HazardCurve, NO_DEFAULT};
pub use partition::{
    bivariate_normal_cdf, default_partition_probability, first_in_window,
    joint_survival_probability, DefaultOrder, QUADRATURE_TOLERANCE,
};
pub use party::{CreditParty, HazardSource};
