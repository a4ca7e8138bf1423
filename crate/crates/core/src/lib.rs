//! Occupancy planning for a workplace under an ongoing epidemic.
//!
//! A closed-form two-group recursion gives the expected number of infected
//! employees after one infectious case arrives. Combined with testing
//! intervals and the community incidence it scores every occupancy level on
//! two objectives, expected infections and total productivity, and
//! [`pareto_sweep`] keeps the non-dominated ones.
//!
//! ```
//! use occupancy::{pareto_sweep, OrganizationParams};
//!
//! let params = OrganizationParams::default();
//! let frontier = pareto_sweep(&params).unwrap();
//! assert!(!frontier.is_empty());
//! frontier.check_invariants().unwrap();
//! ```
//!
//! [`abm`] holds the agent-based simulation used to check the recursion and
//! [`scenario`] the batch runner for the reference settings.

pub mod abm;
pub mod epidemic;
pub mod error;
pub mod io;
pub mod params;
pub mod pareto;
pub mod scenario;
pub mod validation;

pub use abm::{simulate, SimulationConfig, SimulationResult};
pub use epidemic::{
    arrival_probability, cumulative_infections, cumulative_z, expected_detection_time, total_productivity,
    trajectory_single_group, trajectory_two_group, DetectionStats, InfectionTrajectory, SpreadModel,
};
pub use error::{Error, Result};
pub use params::{ArrivalPeriod, BetaPreset, DetectionRule, InfectionEstimator, OrganizationParams};
pub use pareto::{brute_force_frontier, evaluate_strategy, pareto_sweep, FrontierRow, ParetoFrontier, ParetoPoint};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/transmission.md")]
    struct Transmission;
    #[doc = include_str!("../../../book/src/detection.md")]
    struct Detection;
    #[doc = include_str!("../../../book/src/frontier.md")]
    struct Frontier;
    #[doc = include_str!("../../../book/src/simulation.md")]
    struct Simulation;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    struct Scenarios;
}
