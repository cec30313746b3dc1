//! Planning toolkit for cellular networks whose base stations draw power from
//! on-site renewable energy harvesters.
//!
//! The planning pipeline has two phases. Phase 1 ([`phase1::run_phase1`])
//! picks which candidate sites to deploy and assigns test points to them,
//! keeping SINR targets met while preferring sites whose harvested energy
//! covers their own load. Phase 2 ([`phase2::run_phase2`]) then selects
//! directed power lines between deployed sites and routes surplus harvest to
//! deficit sites, trading line cost against lifetime grid-energy cost via a
//! sequence of linear programs.
//!
//! Supporting pieces: [`scenario`] holds the immutable problem instance and
//! its file format, [`radio`] the SINR/QoS machinery, [`energy`] the harvest
//! model and outage constraint, [`cost`] all money arithmetic, [`lp`] a small
//! self-contained simplex solver, [`oracle`] a brute-force exact solver for
//! small instances, and [`experiments`] the sweep/statistics harness behind
//! the CLI.

pub mod cost;
pub mod energy;
pub mod experiments;
pub mod lp;
pub mod oracle;
pub mod phase1;
pub mod phase2;
pub mod planner;
pub mod radio;
pub mod scenario;
pub mod units;

pub use cost::CostBreakdown;
pub use energy::{EnergyDistribution, EnergyPlan};
pub use phase1::Phase1Result;
pub use phase2::Phase2Result;
pub use planner::{PlanOptions, PlanSolution};
pub use radio::Assignment;
pub use scenario::{GenerationParams, Scenario};
