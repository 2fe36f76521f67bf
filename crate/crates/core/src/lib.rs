//! Golf particle system on the cycle `Z/nZ` and on windows of `Z`.
//!
//! Balls sit on vertices, each with an activation clock. When its clock
//! rings, a ball walks until it reaches a still-free hole and fills it. This
//! crate simulates that dynamics (and its parking and multi-ball variants),
//! evaluates the closed-form laws of the set of remaining holes with exact
//! rational arithmetic, and cross-checks both against a formula-free
//! enumeration oracle.
//!
//! Module map:
//!
//! * [`model`] – configurations, strategies, clocks, block sizes.
//! * [`dynamics`] – golf, parking and multi-ball runs on the cycle.
//! * [`exact`] – exact and closed-form laws (cycle, parking, `Z`, densities).
//! * [`oracle`] – exact final laws by summing over activation orders.
//! * [`forest`] – complete binary forests, Łukasiewicz paths, bridges.
//! * [`line`] – windowed `Z` model, separators, large-cycle surrogate.
//! * [`stats`] – goodness-of-fit tests, distances, intervals.
//! * [`experiments`] – phase-transition scans and density checks.
//! * [`verify`] – oracle-versus-formula suite used by the CLI.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod forest;
pub mod line;
pub mod model;
pub mod oracle;
pub mod parallel;
pub mod seed;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{BigRational, ExactDistribution};
pub use model::{BlockSizes, Clocks, CycleConfig, FinalState, MultiballConfig, SiteState, Strategy};
pub use seed::Seed;
