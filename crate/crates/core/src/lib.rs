//! Multilevel sampling-based motion planning over fiber bundles.
//!
//! A planning problem is described by a ladder of configuration spaces
//! `X_1 -> ... -> X_K`, each a coordinate-selection relaxation of the next.
//! Solutions found on a lower level induce a *path restriction* on the level
//! above; the section patterns (Manhattan, Wriggle, Tunnel and Triple step)
//! try to find a feasible path inside that restriction, coordinated by the
//! pattern dance. When that fails the planner keeps growing roadmaps on all
//! levels, prioritised by sampling density.
//!
//! The crate is `no_std` (with `alloc`). Wall-clock time, file formats and
//! the benchmark CLI live in the companion `fiberdance-bench` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod budget;
pub mod bundle;
pub mod dance;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod patterns;
pub mod planner;
pub mod restriction;
pub mod robot;
pub mod scenario;
pub mod space;
pub mod validity;

mod float;

pub use budget::{Budget, Clock, WorkClock, WorkMeter};
pub use bundle::{AdmissibilityReport, Bundle, BundleLadder};
pub use dance::{find_section, pattern_dance, DanceParams};
pub use error::{Error, Result};
pub use graph::RoadmapGraph;
pub use patterns::{PatternContext, PatternParams, PatternSet};
pub use planner::{
    baseline_plan, importance, multilevel_plan, BaselineKind, PlanResult, PlannerConfig, PlannerKind, Ptc,
};
pub use restriction::{BasePath, HeadPointer, PathRestriction};
pub use scenario::{builtin_scenarios, Scenario};
pub use space::{State, StateSpace};
pub use validity::{check_motion, check_motion_path, MotionResult, Validity, ValidityChecker};

/// Seedable random source used throughout the planners.
pub type RandomSource = rand_chacha::ChaCha8Rng;

/// Creates the crate's standard random source from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> RandomSource {
    use rand::SeedableRng;
    RandomSource::seed_from_u64(seed)
}
