//! Quantum states on four intersecting spacelike surfaces, the Born-rule
//! outcome tables they induce, and the question of whether a single joint
//! distribution over the four measured observables can reproduce all four
//! tables at once.
//!
//! The pipeline: build a [`surfaces::FourSurfaceScenario`] from an initial
//! two-part state and one local channel per subsystem, tabulate the joint
//! outcome probabilities on each surface with [`born::FourTables::compute`],
//! then decide marginal feasibility with [`feasibility::assemble_problem`]
//! and [`feasibility::solve_feasibility`], cross-checked by the four-term
//! inequality battery in [`feasibility::ch_battery`].

pub mod born;
pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod objects;
pub mod scenarios;
pub mod surfaces;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
