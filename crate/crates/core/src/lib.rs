//! Expected per-search costs for the *search with cleanup* problem.
//!
//! A collection of `n` ordered objects lives on shelves (the sorted list).
//! Every search removes an object and drops it onto an unsorted pile; once
//! the pile holds `m` objects everything is put back. The crate computes the
//! long-run average cost per search `F(m; n)` for the four memory/shelf
//! models, its approximation `F~(m; n)`, the optimal cleanup sizes, and a
//! Monte Carlo simulator that acts as an independent oracle (and as the only
//! engine for non-uniform usage distributions).
//!
//! Module map:
//!
//! * [`cost_model`] – per-search cost primitives for each [`Model`].
//! * [`occupancy`] – moments of the stopping time of the occupancy process.
//! * [`analytic`] – exact `F(m; n)`, its decomposition and optimizer.
//! * [`approx`] – the approximate objective and its optimizer.
//! * [`montecarlo`] – seeded, worker-count independent simulation.
//! * [`report`] – CSV emission and the verification suite used by the CLI.

pub mod analytic;
pub mod approx;
pub mod cost_model;
mod error;
pub mod montecarlo;
pub mod occupancy;
mod par;
pub mod reference;
pub mod report;

pub use cost_model::{Memory, Model, Shelves};
pub use error::{Error, Result};
pub use occupancy::{OccupancyMoments, PrecisionConfig};
