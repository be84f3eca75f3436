//! Non-clairvoyant single- and multi-machine scheduling where jobs expose a
//! progress bar: a step function of the fraction of work done.
//!
//! - [`model`]: jobs, bars, instances, the optimal cost and pairwise delays.
//! - [`engine`]: exact event-driven simulation plus a fixed-step reference.
//! - [`policies`]: SPT, round-robin, SETF, the single-signal algorithms,
//!   time sharing, explore-then-commit and the multi-machine rule.
//! - [`combining`]: selecting a candidate policy from sampled job pairs.
//! - [`bars`]: accurate, prediction-based, Poisson and binomial bars.
//! - [`experiments`]: figure pipelines writing CSV.
//! - [`verify`]: invariant suites, also reachable from the CLI.
//!
//! ```
//! use progbar_sched::model::{opt_cost, Instance};
//! use progbar_sched::policies::{simulate, PolicyConfig};
//!
//! let inst = Instance::from_sizes(vec![1.0, 2.0]).unwrap();
//! let out = simulate(&inst, &PolicyConfig::Rr).unwrap();
//! assert_eq!(out.total_cost, 5.0);
//! assert_eq!(opt_cost(&inst).unwrap(), 4.0);
//! ```

pub mod bars;
pub mod cli;
pub mod combining;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod fmt;
pub mod model;
pub mod policies;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Instance, ScheduleOutcome, StepProgressBar};
pub use policies::PolicyConfig;
