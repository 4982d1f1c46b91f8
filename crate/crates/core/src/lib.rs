//! Simulation of multiple concurrent federated-learning jobs sharing a fleet
//! of resource-heterogeneous devices.
//!
//! The crate provides the alignment-scoring scheduler ([`scheduler`]), the
//! comparison schedulers ([`baselines`]), a deterministic discrete-event
//! engine ([`engine`]), synthetic FedAvg workloads ([`workload`]) and the
//! experiment plumbing used by the `fedact` binary ([`config`],
//! [`experiment`], [`report`]).

pub mod baselines;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod model;
pub mod report;
pub mod rng;
pub mod scheduler;
pub mod workload;

pub use engine::{run_simulation, run_simulation_with, Scenario, SchedulerChoice, SimOptions, SimResult};
pub use error::{Error, Result};
