//! Multi-path entanglement routing on lattice quantum-repeater networks.
//!
//! A processing window runs in five steps: sample edge states on a lattice
//! ([`netmodel`]), purify and prune edges ([`purification`],
//! [`netmodel::deactivate_low_capacity_edges`]), enumerate k shortest paths
//! per request ([`pathfinder`]), allocate edge capacity to paths with one of
//! three schedulers ([`scheduler`]), and score the result ([`metrics`]).
//! [`harness`] runs seeded trials and experiment sweeps on top of these, and
//! [`config`] / [`output`] handle configuration files and result files.

pub mod config;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod netmodel;
pub mod output;
pub mod pathfinder;
pub mod purification;
pub mod scheduler;

pub use error::{Error, Result};
pub use netmodel::{EdgeKey, Network, NodeId, Request, ScenarioParams, TopologyKind};
pub use scheduler::{Algorithm, RoutingOutcome, RoutingParams};
