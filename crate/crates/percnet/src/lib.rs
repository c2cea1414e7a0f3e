//! Percolation-based reliability analysis for smart surveillance
//! networks.
//!
//! The model: a building (or any guarded space) is a directed graph of
//! spaces and traversal links. Crossing a link costs the intruder bits of
//! revealed identity when a working sensor watches it, nothing when it is
//! unwatched or the sensor is down, and infinity when an access
//! restriction blocks it outright. For an origin/destination pair the
//! intruder takes the cheapest path; the pair counts as reachable when
//! that path stays strictly below its privacy budget.
//!
//! Sweeping the restriction level rho from 0 to 1, averaging the
//! demand-weighted share of reachable pairs over sampled device-failure
//! states, and integrating the resulting curve yields the reliability
//! index alpha: 1 means the intruder moves freely, 0 means no movement
//! goes unnoticed within budget.
//!
//! Entry points:
//! - [`SurveillanceNetwork::build`] / [`twin::extract_network`] to obtain
//!   a network, or [`SurveillanceNetwork::lattice`] for classic bond
//!   percolation experiments;
//! - [`analysis::alpha`], [`analysis::expected_ud`],
//!   [`analysis::budget_sweep`] and [`analysis::edge_criticality`] for
//!   the estimators;
//! - [`path::min_cost_from`] / [`path::shortest_path`] for one realized
//!   cost assignment.

pub mod analysis;
pub mod cost;
pub mod file;
pub mod network;
pub mod path;
pub mod twin;

pub use analysis::{
    alpha, budget_sweep, edge_criticality, expected_ud, run_with_threads, uniform_grid,
    AnalysisConfig, AnalysisError, BudgetAlpha, ConfigEcho, EdgeCriticality, ReliabilityReport,
    UdPoint,
};
pub use cost::{
    access_cost, bernoulli_cost, draw_sample, failure_cost, failure_with_access_faults_cost,
    monitoring_cost, Cost, EdgeCostModel, FailureSample, PairDraw, RhoResponse,
};
pub use file::{parse_budget_text, parse_network, write_network, NetworkFile, NetworkFileError};
pub use network::{
    AccessFailureMode, BudgetPolicy, DemandMatrix, Edge, EdgeId, EdgeSpec, NetworkError, NodeId,
    PairId, SurveillanceNetwork,
};
pub use path::{
    min_cost_from, reachability, shortest_path, unaffected_demand, CostAssignment, PathError,
    PathResult,
};
pub use twin::{
    demo_document, extract_network, parse_twin, ExtractionPolicy, TwinDocument, TwinError,
    DEMO_TWIN_JSON,
};
