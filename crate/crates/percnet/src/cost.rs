//! Edge traversal costs.
//!
//! Every model maps an edge to a cost in bits of entropy: zero for a free
//! crossing, a finite positive amount for a monitored crossing, infinite
//! for a blocked one. Keeping one unit across all models lets a single
//! path engine serve percolation-style and budget-style analyses alike.
//!
//! The threshold family (access, monitoring, failure) opens an edge when
//! its quality exceeds the restriction level rho; the Bernoulli model
//! instead opens an edge when its random draw falls below rho. The two
//! families therefore react to rho in opposite directions, which matters
//! when asserting monotonicity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{AccessFailureMode, Edge, PairId, SurveillanceNetwork};

/// Traversal cost in bits: finite and non-negative, or infinite.
/// Addition absorbs into infinity; ordering puts infinity last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0.0);

    /// Wraps a finite bit count. Panics on NaN or negative input; finite
    /// costs are non-negative by construction everywhere in this crate.
    pub fn finite(bits: f64) -> Cost {
        assert!(
            bits.is_finite() && bits >= 0.0,
            "finite cost must be a non-negative real, got {bits}"
        );
        Cost::Finite(bits)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for Cost {}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            // No NaN can appear: `finite` rejects it and cost functions
            // only add validated attribute values.
            (Cost::Finite(a), Cost::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

/// Bernoulli bond percolation: an edge is open (free) when its draw falls
/// below the open probability rho, otherwise blocked.
pub fn bernoulli_cost(z: f64, rho: f64) -> Cost {
    debug_assert!((0.0..1.0).contains(&z) && (0.0..=1.0).contains(&rho));
    if z < rho {
        Cost::ZERO
    } else {
        Cost::Infinite
    }
}

/// Access-level percolation: an edge is free when its quality exceeds the
/// restriction level rho, otherwise blocked.
pub fn access_cost(quality: f64, rho: f64) -> Cost {
    debug_assert!((0.0..=1.0).contains(&quality) && (0.0..=1.0).contains(&rho));
    if quality > rho {
        Cost::ZERO
    } else {
        Cost::Infinite
    }
}

/// Monitoring: an accessible edge costs its monitored bits; an
/// inaccessible edge is blocked.
pub fn monitoring_cost(quality: f64, rho: f64, monitor_bits: f64) -> Cost {
    debug_assert!(monitor_bits >= 0.0);
    match access_cost(quality, rho) {
        Cost::Finite(_) => Cost::finite(monitor_bits),
        Cost::Infinite => Cost::Infinite,
    }
}

/// Monitoring with sensor downtime: a draw below the failure probability
/// means the sensor is down and the crossing is free.
pub fn failure_cost(quality: f64, rho: f64, monitor_bits: f64, sensor_failure_prob: f64, z: f64) -> Cost {
    debug_assert!((0.0..=1.0).contains(&sensor_failure_prob));
    match access_cost(quality, rho) {
        Cost::Infinite => Cost::Infinite,
        Cost::Finite(_) => {
            if z < sensor_failure_prob {
                Cost::ZERO
            } else {
                Cost::finite(monitor_bits)
            }
        }
    }
}

/// Failure model extended with access-reader downtime: a failed reader
/// forces the door open or closed regardless of rho, per its configured
/// failure mode; a working reader applies the usual quality threshold.
/// Sensor downtime then decides between a free and a monitored crossing.
pub fn failure_with_access_faults_cost(edge: &Edge, rho: f64, draws: PairDraw) -> Cost {
    let accessible = if draws.access < edge.access_failure_prob {
        match edge.access_failure_mode {
            AccessFailureMode::FailOpen => true,
            AccessFailureMode::FailClosed => false,
        }
    } else {
        edge.quality > rho
    };
    if !accessible {
        return Cost::Infinite;
    }
    if draws.sensor < edge.sensor_failure_prob {
        Cost::ZERO
    } else {
        Cost::finite(edge.monitor_bits)
    }
}

/// One pair of uniform draws on [0, 1) for a physical link: `sensor`
/// decides sensor downtime, `access` decides reader downtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDraw {
    pub sensor: f64,
    pub access: f64,
}

/// One Monte Carlo realization of every random draw in the network: one
/// [`PairDraw`] per physical link, so both directed edges of a link see
/// the same device state.
///
/// Draws are counter-based: the value for (seed, replicate, pair) is read
/// directly out of a keyed ChaCha stream, so they do not depend on
/// iteration order or on how replicates are scheduled across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureSample {
    seed: u64,
    replicate_index: u32,
    draws: Vec<PairDraw>,
}

impl FailureSample {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replicate_index(&self) -> u32 {
        self.replicate_index
    }

    pub fn draw(&self, pair: PairId) -> PairDraw {
        self.draws[pair.index()]
    }

    pub fn pair_count(&self) -> usize {
        self.draws.len()
    }
}

// 53-bit mantissa mapping; guarantees the result is strictly below 1.
fn unit_from(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws one uniform [`PairDraw`] per physical link, fully determined by
/// (seed, replicate_index, pair id).
pub fn draw_sample(network: &SurveillanceNetwork, seed: u64, replicate_index: u32) -> FailureSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate_index as u64);
    let draws = (0..network.pair_count())
        .map(|pair| {
            // Four 32-bit words per pair: two u64 draws.
            rng.set_word_pos(pair as u128 * 4);
            PairDraw {
                sensor: unit_from(rng.next_u64()),
                access: unit_from(rng.next_u64()),
            }
        })
        .collect();
    FailureSample {
        seed,
        replicate_index,
        draws,
    }
}

/// How realized edge costs respond to raising rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoResponse {
    /// Raising rho can only open edges (Bernoulli: rho is the open
    /// probability), so costs fall and reachability grows.
    OpensEdges,
    /// Raising rho can only close edges (threshold models: rho is the
    /// restriction level), so costs rise and reachability shrinks.
    ClosesEdges,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown cost model `{0}`; expected one of bernoulli, access, monitoring, failure, failure+access-faults")]
pub struct UnknownModel(String);

/// The selectable cost models. Evaluation is pure: the same edge,
/// restriction level and draws always yield the same cost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeCostModel {
    Bernoulli,
    Access,
    Monitoring,
    Failure,
    /// Failure model plus access-reader downtime; the default, and
    /// equivalent to `Failure` wherever readers never fail.
    #[default]
    #[serde(rename = "failure+access-faults")]
    FailureWithAccessFaults,
}

impl EdgeCostModel {
    pub const ALL: [EdgeCostModel; 5] = [
        EdgeCostModel::Bernoulli,
        EdgeCostModel::Access,
        EdgeCostModel::Monitoring,
        EdgeCostModel::Failure,
        EdgeCostModel::FailureWithAccessFaults,
    ];

    /// Realized cost of one directed edge under this model.
    pub fn edge_cost(self, edge: &Edge, rho: f64, draws: PairDraw) -> Cost {
        match self {
            EdgeCostModel::Bernoulli => bernoulli_cost(draws.sensor, rho),
            EdgeCostModel::Access => access_cost(edge.quality, rho),
            EdgeCostModel::Monitoring => monitoring_cost(edge.quality, rho, edge.monitor_bits),
            EdgeCostModel::Failure => failure_cost(
                edge.quality,
                rho,
                edge.monitor_bits,
                edge.sensor_failure_prob,
                draws.sensor,
            ),
            EdgeCostModel::FailureWithAccessFaults => {
                failure_with_access_faults_cost(edge, rho, draws)
            }
        }
    }

    pub fn rho_response(self) -> RhoResponse {
        match self {
            EdgeCostModel::Bernoulli => RhoResponse::OpensEdges,
            _ => RhoResponse::ClosesEdges,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeCostModel::Bernoulli => "bernoulli",
            EdgeCostModel::Access => "access",
            EdgeCostModel::Monitoring => "monitoring",
            EdgeCostModel::Failure => "failure",
            EdgeCostModel::FailureWithAccessFaults => "failure+access-faults",
        }
    }
}

impl fmt::Display for EdgeCostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeCostModel {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeCostModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownModel(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::EdgeSpec;

    fn two_node_edge(spec: EdgeSpec) -> (SurveillanceNetwork, Edge) {
        let net = SurveillanceNetwork::build(["A", "B"], [spec]).unwrap();
        let edge = net.edges()[0].clone();
        (net, edge)
    }

    #[test]
    fn bernoulli_branches() {
        assert_eq!(bernoulli_cost(0.3, 0.5), Cost::ZERO);
        assert_eq!(bernoulli_cost(0.7, 0.5), Cost::Infinite);
        // Strict inequality: 0 < 0 is false.
        assert_eq!(bernoulli_cost(0.0, 0.0), Cost::Infinite);
    }

    #[test]
    fn access_branches() {
        assert_eq!(access_cost(0.75, 0.5), Cost::ZERO);
        assert_eq!(access_cost(0.75, 0.75), Cost::Infinite);
        assert_eq!(access_cost(1.0, 0.0), Cost::ZERO);
    }

    #[test]
    fn monitoring_branches() {
        assert_eq!(monitoring_cost(0.75, 0.5, 10.0), Cost::finite(10.0));
        assert_eq!(monitoring_cost(0.75, 0.5, 1.0), Cost::finite(1.0));
        assert_eq!(monitoring_cost(0.2, 0.9, 10.0), Cost::Infinite);
    }

    #[test]
    fn failure_branches() {
        assert_eq!(failure_cost(0.75, 0.5, 10.0, 0.01, 0.005), Cost::ZERO);
        assert_eq!(failure_cost(0.75, 0.5, 10.0, 0.01, 0.5), Cost::finite(10.0));
        assert_eq!(failure_cost(0.75, 0.8, 10.0, 0.01, 0.005), Cost::Infinite);
    }

    #[test]
    fn reader_stuck_open_keeps_monitoring() {
        let (_, edge) = two_node_edge(
            EdgeSpec::new("A", "B")
                .with_quality(0.5)
                .with_monitor_bits(2.0)
                .with_access_failure(1.0, AccessFailureMode::FailOpen),
        );
        for z in [0.0, 0.3, 0.9] {
            let draws = PairDraw { sensor: z, access: z };
            assert_eq!(
                failure_with_access_faults_cost(&edge, 0.9, draws),
                Cost::finite(2.0)
            );
        }
    }

    #[test]
    fn reader_stuck_closed_blocks_everyone() {
        let (_, edge) = two_node_edge(
            EdgeSpec::new("A", "B").with_access_failure(1.0, AccessFailureMode::FailClosed),
        );
        for z in [0.0, 0.3, 0.9] {
            let draws = PairDraw { sensor: z, access: z };
            assert_eq!(failure_with_access_faults_cost(&edge, 0.0, draws), Cost::Infinite);
        }
    }

    #[test]
    fn no_reader_faults_reduces_to_failure_cost() {
        let (_, edge) = two_node_edge(
            EdgeSpec::new("A", "B")
                .with_quality(0.5)
                .with_monitor_bits(2.0),
        );
        for sensor in [0.0, 0.2, 0.8] {
            for access in [0.0, 0.5] {
                for rho in [0.0, 0.4, 0.5, 1.0] {
                    let draws = PairDraw { sensor, access };
                    assert_eq!(
                        failure_with_access_faults_cost(&edge, rho, draws),
                        failure_cost(0.5, rho, 2.0, 0.0, sensor)
                    );
                }
            }
        }
        let draws = PairDraw { sensor: 0.7, access: 0.7 };
        assert_eq!(
            failure_with_access_faults_cost(&edge, 0.4, draws),
            Cost::finite(2.0)
        );
    }

    // Each model degenerates into the next simpler one when its extra
    // machinery is switched off. The access -> Bernoulli step holds for
    // rho < 1 only: at rho = 1 a drawn-open edge has quality 1, and the
    // strict q > rho comparison closes it while z < rho would not.
    #[test]
    fn degeneracy_chain_over_grid() {
        let grid = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
        for &rho in &grid {
            for &q in &grid {
                for &m in &[0.0, 1.0, 10.0] {
                    for &z in &grid {
                        assert_eq!(failure_cost(q, rho, m, 0.0, z), monitoring_cost(q, rho, m));
                    }
                    assert_eq!(monitoring_cost(q, rho, 0.0), access_cost(q, rho));
                }
                let drawn_quality = if q < rho { 1.0 } else { 0.0 };
                assert_eq!(access_cost(drawn_quality, rho), bernoulli_cost(q, rho));
            }
        }
    }

    #[test]
    fn threshold_models_close_with_rho_and_bernoulli_opens() {
        let grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        for &q in &grid {
            for &z in &[0.0, 0.3, 0.7] {
                for (i, &lo) in grid.iter().enumerate() {
                    for &hi in &grid[i..] {
                        assert!(access_cost(q, lo) <= access_cost(q, hi));
                        assert!(monitoring_cost(q, lo, 3.0) <= monitoring_cost(q, hi, 3.0));
                        assert!(
                            failure_cost(q, lo, 3.0, 0.4, z) <= failure_cost(q, hi, 3.0, 0.4, z)
                        );
                        assert!(bernoulli_cost(z, lo) >= bernoulli_cost(z, hi));
                    }
                }
            }
        }
    }

    #[test]
    fn cost_ordering_and_addition() {
        assert!(Cost::finite(3.0) < Cost::Infinite);
        assert!(Cost::finite(1.0) < Cost::finite(2.0));
        assert_eq!(Cost::finite(1.0) + Cost::finite(2.0), Cost::finite(3.0));
        assert_eq!(Cost::finite(1.0) + Cost::Infinite, Cost::Infinite);
    }

    #[test]
    fn samples_are_reproducible() {
        let net = SurveillanceNetwork::lattice(3).unwrap();
        let a = draw_sample(&net, 42, 7);
        let b = draw_sample(&net, 42, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn replicates_differ() {
        let net = SurveillanceNetwork::lattice(3).unwrap();
        let a = draw_sample(&net, 42, 0);
        let b = draw_sample(&net, 42, 1);
        assert_ne!(a, b);
    }

    #[test]
    fn draws_live_in_the_unit_interval() {
        let net = SurveillanceNetwork::lattice(4).unwrap();
        for replicate in 0..50 {
            let sample = draw_sample(&net, 3, replicate);
            for pair in 0..sample.pair_count() {
                let draw = sample.draw(crate::network::PairId(pair));
                assert!((0.0..1.0).contains(&draw.sensor));
                assert!((0.0..1.0).contains(&draw.access));
            }
        }
    }

    #[test]
    fn draw_mean_matches_uniform_distribution() {
        let net = SurveillanceNetwork::build(["A", "B"], [EdgeSpec::new("A", "B")]).unwrap();
        let pair = net.edges()[0].pair;
        let n = 10_000;
        let mean = (0..n)
            .map(|r| draw_sample(&net, 123, r).draw(pair).sensor)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "empirical mean {mean}");
    }

    #[test]
    fn model_names_round_trip() {
        for model in EdgeCostModel::ALL {
            assert_eq!(model.name().parse::<EdgeCostModel>().unwrap(), model);
        }
        assert!("dijkstra".parse::<EdgeCostModel>().is_err());
    }
}
