//! Analysis graph: spaces as nodes, traversal links as directed edges
//! annotated with surveillance attributes, plus demand weights and
//! privacy budgets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index, valid only for the network that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Dense index of a directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub(crate) usize);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Identifier of a physical link (door, bond). The two directed edges
/// derived from one undirected link share a `PairId`, and therefore share
/// one set of random draws: a failed camera is failed in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId(pub(crate) usize);

impl PairId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// What a failed access reader does to its door.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessFailureMode {
    /// Failure leaves the door open to everyone.
    FailOpen,
    /// Failure locks the door for everyone.
    #[default]
    FailClosed,
}

/// Directed edge with resolved endpoints and validated attributes.
///
/// `quality` is the access level as a fraction in [0, 1] (1 = public);
/// `monitor_bits` is the expected information in bits a working sensor
/// captures on a crossing; the failure probabilities are per-realization
/// chances that the sensor (resp. access reader) is down.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub quality: f64,
    pub monitor_bits: f64,
    pub sensor_failure_prob: f64,
    pub access_failure_prob: f64,
    pub access_failure_mode: AccessFailureMode,
    pub pair: PairId,
}

/// Edge description by node label, as found in network files. Missing
/// attributes default to a public, unmonitored, fully reliable link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    #[serde(default = "default_quality")]
    pub quality: f64,
    #[serde(default)]
    pub monitor_bits: f64,
    #[serde(default)]
    pub sensor_failure_prob: f64,
    #[serde(default)]
    pub access_failure_prob: f64,
    #[serde(default)]
    pub access_failure_mode: AccessFailureMode,
}

fn default_quality() -> f64 {
    1.0
}

impl EdgeSpec {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            quality: 1.0,
            monitor_bits: 0.0,
            sensor_failure_prob: 0.0,
            access_failure_prob: 0.0,
            access_failure_mode: AccessFailureMode::FailClosed,
        }
    }

    pub fn with_quality(mut self, quality: f64) -> Self {
        self.quality = quality;
        self
    }

    pub fn with_monitor_bits(mut self, bits: f64) -> Self {
        self.monitor_bits = bits;
        self
    }

    pub fn with_sensor_failure(mut self, prob: f64) -> Self {
        self.sensor_failure_prob = prob;
        self
    }

    pub fn with_access_failure(mut self, prob: f64, mode: AccessFailureMode) -> Self {
        self.access_failure_prob = prob;
        self.access_failure_mode = mode;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
    #[error("edge endpoint `{0}` is not a known node")]
    UnknownEndpoint(String),
    #[error("edge {from} -> {to}: {field} = {value} is out of range")]
    InvalidAttribute {
        from: String,
        to: String,
        field: &'static str,
        value: f64,
    },
    #[error("self-loop on `{0}` (a self-loop can never lie on a minimal path)")]
    SelfLoop(String),
    #[error("duplicate directed edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },
    #[error("lattice size must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("demand weight must be finite and non-negative, got {0}")]
    InvalidDemandWeight(f64),
    #[error("demand between a node and itself is excluded from the analysis")]
    DiagonalDemand,
    #[error("budget must be positive, got {0}")]
    InvalidBudget(f64),
}

/// Directed graph of spaces and traversal links. Immutable after build;
/// safe to share read-only across analysis workers.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveillanceNetwork {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
    // Canonical (first seen) orientation of each physical link.
    pairs: Vec<(NodeId, NodeId)>,
}

impl SurveillanceNetwork {
    /// Validates and indexes a node/edge list. Node labels get dense ids in
    /// input order. Opposite directed edges between the same two nodes are
    /// recognized as one physical link and assigned a shared [`PairId`].
    pub fn build(
        nodes: impl IntoIterator<Item = impl Into<String>>,
        edges: impl IntoIterator<Item = EdgeSpec>,
    ) -> Result<Self, NetworkError> {
        let mut labels = Vec::new();
        let mut label_index = HashMap::new();
        for label in nodes {
            let label = label.into();
            let id = NodeId(labels.len());
            if label_index.insert(label.clone(), id).is_some() {
                return Err(NetworkError::DuplicateNode(label));
            }
            labels.push(label);
        }

        let mut resolved: Vec<Edge> = Vec::new();
        let mut seen_directed: HashMap<(usize, usize), ()> = HashMap::new();
        let mut pair_index: HashMap<(usize, usize), PairId> = HashMap::new();
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for spec in edges {
            let from = *label_index
                .get(&spec.from)
                .ok_or_else(|| NetworkError::UnknownEndpoint(spec.from.clone()))?;
            let to = *label_index
                .get(&spec.to)
                .ok_or_else(|| NetworkError::UnknownEndpoint(spec.to.clone()))?;
            if from == to {
                return Err(NetworkError::SelfLoop(spec.from));
            }
            validate_attrs(&spec)?;
            if seen_directed.insert((from.0, to.0), ()).is_some() {
                return Err(NetworkError::DuplicateEdge {
                    from: spec.from,
                    to: spec.to,
                });
            }
            let key = (from.0.min(to.0), from.0.max(to.0));
            let pair = *pair_index.entry(key).or_insert_with(|| {
                pairs.push((from, to));
                PairId(pairs.len() - 1)
            });
            resolved.push(Edge {
                from,
                to,
                quality: spec.quality,
                monitor_bits: spec.monitor_bits,
                sensor_failure_prob: spec.sensor_failure_prob,
                access_failure_prob: spec.access_failure_prob,
                access_failure_mode: spec.access_failure_mode,
                pair,
            });
        }

        let mut adjacency = vec![Vec::new(); labels.len()];
        for (i, edge) in resolved.iter().enumerate() {
            adjacency[edge.from.0].push(EdgeId(i));
        }

        Ok(Self {
            labels,
            label_index,
            edges: resolved,
            adjacency,
            pairs,
        })
    }

    /// n-by-n square lattice with every bond public, unmonitored and
    /// reliable: each bond contributes two directed edges, so the result
    /// has `2 * 2 * n * (n - 1)` edges. Nodes are labelled `v_<row><col>`
    /// (1-based, underscore-separated once coordinates reach two digits).
    pub fn lattice(n: usize) -> Result<Self, NetworkError> {
        if n < 2 {
            return Err(NetworkError::InvalidSize(n));
        }
        let label = |row: usize, col: usize| {
            if n <= 9 {
                format!("v_{row}{col}")
            } else {
                format!("v_{row}_{col}")
            }
        };
        let mut nodes = Vec::with_capacity(n * n);
        for row in 1..=n {
            for col in 1..=n {
                nodes.push(label(row, col));
            }
        }
        let mut edges = Vec::new();
        let mut bond = |a: String, b: String| {
            edges.push(EdgeSpec::new(a.clone(), b.clone()));
            edges.push(EdgeSpec::new(b, a));
        };
        for row in 1..=n {
            for col in 1..=n {
                if col < n {
                    bond(label(row, col), label(row, col + 1));
                }
                if row < n {
                    bond(label(row, col), label(row + 1, col));
                }
            }
        }
        Self::build(nodes, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0]
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 < self.labels.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Ids of the edges leaving `node`.
    pub fn outgoing(&self, node: NodeId) -> &[EdgeId] {
        &self.adjacency[node.0]
    }

    /// Number of physical links (shared-draw edge pairs).
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Endpoints of a physical link in its first-seen orientation.
    pub fn pair_endpoints(&self, pair: PairId) -> (NodeId, NodeId) {
        self.pairs[pair.0]
    }

    /// Copy of the network with monitoring removed from one physical link
    /// (both directions), used for sensor criticality what-ifs.
    pub fn without_monitoring_on(&self, pair: PairId) -> Self {
        let mut copy = self.clone();
        for edge in &mut copy.edges {
            if edge.pair == pair {
                edge.monitor_bits = 0.0;
            }
        }
        copy
    }
}

fn validate_attrs(spec: &EdgeSpec) -> Result<(), NetworkError> {
    let check = |field: &'static str, value: f64, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(NetworkError::InvalidAttribute {
                from: spec.from.clone(),
                to: spec.to.clone(),
                field,
                value,
            })
        }
    };
    check("quality", spec.quality, (0.0..=1.0).contains(&spec.quality))?;
    check(
        "monitor_bits",
        spec.monitor_bits,
        spec.monitor_bits.is_finite() && spec.monitor_bits >= 0.0,
    )?;
    check(
        "sensor_failure_prob",
        spec.sensor_failure_prob,
        (0.0..=1.0).contains(&spec.sensor_failure_prob),
    )?;
    check(
        "access_failure_prob",
        spec.access_failure_prob,
        (0.0..=1.0).contains(&spec.access_failure_prob),
    )?;
    Ok(())
}

/// Per-pair flow weights f(o, d). Pairs without an explicit entry fall
/// back to `default_weight`; the diagonal (o = d) never contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix {
    default_weight: f64,
    weights: HashMap<(NodeId, NodeId), f64>,
}

impl Default for DemandMatrix {
    fn default() -> Self {
        Self::uniform(1.0).expect("unit default weight is valid")
    }
}

impl DemandMatrix {
    pub fn uniform(default_weight: f64) -> Result<Self, NetworkError> {
        if !default_weight.is_finite() || default_weight < 0.0 {
            return Err(NetworkError::InvalidDemandWeight(default_weight));
        }
        Ok(Self {
            default_weight,
            weights: HashMap::new(),
        })
    }

    pub fn set(&mut self, origin: NodeId, destination: NodeId, weight: f64) -> Result<(), NetworkError> {
        if origin == destination {
            return Err(NetworkError::DiagonalDemand);
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(NetworkError::InvalidDemandWeight(weight));
        }
        self.weights.insert((origin, destination), weight);
        Ok(())
    }

    pub fn weight(&self, origin: NodeId, destination: NodeId) -> f64 {
        if origin == destination {
            return 0.0;
        }
        self.weights
            .get(&(origin, destination))
            .copied()
            .unwrap_or(self.default_weight)
    }

    pub fn default_weight(&self) -> f64 {
        self.default_weight
    }

    /// Explicit per-pair entries (the fallback weight is not enumerated).
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.weights.iter().map(|(&(o, d), &w)| (o, d, w))
    }
}

/// Per-pair privacy budgets b(o, d), in bits. Budgets are strictly
/// positive; infinity means the pair is never cost-constrained.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPolicy {
    default_budget: f64,
    overrides: HashMap<(NodeId, NodeId), f64>,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        Self::uniform(1.0).expect("unit default budget is valid")
    }
}

impl BudgetPolicy {
    pub fn uniform(default_budget: f64) -> Result<Self, NetworkError> {
        if default_budget.is_nan() || default_budget <= 0.0 {
            return Err(NetworkError::InvalidBudget(default_budget));
        }
        Ok(Self {
            default_budget,
            overrides: HashMap::new(),
        })
    }

    pub fn set_override(&mut self, origin: NodeId, destination: NodeId, budget: f64) -> Result<(), NetworkError> {
        if budget.is_nan() || budget <= 0.0 {
            return Err(NetworkError::InvalidBudget(budget));
        }
        self.overrides.insert((origin, destination), budget);
        Ok(())
    }

    pub fn budget(&self, origin: NodeId, destination: NodeId) -> f64 {
        self.overrides
            .get(&(origin, destination))
            .copied()
            .unwrap_or(self.default_budget)
    }

    pub fn default_budget(&self) -> f64 {
        self.default_budget
    }

    pub fn overrides(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.overrides.iter().map(|(&(o, d), &b)| (o, d, b))
    }
}
