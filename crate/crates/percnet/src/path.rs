//! Budget-constrained minimum-cost paths over one realized cost
//! assignment: single-source Dijkstra, reachability against a budget, and
//! the demand-weighted unaffected-demand score.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::cost::{Cost, EdgeCostModel, FailureSample};
use crate::network::{BudgetPolicy, DemandMatrix, EdgeId, NodeId, SurveillanceNetwork};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("node index {0} does not exist in this network")]
    UnknownNode(usize),
    #[error("total demand over distinct origin/destination pairs is zero")]
    ZeroTotalDemand,
}

/// Realized cost of every directed edge at one (model, rho, sample)
/// point. Indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct CostAssignment {
    costs: Vec<Cost>,
}

impl CostAssignment {
    /// Evaluates the model on every edge of the network.
    pub fn realize(
        network: &SurveillanceNetwork,
        model: EdgeCostModel,
        rho: f64,
        sample: &FailureSample,
    ) -> Self {
        let costs = network
            .edges()
            .iter()
            .map(|edge| model.edge_cost(edge, rho, sample.draw(edge.pair)))
            .collect();
        Self { costs }
    }

    /// Wraps explicit per-edge costs. Panics if the vector does not cover
    /// the network's edges exactly once.
    pub fn from_costs(network: &SurveillanceNetwork, costs: Vec<Cost>) -> Self {
        assert_eq!(
            costs.len(),
            network.edge_count(),
            "cost assignment must cover every directed edge"
        );
        Self { costs }
    }

    pub fn cost(&self, edge: EdgeId) -> Cost {
        self.costs[edge.index()]
    }

    /// All realized costs in edge order.
    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }
}

/// Cheapest route for one origin/destination pair. `path` is the edge
/// sequence achieving `min_cost`, present only when the cost is finite
/// and path tracking was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub origin: NodeId,
    pub destination: NodeId,
    pub min_cost: Cost,
    pub path: Option<Vec<EdgeId>>,
}

fn check_node(network: &SurveillanceNetwork, node: NodeId) -> Result<(), PathError> {
    if network.contains(node) {
        Ok(())
    } else {
        Err(PathError::UnknownNode(node.index()))
    }
}

fn dijkstra(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    origin: NodeId,
    mut predecessors: Option<&mut Vec<Option<EdgeId>>>,
) -> Vec<Cost> {
    let mut dist = vec![Cost::Infinite; network.node_count()];
    if let Some(preds) = predecessors.as_deref_mut() {
        preds.clear();
        preds.resize(network.node_count(), None);
    }
    dist[origin.index()] = Cost::ZERO;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Cost::ZERO, origin)));
    while let Some(Reverse((cost, node))) = heap.pop() {
        if cost > dist[node.index()] {
            continue;
        }
        for &edge_id in network.outgoing(node) {
            // Blocked edges never relax; infinity stays a sentinel and is
            // never folded into arithmetic with budgets.
            let edge_cost = match assignment.cost(edge_id) {
                Cost::Infinite => continue,
                finite => finite,
            };
            let next = network.edge(edge_id).to;
            let candidate = cost + edge_cost;
            if candidate < dist[next.index()] {
                dist[next.index()] = candidate;
                if let Some(preds) = predecessors.as_deref_mut() {
                    preds[next.index()] = Some(edge_id);
                }
                heap.push(Reverse((candidate, next)));
            }
        }
    }
    dist
}

/// Minimum path cost from `origin` to every node, infinite where no
/// finite-cost path exists.
pub fn min_cost_from(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    origin: NodeId,
) -> Result<Vec<Cost>, PathError> {
    check_node(network, origin)?;
    Ok(dijkstra(network, assignment, origin, None))
}

/// Like [`min_cost_from`] for a single destination, with the cheapest
/// path reconstructed when one exists.
pub fn shortest_path(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    origin: NodeId,
    destination: NodeId,
) -> Result<PathResult, PathError> {
    check_node(network, origin)?;
    check_node(network, destination)?;
    let mut preds = Vec::new();
    let dist = dijkstra(network, assignment, origin, Some(&mut preds));
    let min_cost = dist[destination.index()];
    let path = min_cost.is_finite().then(|| {
        let mut edges = Vec::new();
        let mut node = destination;
        while node != origin {
            let edge_id = preds[node.index()].expect("finite cost implies a predecessor chain");
            edges.push(edge_id);
            node = network.edge(edge_id).from;
        }
        edges.reverse();
        edges
    });
    Ok(PathResult {
        origin,
        destination,
        min_cost,
        path,
    })
}

/// A pair is reachable when its minimum cost is finite and strictly below
/// the budget: a path costing exactly the budget is out of reach.
pub fn reachability(min_cost: Cost, budget: f64) -> bool {
    debug_assert!(budget > 0.0);
    match min_cost {
        Cost::Finite(cost) => cost < budget,
        Cost::Infinite => false,
    }
}

/// Demand pairs grouped by origin so each origin's Dijkstra run is shared
/// across all of its destinations.
#[derive(Debug, Clone)]
pub(crate) struct DemandPlan {
    pub per_origin: Vec<(NodeId, Vec<(NodeId, f64)>)>,
    pub total_weight: f64,
}

impl DemandPlan {
    pub fn build(network: &SurveillanceNetwork, demand: &DemandMatrix) -> Result<Self, PathError> {
        let mut per_origin = Vec::new();
        let mut total_weight = 0.0;
        for origin in network.node_ids() {
            let destinations: Vec<(NodeId, f64)> = network
                .node_ids()
                .filter(|&d| d != origin)
                .filter_map(|d| {
                    let weight = demand.weight(origin, d);
                    (weight > 0.0).then_some((d, weight))
                })
                .collect();
            total_weight += destinations.iter().map(|(_, w)| w).sum::<f64>();
            if !destinations.is_empty() {
                per_origin.push((origin, destinations));
            }
        }
        if total_weight <= 0.0 {
            return Err(PathError::ZeroTotalDemand);
        }
        Ok(Self {
            per_origin,
            total_weight,
        })
    }

    /// Demand-weighted share of reachable pairs for one realized
    /// assignment under one budget policy.
    pub fn unaffected_demand(
        &self,
        network: &SurveillanceNetwork,
        assignment: &CostAssignment,
        budgets: &BudgetPolicy,
    ) -> f64 {
        self.unaffected_demand_multi(network, assignment, std::slice::from_ref(budgets))[0]
    }

    /// As [`Self::unaffected_demand`], evaluated for several budget
    /// policies against the same shortest-path runs. This is what makes
    /// budget sweeps exactly comparable: every policy sees the identical
    /// realized costs.
    pub fn unaffected_demand_multi(
        &self,
        network: &SurveillanceNetwork,
        assignment: &CostAssignment,
        policies: &[BudgetPolicy],
    ) -> Vec<f64> {
        let mut reachable_weight = vec![0.0; policies.len()];
        for (origin, destinations) in &self.per_origin {
            let dist = dijkstra(network, assignment, *origin, None);
            for &(destination, weight) in destinations {
                let min_cost = dist[destination.index()];
                for (k, policy) in policies.iter().enumerate() {
                    if reachability(min_cost, policy.budget(*origin, destination)) {
                        reachable_weight[k] += weight;
                    }
                }
            }
        }
        for w in &mut reachable_weight {
            *w /= self.total_weight;
        }
        reachable_weight
    }
}

/// Proportion of demand whose cheapest path stays within budget
/// (demand-weighted, over ordered pairs of distinct nodes).
pub fn unaffected_demand(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    demand: &DemandMatrix,
    budgets: &BudgetPolicy,
) -> Result<f64, PathError> {
    Ok(DemandPlan::build(network, demand)?.unaffected_demand(network, assignment, budgets))
}
