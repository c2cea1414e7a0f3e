#![allow(dead_code)]

use percnet::{
    extract_network, Cost, CostAssignment, EdgeSpec, ExtractionPolicy, NodeId,
    SurveillanceNetwork,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    (rng.next_u64() % bound as u64) as usize
}

pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn demo_network() -> SurveillanceNetwork {
    extract_network(&percnet::demo_document(), &ExtractionPolicy::default())
        .expect("bundled demo extracts cleanly")
}

/// Random graph with up to 6 nodes and 12 distinct directed edges, plus an
/// explicit cost per edge drawn from {0, 1, 2, inf}.
pub fn random_costed_graph(rng: &mut ChaCha8Rng) -> (SurveillanceNetwork, CostAssignment) {
    let nodes = 2 + pick(rng, 5);
    let labels: Vec<String> = (0..nodes).map(|i| format!("n{i}")).collect();

    let mut all_pairs = Vec::new();
    for from in 0..nodes {
        for to in 0..nodes {
            if from != to {
                all_pairs.push((from, to));
            }
        }
    }
    let edge_count = (1 + pick(rng, 12)).min(all_pairs.len());
    // Partial Fisher-Yates: the first `edge_count` entries become the edges.
    for i in 0..edge_count {
        let j = i + pick(rng, all_pairs.len() - i);
        all_pairs.swap(i, j);
    }

    let mut specs = Vec::new();
    let mut costs = Vec::new();
    for &(from, to) in &all_pairs[..edge_count] {
        specs.push(EdgeSpec::new(labels[from].clone(), labels[to].clone()));
        costs.push(match pick(rng, 4) {
            0 => Cost::finite(0.0),
            1 => Cost::finite(1.0),
            2 => Cost::finite(2.0),
            _ => Cost::Infinite,
        });
    }
    let network = SurveillanceNetwork::build(labels, specs).expect("generated graph is valid");
    let assignment = CostAssignment::from_costs(&network, costs);
    (network, assignment)
}

/// Random connected-ish network with surveillance attributes, for
/// exercising the stochastic cost models end to end.
pub fn random_attributed_network(rng: &mut ChaCha8Rng) -> SurveillanceNetwork {
    let nodes = 3 + pick(rng, 3);
    let labels: Vec<String> = (0..nodes).map(|i| format!("n{i}")).collect();
    let mut specs = Vec::new();
    // A ring so something is usually reachable, plus a few chords.
    for i in 0..nodes {
        let a = labels[i].clone();
        let b = labels[(i + 1) % nodes].clone();
        let quality = 0.25 + 0.75 * unit(rng);
        let bits = [0.0, 1.0, 5.0][pick(rng, 3)];
        let failure = [0.0, 0.1, 0.5][pick(rng, 3)];
        specs.push(
            EdgeSpec::new(a.clone(), b.clone())
                .with_quality(quality)
                .with_monitor_bits(bits)
                .with_sensor_failure(failure),
        );
        specs.push(
            EdgeSpec::new(b, a)
                .with_quality(quality)
                .with_monitor_bits(bits)
                .with_sensor_failure(failure),
        );
    }
    for _ in 0..pick(rng, 3) {
        let from = pick(rng, nodes);
        let to = pick(rng, nodes);
        if from == to {
            continue;
        }
        let spec = EdgeSpec::new(labels[from].clone(), labels[to].clone())
            .with_quality(0.25 + 0.75 * unit(rng));
        if specs
            .iter()
            .any(|s: &EdgeSpec| s.from == spec.from && s.to == spec.to)
        {
            continue;
        }
        specs.push(spec);
    }
    SurveillanceNetwork::build(labels, specs).expect("generated network is valid")
}

/// Exhaustive minimum over all simple paths. Costs are non-negative, so
/// dropping cycles never increases a walk's cost and the simple-path
/// minimum equals the true minimum.
pub fn brute_force_min_costs(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    origin: NodeId,
) -> Vec<Cost> {
    let mut best = vec![Cost::Infinite; network.node_count()];
    best[origin.index()] = Cost::finite(0.0);
    let mut on_path = vec![false; network.node_count()];
    on_path[origin.index()] = true;
    explore(network, assignment, origin, Cost::finite(0.0), &mut on_path, &mut best);
    best
}

fn explore(
    network: &SurveillanceNetwork,
    assignment: &CostAssignment,
    node: NodeId,
    cost_so_far: Cost,
    on_path: &mut Vec<bool>,
    best: &mut Vec<Cost>,
) {
    for &edge_id in network.outgoing(node) {
        let edge_cost = assignment.cost(edge_id);
        if edge_cost == Cost::Infinite {
            continue;
        }
        let next = network.edge(edge_id).to;
        if on_path[next.index()] {
            continue;
        }
        let total = cost_so_far + edge_cost;
        if total < best[next.index()] {
            best[next.index()] = total;
        }
        on_path[next.index()] = true;
        explore(network, assignment, next, total, on_path, best);
        on_path[next.index()] = false;
    }
}
