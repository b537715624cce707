#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ridepool::flownet::{FlowNetwork, NodeKind, PathStep, ScoreState};
use ridepool::model::{RequestId, VehicleId};

/// Random taxi/group network: up to `max_taxis` taxis, up to `max_groups`
/// groups of 1 to 9 riders, each taxi adjacent to each group with
/// probability `density`.
pub fn random_network(seed: u64, max_taxis: usize, max_groups: usize, density: f64) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taxis = rng.gen_range(1..=max_taxis);
    let n_groups = rng.gen_range(1..=max_groups);
    let mut next = 1u32;
    let groups: Vec<Vec<RequestId>> = (0..n_groups)
        .map(|_| {
            let size = rng.gen_range(1..=9u32);
            let g = (next..next + size).map(RequestId).collect();
            next += size;
            g
        })
        .collect();
    let adjacency: Vec<Vec<usize>> = (0..taxis)
        .map(|_| (0..n_groups).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    FlowNetwork::from_adjacency((0..taxis as u32).map(VehicleId).collect(), groups, &adjacency)
}

/// Every simple source-to-sink path in the residual network.
pub fn all_residual_paths(net: &FlowNetwork) -> Vec<Vec<PathStep>> {
    let mut out = Vec::new();
    let mut on_path = vec![false; net.node_count()];
    let mut steps = Vec::new();
    walk(net, net.source(), &mut on_path, &mut steps, &mut out);
    out
}

fn walk(
    net: &FlowNetwork,
    at: usize,
    on_path: &mut Vec<bool>,
    steps: &mut Vec<PathStep>,
    out: &mut Vec<Vec<PathStep>>,
) {
    if at == net.sink() {
        out.push(steps.clone());
        return;
    }
    on_path[at] = true;
    for (id, e) in net.edges().iter().enumerate() {
        let next = if e.from == at && e.flow < e.cap {
            Some((e.to, true))
        } else if e.to == at && e.flow > 0 {
            Some((e.from, false))
        } else {
            None
        };
        if let Some((v, forward)) = next {
            if !on_path[v] {
                steps.push(PathStep { edge: id, forward });
                walk(net, v, on_path, steps, out);
                steps.pop();
            }
        }
    }
    on_path[at] = false;
}

/// Score recomputed from scratch: each taxi with flow into a group holds the
/// award the state says it holds, and the total is their sum.
pub fn score_from_flows(net: &FlowNetwork, scores: &ScoreState) -> u32 {
    net.edges()
        .iter()
        .filter(|e| e.flow > 0)
        .filter_map(|e| match (net.kind(e.from), net.kind(e.to)) {
            (NodeKind::Taxi(t), NodeKind::Super(g)) => Some(scores.award(t, g)),
            _ => None,
        })
        .sum()
}
