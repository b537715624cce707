//! Score-augmented max-flow heuristic.
//!
//! The network has a source, one node per taxi, one super node per stable
//! group, and a sink. Source-taxi and taxi-group edges carry capacity 1; the
//! group-sink edge carries `ceil(|group| / 4)`. Flow is pushed one unit at a
//! time along the augmenting path that collects the most score, where a taxi
//! entering a group is credited with `min(4, passengers still waiting)`. A
//! reallocation pass then moves taxis to groups where they would carry more
//! passengers.
//!
//! Node numbering: `0` is the source, taxis follow in vehicle-id order, then
//! super nodes in group order, and the sink is last. Paths compare
//! lexicographically on these numbers.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grouping::StableGroups;
use crate::model::{
    driver_economics, Assignment, DriverQuote, EconomicParams, Instance, Match, ModelError, RequestId,
    VehicleId, VEHICLE_CAPACITY,
};
use crate::vtg::is_admissible_trip;

const SEATS: u32 = VEHICLE_CAPACITY as u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid augmenting path: {0}")]
    InvalidPath(String),
    #[error("score bookkeeping disagrees with flows: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub cap: u32,
    pub flow: u32,
}

impl FlowEdge {
    fn residual(&self) -> u32 {
        self.cap - self.flow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Source,
    Taxi(usize),
    Super(usize),
    Sink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    vehicles: Vec<VehicleId>,
    groups: Vec<Vec<RequestId>>,
    edges: Vec<FlowEdge>,
    /// Edge ids leaving each node, sorted by head.
    out: Vec<Vec<usize>>,
    /// Edge ids entering each node, sorted by tail.
    inc: Vec<Vec<usize>>,
    source_edge: Vec<Option<usize>>,
    sink_edge: Vec<usize>,
}

impl FlowNetwork {
    /// Builds the network from group member lists and, per taxi, the indices of
    /// the groups it is willing to serve. Taxis with no group get no source
    /// edge.
    pub fn from_adjacency(
        vehicles: Vec<VehicleId>,
        groups: Vec<Vec<RequestId>>,
        adjacency: &[Vec<usize>],
    ) -> Self {
        assert_eq!(vehicles.len(), adjacency.len(), "one adjacency row per taxi");
        let b = vehicles.len();
        let g = groups.len();
        let n = b + g + 2;
        let mut net = FlowNetwork {
            vehicles,
            groups,
            edges: Vec::new(),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            source_edge: vec![None; b],
            sink_edge: Vec::with_capacity(g),
        };
        let sink = net.sink();
        for gi in 0..g {
            let cap = net.groups[gi].len().div_ceil(VEHICLE_CAPACITY) as u32;
            let e = net.push_edge(net.super_node(gi), sink, cap);
            net.sink_edge.push(e);
        }
        for (ti, row) in adjacency.iter().enumerate() {
            let mut row = row.clone();
            row.sort_unstable();
            row.dedup();
            if row.is_empty() {
                continue;
            }
            let e = net.push_edge(0, net.taxi_node(ti), 1);
            net.source_edge[ti] = Some(e);
            for gi in row {
                assert!(gi < g, "group index {gi} out of range");
                net.push_edge(net.taxi_node(ti), net.super_node(gi), 1);
            }
        }
        for list in net.out.iter_mut() {
            list.sort_by_key(|&e| net.edges[e].to);
        }
        for list in net.inc.iter_mut() {
            list.sort_by_key(|&e| net.edges[e].from);
        }
        net
    }

    fn push_edge(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let id = self.edges.len();
        self.edges.push(FlowEdge { from, to, cap, flow: 0 });
        self.out[from].push(id);
        self.inc[to].push(id);
        id
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.vehicles.len() + self.groups.len() + 1
    }

    pub fn taxi_node(&self, taxi: usize) -> usize {
        1 + taxi
    }

    pub fn super_node(&self, group: usize) -> usize {
        1 + self.vehicles.len() + group
    }

    pub fn node_count(&self) -> usize {
        self.vehicles.len() + self.groups.len() + 2
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        let b = self.vehicles.len();
        match node {
            0 => NodeKind::Source,
            n if n <= b => NodeKind::Taxi(n - 1),
            n if n <= b + self.groups.len() => NodeKind::Super(n - 1 - b),
            _ => NodeKind::Sink,
        }
    }

    pub fn vehicles(&self) -> &[VehicleId] {
        &self.vehicles
    }

    pub fn groups(&self) -> &[Vec<RequestId>] {
        &self.groups
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn sink_capacity(&self, group: usize) -> u32 {
        self.edges[self.sink_edge[group]].cap
    }

    pub fn sink_flow(&self, group: usize) -> u32 {
        self.edges[self.sink_edge[group]].flow
    }

    /// Groups taxi `taxi` is willing to serve.
    pub fn taxi_groups(&self, taxi: usize) -> impl Iterator<Item = usize> + '_ {
        let base = 1 + self.vehicles.len();
        self.out[self.taxi_node(taxi)]
            .iter()
            .map(move |&e| self.edges[e].to - base)
    }

    fn taxi_group_edge(&self, taxi: usize, group: usize) -> Option<usize> {
        let to = self.super_node(group);
        self.out[self.taxi_node(taxi)]
            .iter()
            .copied()
            .find(|&e| self.edges[e].to == to)
    }

    pub fn flow_value(&self) -> u32 {
        self.out[0].iter().map(|&e| self.edges[e].flow).sum()
    }

    /// Capacity bounds and conservation at every inner node.
    pub fn check_flow(&self) -> Result<(), FlowError> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.flow > e.cap {
                return Err(FlowError::Inconsistent(format!("edge {i} over capacity")));
            }
        }
        for node in 1..self.sink() {
            let inflow: u32 = self.inc[node].iter().map(|&e| self.edges[e].flow).sum();
            let outflow: u32 = self.out[node].iter().map(|&e| self.edges[e].flow).sum();
            if inflow != outflow {
                return Err(FlowError::Inconsistent(format!(
                    "node {node} receives {inflow} but sends {outflow}"
                )));
            }
        }
        Ok(())
    }
}

/// Builds the flow network for `groups`. Taxi `b` gets an edge to a group when
/// it is willing to carry the trip formed by the group's first
/// `min(4, |group|)` members in id order.
pub fn build_flow_network(
    groups: &StableGroups,
    instance: &Instance,
    p: &EconomicParams,
) -> Result<FlowNetwork, FlowError> {
    let supers = groups.super_nodes();
    let quotes = supers
        .iter()
        .map(|members| {
            let head = &members[..members.len().min(VEHICLE_CAPACITY)];
            let lookup = |id: RequestId| instance.request(id).ok_or(ModelError::UnknownRequest(id));
            let mut buf = [lookup(*head.first().ok_or(ModelError::EmptyTrip)?)?; VEHICLE_CAPACITY];
            for (slot, &id) in buf.iter_mut().zip(head) {
                *slot = lookup(id)?;
            }
            DriverQuote::for_members(&buf[..head.len()], p).ok_or(ModelError::EmptyTrip)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let adjacency: Vec<Vec<usize>> = instance
        .vehicles
        .iter()
        .map(|v| {
            quotes
                .iter()
                .enumerate()
                .filter(|(_, q)| q.assess(v, p).willing)
                .map(|(gi, _)| gi)
                .collect()
        })
        .collect();
    let vehicles = instance.vehicles.iter().map(|v| v.id).collect();
    Ok(FlowNetwork::from_adjacency(vehicles, supers, &adjacency))
}

/// Score bookkeeping: total passengers credited, passengers still waiting per
/// group, and each taxi's current award.
///
/// Two facts hold for every state reachable through [`one_augment`] and the
/// reallocation pass: a group with waiting passengers only hosts taxis
/// holding a full award, and a group hosts at most one taxi with a partial
/// award. Together they make a group with waiting passengers unsaturated
/// and give every re-routed taxi exactly the award it displaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreState {
    total: u32,
    remaining: Vec<u32>,
    awarded: Vec<Option<(usize, u32)>>,
}

impl ScoreState {
    pub fn new(net: &FlowNetwork) -> Self {
        Self {
            total: 0,
            remaining: net.groups.iter().map(|g| g.len() as u32).collect(),
            awarded: vec![None; net.vehicles.len()],
        }
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn remaining(&self, group: usize) -> u32 {
        self.remaining[group]
    }

    /// `(group, award)` of a matched taxi.
    pub fn placement(&self, taxi: usize) -> Option<(usize, u32)> {
        self.awarded[taxi]
    }

    /// Score taxi `taxi` currently holds at `group`, zero if elsewhere.
    pub fn award(&self, taxi: usize, group: usize) -> u32 {
        match self.awarded[taxi] {
            Some((g, a)) if g == group => a,
            _ => 0,
        }
    }

    /// Sum of awards equals the total; awards plus waiting passengers equal
    /// the group size; flows agree with placements.
    pub fn check(&self, net: &FlowNetwork) -> Result<(), FlowError> {
        let mut per_group = vec![0u32; net.groups.len()];
        let mut taxis_at = vec![0u32; net.groups.len()];
        let mut sum = 0;
        for (ti, slot) in self.awarded.iter().enumerate() {
            let src_flow = net.source_edge[ti].map_or(0, |e| net.edges[e].flow);
            match *slot {
                Some((g, a)) => {
                    if a > SEATS {
                        return Err(FlowError::Inconsistent(format!("taxi {ti} award {a} > 4")));
                    }
                    let e = net.taxi_group_edge(ti, g).ok_or_else(|| {
                        FlowError::Inconsistent(format!("taxi {ti} placed at non-adjacent group {g}"))
                    })?;
                    if net.edges[e].flow != 1 || src_flow != 1 {
                        return Err(FlowError::Inconsistent(format!(
                            "taxi {ti} placed at group {g} without flow"
                        )));
                    }
                    per_group[g] += a;
                    taxis_at[g] += 1;
                    sum += a;
                }
                None if src_flow != 0 => {
                    return Err(FlowError::Inconsistent(format!("taxi {ti} carries flow but has no placement")));
                }
                None => {}
            }
        }
        if sum != self.total {
            return Err(FlowError::Inconsistent(format!(
                "awards sum to {sum}, total is {}",
                self.total
            )));
        }
        for (g, members) in net.groups.iter().enumerate() {
            if per_group[g] + self.remaining[g] != members.len() as u32 {
                return Err(FlowError::Inconsistent(format!(
                    "group {g}: awards {} + remaining {} != size {}",
                    per_group[g],
                    self.remaining[g],
                    members.len()
                )));
            }
            if taxis_at[g] != net.sink_flow(g) {
                return Err(FlowError::Inconsistent(format!(
                    "group {g}: {} taxis but sink flow {}",
                    taxis_at[g],
                    net.sink_flow(g)
                )));
            }
        }
        Ok(())
    }

    fn gain_at(&self, group: usize) -> u32 {
        self.remaining[group].min(SEATS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub edge: usize,
    /// `false` when the step cancels flow on `edge`.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentingPath {
    pub nodes: Vec<usize>,
    pub steps: Vec<PathStep>,
    pub score: u32,
}

impl AugmentingPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Marginal score of pushing one unit along `steps`, evaluated the way
/// [`one_augment`] applies it: awards released by cancelled edges return to
/// their group before entering taxis are credited.
pub fn path_score(net: &FlowNetwork, scores: &ScoreState, steps: &[PathStep]) -> i64 {
    let mut remaining_delta: Vec<(usize, u32)> = Vec::new();
    let mut delta = 0i64;
    for s in steps.iter().filter(|s| !s.forward) {
        let e = net.edges[s.edge];
        if let (NodeKind::Taxi(t), NodeKind::Super(g)) = (net.kind(e.from), net.kind(e.to)) {
            let a = scores.award(t, g);
            remaining_delta.push((g, a));
            delta -= a as i64;
        }
    }
    for s in steps.iter().filter(|s| s.forward) {
        let e = net.edges[s.edge];
        if let (NodeKind::Taxi(_), NodeKind::Super(g)) = (net.kind(e.from), net.kind(e.to)) {
            let restored: u32 = remaining_delta
                .iter()
                .filter(|(rg, _)| *rg == g)
                .map(|(_, a)| a)
                .sum();
            delta += (scores.remaining[g] + restored).min(SEATS) as i64;
        }
    }
    delta
}

/// Finds the augmenting path with the largest marginal score, preferring
/// fewer edges and then the lexicographically smallest node sequence.
///
/// Relies on the [`ScoreState`] invariants: leaving a group through a
/// cancelled edge never changes the score, so a path's score is set by the
/// group it finally enters the sink from and a breadth-first search that
/// records lexicographically smallest shortest paths is exact. The search
/// stops as soon as it reaches a group worth the best score still available.
pub fn find_max_score_augmenting_path(
    net: &FlowNetwork,
    scores: &ScoreState,
) -> Option<AugmentingPath> {
    let bound = (0..net.groups.len())
        .filter(|&g| net.edges[net.sink_edge[g]].residual() > 0)
        .map(|g| scores.gain_at(g))
        .max()?;

    let n = net.node_count();
    let sink = net.sink();
    let mut parent: Vec<Option<PathStep>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    let mut best: Option<(u32, usize)> = None;

    while let Some(u) = queue.pop_front() {
        match net.kind(u) {
            NodeKind::Source => {
                for &e in &net.out[u] {
                    let edge = net.edges[e];
                    if edge.residual() > 0 && !seen[edge.to] {
                        seen[edge.to] = true;
                        parent[edge.to] = Some(PathStep { edge: e, forward: true });
                        queue.push_back(edge.to);
                    }
                }
            }
            NodeKind::Taxi(_) => {
                for &e in &net.out[u] {
                    let edge = net.edges[e];
                    if edge.residual() > 0 && !seen[edge.to] {
                        seen[edge.to] = true;
                        parent[edge.to] = Some(PathStep { edge: e, forward: true });
                        queue.push_back(edge.to);
                    }
                }
            }
            NodeKind::Super(g) => {
                if net.edges[net.sink_edge[g]].residual() > 0 {
                    let score = scores.gain_at(g);
                    if best.is_none_or(|(s, _)| score > s) {
                        best = Some((score, u));
                        if score >= bound {
                            break;
                        }
                    }
                }
                for &e in &net.inc[u] {
                    let edge = net.edges[e];
                    if edge.flow > 0 && !seen[edge.from] {
                        seen[edge.from] = true;
                        parent[edge.from] = Some(PathStep { edge: e, forward: false });
                        queue.push_back(edge.from);
                    }
                }
            }
            NodeKind::Sink => {}
        }
    }

    let (score, last) = best?;
    let mut steps = vec![PathStep {
        edge: net.sink_edge[match net.kind(last) {
            NodeKind::Super(g) => g,
            _ => unreachable!("paths end at a super node"),
        }],
        forward: true,
    }];
    let mut nodes = vec![sink, last];
    let mut at = last;
    while let Some(step) = parent[at] {
        let e = net.edges[step.edge];
        at = if step.forward { e.from } else { e.to };
        steps.push(step);
        nodes.push(at);
    }
    steps.reverse();
    nodes.reverse();
    debug_assert_eq!(path_score(net, scores, &steps), score as i64);
    Some(AugmentingPath { nodes, steps, score })
}

/// Pushes one unit along `path`, releasing the awards of cancelled taxi-group
/// edges and then crediting every taxi that enters a group with
/// `min(4, waiting)`. Returns the change in total score.
pub fn one_augment(
    net: &mut FlowNetwork,
    scores: &mut ScoreState,
    path: &AugmentingPath,
) -> Result<i64, FlowError> {
    validate_path(net, path)?;
    let before = scores.total as i64;

    for s in path.steps.iter().filter(|s| !s.forward) {
        let e = net.edges[s.edge];
        if let (NodeKind::Taxi(t), NodeKind::Super(g)) = (net.kind(e.from), net.kind(e.to)) {
            let (placed, a) = scores.awarded[t].ok_or_else(|| {
                FlowError::Inconsistent(format!("cancelling taxi {t} which holds no award"))
            })?;
            if placed != g {
                return Err(FlowError::Inconsistent(format!(
                    "taxi {t} holds its award at group {placed}, not {g}"
                )));
            }
            scores.remaining[g] += a;
            scores.total -= a;
            scores.awarded[t] = None;
        }
    }
    for s in path.steps.iter().filter(|s| s.forward) {
        let e = net.edges[s.edge];
        if let (NodeKind::Taxi(t), NodeKind::Super(g)) = (net.kind(e.from), net.kind(e.to)) {
            let a = scores.gain_at(g);
            scores.remaining[g] -= a;
            scores.total += a;
            scores.awarded[t] = Some((g, a));
        }
    }
    for s in &path.steps {
        let e = &mut net.edges[s.edge];
        if s.forward {
            e.flow += 1;
        } else {
            e.flow -= 1;
        }
    }
    Ok(scores.total as i64 - before)
}

fn validate_path(net: &FlowNetwork, path: &AugmentingPath) -> Result<(), FlowError> {
    let bad = |msg: String| Err(FlowError::InvalidPath(msg));
    if path.nodes.len() != path.steps.len() + 1 {
        return bad("node and step counts disagree".into());
    }
    if path.nodes.first() != Some(&net.source()) || path.nodes.last() != Some(&net.sink()) {
        return bad("path must run from source to sink".into());
    }
    let mut seen = vec![false; net.node_count()];
    for (i, step) in path.steps.iter().enumerate() {
        let Some(e) = net.edges.get(step.edge) else {
            return bad(format!("edge {} does not exist", step.edge));
        };
        let (u, v) = (path.nodes[i], path.nodes[i + 1]);
        let ok = if step.forward {
            e.from == u && e.to == v && e.residual() > 0
        } else {
            e.to == u && e.from == v && e.flow > 0
        };
        if !ok {
            return bad(format!("step {i} ({u} -> {v}) has no residual capacity"));
        }
        if std::mem::replace(&mut seen[u], true) {
            return bad(format!("node {u} visited twice"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlowStats {
    pub augmentations: usize,
    pub reallocation_moves: usize,
    /// Total score after each augmentation and each move, starting from 0.
    pub score_trace: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub flow_value: u32,
    /// Flow value when the augmenting phase ended.
    pub phase1_flow: u32,
    pub scores: ScoreState,
    pub stats: FlowStats,
}

/// Runs the augmenting phase to exhaustion, then moves taxis to groups where
/// they would carry strictly more passengers until no such move remains.
/// Taxis are scanned in id order; each picks the best-scoring target, then the
/// smallest group index.
pub fn solve_modified_ff(net: &mut FlowNetwork) -> FlowSolution {
    let mut scores = ScoreState::new(net);
    let mut stats = FlowStats {
        score_trace: vec![0],
        ..Default::default()
    };

    while let Some(path) = find_max_score_augmenting_path(net, &scores) {
        one_augment(net, &mut scores, &path).expect("search returns residual paths");
        stats.augmentations += 1;
        stats.score_trace.push(scores.total);
    }
    let phase1_flow = net.flow_value();

    loop {
        let mut moved = false;
        for taxi in 0..net.vehicles.len() {
            let Some((from, award)) = scores.awarded[taxi] else {
                continue;
            };
            let target = net
                .taxi_groups(taxi)
                .filter(|&g| g != from && net.edges[net.sink_edge[g]].residual() > 0)
                .map(|g| (scores.gain_at(g), g))
                .filter(|&(gain, _)| gain > award)
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            if let Some((gain, to)) = target {
                reallocate(net, &mut scores, taxi, from, to, award, gain);
                stats.reallocation_moves += 1;
                stats.score_trace.push(scores.total);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    FlowSolution {
        flow_value: net.flow_value(),
        phase1_flow,
        scores,
        stats,
    }
}

fn reallocate(
    net: &mut FlowNetwork,
    scores: &mut ScoreState,
    taxi: usize,
    from: usize,
    to: usize,
    award: u32,
    gain: u32,
) {
    let old = net.taxi_group_edge(taxi, from).expect("placed taxi has an edge");
    let new = net.taxi_group_edge(taxi, to).expect("target is adjacent");
    net.edges[old].flow -= 1;
    net.edges[net.sink_edge[from]].flow -= 1;
    net.edges[new].flow += 1;
    net.edges[net.sink_edge[to]].flow += 1;
    scores.remaining[from] += award;
    scores.remaining[to] -= gain;
    scores.total = scores.total - award + gain;
    scores.awarded[taxi] = Some((to, gain));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AssignStats {
    /// Blocks shrunk because the full block was not a valid trip for its taxi.
    pub shrunk_blocks: usize,
    /// Taxis left idle because no prefix of their block was a valid trip.
    pub idle_taxis: usize,
}

/// Turns placements into trips. Within each group, members sorted by id are
/// handed out in consecutive blocks, one per placed taxi (taxis in id order),
/// sized by the taxi's award. A block that is not a trip the taxi can serve
/// (passenger and driver economics, sub-trip closure) gives back its
/// highest-id members until it is, so every emitted match is feasible.
pub fn assign_passengers_to_taxis(
    net: &FlowNetwork,
    scores: &ScoreState,
    instance: &Instance,
    p: &EconomicParams,
) -> Result<(Assignment, AssignStats), FlowError> {
    scores.check(net)?;
    let mut per_group: Vec<Vec<(usize, u32)>> = vec![Vec::new(); net.groups.len()];
    for (taxi, slot) in scores.awarded.iter().enumerate() {
        if let Some((g, a)) = *slot {
            per_group[g].push((taxi, a));
        }
    }

    let mut stats = AssignStats::default();
    let mut matches = Vec::new();
    for (g, placed) in per_group.iter().enumerate() {
        if placed.is_empty() {
            continue;
        }
        let mut pool: Vec<RequestId> = net.groups[g].clone();
        for &(taxi, award) in placed {
            let vid = net.vehicles[taxi];
            let vehicle = instance.vehicle(vid).ok_or(ModelError::UnknownVehicle(vid))?;
            let mut take = (award as usize).min(pool.len());
            let mut accepted = None;
            while take > 0 {
                let block = &pool[..take];
                let trip = instance.trip(block, p)?;
                if driver_economics(vehicle, &trip, p).willing
                    && trip.passenger_feasible(p)
                    && is_admissible_trip(block, instance, p, Some(vehicle))
                {
                    accepted = Some(trip);
                    break;
                }
                take -= 1;
            }
            if take < award as usize {
                stats.shrunk_blocks += 1;
            }
            match accepted {
                Some(trip) => {
                    pool.drain(..take);
                    matches.push(Match { vehicle: vid, trip });
                }
                None => stats.idle_taxis += 1,
            }
        }
    }
    Ok((Assignment::from_matches(matches, instance, p)?, stats))
}
