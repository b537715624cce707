//! Exact vehicle-trip matching by branching on edges.
//!
//! Each search node splits its live edges into independent components, solves
//! a component directly when every trip is a single rider (assignment
//! problem) or only one vehicle is left, and otherwise branches on the first
//! live edge: drop it, or commit to it and delete everything that conflicts.
//! Solutions compare by riders served, then weight, then the smaller decision
//! vector.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{match_weight, Assignment, EconomicParams, Instance, Match, ModelError, RequestId, VehicleId};
use crate::vtg::VtGraph;

/// Weights closer than this count as equal.
pub const WEIGHT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BnbError {
    #[error("branching depth {depth} exceeds the edge count {edges}")]
    DepthExceeded { depth: usize, edges: usize },
    #[error("search stopped after {0} nodes")]
    NodeLimit(u64),
    #[error("no candidate solutions")]
    NoCandidates,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchEdge {
    pub vehicle: VehicleId,
    /// Index into the vehicle-trip graph.
    pub trip: usize,
    pub members: Vec<RequestId>,
    pub weight: f64,
}

impl SearchEdge {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    fn overlaps(&self, other: &SearchEdge) -> bool {
        self.members.iter().any(|m| other.members.binary_search(m).is_ok())
    }
}

/// A set of live edges over a fixed, ordered edge table. Edges are ordered by
/// vehicle id, then trip size descending, then trip index.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGraph {
    table: Arc<Vec<SearchEdge>>,
    live: Vec<usize>,
}

impl SearchGraph {
    pub fn new(mut edges: Vec<SearchEdge>) -> Self {
        edges.sort_by(|a, b| {
            a.vehicle
                .cmp(&b.vehicle)
                .then(b.size().cmp(&a.size()))
                .then(a.trip.cmp(&b.trip))
        });
        let live = (0..edges.len()).collect();
        Self { table: Arc::new(edges), live }
    }

    pub fn from_vtg(vtg: &VtGraph, instance: &Instance, p: &EconomicParams) -> Result<Self, ModelError> {
        let mut edges = Vec::with_capacity(vtg.edge_count());
        for (&vid, trips) in vtg.vehicle_edges() {
            let vehicle = instance.vehicle(vid).ok_or(ModelError::UnknownVehicle(vid))?;
            for &t in trips {
                let trip = vtg.trip(t);
                edges.push(SearchEdge {
                    vehicle: vid,
                    trip: t,
                    members: trip.members.clone(),
                    weight: match_weight(vehicle, &trip.plan, p),
                });
            }
        }
        Ok(Self::new(edges))
    }

    fn with_live(&self, live: Vec<usize>) -> Self {
        Self { table: Arc::clone(&self.table), live }
    }

    pub fn edge(&self, idx: usize) -> &SearchEdge {
        &self.table[idx]
    }

    /// Size of the full edge table.
    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// Live edge indices, ascending.
    pub fn live(&self) -> &[usize] {
        &self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    fn degree_of_vehicle(&self, v: VehicleId) -> usize {
        self.live.iter().filter(|&&e| self.table[e].vehicle == v).count()
    }

    fn degree_of_trip(&self, t: usize) -> usize {
        self.live.iter().filter(|&&e| self.table[e].trip == t).count()
    }
}

/// Connected components of the live graph. Vehicles join the trips they can
/// take, and trips sharing a rider join each other, so components never
/// compete for a vehicle or a rider. Components are ordered by their first
/// edge.
pub fn split_components(g: &SearchGraph) -> Vec<SearchGraph> {
    let n = g.live.len();
    let mut uf = UnionFind::new(n);
    let mut by_vehicle: HashMap<VehicleId, usize> = HashMap::new();
    let mut by_rider: HashMap<RequestId, usize> = HashMap::new();
    for (pos, &e) in g.live.iter().enumerate() {
        let edge = &g.table[e];
        match by_vehicle.get(&edge.vehicle) {
            Some(&first) => uf.union(first, pos),
            None => {
                by_vehicle.insert(edge.vehicle, pos);
            }
        }
        for &m in &edge.members {
            match by_rider.get(&m) {
                Some(&first) => uf.union(first, pos),
                None => {
                    by_rider.insert(m, pos);
                }
            }
        }
    }
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for (pos, &e) in g.live.iter().enumerate() {
        let root = uf.find(pos);
        let idx = *slot.entry(root).or_insert_with(|| {
            comps.push(Vec::new());
            comps.len() - 1
        });
        comps[idx].push(e);
    }
    comps.into_iter().map(|live| g.with_live(live)).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncludeReduction {
    pub graph: SearchGraph,
    /// Riders served by the included trip.
    pub credit: usize,
    pub removed_edges: usize,
    /// Live edges of the included edge's vehicle.
    pub vehicle_degree: usize,
    /// Live edges into the included trip and into every trip sharing a rider
    /// with it.
    pub trip_degree_sum: usize,
    /// Trips sharing a rider with the included trip, not counting itself.
    pub neighbors: usize,
}

/// Commits to `edge`: its vehicle leaves with all of its edges, and every
/// trip sharing a rider with the chosen trip (the trip itself included)
/// loses all incoming edges.
pub fn apply_include_reduction(g: &SearchGraph, edge: usize) -> IncludeReduction {
    let chosen = &g.table[edge];
    let mut hit_trips: Vec<usize> = g
        .live
        .iter()
        .map(|&e| &g.table[e])
        .filter(|e| e.overlaps(chosen))
        .map(|e| e.trip)
        .collect();
    hit_trips.sort_unstable();
    hit_trips.dedup();
    let vehicle_degree = g.degree_of_vehicle(chosen.vehicle);
    let trip_degree_sum = hit_trips.iter().map(|&t| g.degree_of_trip(t)).sum();
    let live: Vec<usize> = g
        .live
        .iter()
        .copied()
        .filter(|&e| {
            let x = &g.table[e];
            x.vehicle != chosen.vehicle && hit_trips.binary_search(&x.trip).is_err()
        })
        .collect();
    IncludeReduction {
        removed_edges: g.live.len() - live.len(),
        graph: g.with_live(live),
        credit: chosen.size(),
        vehicle_degree,
        trip_degree_sum,
        neighbors: hit_trips.len() - 1,
    }
}

/// Is dropping `edge` pointless? True when committing to it removes nothing
/// else: the drop branch then faces the same remaining graph with one rider
/// fewer served, so it can never win.
pub fn dominance_prune(g: &SearchGraph, edge: usize) -> bool {
    apply_include_reduction(g, edge).removed_edges == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BnbOptions {
    pub dominance: bool,
    /// Abort after this many search nodes.
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BnbStats {
    pub nodes_expanded: u64,
    /// Deepest chain of branching decisions.
    pub max_depth: usize,
    pub assignment_fast_paths: u64,
    pub single_vehicle_fast_paths: u64,
    pub dominance_prunes: u64,
    pub component_splits: u64,
    /// Violations of the edge-removal lower bound at include branches; zero
    /// when the reduction is correct.
    pub reduction_bound_misses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnBSolution {
    pub served: usize,
    pub weight: f64,
    /// Included edges, ascending.
    pub chosen: Vec<usize>,
    pub stats: BnbStats,
}

impl BnBSolution {
    fn empty() -> Self {
        Self {
            served: 0,
            weight: 0.0,
            chosen: Vec::new(),
            stats: BnbStats::default(),
        }
    }

    /// Decision per edge of the table.
    pub fn decisions(&self, table_len: usize) -> Vec<bool> {
        let mut d = vec![false; table_len];
        for &e in &self.chosen {
            d[e] = true;
        }
        d
    }

    pub fn to_assignment(
        &self,
        g: &SearchGraph,
        vtg: &VtGraph,
        instance: &Instance,
        p: &EconomicParams,
    ) -> Result<Assignment, ModelError> {
        let matches = self
            .chosen
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                Match {
                    vehicle: edge.vehicle,
                    trip: vtg.trip(edge.trip).plan.clone(),
                }
            })
            .collect();
        Assignment::from_matches(matches, instance, p)
    }
}

/// Orders by served, then weight, then decision vector (smaller is better).
fn compare(a: &BnBSolution, b: &BnBSolution) -> Ordering {
    a.served
        .cmp(&b.served)
        .then_with(|| {
            if (a.weight - b.weight).abs() <= WEIGHT_EPS {
                Ordering::Equal
            } else {
                a.weight.total_cmp(&b.weight)
            }
        })
        .then_with(|| decision_order(&b.chosen, &a.chosen))
}

/// Lexicographic order of the 0/1 vectors whose ones sit at `a` and `b`.
fn decision_order(a: &[usize], b: &[usize]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
            // `a` has a one where `b` has a zero
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    (a.len() - i).cmp(&(b.len() - j))
}

/// Best of several candidates with equal served counts: highest weight, then
/// the smallest decision vector.
pub fn tie_break_by_weight(candidates: Vec<BnBSolution>) -> Result<BnBSolution, BnbError> {
    candidates
        .into_iter()
        .reduce(|best, c| if compare(&c, &best) == Ordering::Greater { c } else { best })
        .ok_or(BnbError::NoCandidates)
}

fn merge(mut a: BnBSolution, b: BnBSolution) -> BnBSolution {
    a.served += b.served;
    a.weight += b.weight;
    a.chosen.extend(b.chosen);
    a.chosen.sort_unstable();
    a
}

struct Search {
    opts: BnbOptions,
    stats: BnbStats,
    edge_count: usize,
}

impl Search {
    fn solve(&mut self, g: &SearchGraph, depth: usize) -> Result<BnBSolution, BnbError> {
        self.stats.nodes_expanded += 1;
        if let Some(limit) = self.opts.node_limit {
            if self.stats.nodes_expanded > limit {
                return Err(BnbError::NodeLimit(limit));
            }
        }
        if depth > self.edge_count {
            return Err(BnbError::DepthExceeded { depth, edges: self.edge_count });
        }
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if g.is_empty() {
            return Ok(BnBSolution::empty());
        }

        let comps = split_components(g);
        if comps.len() > 1 {
            self.stats.component_splits += 1;
            let mut total = BnBSolution::empty();
            for c in &comps {
                total = merge(total, self.solve(c, depth)?);
            }
            return Ok(total);
        }

        if g.live.iter().all(|&e| g.table[e].size() == 1) {
            self.stats.assignment_fast_paths += 1;
            return Ok(solve_singletons(g));
        }
        let first_vehicle = g.table[g.live[0]].vehicle;
        if g.live.iter().all(|&e| g.table[e].vehicle == first_vehicle) {
            self.stats.single_vehicle_fast_paths += 1;
            let candidates = g
                .live
                .iter()
                .map(|&e| BnBSolution {
                    served: g.table[e].size(),
                    weight: g.table[e].weight,
                    chosen: vec![e],
                    stats: BnbStats::default(),
                })
                .collect();
            return tie_break_by_weight(candidates);
        }

        let e1 = g.live[0];
        let red = apply_include_reduction(g, e1);
        if red.removed_edges + red.neighbors + 1 < red.vehicle_degree + red.trip_degree_sum {
            self.stats.reduction_bound_misses += 1;
        }
        let mut include = self.solve(&red.graph, depth + 1)?;
        include.served += red.credit;
        include.weight += g.table[e1].weight;
        include.chosen.insert(0, e1);

        if self.opts.dominance && red.removed_edges == 1 {
            self.stats.dominance_prunes += 1;
            return Ok(include);
        }
        let exclude = self.solve(&g.with_live(g.live[1..].to_vec()), depth + 1)?;
        Ok(if compare(&exclude, &include) == Ordering::Greater {
            exclude
        } else {
            include
        })
    }
}

/// Every trip is a single rider, so riders never conflict and the problem is
/// an assignment: most matched edges first, then most weight.
fn solve_singletons(g: &SearchGraph) -> BnBSolution {
    let mut vehicles: Vec<VehicleId> = g.live.iter().map(|&e| g.table[e].vehicle).collect();
    vehicles.sort_unstable();
    vehicles.dedup();
    let mut trips: Vec<usize> = g.live.iter().map(|&e| g.table[e].trip).collect();
    trips.sort_unstable();
    trips.dedup();
    let n = vehicles.len().max(trips.len());
    let max_abs = g.live.iter().map(|&e| g.table[e].weight.abs()).fold(0.0, f64::max);
    let big = 1.0 + 4.0 * n as f64 * max_abs;

    let mut profit = vec![vec![0.0; n]; n];
    let mut edge_at = vec![vec![None; n]; n];
    for &e in &g.live {
        let edge = &g.table[e];
        let r = vehicles.binary_search(&edge.vehicle).unwrap();
        let c = trips.binary_search(&edge.trip).unwrap();
        profit[r][c] = big + edge.weight;
        edge_at[r][c] = Some(e);
    }
    let cost: Vec<Vec<f64>> = profit.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    let col_of_row = hungarian(&cost);

    let mut sol = BnBSolution::empty();
    for (r, &c) in col_of_row.iter().enumerate() {
        if let Some(e) = edge_at[r][c] {
            sol.served += 1;
            sol.weight += g.table[e].weight;
            sol.chosen.push(e);
        }
    }
    sol.chosen.sort_unstable();
    sol
}

/// Minimum-cost perfect assignment on a square matrix; returns the column of
/// each row. Shortest augmenting path with potentials, O(n^3).
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based: column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    col_of_row
}

/// Solves `g` exactly.
pub fn branch_solve(g: &SearchGraph, opts: BnbOptions) -> Result<BnBSolution, BnbError> {
    let mut search = Search {
        opts,
        stats: BnbStats::default(),
        edge_count: g.live.len(),
    };
    let mut sol = search.solve(g, 0)?;
    sol.stats = search.stats;
    Ok(sol)
}

/// Builds the search graph from a vehicle-trip graph, solves it and decodes
/// the result.
pub fn solve_bnb(
    vtg: &VtGraph,
    instance: &Instance,
    p: &EconomicParams,
    opts: BnbOptions,
) -> Result<(Assignment, BnBSolution, SearchGraph), BnbError> {
    let g = SearchGraph::from_vtg(vtg, instance, p)?;
    let sol = branch_solve(&g, opts)?;
    let assignment = sol.to_assignment(&g, vtg, instance, p)?;
    Ok((assignment, sol, g))
}
