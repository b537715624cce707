//! Close sets, stable pairs, and the partition of passengers into stable
//! groups consumed by the flow heuristic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{is_close, synthesize_trip, EconomicParams, Request, RequestId, COST_EPS};

/// `neighbors[i]` holds every other request close to `i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CloseSets {
    pub neighbors: BTreeMap<RequestId, BTreeSet<RequestId>>,
}

impl CloseSets {
    pub fn of(&self, id: RequestId) -> impl Iterator<Item = RequestId> + '_ {
        self.neighbors.get(&id).into_iter().flatten().copied()
    }

    pub fn pair_count(&self) -> usize {
        self.neighbors.values().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Calls `f(i, j)` with `i < j` (by position) for every pair of requests whose
/// origins lie within `delta` of each other, bucketing origins on a grid so the
/// scan is near-linear for spread-out demand.
pub(crate) fn for_each_origin_neighbor_pair<F>(requests: &[Request], delta: f64, mut f: F)
where
    F: FnMut(usize, usize),
{
    let cell = delta.max(1.0);
    let key = |r: &Request| {
        (
            (r.origin.x / cell).floor() as i64,
            (r.origin.y / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, r) in requests.iter().enumerate() {
        grid.entry(key(r)).or_default().push(idx);
    }
    for (i, r) in requests.iter().enumerate() {
        let (cx, cy) = key(r);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &j in bucket {
                        if j > i {
                            f(i, j);
                        }
                    }
                }
            }
        }
    }
}

pub fn build_close_sets(requests: &[Request], p: &EconomicParams) -> CloseSets {
    let mut neighbors: BTreeMap<RequestId, BTreeSet<RequestId>> =
        requests.iter().map(|r| (r.id, BTreeSet::new())).collect();
    for_each_origin_neighbor_pair(requests, p.delta, |i, j| {
        let (a, b) = (&requests[i], &requests[j]);
        if a.id != b.id && is_close(a, b, p) {
            neighbors.entry(a.id).or_default().insert(b.id);
            neighbors.entry(b.id).or_default().insert(a.id);
        }
    });
    CloseSets { neighbors }
}

/// Close, and both members gain at least what they lose on the shared pair
/// ride.
pub fn is_stable_pair(i: &Request, j: &Request, p: &EconomicParams) -> bool {
    if i.id == j.id || !is_close(i, j, p) {
        return false;
    }
    match synthesize_trip(&[i, j], p) {
        Ok(plan) => plan.pricing.iter().all(|m| m.loss <= m.gain + COST_EPS),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMode {
    /// Every connected component of the stable-pair graph must be a clique.
    #[default]
    Strict,
    /// Non-clique components are split by greedy clique peeling.
    Greedy,
}

impl std::str::FromStr for GroupingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Self::Strict),
            "greedy" => Ok(Self::Greedy),
            other => Err(format!("unknown grouping mode `{other}` (expected strict or greedy)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupingError {
    #[error("stable-pair component is not a clique: {a}-{b} and {b}-{c} are stable but {a}-{c} is not")]
    NotAClique {
        a: RequestId,
        b: RequestId,
        c: RequestId,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StableGroups {
    /// Disjoint groups of two or more members, each sorted, ordered by first
    /// member.
    pub groups: Vec<Vec<RequestId>>,
    /// Requests that ended up in no multi-member group.
    pub leftover: BTreeSet<RequestId>,
}

impl StableGroups {
    /// Every group plus each leftover as a singleton, ordered by first member.
    /// These become the super nodes of the flow network.
    pub fn super_nodes(&self) -> Vec<Vec<RequestId>> {
        let mut all: Vec<Vec<RequestId>> = self
            .groups
            .iter()
            .cloned()
            .chain(self.leftover.iter().map(|id| vec![*id]))
            .collect();
        all.sort();
        all
    }

    pub fn passenger_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum::<usize>() + self.leftover.len()
    }
}

type Adjacency = BTreeMap<RequestId, BTreeSet<RequestId>>;

fn stable_pair_graph(requests: &[Request], p: &EconomicParams) -> Adjacency {
    let mut adj: Adjacency = requests.iter().map(|r| (r.id, BTreeSet::new())).collect();
    for_each_origin_neighbor_pair(requests, p.delta, |i, j| {
        let (a, b) = (&requests[i], &requests[j]);
        if is_stable_pair(a, b, p) {
            adj.entry(a.id).or_default().insert(b.id);
            adj.entry(b.id).or_default().insert(a.id);
        }
    });
    adj
}

fn components(adj: &Adjacency) -> Vec<Vec<RequestId>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adj[&u] {
                if seen.insert(v) {
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// First induced path `a-b-c` (with `a-c` missing) in id order, if any.
fn non_clique_witness(comp: &[RequestId], adj: &Adjacency) -> Option<(RequestId, RequestId, RequestId)> {
    for &b in comp {
        let nb: Vec<RequestId> = adj[&b].iter().copied().collect();
        for (x, &a) in nb.iter().enumerate() {
            for &c in &nb[x + 1..] {
                if !adj[&a].contains(&c) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Peels maximal cliques off a component: seed with the highest-degree vertex
/// (smallest id on ties), then grow by the same order among common
/// neighbors.
fn peel_cliques(comp: &[RequestId], adj: &Adjacency) -> Vec<Vec<RequestId>> {
    let mut remaining: BTreeSet<RequestId> = comp.iter().copied().collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let degree = |v: &RequestId| adj[v].iter().filter(|u| remaining.contains(u)).count();
        let by_degree = |a: &RequestId, b: &RequestId| degree(b).cmp(&degree(a)).then(a.cmp(b));
        let seed = *remaining.iter().min_by(|a, b| by_degree(a, b)).expect("non-empty");
        let mut candidates: Vec<RequestId> = adj[&seed]
            .iter()
            .filter(|u| remaining.contains(u))
            .copied()
            .collect();
        candidates.sort_by(by_degree);
        let mut clique = vec![seed];
        for c in candidates {
            if clique.iter().all(|m| adj[&c].contains(m)) {
                clique.push(c);
            }
        }
        for m in &clique {
            remaining.remove(m);
        }
        clique.sort();
        out.push(clique);
    }
    out
}

pub fn partition_stable_groups(
    requests: &[Request],
    p: &EconomicParams,
    mode: GroupingMode,
) -> Result<StableGroups, GroupingError> {
    let adj = stable_pair_graph(requests, p);
    let mut result = StableGroups::default();
    for comp in components(&adj) {
        let parts = match non_clique_witness(&comp, &adj) {
            None => vec![comp],
            Some((a, b, c)) => match mode {
                GroupingMode::Strict => return Err(GroupingError::NotAClique { a, b, c }),
                GroupingMode::Greedy => peel_cliques(&comp, &adj),
            },
        };
        for part in parts {
            if part.len() == 1 {
                result.leftover.insert(part[0]);
            } else {
                result.groups.push(part);
            }
        }
    }
    result.groups.sort();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_util::req;

    fn params() -> EconomicParams {
        EconomicParams {
            delta: 300.0,
            t_window: 120.0,
            ..Default::default()
        }
    }

    #[test]
    fn single_request_has_no_neighbors() {
        let rs = vec![req(1, (0.0, 0.0), (2000.0, 0.0), 0.0)];
        let cs = build_close_sets(&rs, &params());
        assert!(cs.neighbors[&RequestId(1)].is_empty());
    }

    #[test]
    fn identical_itineraries_are_mutual_neighbors() {
        let rs = vec![
            req(1, (0.0, 0.0), (2000.0, 0.0), 0.0),
            req(2, (0.0, 0.0), (2000.0, 0.0), 0.0),
        ];
        let cs = build_close_sets(&rs, &params());
        assert!(cs.neighbors[&RequestId(1)].contains(&RequestId(2)));
        assert!(cs.neighbors[&RequestId(2)].contains(&RequestId(1)));
        assert_eq!(cs.pair_count(), 1);
    }

    #[test]
    fn close_sets_match_pairwise_scan() {
        let rs: Vec<Request> = [
            (0.0, 0.0, 2000.0, 0.0, 0.0),
            (150.0, 100.0, 2100.0, 50.0, 30.0),
            (290.0, 0.0, 1900.0, 0.0, 100.0),
            (-310.0, 0.0, 2000.0, 0.0, 0.0),
            (20.0, -20.0, 2000.0, 280.0, 200.0),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(ox, oy, dx, dy, t))| req(i as u32 + 1, (ox, oy), (dx, dy), t))
        .collect();
        let p = params();
        let cs = build_close_sets(&rs, &p);
        for a in &rs {
            for b in &rs {
                let expect = a.id != b.id && is_close(a, b, &p);
                assert_eq!(cs.neighbors[&a.id].contains(&b.id), expect, "{} {}", a.id, b.id);
            }
        }
    }

    #[test]
    fn stable_pair_cases() {
        let p = params();
        let a = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        assert!(is_stable_pair(&a, &a.clone_with_id(2), &p));

        let b = req(2, (200.0, 0.0), (3000.0, 0.0), 0.0);
        let costly = EconomicParams {
            walk_cost: 10.0,
            ..p.clone()
        };
        assert!(!is_stable_pair(&a, &b, &costly));
    }

    #[test]
    fn stable_pair_boundary_is_inclusive() {
        // Both members walk 8 m to the midpoint; with dyadic coefficients the
        // loss equals the gain exactly.
        let base = EconomicParams {
            wait_cost: 0.0,
            fare_base: 2.0,
            fare_rate: 0.0,
            discount_per_corider: 0.25,
            ..params()
        };
        // gain = 0.25 * 2.0 = 0.5, loss = 8 * 0.0625 = 0.5
        let p = EconomicParams {
            walk_cost: 0.0625,
            ..base
        };
        let a = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let b = req(2, (16.0, 0.0), (3000.0, 0.0), 0.0);
        let plan = synthesize_trip(&[&a, &b], &p).unwrap();
        assert_eq!(plan.pricing[0].loss, plan.pricing[0].gain);
        assert!(is_stable_pair(&a, &b, &p));
    }

    #[test]
    fn empty_input_gives_no_groups() {
        let g = partition_stable_groups(&[], &params(), GroupingMode::Strict).unwrap();
        assert!(g.groups.is_empty() && g.leftover.is_empty());
    }

    #[test]
    fn four_mutually_stable_requests_form_one_group() {
        let rs: Vec<Request> = (0..4)
            .map(|i| req(i, (10.0 * i as f64, 0.0), (3000.0, 0.0), 0.0))
            .collect();
        let g = partition_stable_groups(&rs, &params(), GroupingMode::Strict).unwrap();
        assert_eq!(g.groups, vec![(0..4).map(RequestId).collect::<Vec<_>>()]);
        assert!(g.leftover.is_empty());
    }

    fn path_instance() -> Vec<Request> {
        // 1-2 and 2-3 close (250 m), 1-3 too far apart (500 m > 300)
        vec![
            req(1, (0.0, 0.0), (3000.0, 0.0), 0.0),
            req(2, (250.0, 0.0), (3000.0, 0.0), 0.0),
            req(3, (500.0, 0.0), (3000.0, 0.0), 0.0),
        ]
    }

    #[test]
    fn path_strict_errors_with_triple() {
        let err = partition_stable_groups(&path_instance(), &params(), GroupingMode::Strict).unwrap_err();
        assert_eq!(
            err,
            GroupingError::NotAClique {
                a: RequestId(1),
                b: RequestId(2),
                c: RequestId(3)
            }
        );
    }

    #[test]
    fn path_greedy_peels_first_pair() {
        // the only clique partitions of a 3-path are {1,2}{3} and {1}{2,3};
        // largest group first with id tie-break picks {1,2}{3}
        let g = partition_stable_groups(&path_instance(), &params(), GroupingMode::Greedy).unwrap();
        assert_eq!(g.groups, vec![vec![RequestId(1), RequestId(2)]]);
        assert_eq!(g.leftover, [RequestId(3)].into_iter().collect());
        assert_eq!(
            g.super_nodes(),
            vec![vec![RequestId(1), RequestId(2)], vec![RequestId(3)]]
        );
    }

    trait CloneWithId {
        fn clone_with_id(&self, id: u32) -> Request;
    }

    impl CloneWithId for Request {
        fn clone_with_id(&self, id: u32) -> Request {
            Request {
                id: RequestId(id),
                ..self.clone()
            }
        }
    }
}
