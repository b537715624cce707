//! Slow, independent solvers for checking the fast ones.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flownet::FlowNetwork;
use crate::model::{driver_economics, is_close, match_weight, EconomicParams, Instance, RequestId};
use crate::vtg::VtGraph;

pub const MAX_ORACLE_REQUESTS: usize = 12;
pub const MAX_ORACLE_VEHICLES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for enumeration: {requests} requests, {vehicles} vehicles (limits {MAX_ORACLE_REQUESTS}, {MAX_ORACLE_VEHICLES})")]
    TooLarge { requests: usize, vehicles: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_served: usize,
    /// Largest weight among assignments serving `best_served`.
    pub best_weight: f64,
    /// Number of assignments serving `best_served`.
    pub optimal_assignments: u64,
    pub elapsed: f64,
}

pub fn within_guard(instance: &Instance) -> bool {
    instance.requests.len() <= MAX_ORACLE_REQUESTS && instance.vehicles.len() <= MAX_ORACLE_VEHICLES
}

/// Tries every way to give each vehicle nothing or one trip of `vtg` it is
/// willing to take, with no rider in two trips.
pub fn brute_force_optimal(
    vtg: &VtGraph,
    instance: &Instance,
    p: &EconomicParams,
) -> Result<OracleResult, OracleError> {
    if !within_guard(instance) {
        return Err(OracleError::TooLarge {
            requests: instance.requests.len(),
            vehicles: instance.vehicles.len(),
        });
    }
    let start = Instant::now();
    let bit = |id: RequestId| {
        1u32 << instance
            .requests
            .iter()
            .position(|r| r.id == id)
            .expect("trip members come from the instance")
    };
    // Per vehicle: (rider mask, size, weight) of each trip it would take.
    let options: Vec<Vec<(u32, usize, f64)>> = instance
        .vehicles
        .iter()
        .map(|v| {
            vtg.trips()
                .iter()
                .filter(|t| driver_economics(v, &t.plan, p).willing)
                .map(|t| {
                    let mask = t.members.iter().fold(0, |m, &id| m | bit(id));
                    (mask, t.members.len(), match_weight(v, &t.plan, p))
                })
                .collect()
        })
        .collect();

    let mut best = (0usize, f64::NEG_INFINITY, 0u64);
    enumerate(&options, 0, 0, 0, 0.0, &mut best);
    Ok(OracleResult {
        best_served: best.0,
        best_weight: best.1,
        optimal_assignments: best.2,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

fn enumerate(
    options: &[Vec<(u32, usize, f64)>],
    k: usize,
    used: u32,
    served: usize,
    weight: f64,
    best: &mut (usize, f64, u64),
) {
    if k == options.len() {
        if served > best.0 {
            *best = (served, weight, 1);
        } else if served == best.0 {
            best.1 = best.1.max(weight);
            best.2 += 1;
        }
        return;
    }
    enumerate(options, k + 1, used, served, weight, best);
    for &(mask, size, w) in &options[k] {
        if mask & used == 0 {
            enumerate(options, k + 1, used | mask, served + size, weight + w, best);
        }
    }
}

/// Every rider set of size 1 to 4 that belongs in the vehicle-trip graph:
/// all pairs close, and every non-empty subset accepted by its riders and
/// wanted by at least one vehicle.
pub fn exhaustive_trip_sets(
    instance: &Instance,
    p: &EconomicParams,
) -> Result<BTreeSet<Vec<RequestId>>, OracleError> {
    let n = instance.requests.len();
    if n > MAX_ORACLE_REQUESTS {
        return Err(OracleError::TooLarge {
            requests: n,
            vehicles: instance.vehicles.len(),
        });
    }
    let ids: Vec<RequestId> = instance.requests.iter().map(|r| r.id).collect();
    let members_of = |mask: u32| -> Vec<RequestId> { (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ids[b]).collect() };

    // Subsets that are themselves acceptable, ignoring their own subsets.
    let mut ok = vec![false; 1 << n];
    for mask in 1u32..1 << n {
        let size = mask.count_ones() as usize;
        if size > 4 {
            continue;
        }
        let members = members_of(mask);
        let reqs: Vec<_> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| &instance.requests[b]).collect();
        let close = reqs
            .iter()
            .enumerate()
            .all(|(i, a)| reqs[i + 1..].iter().all(|b| is_close(a, b, p)));
        if !close {
            continue;
        }
        let Ok(plan) = instance.trip(&members, p) else {
            continue;
        };
        ok[mask as usize] = plan.passenger_feasible(p)
            && instance.vehicles.iter().any(|v| driver_economics(v, &plan, p).willing);
    }

    let mut out = BTreeSet::new();
    for mask in 1u32..1 << n {
        if mask.count_ones() > 4 {
            continue;
        }
        // all non-empty submasks
        let mut sub = mask;
        let mut all = true;
        while sub > 0 {
            if !ok[sub as usize] {
                all = false;
                break;
            }
            sub = (sub - 1) & mask;
        }
        if all {
            out.insert(members_of(mask));
        }
    }
    Ok(out)
}

/// Maximum flow of `net` from scratch (current flows ignored), by
/// shortest augmenting paths on a dense residual matrix.
pub fn reference_max_flow(net: &FlowNetwork) -> u64 {
    let n = net.node_count();
    let mut cap = vec![vec![0i64; n]; n];
    for e in net.edges() {
        cap[e.from][e.to] += e.cap as i64;
    }
    let (s, t) = (net.source(), net.sink());
    let mut total = 0u64;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = i64::MAX;
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        total += push as u64;
    }
}
