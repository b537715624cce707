//! Vehicle-trip graph: every trip of up to four riders that the riders accept
//! and some driver is willing to take, grown layer by layer so that every
//! sub-trip of an admitted trip is admitted too.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::grouping::for_each_origin_neighbor_pair;
use crate::model::{
    driver_economics, is_close, members_accept, DriverQuote, EconomicParams, Instance, Request, RequestId, TripPlan,
    Vehicle, VehicleId, VEHICLE_CAPACITY,
};

/// Largest trip size.
pub const MAX_TRIP_SIZE: usize = VEHICLE_CAPACITY;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ShareabilityGraph {
    /// `(a, b)` with `a < b`.
    pub rr_edges: BTreeSet<(RequestId, RequestId)>,
    pub vr_edges: BTreeSet<(VehicleId, RequestId)>,
}

impl ShareabilityGraph {
    pub fn shareable(&self, a: RequestId, b: RequestId) -> bool {
        self.rr_edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Request pairs that are close and accept riding together, plus the
/// vehicles willing to carry each request alone.
pub fn build_shareability_graph(instance: &Instance, p: &EconomicParams) -> ShareabilityGraph {
    let mut g = ShareabilityGraph::default();
    let reqs = &instance.requests;
    for_each_origin_neighbor_pair(reqs, p.delta, |i, j| {
        let (a, b) = (&reqs[i], &reqs[j]);
        if !is_close(a, b, p) {
            return;
        }
        let key = (a.id.min(b.id), a.id.max(b.id));
        if let Ok(plan) = instance.trip(&[key.0, key.1], p) {
            if plan.passenger_feasible(p) {
                g.rr_edges.insert(key);
            }
        }
    });
    for r in reqs {
        let Ok(plan) = instance.trip(&[r.id], p) else {
            continue;
        };
        for v in &instance.vehicles {
            if driver_economics(v, &plan, p).willing {
                g.vr_edges.insert((v.id, r.id));
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VtgTrip {
    pub members: Vec<RequestId>,
    pub plan: TripPlan,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VtGraph {
    /// Sorted by size, then member ids.
    trips: Vec<VtgTrip>,
    request_edges: BTreeMap<RequestId, Vec<usize>>,
    vehicle_edges: BTreeMap<VehicleId, Vec<usize>>,
}

impl VtGraph {
    fn from_trips(mut trips: Vec<VtgTrip>) -> Self {
        trips.sort_by(|a, b| (a.members.len(), &a.members).cmp(&(b.members.len(), &b.members)));
        let mut request_edges: BTreeMap<RequestId, Vec<usize>> = BTreeMap::new();
        for (t, trip) in trips.iter().enumerate() {
            for &m in &trip.members {
                request_edges.entry(m).or_default().push(t);
            }
        }
        Self {
            trips,
            request_edges,
            vehicle_edges: BTreeMap::new(),
        }
    }

    pub fn trips(&self) -> &[VtgTrip] {
        &self.trips
    }

    pub fn trip(&self, idx: usize) -> &VtgTrip {
        &self.trips[idx]
    }

    pub fn len(&self) -> usize {
        self.trips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trips.is_empty()
    }

    /// Trips with exactly `size` members.
    pub fn layer(&self, size: usize) -> &[VtgTrip] {
        let lo = self.trips.partition_point(|t| t.members.len() < size);
        let hi = self.trips.partition_point(|t| t.members.len() <= size);
        &self.trips[lo..hi]
    }

    /// Indices of the trips containing `request`.
    pub fn trips_of_request(&self, request: RequestId) -> &[usize] {
        self.request_edges.get(&request).map_or(&[], Vec::as_slice)
    }

    /// Indices of the trips `vehicle` is willing to take.
    pub fn trips_of_vehicle(&self, vehicle: VehicleId) -> &[usize] {
        self.vehicle_edges.get(&vehicle).map_or(&[], Vec::as_slice)
    }

    pub fn vehicle_edges(&self) -> &BTreeMap<VehicleId, Vec<usize>> {
        &self.vehicle_edges
    }

    pub fn edge_count(&self) -> usize {
        self.vehicle_edges.values().map(Vec::len).sum()
    }

    pub fn find(&self, members: &[RequestId]) -> Option<usize> {
        self.trips
            .binary_search_by(|t| (t.members.len(), t.members.as_slice()).cmp(&(members.len(), members)))
            .ok()
    }

    pub fn member_sets(&self) -> BTreeSet<Vec<RequestId>> {
        self.trips.iter().map(|t| t.members.clone()).collect()
    }

    /// First trip with a missing sub-trip, if any.
    pub fn closure_violation(&self) -> Option<&[RequestId]> {
        let sets: HashSet<&[RequestId]> = self.trips.iter().map(|t| t.members.as_slice()).collect();
        self.trips
            .iter()
            .find(|t| {
                t.members.len() > 1
                    && (0..t.members.len()).any(|skip| !sets.contains(drop_one(&t.members, skip).as_slice()))
            })
            .map(|t| t.members.as_slice())
    }
}

fn drop_one(members: &[RequestId], skip: usize) -> Vec<RequestId> {
    members
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &m)| m)
        .collect()
}

fn any_willing(plan: &TripPlan, vehicles: &[Vehicle], p: &EconomicParams) -> bool {
    vehicles.iter().any(|v| driver_economics(v, plan, p).willing)
}

/// Grows trip layers of size 1 to 4. A trip of size `j >= 3` is formed by
/// joining two admitted `(j-1)`-trips that share their first `j-2` members and
/// is admitted when all of its `(j-1)`-subsets are admitted, the riders accept
/// it, and some vehicle is willing to take it.
pub fn generate_trip_layers(g: &ShareabilityGraph, instance: &Instance, p: &EconomicParams) -> VtGraph {
    let vehicles = &instance.vehicles;
    let mut layer: Vec<VtgTrip> = Vec::new();
    let solo: BTreeSet<RequestId> = g.vr_edges.iter().map(|&(_, r)| r).collect();
    for &r in &solo {
        if let Ok(plan) = instance.trip(&[r], p) {
            if plan.passenger_feasible(p) {
                layer.push(VtgTrip { members: vec![r], plan });
            }
        }
    }
    let singles: BTreeSet<RequestId> = layer.iter().map(|t| t.members[0]).collect();
    let mut all = layer;

    let mut prev: Vec<Vec<RequestId>> = Vec::new();
    for &(a, b) in &g.rr_edges {
        if !singles.contains(&a) || !singles.contains(&b) {
            continue;
        }
        if let Ok(plan) = instance.trip(&[a, b], p) {
            if plan.passenger_feasible(p) && any_willing(&plan, vehicles, p) {
                prev.push(vec![a, b]);
                all.push(VtgTrip { members: vec![a, b], plan });
            }
        }
    }

    for _size in 3..=MAX_TRIP_SIZE {
        let known: HashSet<&[RequestId]> = prev.iter().map(Vec::as_slice).collect();
        let mut next = Vec::new();
        for (i, x) in prev.iter().enumerate() {
            let stem = &x[..x.len() - 1];
            for y in prev[i + 1..].iter().take_while(|y| &y[..y.len() - 1] == stem) {
                let mut cand = x.clone();
                cand.push(*y.last().unwrap());
                let closed = (0..cand.len() - 2).all(|skip| known.contains(drop_one(&cand, skip).as_slice()));
                if !closed {
                    continue;
                }
                let Ok(plan) = instance.trip(&cand, p) else {
                    continue;
                };
                if plan.passenger_feasible(p) && any_willing(&plan, vehicles, p) {
                    all.push(VtgTrip { members: cand.clone(), plan });
                    next.push(cand);
                }
            }
        }
        prev = next;
    }
    VtGraph::from_trips(all)
}

/// Connects every vehicle to the trips it is willing to take. Trips no
/// vehicle will take are dropped, and so is every trip that loses a sub-trip
/// that way. Running it twice changes nothing.
pub fn attach_vehicle_edges(vtg: &mut VtGraph, vehicles: &[Vehicle], p: &EconomicParams) {
    let mut keep: Vec<bool> = vtg
        .trips
        .iter()
        .map(|t| any_willing(&t.plan, vehicles, p))
        .collect();
    // Sizes ascend, so one forward pass settles the cascade.
    let mut kept: HashSet<Vec<RequestId>> = HashSet::new();
    for (idx, t) in vtg.trips.iter().enumerate() {
        if keep[idx] && t.members.len() > 1 {
            keep[idx] = (0..t.members.len()).all(|skip| kept.contains(&drop_one(&t.members, skip)));
        }
        if keep[idx] {
            kept.insert(t.members.clone());
        }
    }
    let trips: Vec<VtgTrip> = std::mem::take(&mut vtg.trips)
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect();
    *vtg = VtGraph::from_trips(trips);
    for v in vehicles {
        let edges: Vec<usize> = vtg
            .trips
            .iter()
            .enumerate()
            .filter(|(_, t)| driver_economics(v, &t.plan, p).willing)
            .map(|(i, _)| i)
            .collect();
        if !edges.is_empty() {
            vtg.vehicle_edges.insert(v.id, edges);
        }
    }
}

/// Shareability graph, trip layers and vehicle edges in one call.
pub fn build_vtg(instance: &Instance, p: &EconomicParams) -> VtGraph {
    let g = build_shareability_graph(instance, p);
    let mut vtg = generate_trip_layers(&g, instance, p);
    attach_vehicle_edges(&mut vtg, &instance.vehicles, p);
    vtg
}

/// Would `members` appear in the vehicle-trip graph of `instance`? Checks
/// every non-empty subset directly: pairs must be close, every subset must be
/// accepted by its riders, and some vehicle must be willing to take it.
/// `hint` is tried before scanning the fleet.
pub fn is_admissible_trip(
    members: &[RequestId],
    instance: &Instance,
    p: &EconomicParams,
    hint: Option<&Vehicle>,
) -> bool {
    let n = members.len();
    if n == 0 || n > MAX_TRIP_SIZE || members.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    let Some(first) = instance.request(members[0]) else {
        return false;
    };
    let mut buf: [&Request; MAX_TRIP_SIZE] = [first; MAX_TRIP_SIZE];
    for (slot, &id) in buf.iter_mut().zip(members) {
        match instance.request(id) {
            Some(r) => *slot = r,
            None => return false,
        }
    }
    let reqs = &buf[..n];
    for i in 0..n {
        for j in i + 1..n {
            if !is_close(reqs[i], reqs[j], p) {
                return false;
            }
        }
    }
    (1u32..1 << n).all(|mask| {
        let mut buf: [&Request; MAX_TRIP_SIZE] = [reqs[0]; MAX_TRIP_SIZE];
        let mut k = 0;
        for (b, r) in reqs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                buf[k] = r;
                k += 1;
            }
        }
        let subset = &buf[..k];
        if !members_accept(subset, p) {
            return false;
        }
        let quote = DriverQuote::for_members(subset, p).expect("non-empty");
        hint.is_some_and(|v| quote.assess(v, p).willing) || instance.vehicles.iter().any(|v| quote.assess(v, p).willing)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_util::{req, veh};

    fn params() -> EconomicParams {
        EconomicParams::default()
    }

    #[test]
    fn lone_request_and_vehicle() {
        let inst = Instance::new(vec![req(1, (0.0, 0.0), (3000.0, 0.0), 0.0)], vec![veh(1, (100.0, 0.0))]).unwrap();
        let g = build_shareability_graph(&inst, &params());
        assert!(g.rr_edges.is_empty());
        assert_eq!(g.vr_edges.len(), 1);
    }

    #[test]
    fn identical_requests_share() {
        let inst = Instance::new(
            vec![
                req(1, (0.0, 0.0), (3000.0, 0.0), 0.0),
                req(2, (0.0, 0.0), (3000.0, 0.0), 0.0),
            ],
            vec![],
        )
        .unwrap();
        let g = build_shareability_graph(&inst, &params());
        assert_eq!(g.rr_edges.len(), 1);
        assert!(g.shareable(RequestId(2), RequestId(1)));
    }

    fn triangle() -> Instance {
        Instance::new(
            vec![
                req(1, (0.0, 0.0), (3000.0, 0.0), 0.0),
                req(2, (50.0, 0.0), (3050.0, 0.0), 10.0),
                req(3, (0.0, 50.0), (3000.0, 50.0), 20.0),
            ],
            vec![veh(1, (0.0, 100.0))],
        )
        .unwrap()
    }

    #[test]
    fn triangle_grows_a_triple() {
        let vtg = build_vtg(&triangle(), &params());
        assert_eq!(vtg.layer(1).len(), 3);
        assert_eq!(vtg.layer(2).len(), 3);
        assert_eq!(vtg.layer(3).len(), 1);
        assert_eq!(vtg.layer(3)[0].members, vec![RequestId(1), RequestId(2), RequestId(3)]);
        assert!(vtg.closure_violation().is_none());
        assert_eq!(vtg.trips_of_vehicle(VehicleId(1)).len(), 7);
        assert_eq!(vtg.trips_of_request(RequestId(1)).len(), 4);
    }

    #[test]
    fn no_pairs_means_singletons_only() {
        let inst = Instance::new(
            vec![
                req(1, (0.0, 0.0), (3000.0, 0.0), 0.0),
                req(2, (2000.0, 0.0), (0.0, 3000.0), 0.0),
            ],
            vec![veh(1, (1000.0, 0.0))],
        )
        .unwrap();
        let vtg = build_vtg(&inst, &params());
        assert_eq!(vtg.len(), 2);
        assert!(vtg.layer(2).is_empty());
    }

    #[test]
    fn far_vehicle_gets_no_edges() {
        let mut inst = triangle();
        inst.vehicles.push(veh(2, (90_000.0, 0.0)));
        let vtg = build_vtg(&inst, &params());
        assert!(vtg.trips_of_vehicle(VehicleId(2)).is_empty());
        assert_eq!(vtg.trips_of_vehicle(VehicleId(1)).len(), vtg.len());
    }

    #[test]
    fn attach_prunes_unserved_trips_and_is_idempotent() {
        let inst = triangle();
        let p = params();
        let g = build_shareability_graph(&inst, &p);
        let mut vtg = generate_trip_layers(&g, &inst, &p);
        assert_eq!(vtg.len(), 7);
        attach_vehicle_edges(&mut vtg, &[veh(9, (90_000.0, 0.0))], &p);
        assert!(vtg.is_empty());

        let mut vtg = generate_trip_layers(&g, &inst, &p);
        attach_vehicle_edges(&mut vtg, &inst.vehicles, &p);
        let once = vtg.clone();
        attach_vehicle_edges(&mut vtg, &inst.vehicles, &p);
        assert_eq!(once, vtg);
    }

    #[test]
    fn admissibility_matches_graph_membership() {
        let inst = triangle();
        let p = params();
        let vtg = build_vtg(&inst, &p);
        for t in vtg.trips() {
            assert!(is_admissible_trip(&t.members, &inst, &p, None));
        }
        assert!(!is_admissible_trip(&[], &inst, &p, None));
        assert!(!is_admissible_trip(&[RequestId(2), RequestId(1)], &inst, &p, None));
        assert!(!is_admissible_trip(&[RequestId(7)], &inst, &p, None));
    }

    #[test]
    fn find_locates_trips() {
        let vtg = build_vtg(&triangle(), &params());
        let idx = vtg.find(&[RequestId(1), RequestId(3)]).unwrap();
        assert_eq!(vtg.trip(idx).members, vec![RequestId(1), RequestId(3)]);
        assert!(vtg.find(&[RequestId(4)]).is_none());
    }
}
