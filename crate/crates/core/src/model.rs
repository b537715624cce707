//! Domain types and the economic functions every solver consults for
//! feasibility.
//!
//! All geometry is planar (meters) under the L1 norm. Times are seconds since
//! the Unix epoch stored as `f64`. The economic "functions" of the ride-pooling
//! model are realized as linear forms whose coefficients live in
//! [`EconomicParams`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seats per vehicle. Also the largest trip the engine will ever form.
pub const VEHICLE_CAPACITY: usize = 4;

/// Slack used when comparing money or distances computed along different
/// floating-point paths.
pub const COST_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("request {id}: latest arrival {latest_arrival} precedes departure {depart_time}")]
    ArrivalBeforeDeparture {
        id: RequestId,
        depart_time: f64,
        latest_arrival: f64,
    },
    #[error("request {0}: origin equals destination")]
    ZeroLengthRequest(RequestId),
    #[error("non-finite coordinate or time in {0}")]
    NonFinite(String),
    #[error("a trip needs at least one member")]
    EmptyTrip,
    #[error("trip of {0} members exceeds vehicle capacity {VEHICLE_CAPACITY}")]
    OversizeTrip(usize),
    #[error("trip lists request {0} twice")]
    DuplicateMember(RequestId),
    #[error("unknown request {0}")]
    UnknownRequest(RequestId),
    #[error("unknown vehicle {0}")]
    UnknownVehicle(VehicleId),
    #[error("duplicate request id {0}")]
    DuplicateRequest(RequestId),
    #[error("duplicate vehicle id {0}")]
    DuplicateVehicle(VehicleId),
    #[error("invalid economic parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleId(pub u32);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.0)
    }
}

/// A point in a local planar frame: `x` meters east, `y` meters north.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeoPoint {
    pub x: f64,
    pub y: f64,
}

impl GeoPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Arithmetic mean of a non-empty set of points.
    pub fn centroid<'a, I>(points: I) -> Option<GeoPoint>
    where
        I: IntoIterator<Item = &'a GeoPoint>,
    {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for p in points {
            sx += p.x;
            sy += p.y;
            n += 1;
        }
        (n > 0).then(|| GeoPoint::new(sx / n as f64, sy / n as f64))
    }
}

/// L1 distance in meters.
pub fn manhattan_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

/// One passenger's ride request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    pub origin: GeoPoint,
    pub destination: GeoPoint,
    /// Expected departure, seconds since epoch.
    pub depart_time: f64,
    /// Latest acceptable arrival, seconds since epoch.
    pub latest_arrival: f64,
}

impl Request {
    pub fn new(
        id: RequestId,
        origin: GeoPoint,
        destination: GeoPoint,
        depart_time: f64,
        latest_arrival: f64,
    ) -> Result<Self, ModelError> {
        let r = Self {
            id,
            origin,
            destination,
            depart_time,
            latest_arrival,
        };
        r.check()?;
        Ok(r)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !self.origin.is_finite()
            || !self.destination.is_finite()
            || !self.depart_time.is_finite()
            || !self.latest_arrival.is_finite()
        {
            return Err(ModelError::NonFinite(self.id.to_string()));
        }
        if self.latest_arrival < self.depart_time {
            return Err(ModelError::ArrivalBeforeDeparture {
                id: self.id,
                depart_time: self.depart_time,
                latest_arrival: self.latest_arrival,
            });
        }
        if self.origin == self.destination {
            return Err(ModelError::ZeroLengthRequest(self.id));
        }
        Ok(())
    }

    pub fn trip_length(&self) -> f64 {
        manhattan_distance(self.origin, self.destination)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: VehicleId,
    pub location: GeoPoint,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
}

fn default_capacity() -> usize {
    VEHICLE_CAPACITY
}

impl Vehicle {
    pub fn new(id: VehicleId, location: GeoPoint) -> Self {
        Self {
            id,
            location,
            capacity: VEHICLE_CAPACITY,
        }
    }
}

/// Thresholds and coefficients of the economic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EconomicParams {
    /// Distance threshold of the closeness test, meters.
    pub delta: f64,
    /// Departure-time threshold of the closeness test, seconds.
    pub t_window: f64,
    /// Acceptable loss per passenger, currency.
    pub zeta: f64,
    /// Longest empty drive a driver accepts to reach a meeting point, meters.
    pub xi: f64,
    /// Average driving speed, meters per second.
    pub v_bar: f64,
    pub fare_base: f64,
    /// Currency per meter of fare, also used to price empty driving.
    pub fare_rate: f64,
    /// Currency per meter walked to the meeting point and from the drop point.
    pub walk_cost: f64,
    /// Currency per second of departure shift.
    pub wait_cost: f64,
    /// Discount fraction granted per co-rider.
    pub discount_per_corider: f64,
    pub discount_cap: f64,
}

impl Default for EconomicParams {
    fn default() -> Self {
        Self {
            delta: 400.0,
            t_window: 300.0,
            zeta: 3.0,
            xi: 1500.0,
            v_bar: 8.0,
            fare_base: 2.5,
            fare_rate: 0.0015,
            walk_cost: 0.001,
            wait_cost: 0.002,
            discount_per_corider: 0.15,
            discount_cap: 0.45,
        }
    }
}

impl EconomicParams {
    pub fn check(&self) -> Result<(), ModelError> {
        let named = [
            ("delta", self.delta),
            ("t_window", self.t_window),
            ("zeta", self.zeta),
            ("xi", self.xi),
            ("v_bar", self.v_bar),
            ("fare_base", self.fare_base),
            ("fare_rate", self.fare_rate),
            ("walk_cost", self.walk_cost),
            ("wait_cost", self.wait_cost),
            ("discount_per_corider", self.discount_per_corider),
            ("discount_cap", self.discount_cap),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidParams(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.v_bar <= 0.0 {
            return Err(ModelError::InvalidParams("v_bar must be positive".into()));
        }
        if self.discount_cap >= 1.0 {
            return Err(ModelError::InvalidParams(
                "discount_cap must be below 1".into(),
            ));
        }
        Ok(())
    }
}

/// Economics of one member inside a trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberPricing {
    pub request: RequestId,
    pub fare: f64,
    pub loss: f64,
    pub discount: f64,
    pub gain: f64,
    pub pay: f64,
}

/// A candidate group ride.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripPlan {
    /// Sorted, distinct.
    pub members: Vec<RequestId>,
    pub meet_point: GeoPoint,
    pub drop_point: GeoPoint,
    pub depart: f64,
    pub arrive: f64,
    /// Same order as `members`.
    pub pricing: Vec<MemberPricing>,
    /// Revenue the driver needs to accept the trip.
    pub reserve: f64,
}

impl TripPlan {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn revenue(&self) -> f64 {
        self.pricing.iter().map(|m| m.pay).sum()
    }

    /// Every member gains at least what they lose, and nobody loses more than
    /// the tolerance.
    pub fn passenger_feasible(&self, p: &EconomicParams) -> bool {
        self.pricing.iter().all(|m| accepts(m, p))
    }

    pub fn route_length(&self) -> f64 {
        manhattan_distance(self.meet_point, self.drop_point)
    }
}

/// Fare a passenger would pay riding alone.
pub fn fare(request: &Request, p: &EconomicParams) -> f64 {
    p.fare_base + p.fare_rate * request.trip_length()
}

fn discount_for(size: usize, p: &EconomicParams) -> f64 {
    (p.discount_per_corider * size.saturating_sub(1) as f64).min(p.discount_cap)
}

fn price_member(request: &Request, plan: &TripPlan, p: &EconomicParams) -> MemberPricing {
    member_terms(request, plan.meet_point, plan.drop_point, plan.depart, plan.members.len(), p)
}

fn member_terms(
    request: &Request,
    meet: GeoPoint,
    drop: GeoPoint,
    depart: f64,
    size: usize,
    p: &EconomicParams,
) -> MemberPricing {
    let walk = manhattan_distance(request.origin, meet) + manhattan_distance(request.destination, drop);
    let shift = (request.depart_time - depart).abs();
    let loss = p.walk_cost * walk + p.wait_cost * shift;
    let discount = discount_for(size, p);
    let fare = fare(request, p);
    MemberPricing {
        request: request.id,
        fare,
        loss,
        discount,
        gain: discount * fare,
        pay: (1.0 - discount) * fare,
    }
}

fn accepts(m: &MemberPricing, p: &EconomicParams) -> bool {
    m.loss <= m.gain + COST_EPS && m.loss <= p.zeta + COST_EPS
}

/// Same answer as synthesizing the trip for `members` and asking
/// [`TripPlan::passenger_feasible`], without allocating.
pub fn members_accept(members: &[&Request], p: &EconomicParams) -> bool {
    let (Some(meet), Some(drop)) = (
        GeoPoint::centroid(members.iter().map(|r| &r.origin)),
        GeoPoint::centroid(members.iter().map(|r| &r.destination)),
    ) else {
        return false;
    };
    let depart = members.iter().map(|r| r.depart_time).fold(f64::NEG_INFINITY, f64::max);
    members
        .iter()
        .all(|r| accepts(&member_terms(r, meet, drop, depart, members.len(), p), p))
}

/// Prices every member of a trip whose geometry is already set.
pub fn price_trip(
    plan: &TripPlan,
    requests: &BTreeMap<RequestId, Request>,
    p: &EconomicParams,
) -> Result<Vec<MemberPricing>, ModelError> {
    plan.members
        .iter()
        .map(|id| {
            requests
                .get(id)
                .map(|r| price_member(r, plan, p))
                .ok_or(ModelError::UnknownRequest(*id))
        })
        .collect()
}

/// Revenue the driver needs for the pooled route: the solo fare for it.
pub fn trip_reserve(plan: &TripPlan, p: &EconomicParams) -> f64 {
    p.fare_base + p.fare_rate * plan.route_length()
}

/// Builds the shared ride for `members`: everyone meets at the centroid of the
/// origins, rides to the centroid of the destinations, and leaves once the
/// last member is ready.
pub fn synthesize_trip(members: &[&Request], p: &EconomicParams) -> Result<TripPlan, ModelError> {
    if members.is_empty() {
        return Err(ModelError::EmptyTrip);
    }
    if members.len() > VEHICLE_CAPACITY {
        return Err(ModelError::OversizeTrip(members.len()));
    }
    let mut sorted: Vec<&Request> = members.to_vec();
    sorted.sort_by_key(|r| r.id);
    if let Some(w) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(ModelError::DuplicateMember(w[0].id));
    }

    let meet_point = GeoPoint::centroid(sorted.iter().map(|r| &r.origin)).expect("non-empty");
    let drop_point = GeoPoint::centroid(sorted.iter().map(|r| &r.destination)).expect("non-empty");
    let depart = sorted
        .iter()
        .map(|r| r.depart_time)
        .fold(f64::NEG_INFINITY, f64::max);
    let arrive = depart + manhattan_distance(meet_point, drop_point) / p.v_bar;

    let mut plan = TripPlan {
        members: sorted.iter().map(|r| r.id).collect(),
        meet_point,
        drop_point,
        depart,
        arrive,
        pricing: Vec::with_capacity(sorted.len()),
        reserve: 0.0,
    };
    plan.pricing = sorted.iter().map(|r| price_member(r, &plan, p)).collect();
    plan.reserve = trip_reserve(&plan, p);
    Ok(plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverEconomics {
    pub pickup_dist: f64,
    pub reserve: f64,
    pub revenue: f64,
    pub willing: bool,
}

/// What a driver needs to know about a trip: where it starts, how many seats
/// it takes, what it pays and what the driver asks for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverQuote {
    pub meet_point: GeoPoint,
    pub size: usize,
    pub revenue: f64,
    pub reserve: f64,
}

impl DriverQuote {
    pub fn of(plan: &TripPlan, p: &EconomicParams) -> Self {
        Self {
            meet_point: plan.meet_point,
            size: plan.size(),
            revenue: plan.revenue(),
            reserve: trip_reserve(plan, p),
        }
    }

    /// Same numbers as [`DriverQuote::of`] on the synthesized trip, without
    /// building it. `members` must be sorted by id and distinct.
    pub fn for_members(members: &[&Request], p: &EconomicParams) -> Option<Self> {
        let meet_point = GeoPoint::centroid(members.iter().map(|r| &r.origin))?;
        let drop_point = GeoPoint::centroid(members.iter().map(|r| &r.destination))?;
        let discount = discount_for(members.len(), p);
        let revenue = members.iter().map(|r| (1.0 - discount) * fare(r, p)).sum();
        Some(Self {
            meet_point,
            size: members.len(),
            revenue,
            reserve: p.fare_base + p.fare_rate * manhattan_distance(meet_point, drop_point),
        })
    }

    pub fn assess(&self, vehicle: &Vehicle, p: &EconomicParams) -> DriverEconomics {
        let pickup_dist = manhattan_distance(vehicle.location, self.meet_point);
        DriverEconomics {
            pickup_dist,
            reserve: self.reserve,
            revenue: self.revenue,
            willing: pickup_dist <= p.xi + COST_EPS
                && self.reserve <= self.revenue + COST_EPS
                && self.size <= vehicle.capacity,
        }
    }
}

/// Would `vehicle` drive to the meeting point and carry `plan`?
pub fn driver_economics(vehicle: &Vehicle, plan: &TripPlan, p: &EconomicParams) -> DriverEconomics {
    DriverQuote::of(plan, p).assess(vehicle, p)
}

/// Net surplus of matching `vehicle` to `plan`: revenue minus the cost of the
/// empty drive to the meeting point.
pub fn match_weight(vehicle: &Vehicle, plan: &TripPlan, p: &EconomicParams) -> f64 {
    plan.revenue() - p.fare_rate * manhattan_distance(vehicle.location, plan.meet_point)
}

/// Closeness: origins and destinations within `delta`, departures within
/// `t_window`. All bounds inclusive.
pub fn is_close(i: &Request, j: &Request, p: &EconomicParams) -> bool {
    manhattan_distance(i.origin, j.origin) <= p.delta
        && manhattan_distance(i.destination, j.destination) <= p.delta
        && (i.depart_time - j.depart_time).abs() <= p.t_window
}

/// A problem instance: requests and vehicles, each sorted by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Instance {
    pub requests: Vec<Request>,
    pub vehicles: Vec<Vehicle>,
}

impl Instance {
    pub fn new(mut requests: Vec<Request>, mut vehicles: Vec<Vehicle>) -> Result<Self, ModelError> {
        requests.sort_by_key(|r| r.id);
        vehicles.sort_by_key(|v| v.id);
        for r in &requests {
            r.check()?;
        }
        if let Some(w) = requests.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ModelError::DuplicateRequest(w[0].id));
        }
        if let Some(w) = vehicles.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ModelError::DuplicateVehicle(w[0].id));
        }
        for v in &vehicles {
            if !v.location.is_finite() {
                return Err(ModelError::NonFinite(v.id.to_string()));
            }
        }
        Ok(Self { requests, vehicles })
    }

    pub fn request(&self, id: RequestId) -> Option<&Request> {
        // ids are often dense from 0 or 1
        for guess in [id.0 as usize, (id.0 as usize).wrapping_sub(1)] {
            if let Some(r) = self.requests.get(guess).filter(|r| r.id == id) {
                return Some(r);
            }
        }
        self.requests
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|i| &self.requests[i])
    }

    pub fn vehicle(&self, id: VehicleId) -> Option<&Vehicle> {
        self.vehicles
            .binary_search_by_key(&id, |v| v.id)
            .ok()
            .map(|i| &self.vehicles[i])
    }

    /// Synthesizes the trip for a set of request ids.
    pub fn trip(&self, members: &[RequestId], p: &EconomicParams) -> Result<TripPlan, ModelError> {
        let reqs = members
            .iter()
            .map(|id| self.request(*id).ok_or(ModelError::UnknownRequest(*id)))
            .collect::<Result<Vec<_>, _>>()?;
        synthesize_trip(&reqs, p)
    }

    pub fn request_map(&self) -> BTreeMap<RequestId, Request> {
        self.requests.iter().map(|r| (r.id, r.clone())).collect()
    }
}

/// One vehicle carrying one trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub vehicle: VehicleId,
    pub trip: TripPlan,
}

/// A solution: vehicle-to-trip matches plus the passenger-to-vehicle map.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Assignment {
    /// Sorted by vehicle id.
    pub matches: Vec<Match>,
    pub rider_of: BTreeMap<RequestId, VehicleId>,
    pub served: usize,
    pub weight: f64,
}

impl Assignment {
    pub fn from_matches(
        mut matches: Vec<Match>,
        instance: &Instance,
        p: &EconomicParams,
    ) -> Result<Self, ModelError> {
        matches.sort_by(|a, b| {
            a.vehicle
                .cmp(&b.vehicle)
                .then_with(|| a.trip.members.cmp(&b.trip.members))
        });
        let mut rider_of = BTreeMap::new();
        let mut weight = 0.0;
        for m in &matches {
            let vehicle = instance
                .vehicle(m.vehicle)
                .ok_or(ModelError::UnknownVehicle(m.vehicle))?;
            weight += match_weight(vehicle, &m.trip, p);
            for id in &m.trip.members {
                rider_of.entry(*id).or_insert(m.vehicle);
            }
        }
        let served = matches.iter().map(|m| m.trip.size()).sum();
        Ok(Self {
            matches,
            rider_of,
            served,
            weight,
        })
    }

    pub fn trip_of(&self, vehicle: VehicleId) -> Option<&TripPlan> {
        self.matches
            .iter()
            .find(|m| m.vehicle == vehicle)
            .map(|m| &m.trip)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Also require every member to arrive by their latest arrival time.
    pub strict_arrival: bool,
}

/// A broken constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A passenger rides in more than one trip.
    RequestInMultipleTrips { request: RequestId },
    /// A trip member is not recorded as riding the trip's vehicle.
    MemberNotMarked { request: RequestId, vehicle: VehicleId },
    /// A rider record points at a vehicle whose trip lacks the rider.
    OrphanRider { request: RequestId, vehicle: VehicleId },
    /// One trip matched to several vehicles.
    TripMatchedTwice { members: Vec<RequestId> },
    /// One vehicle matched to several trips.
    VehicleMatchedTwice { vehicle: VehicleId },
    /// Empty drive longer than the drivers' limit.
    PickupTooFar { vehicle: VehicleId, pickup_dist: f64 },
    /// A member loses more than they gain.
    LossExceedsGain { request: RequestId, loss: f64, gain: f64 },
    /// Trip revenue below the driver's reserve.
    RevenueBelowReserve { vehicle: VehicleId, revenue: f64, reserve: f64 },
    /// A member's loss exceeds the tolerance.
    LossExceedsTolerance { request: RequestId, loss: f64 },
    TripTooLarge { vehicle: VehicleId, size: usize },
    EmptyTrip { vehicle: VehicleId },
    UnknownRequest { request: RequestId },
    UnknownVehicle { vehicle: VehicleId },
    /// The stored plan disagrees with the trip synthesized from its members.
    PlanMismatch { vehicle: VehicleId },
    ServedMismatch { recorded: usize, actual: usize },
    LateArrival { request: RequestId, arrive: f64, latest: f64 },
}

/// Checks every assignment constraint against `assignment`. Trip
/// economics are recomputed from the instance rather than trusted.
pub fn validate_assignment(
    assignment: &Assignment,
    instance: &Instance,
    p: &EconomicParams,
    opts: ValidationOptions,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut vehicles_seen = BTreeSet::new();
    let mut trips_seen = BTreeSet::new();
    let mut trips_of_request: BTreeMap<RequestId, usize> = BTreeMap::new();

    for m in &assignment.matches {
        if !vehicles_seen.insert(m.vehicle) {
            out.push(Violation::VehicleMatchedTwice { vehicle: m.vehicle });
        }
        if !trips_seen.insert(m.trip.members.clone()) {
            out.push(Violation::TripMatchedTwice {
                members: m.trip.members.clone(),
            });
        }
        for id in &m.trip.members {
            *trips_of_request.entry(*id).or_default() += 1;
            if assignment.rider_of.get(id) != Some(&m.vehicle) {
                out.push(Violation::MemberNotMarked {
                    request: *id,
                    vehicle: m.vehicle,
                });
            }
        }
        if m.trip.members.is_empty() {
            out.push(Violation::EmptyTrip { vehicle: m.vehicle });
            continue;
        }

        let vehicle = match instance.vehicle(m.vehicle) {
            Some(v) => v,
            None => {
                out.push(Violation::UnknownVehicle { vehicle: m.vehicle });
                continue;
            }
        };
        if m.trip.size() > vehicle.capacity.min(VEHICLE_CAPACITY) {
            out.push(Violation::TripTooLarge {
                vehicle: m.vehicle,
                size: m.trip.size(),
            });
            continue;
        }
        let unknown: Vec<_> = m
            .trip
            .members
            .iter()
            .filter(|id| instance.request(**id).is_none())
            .copied()
            .collect();
        if !unknown.is_empty() {
            out.extend(
                unknown
                    .into_iter()
                    .map(|request| Violation::UnknownRequest { request }),
            );
            continue;
        }
        let plan = match instance.trip(&m.trip.members, p) {
            Ok(plan) => plan,
            Err(_) => {
                out.push(Violation::PlanMismatch { vehicle: m.vehicle });
                continue;
            }
        };
        if manhattan_distance(plan.meet_point, m.trip.meet_point) > 1e-6
            || manhattan_distance(plan.drop_point, m.trip.drop_point) > 1e-6
        {
            out.push(Violation::PlanMismatch { vehicle: m.vehicle });
        }

        let econ = driver_economics(vehicle, &plan, p);
        if econ.pickup_dist > p.xi + COST_EPS {
            out.push(Violation::PickupTooFar {
                vehicle: m.vehicle,
                pickup_dist: econ.pickup_dist,
            });
        }
        if econ.reserve > econ.revenue + COST_EPS {
            out.push(Violation::RevenueBelowReserve {
                vehicle: m.vehicle,
                revenue: econ.revenue,
                reserve: econ.reserve,
            });
        }
        for mp in &plan.pricing {
            if mp.loss > mp.gain + COST_EPS {
                out.push(Violation::LossExceedsGain {
                    request: mp.request,
                    loss: mp.loss,
                    gain: mp.gain,
                });
            }
            if mp.loss > p.zeta + COST_EPS {
                out.push(Violation::LossExceedsTolerance {
                    request: mp.request,
                    loss: mp.loss,
                });
            }
        }
        if opts.strict_arrival {
            for id in &plan.members {
                let r = instance.request(*id).expect("checked above");
                if plan.arrive > r.latest_arrival + COST_EPS {
                    out.push(Violation::LateArrival {
                        request: *id,
                        arrive: plan.arrive,
                        latest: r.latest_arrival,
                    });
                }
            }
        }
    }

    for (request, n) in &trips_of_request {
        if *n > 1 {
            out.push(Violation::RequestInMultipleTrips { request: *request });
        }
    }
    for (request, vehicle) in &assignment.rider_of {
        let carried = assignment
            .matches
            .iter()
            .any(|m| m.vehicle == *vehicle && m.trip.members.contains(request));
        if !carried {
            out.push(Violation::OrphanRider {
                request: *request,
                vehicle: *vehicle,
            });
        }
    }
    let actual: usize = assignment.matches.iter().map(|m| m.trip.size()).sum();
    if actual != assignment.served {
        out.push(Violation::ServedMismatch {
            recorded: assignment.served,
            actual,
        });
    }
    out
}


#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;

    fn pt(x: f64, y: f64) -> GeoPoint {
        GeoPoint::new(x, y)
    }

    #[test]
    fn quote_matches_full_plan() {
        let p = EconomicParams::default();
        let reqs = [
            req(1, (0.0, 0.0), (3000.0, 10.0), 0.0),
            req(2, (37.0, 5.0), (2950.0, 80.0), 40.0),
            req(3, (11.0, 60.0), (3100.0, 3.0), 70.0),
            req(4, (90.0, 13.0), (2900.0, 41.0), 20.0),
        ];
        for k in 1..=4 {
            let members: Vec<&Request> = reqs[..k].iter().collect();
            let plan = synthesize_trip(&members, &p).unwrap();
            assert_eq!(DriverQuote::for_members(&members, &p).unwrap(), DriverQuote::of(&plan, &p));
        }
        assert!(DriverQuote::for_members(&[], &p).is_none());
    }

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan_distance(pt(0.0, 0.0), pt(3.0, 4.0)), 7.0);
        assert_eq!(manhattan_distance(pt(5.0, 5.0), pt(5.0, 5.0)), 0.0);
        assert_eq!(manhattan_distance(pt(1.0, 2.0), pt(4.0, 0.0)), 5.0);
    }

    #[test]
    fn closeness_boundaries() {
        let p = EconomicParams {
            delta: 100.0,
            t_window: 60.0,
            ..Default::default()
        };
        let a = req(1, (0.0, 0.0), (1000.0, 0.0), 0.0);
        assert!(is_close(&a, &a, &p));
        assert!(is_close(&a, &a, &EconomicParams { delta: 0.0, t_window: 0.0, ..p.clone() }));
        let b = req(2, (100.0, 0.0), (1000.0, 0.0), 0.0);
        assert!(is_close(&a, &b, &p), "exactly delta apart is close");
        let c = req(3, (200.0, 0.0), (1000.0, 0.0), 0.0);
        assert!(!is_close(&a, &c, &p));
        let d = req(4, (0.0, 0.0), (1000.0, 0.0), 61.0);
        assert!(!is_close(&a, &d, &p));
    }

    #[test]
    fn request_invariants() {
        let o = pt(0.0, 0.0);
        assert!(matches!(
            Request::new(RequestId(1), o, o, 0.0, 10.0),
            Err(ModelError::ZeroLengthRequest(_))
        ));
        assert!(matches!(
            Request::new(RequestId(1), o, pt(1.0, 0.0), 10.0, 0.0),
            Err(ModelError::ArrivalBeforeDeparture { .. })
        ));
        assert!(Request::new(RequestId(1), o, pt(f64::NAN, 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn singleton_trip_is_the_request() {
        let p = EconomicParams::default();
        let r = req(7, (10.0, 20.0), (900.0, -40.0), 1234.0);
        let t = synthesize_trip(&[&r], &p).unwrap();
        assert_eq!(t.meet_point, r.origin);
        assert_eq!(t.drop_point, r.destination);
        assert_eq!(t.depart, 1234.0);
        let m = &t.pricing[0];
        assert_eq!(m.loss, 0.0);
        assert_eq!(m.discount, 0.0);
        assert_eq!(m.pay, fare(&r, &p));
    }

    #[test]
    fn pair_midpoint() {
        let p = EconomicParams::default();
        let a = req(1, (0.0, 0.0), (1000.0, 0.0), 50.0);
        let b = req(2, (2.0, 0.0), (1000.0, 0.0), 50.0);
        let t = synthesize_trip(&[&b, &a], &p).unwrap();
        assert_eq!(t.meet_point, pt(1.0, 0.0));
        assert_eq!(t.members, vec![RequestId(1), RequestId(2)]);
    }

    #[test]
    fn triple_centroid_and_latest_departure() {
        // centroid of (0,0),(3,0),(0,3) is (1,1); departure is the max of 100, 130, 160
        let p = EconomicParams::default();
        let a = req(1, (0.0, 0.0), (5000.0, 0.0), 100.0);
        let b = req(2, (3.0, 0.0), (5000.0, 0.0), 130.0);
        let c = req(3, (0.0, 3.0), (5000.0, 0.0), 160.0);
        let t = synthesize_trip(&[&a, &b, &c], &p).unwrap();
        assert!((t.meet_point.x - 1.0).abs() < 1e-12 && (t.meet_point.y - 1.0).abs() < 1e-12);
        assert_eq!(t.depart, 160.0);
        let expected_arrive = 160.0 + manhattan_distance(t.meet_point, t.drop_point) / p.v_bar;
        assert_eq!(t.arrive, expected_arrive);
    }

    #[test]
    fn trip_size_errors() {
        let p = EconomicParams::default();
        assert_eq!(synthesize_trip(&[], &p), Err(ModelError::EmptyTrip));
        let rs: Vec<Request> = (0..5)
            .map(|i| req(i, (i as f64, 0.0), (500.0, 0.0), 0.0))
            .collect();
        let refs: Vec<&Request> = rs.iter().collect();
        assert_eq!(synthesize_trip(&refs, &p), Err(ModelError::OversizeTrip(5)));
        assert_eq!(
            synthesize_trip(&[&rs[0], &rs[0]], &p),
            Err(ModelError::DuplicateMember(RequestId(0)))
        );
    }

    #[test]
    fn fare_examples() {
        let p = EconomicParams {
            fare_base: 2.5,
            fare_rate: 0.001,
            ..Default::default()
        };
        let r = req(1, (0.0, 0.0), (600.0, 400.0), 0.0);
        // 2.5 + 0.001 * 1000
        assert!((fare(&r, &p) - 3.5).abs() < 1e-12);
        let zero = EconomicParams {
            fare_base: 0.0,
            fare_rate: 0.0,
            ..Default::default()
        };
        assert_eq!(fare(&r, &zero), 0.0);
        let lin = EconomicParams {
            fare_base: 0.0,
            ..p.clone()
        };
        let r2 = req(2, (0.0, 0.0), (1200.0, 800.0), 0.0);
        assert!((fare(&r2, &lin) - 2.0 * fare(&r, &lin)).abs() < 1e-12);
    }

    #[test]
    fn pair_loss_hand_evaluated() {
        // origins 200 m apart, shared destination: each walks 100 m to the midpoint
        let p = EconomicParams {
            walk_cost: 0.01,
            wait_cost: 0.0,
            ..Default::default()
        };
        let a = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let b = req(2, (200.0, 0.0), (3000.0, 0.0), 0.0);
        let plan = synthesize_trip(&[&a, &b], &p).unwrap();
        for m in &plan.pricing {
            assert!((m.loss - 1.0).abs() < 1e-12, "loss {}", m.loss);
        }
        // the destinations here coincide; with destinations 200 m apart too the
        // walk doubles to 200 m per member
        let c = req(3, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let d = req(4, (200.0, 0.0), (3200.0, 0.0), 0.0);
        let plan = synthesize_trip(&[&c, &d], &p).unwrap();
        for m in &plan.pricing {
            assert!((m.loss - 2.0).abs() < 1e-12, "loss {}", m.loss);
        }
    }

    #[test]
    fn price_trip_matches_synthesis_and_reports_unknown() {
        let p = EconomicParams::default();
        let a = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let b = req(2, (200.0, 0.0), (3000.0, 100.0), 40.0);
        let plan = synthesize_trip(&[&a, &b], &p).unwrap();
        let map: BTreeMap<_, _> = [(a.id, a.clone()), (b.id, b.clone())].into_iter().collect();
        assert_eq!(price_trip(&plan, &map, &p).unwrap(), plan.pricing);
        let partial: BTreeMap<_, _> = [(a.id, a)].into_iter().collect();
        assert_eq!(
            price_trip(&plan, &partial, &p),
            Err(ModelError::UnknownRequest(RequestId(2)))
        );
    }

    #[test]
    fn discount_cap_binds() {
        let p = EconomicParams {
            discount_per_corider: 0.2,
            discount_cap: 0.5,
            ..Default::default()
        };
        let rs: Vec<Request> = (0..4)
            .map(|i| req(i, (i as f64, 0.0), (900.0, 0.0), 0.0))
            .collect();
        let refs: Vec<&Request> = rs.iter().collect();
        let plan = synthesize_trip(&refs, &p).unwrap();
        assert!(plan.pricing.iter().all(|m| m.discount == 0.5));
    }

    #[test]
    fn driver_willingness() {
        let p = EconomicParams::default();
        let a = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let b = req(2, (10.0, 0.0), (3000.0, 0.0), 0.0);
        let plan = synthesize_trip(&[&a, &b], &p).unwrap();
        let at_meet = Vehicle::new(VehicleId(1), plan.meet_point);
        let e = driver_economics(&at_meet, &plan, &p);
        assert_eq!(e.pickup_dist, 0.0);
        assert!(e.willing);

        let at_limit = Vehicle::new(
            VehicleId(2),
            GeoPoint::new(plan.meet_point.x, plan.meet_point.y + p.xi),
        );
        let e = driver_economics(&at_limit, &plan, &p);
        assert_eq!(e.pickup_dist, p.xi);
        assert!(e.willing, "pickup exactly xi is acceptable");

        // revenue a hair below reserve
        let mut short = plan.clone();
        let deficit = short.revenue() - short.reserve + 1e-6;
        short.pricing[0].pay -= deficit;
        let e = driver_economics(&at_meet, &short, &p);
        assert!(!e.willing);
    }

    #[test]
    fn empty_assignment_is_valid() {
        let inst = Instance::default();
        let a = Assignment::default();
        assert!(validate_assignment(&a, &inst, &EconomicParams::default(), Default::default()).is_empty());
    }

    #[test]
    fn vehicle_matched_twice_is_c4() {
        let p = EconomicParams::default();
        let r1 = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let r2 = req(2, (5000.0, 0.0), (8000.0, 0.0), 0.0);
        let v = veh(1, (0.0, 10.0));
        let inst = Instance::new(vec![r1, r2], vec![v]).unwrap();
        let t1 = inst.trip(&[RequestId(1)], &p).unwrap();
        let t2 = inst.trip(&[RequestId(2)], &p).unwrap();
        let a = Assignment {
            matches: vec![
                Match { vehicle: VehicleId(1), trip: t1 },
                Match { vehicle: VehicleId(1), trip: t2 },
            ],
            rider_of: [(RequestId(1), VehicleId(1)), (RequestId(2), VehicleId(1))]
                .into_iter()
                .collect(),
            served: 2,
            weight: 0.0,
        };
        let v = validate_assignment(&a, &inst, &p, Default::default());
        assert!(v.contains(&Violation::VehicleMatchedTwice { vehicle: VehicleId(1) }), "{v:?}");
    }

    #[test]
    fn excessive_loss_is_c8() {
        // walk of 100 m each at 0.01/m = 1.0 loss; tolerance 0.0 makes it ζ + 1
        let p = EconomicParams {
            walk_cost: 0.01,
            wait_cost: 0.0,
            zeta: 0.0,
            discount_per_corider: 0.4,
            discount_cap: 0.45,
            ..Default::default()
        };
        let r1 = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let r2 = req(2, (200.0, 0.0), (3000.0, 0.0), 0.0);
        let inst = Instance::new(vec![r1, r2], vec![veh(1, (100.0, 0.0))]).unwrap();
        let trip = inst.trip(&[RequestId(1), RequestId(2)], &p).unwrap();
        assert!((trip.pricing[0].loss - (p.zeta + 1.0)).abs() < 1e-12);
        let a = Assignment::from_matches(
            vec![Match { vehicle: VehicleId(1), trip }],
            &inst,
            &p,
        )
        .unwrap();
        let v = validate_assignment(&a, &inst, &p, Default::default());
        assert!(v.iter().any(|x| matches!(x, Violation::LossExceedsTolerance { request, .. } if *request == RequestId(1))));
        assert!(!v.iter().any(|x| matches!(x, Violation::LossExceedsGain { .. })), "{v:?}");
    }

    #[test]
    fn unmarked_member_and_served_mismatch() {
        let p = EconomicParams::default();
        let r1 = req(1, (0.0, 0.0), (3000.0, 0.0), 0.0);
        let inst = Instance::new(vec![r1], vec![veh(1, (0.0, 0.0))]).unwrap();
        let trip = inst.trip(&[RequestId(1)], &p).unwrap();
        let mut a = Assignment::from_matches(vec![Match { vehicle: VehicleId(1), trip }], &inst, &p).unwrap();
        assert!(validate_assignment(&a, &inst, &p, Default::default()).is_empty());
        a.rider_of.clear();
        a.served = 3;
        let v = validate_assignment(&a, &inst, &p, Default::default());
        assert!(v.contains(&Violation::MemberNotMarked { request: RequestId(1), vehicle: VehicleId(1) }));
        assert!(v.contains(&Violation::ServedMismatch { recorded: 3, actual: 1 }));
    }

    #[test]
    fn strict_arrival_mode() {
        let p = EconomicParams::default();
        let r = Request::new(
            RequestId(1),
            GeoPoint::new(0.0, 0.0),
            GeoPoint::new(8000.0, 0.0),
            0.0,
            500.0,
        )
        .unwrap();
        let inst = Instance::new(vec![r], vec![veh(1, (0.0, 0.0))]).unwrap();
        let trip = inst.trip(&[RequestId(1)], &p).unwrap();
        // 8000 m at 8 m/s arrives at t = 1000
        assert_eq!(trip.arrive, 1000.0);
        let a = Assignment::from_matches(vec![Match { vehicle: VehicleId(1), trip }], &inst, &p).unwrap();
        assert!(validate_assignment(&a, &inst, &p, Default::default()).is_empty());
        let strict = validate_assignment(&a, &inst, &p, ValidationOptions { strict_arrival: true });
        assert_eq!(strict.len(), 1);
        assert!(matches!(strict[0], Violation::LateArrival { .. }));
    }

    #[test]
    fn params_check() {
        assert!(EconomicParams::default().check().is_ok());
        let bad = EconomicParams { v_bar: 0.0, ..Default::default() };
        assert!(bad.check().is_err());
        let bad = EconomicParams { discount_cap: 1.0, ..Default::default() };
        assert!(bad.check().is_err());
        let bad = EconomicParams { delta: -1.0, ..Default::default() };
        assert!(bad.check().is_err());
    }
}
