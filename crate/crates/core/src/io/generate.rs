//! Seeded synthetic instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::InstanceConfig;
use super::ingest::planar_extent;
use crate::model::{manhattan_distance, GeoPoint, Instance, Request, RequestId, Vehicle, VehicleId};

/// Day the window is anchored to, seconds since the epoch (2016-01-05 UTC).
pub const BASE_DAY: f64 = 1_451_952_000.0;

fn uniform_point(rng: &mut ChaCha8Rng, lo: GeoPoint, hi: GeoPoint) -> GeoPoint {
    GeoPoint::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y))
}

fn make_request(id: u32, origin: GeoPoint, destination: GeoPoint, depart: f64, cfg: &InstanceConfig) -> Request {
    let arrive = depart + cfg.arrival_slack * manhattan_distance(origin, destination) / cfg.params.v_bar;
    Request::new(RequestId(id), origin, destination, depart, arrive).expect("generated requests are valid")
}

fn window_seconds(cfg: &InstanceConfig) -> (f64, f64) {
    let (a, b) = cfg.window().expect("config is checked");
    (BASE_DAY + a as f64, BASE_DAY + b as f64)
}

fn fleet(rng: &mut ChaCha8Rng, n: usize, lo: GeoPoint, hi: GeoPoint) -> Vec<Vehicle> {
    (0..n)
        .map(|k| Vehicle::new(VehicleId(k as u32), uniform_point(rng, lo, hi)))
        .collect()
}

/// Origins, destinations and vehicles uniform over the box; departures
/// uniform over the window. The same seed always gives the same instance.
pub fn generate_random_instance(seed: u64, n_requests: usize, n_vehicles: usize, cfg: &InstanceConfig) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = planar_extent(cfg);
    let (t0, t1) = window_seconds(cfg);
    let mut requests = Vec::with_capacity(n_requests);
    for k in 0..n_requests {
        let origin = uniform_point(&mut rng, lo, hi);
        let mut destination = uniform_point(&mut rng, lo, hi);
        while manhattan_distance(origin, destination) == 0.0 {
            destination = uniform_point(&mut rng, lo, hi);
        }
        let depart = rng.gen_range(t0..t1);
        requests.push(make_request(k as u32, origin, destination, depart, cfg));
    }
    let vehicles = fleet(&mut rng, n_vehicles, lo, hi);
    Instance::new(requests, vehicles).expect("generated instance is valid")
}

/// Requests in tight clusters of `cluster_size`: each cluster shares an
/// origin spot, a destination spot and a departure time up to small jitter,
/// so its members are mutually stable. Cluster origins sit on a jittered
/// grid over the box; destinations and departures are uniform.
pub fn generate_clustered_instance(
    seed: u64,
    n_requests: usize,
    n_vehicles: usize,
    cluster_size: usize,
    cfg: &InstanceConfig,
) -> Instance {
    assert!(cluster_size > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = planar_extent(cfg);
    let (t0, t1) = window_seconds(cfg);
    let clusters = n_requests.div_ceil(cluster_size);
    let side = (clusters as f64).sqrt().ceil().max(1.0) as usize;
    let (cw, ch) = ((hi.x - lo.x) / side as f64, (hi.y - lo.y) / side as f64);
    let spread = (cfg.params.delta / 8.0).min(30.0);
    let time_spread = (cfg.params.t_window / 8.0).min(30.0);

    let mut requests = Vec::with_capacity(n_requests);
    for c in 0..clusters {
        let (gx, gy) = ((c % side) as f64, (c / side) as f64);
        let o = GeoPoint::new(
            lo.x + cw * (gx + rng.gen_range(0.25..0.75)),
            lo.y + ch * (gy + rng.gen_range(0.25..0.75)),
        );
        let d = uniform_point(&mut rng, lo, hi);
        let t = rng.gen_range(t0..t1);
        for _ in 0..cluster_size.min(n_requests - requests.len()) {
            let jitter = |rng: &mut ChaCha8Rng, p: GeoPoint| {
                GeoPoint::new(p.x + rng.gen_range(-spread..=spread), p.y + rng.gen_range(-spread..=spread))
            };
            let origin = jitter(&mut rng, o);
            let mut destination = jitter(&mut rng, d);
            while manhattan_distance(origin, destination) == 0.0 {
                destination = jitter(&mut rng, d);
            }
            let depart = t + rng.gen_range(-time_spread..=time_spread);
            requests.push(make_request(requests.len() as u32, origin, destination, depart, cfg));
        }
    }
    let vehicles = fleet(&mut rng, n_vehicles, lo, hi);
    Instance::new(requests, vehicles).expect("generated instance is valid")
}

/// A 600 m square with a five-minute window, sized so that random instances
/// of a handful of requests form many shareable pairs and some larger trips,
/// and each vehicle reaches only part of the demand.
pub fn desk_config() -> InstanceConfig {
    let mut cfg = InstanceConfig {
        min_lon: -73.9880,
        max_lon: -73.9809,
        min_lat: 40.7500,
        max_lat: 40.7554,
        window_start: "08:15".into(),
        window_end: "08:20".into(),
        mode: crate::grouping::GroupingMode::Greedy,
        ..InstanceConfig::default()
    };
    cfg.params.xi = 350.0;
    cfg.params.t_window = 240.0;
    cfg
}

/// A 10 km square for scaling runs.
pub fn bench_config() -> InstanceConfig {
    InstanceConfig {
        min_lon: -74.03,
        max_lon: -73.9114,
        min_lat: 40.70,
        max_lat: 40.79,
        mode: crate::grouping::GroupingMode::Greedy,
        ..InstanceConfig::default()
    }
}
