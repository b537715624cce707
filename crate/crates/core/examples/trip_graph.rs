//! Builds the vehicle-trip graph layer by layer and compares it with brute
//! enumeration.

use ridepool::io::generate::{desk_config, generate_random_instance};
use ridepool::oracle::exhaustive_trip_sets;
use ridepool::vtg::{build_shareability_graph, build_vtg, MAX_TRIP_SIZE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = desk_config();
    let p = &cfg.params;
    let inst = generate_random_instance(11, 10, 4, &cfg);

    let g = build_shareability_graph(&inst, p);
    println!("{} shareable pairs, {} vehicle-request edges", g.rr_edges.len(), g.vr_edges.len());

    let vtg = build_vtg(&inst, p);
    for size in 1..=MAX_TRIP_SIZE {
        println!("trips of {size}: {}", vtg.layer(size).len());
    }
    for (v, trips) in vtg.vehicle_edges() {
        let largest = trips.iter().map(|&t| vtg.trip(t).members.len()).max().unwrap_or(0);
        println!("{v}: {} trips, largest {largest}", trips.len());
    }
    println!("closed under subsets: {}", vtg.closure_violation().is_none());
    println!("same as enumeration: {}", vtg.member_sets() == exhaustive_trip_sets(&inst, p)?);
    Ok(())
}
