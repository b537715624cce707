//! Exact branch-and-bound over the vehicle-trip graph, checked against
//! exhaustive search.
//!
//! `cargo run --example exact_search -- [seed] [requests] [vehicles]`

use ridepool::bnb::{solve_bnb, split_components};
use ridepool::io::generate::{desk_config, generate_random_instance};
use ridepool::io::report::log10_ratio;
use ridepool::oracle::{brute_force_optimal, within_guard};
use ridepool::vtg::build_vtg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(Ok(1), |s| s.parse())?;
    let n = args.next().map_or(Ok(8), |s| s.parse())?;
    let b = args.next().map_or(Ok(4), |s| s.parse())?;

    let cfg = desk_config();
    let p = &cfg.params;
    let inst = generate_random_instance(seed, n, b, &cfg);
    let vtg = build_vtg(&inst, p);
    let (assignment, sol, g) = solve_bnb(&vtg, &inst, p, cfg.bnb_options())?;

    println!("{} edges in {} components", g.table_len(), split_components(&g).len());
    for m in &assignment.matches {
        let ids: Vec<String> = m.trip.members.iter().map(ToString::to_string).collect();
        println!("{} takes {}", m.vehicle, ids.join(" "));
    }
    println!("served {}, weight {:.3}", sol.served, sol.weight);
    println!(
        "{} nodes, depth {}, log10(nodes / 1.2321^|E|) = {:.3}",
        sol.stats.nodes_expanded,
        sol.stats.max_depth,
        log10_ratio(sol.stats.nodes_expanded, g.table_len())
    );
    if within_guard(&inst) {
        let o = brute_force_optimal(&vtg, &inst, p)?;
        println!("oracle: served {}, weight {:.3}, {} optimal assignments", o.best_served, o.best_weight, o.optimal_assignments);
    }
    Ok(())
}
