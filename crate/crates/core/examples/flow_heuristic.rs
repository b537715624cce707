//! Runs the score-augmented max-flow heuristic on clustered demand and checks
//! the result.
//!
//! `cargo run --example flow_heuristic -- [requests] [vehicles]`

use ridepool::flownet::{assign_passengers_to_taxis, build_flow_network, solve_modified_ff};
use ridepool::grouping::partition_stable_groups;
use ridepool::io::generate::{bench_config, generate_clustered_instance};
use ridepool::model::validate_assignment;
use ridepool::oracle::reference_max_flow;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(Ok(400), |s| s.parse())?;
    let b = args.next().map_or(Ok(60), |s| s.parse())?;

    let cfg = bench_config();
    let p = &cfg.params;
    let inst = generate_clustered_instance(cfg.seed, n, b, 4, &cfg);
    let groups = partition_stable_groups(&inst.requests, p, cfg.mode)?;
    let mut net = build_flow_network(&groups, &inst, p)?;
    println!(
        "{} taxis, {} super nodes, {} edges, max flow {}",
        net.vehicles().len(),
        net.groups().len(),
        net.edges().len(),
        reference_max_flow(&net)
    );

    let sol = solve_modified_ff(&mut net);
    println!(
        "flow {} after {} augmentations and {} moves, score {}",
        sol.flow_value,
        sol.stats.augmentations,
        sol.stats.reallocation_moves,
        sol.scores.total()
    );

    let (assignment, stats) = assign_passengers_to_taxis(&net, &sol.scores, &inst, p)?;
    println!(
        "served {} of {n}, weight {:.2}, {} blocks shrunk, {} taxis idle",
        assignment.served, assignment.weight, stats.shrunk_blocks, stats.idle_taxis
    );
    let violations = validate_assignment(&assignment, &inst, p, cfg.validation_options());
    println!("violations: {}", violations.len());
    Ok(())
}
