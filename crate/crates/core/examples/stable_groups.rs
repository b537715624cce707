//! Splits a batch of requests into groups whose members all profit from
//! riding together.
//!
//! `cargo run --example stable_groups -- [seed] [requests]`

use ridepool::grouping::{build_close_sets, partition_stable_groups, GroupingMode};
use ridepool::io::generate::{desk_config, generate_random_instance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(Ok(3), |s| s.parse())?;
    let n = args.next().map_or(Ok(14), |s| s.parse())?;

    let cfg = desk_config();
    let inst = generate_random_instance(seed, n, 0, &cfg);
    let close = build_close_sets(&inst.requests, &cfg.params);
    println!("{n} requests, {} close pairs", close.pair_count());

    match partition_stable_groups(&inst.requests, &cfg.params, GroupingMode::Strict) {
        Ok(g) => println!("strict: {} groups", g.groups.len()),
        Err(e) => println!("strict: {e}"),
    }
    let groups = partition_stable_groups(&inst.requests, &cfg.params, GroupingMode::Greedy)?;
    for g in &groups.groups {
        let ids: Vec<String> = g.iter().map(ToString::to_string).collect();
        println!("group {}", ids.join(" "));
    }
    println!("{} riders stay alone", groups.leftover.len());
    Ok(())
}
