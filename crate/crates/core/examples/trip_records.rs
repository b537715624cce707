//! Reads a trip-record CSV, keeps the morning window inside the box, places a
//! fleet and runs both solvers.
//!
//! `cargo run --example trip_records -- [trips.csv] [config.toml]`

use std::path::PathBuf;

use ridepool::io::config::InstanceConfig;
use ridepool::io::ingest::ingest_instance;
use ridepool::io::pipeline::{run_pipeline, PipelineOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut args = std::env::args().skip(1);
    let trips = args.next().map_or(fixtures.join("trips_1000.csv"), PathBuf::from);
    let config = args.next().map_or(fixtures.join("tlc.toml"), PathBuf::from);

    let cfg = InstanceConfig::load(Some(&config))?;
    let (inst, report) = ingest_instance(&trips, &cfg)?;
    println!(
        "{} rows: {} requests, {} skipped, {} outside box or window",
        report.rows,
        report.requests.len(),
        report.skipped,
        report.filtered
    );
    if let Some(w) = &report.warning {
        println!("warning: {w}");
    }

    let out = run_pipeline(&inst, &cfg, PipelineOptions { timings: true, oracle: false })?;
    let r = &out.report;
    println!("{} stable groups, {} vehicles", r.instance.groups, r.instance.vehicles);
    if let Some(f) = &r.flow {
        println!("flow: served {}, {} violations, {:.4} s", f.served, f.violations.len(), f.elapsed.unwrap_or(0.0));
    }
    if let Some(b) = &r.bnb {
        println!(
            "exact: served {}, {} nodes over {} edges, {:.4} s",
            b.served,
            b.nodes_expanded,
            b.edges,
            b.elapsed.unwrap_or(0.0)
        );
    }
    Ok(())
}
