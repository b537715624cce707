//! Times the flow solver over a grid of fleet and demand sizes and fits
//! time against `|B||P| + |B|^2` on log-log axes.
//!
//! `cargo run --release --example scaling_bench -- [--full]`

use ridepool::io::bench::run_scaling_bench;
use ridepool::io::generate::bench_config;

fn main() {
    let full = std::env::args().any(|a| a == "--full");
    let (requests, vehicles): (&[usize], &[usize]) = if full {
        (&[100, 1000, 10_000], &[10, 100, 1000])
    } else {
        (&[100, 1000, 3000], &[10, 100, 300])
    };
    let fit = run_scaling_bench(&bench_config(), requests, vehicles, 3);
    println!("{:>7} {:>6} {:>12} {:>10} {:>7}", "|P|", "|B|", "work", "seconds", "served");
    for pt in &fit.points {
        println!("{:>7} {:>6} {:>12.0} {:>10.5} {:>7}", pt.requests, pt.vehicles, pt.work, pt.seconds, pt.served);
    }
    println!("slope {:.3}, intercept {:.3}", fit.slope, fit.intercept);
}
