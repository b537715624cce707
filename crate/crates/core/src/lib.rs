//! Ride pooling: group compatible riders and match vehicles to shared trips.
//!
//! Two solvers share one economic model. [`flownet`] pushes flow from
//! vehicles through stable rider groups and runs in polynomial time;
//! [`bnb`] searches the vehicle-trip graph built by [`vtg`] for an exact
//! optimum. [`oracle`] holds brute-force references for testing both, and
//! [`io`] covers ingestion, generation, configuration and reports.

pub mod bnb;
pub mod flownet;
pub mod grouping;
pub mod io;
pub mod model;
pub mod oracle;
pub mod vtg;
