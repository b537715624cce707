//! Prices a two-rider trip and asks two drivers whether they would take it.

use ridepool::model::{
    driver_economics, fare, synthesize_trip, EconomicParams, GeoPoint, Request, RequestId, Vehicle, VehicleId,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = EconomicParams::default();
    let ann = Request::new(RequestId(1), GeoPoint::new(0.0, 0.0), GeoPoint::new(2400.0, 900.0), 0.0, 900.0)?;
    let bo = Request::new(RequestId(2), GeoPoint::new(60.0, 40.0), GeoPoint::new(2350.0, 980.0), 45.0, 900.0)?;

    let plan = synthesize_trip(&[&ann, &bo], &p)?;
    println!(
        "meet ({:.0}, {:.0}) -> drop ({:.0}, {:.0}), leaves at t={:.0}s, arrives t={:.0}s",
        plan.meet_point.x, plan.meet_point.y, plan.drop_point.x, plan.drop_point.y, plan.depart, plan.arrive
    );
    for (m, r) in plan.pricing.iter().zip([&ann, &bo]) {
        println!(
            "{}: solo fare {:.2}, pays {:.2}, gains {:.2}, loses {:.2}",
            m.request,
            fare(r, &p),
            m.pay,
            m.gain,
            m.loss
        );
    }
    println!("riders accept: {}", plan.passenger_feasible(&p));

    for v in [
        Vehicle::new(VehicleId(0), GeoPoint::new(500.0, -300.0)),
        Vehicle::new(VehicleId(1), GeoPoint::new(-1500.0, 900.0)),
    ] {
        let d = driver_economics(&v, &plan, &p);
        println!(
            "{}: pickup {:.0} m, revenue {:.2} vs reserve {:.2}, willing {}",
            v.id, d.pickup_dist, d.revenue, d.reserve, d.willing
        );
    }
    Ok(())
}
