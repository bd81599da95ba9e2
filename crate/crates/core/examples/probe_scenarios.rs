//! Manual probe: multi-obstacle and 90-degree-turn runs plus slip-angle checks.

use driver_model::scenario::{
    run, scenario_multi_obstacle, scenario_tight_gap, scenario_turn_90, Controller,
};
use driver_model::steering::front_slip_angle;

fn main() {
    let sc = scenario_multi_obstacle();
    let tr = run(&sc, &Controller::Ideal).unwrap();
    println!(
        "multi-obstacle: collided={} rows={} peakD={:.2} minSep={:?}",
        tr.collided,
        tr.rows.len(),
        tr.peak_demand(),
        tr.min_separation()
    );

    let sc = scenario_turn_90();
    let tr = run(&sc, &Controller::Ideal).unwrap();
    let max_wheel = tr.rows.iter().map(|r| r.wheel_deg.abs()).fold(0.0, f64::max);
    println!(
        "turn-90: collided={} rows={} peakD={:.2} maxWheel={:.1} minSep={:?}",
        tr.collided,
        tr.rows.len(),
        tr.peak_demand(),
        max_wheel,
        tr.min_separation()
    );

    // peak front slip angle in the headline runs at 110 and 70 km/h
    for &speed in &[110.0, 70.0] {
        let sc = scenario_tight_gap(0.2, 50.0, speed).unwrap();
        let tr = run(&sc, &Controller::Ideal).unwrap();
        let peak_slip_deg = tr
            .rows
            .iter()
            .map(|r| {
                front_slip_angle(&r.state, &sc.params)
                    .map(|b| (b - r.state.steering).abs())
                    .unwrap_or(0.0)
            })
            .fold(0.0, f64::max)
            * 180.0
            / std::f64::consts::PI;
        println!(
            "tight-gap @{speed}: collided={} peakSlip={:.2} deg peakD={:.2}",
            tr.collided, peak_slip_deg, tr.peak_demand()
        );
    }
}
