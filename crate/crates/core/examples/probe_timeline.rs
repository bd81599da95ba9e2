//! Manual probe: tick-by-tick timeline of one tight-gap run.

use driver_model::scenario::{run, scenario_tight_gap, Controller};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let gap: f64 = args.get(1).map_or(0.4, |s| s.parse().unwrap());
    let dx: f64 = args.get(2).map_or(30.0, |s| s.parse().unwrap());
    let speed: f64 = args.get(3).map_or(60.0, |s| s.parse().unwrap());

    let sc = scenario_tight_gap(gap, dx, speed).unwrap();
    let trace = run(&sc, &Controller::Ideal).unwrap();
    println!("collided={} rows={}", trace.collided, trace.rows.len());
    println!(
        "{:>6} {:>8} {:>8} {:>8} {:>9} | {:>7} {:>7} {:>7} {:>9} | {:>7} {:>7} {:>7} {:>9} | {:>8}",
        "t", "y", "psi", "ydot_b", "delta", "D_obs", "C_obs", "TD_obs", "dd_obs", "D_road",
        "C_road", "TD_road", "dd_road", "minsep"
    );
    for row in &trace.rows {
        let mut obs = (0.0, 0.0, 0.0, 0.0);
        let mut road = (0.0, 0.0, 0.0, 0.0);
        for o in &row.per_obstacle {
            let sig = (o.signals.demand, o.signals.capability, o.signals.difficulty, o.delta);
            if o.id == 0 {
                obs = sig;
            } else {
                road = sig;
            }
        }
        println!(
            "{:6.3} {:8.3} {:8.4} {:8.3} {:9.4} | {:7.2} {:7.2} {:7.2} {:9.4} | {:7.2} {:7.2} {:7.2} {:9.4} | {:8.3}",
            row.t,
            row.state.position.y,
            row.state.yaw,
            row.state.body_vel.y,
            row.state.steering,
            obs.0, obs.1, obs.2, obs.3,
            road.0, road.1, road.2, road.3,
            row.min_separation.unwrap_or(f64::NAN)
        );
    }
}
