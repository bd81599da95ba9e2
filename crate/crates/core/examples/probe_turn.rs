use driver_model::scenario::{run, scenario_turn_90, Controller};
fn main() {
    let sc = scenario_turn_90();
    let tr = run(&sc, &Controller::Ideal).unwrap();
    println!("collided={} rows={}", tr.collided, tr.rows.len());
    for (k, row) in tr.rows.iter().enumerate() {
        if k % 2 != 0 { continue; }
        let mut inner = (0.0, 0.0, 0.0);
        let mut outer = (0.0, 0.0, 0.0);
        for o in &row.per_obstacle {
            let s = (o.signals.demand, o.signals.difficulty, o.delta);
            if o.id == 0 { inner = s; } else { outer = s; }
        }
        println!(
            "t={:6.3} x={:8.2} y={:7.3} psi={:8.4} d={:8.4} | in D={:6.3} TD={:6.3} dd={:8.5} | out D={:6.3} TD={:6.3} dd={:8.5}",
            row.t, row.state.position.x, row.state.position.y, row.state.yaw, row.state.steering,
            inner.0, inner.1, inner.2, outer.0, outer.1, outer.2
        );
    }
}
