//! Manual probe: detailed per-pair evaluation at chosen ticks of a tight-gap run.

use driver_model::geometry::candidate_pairs_box;
use driver_model::kinematics::relative_state;
use driver_model::motivation::{capability, demand};
use driver_model::plant::{self};
use driver_model::scenario::{scenario_tight_gap, Controller, SUBSTEPS_PER_TICK};
use driver_model::steering::{control_step, MovingObstacle, WorldSnapshot};

fn main() {
    let sc = scenario_tight_gap(0.4, 30.0, 60.0).unwrap();
    let params = &sc.params;
    let ts = sc.control_period;
    let mut state = sc.ego_start;
    let _ = Controller::Ideal;

    for k in 0..20usize {
        let t = k as f64 * ts;
        let (shape, kin) = sc.obstacles[0].sample(t);
        let ego = plant::body_kinematics(&state, state.steering, params).unwrap();
        let ego_box = params.footprint(ego.position, ego.yaw);

        if k == 12 || k == 16 {
            println!("--- tick {k} t={t:.3} ---");
            println!("ego acc={:?} yawacc={:.4}", ego.acceleration, ego.yaw_accel);
            println!("obs acc={:?} vel={:?}", kin.acceleration, kin.velocity);
            let v_rel = kin.velocity - ego.velocity;
            for pair in candidate_pairs_box(&ego_box, &shape, v_rel) {
                let rel = relative_state(&ego, pair.vehicle_local, &kin, pair.obstacle_local);
                let d = demand(&rel).unwrap();
                let c = capability(&rel, d);
                println!(
                    "  vp=({:6.2},{:6.2}) oc=({:6.2},{:6.2}) s={:6.3} D={:7.3} C={:7.3} r={:?} rdot={:?} rddot={:?}",
                    pair.vehicle_local.x,
                    pair.vehicle_local.y,
                    pair.obstacle_local.x,
                    pair.obstacle_local.y,
                    rel.r.norm(),
                    d,
                    c,
                    rel.r,
                    rel.r_dot,
                    rel.r_ddot
                );
            }
        }

        let snapshot = WorldSnapshot {
            ego,
            obstacles: vec![MovingObstacle {
                id: 0,
                shape,
                kinematics: kin,
            }],
            road_edges: sc.road_edges.iter().map(|e| (1, e)).collect(),
        };
        let decision = control_step(&snapshot, params, state.steering).unwrap();
        for _ in 0..SUBSTEPS_PER_TICK {
            state = plant::integrate(&state, decision.new_steering, ts / SUBSTEPS_PER_TICK as f64, params).unwrap();
        }
    }
}
