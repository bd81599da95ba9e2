//! Manual probe: scan tight-gap construction knobs against the target grid.

use driver_model::scenario::{run, scenario_tight_gap_with, Controller};
use driver_model::steering::VehicleParams;

const TARGET: [[f64; 5]; 4] = [
    [45.0, 75.0, 95.0, 110.0, 125.0],
    [50.0, 80.0, 100.0, 125.0, 145.0],
    [60.0, 85.0, 105.0, 130.0, 155.0],
    [70.0, 90.0, 115.0, 140.0, 170.0],
];
const GAPS: [f64; 4] = [0.2, 0.4, 0.6, 0.9];
const DXS: [f64; 5] = [20.0, 30.0, 40.0, 50.0, 60.0];

fn cell_max(gap: f64, dx: f64, margin: f64, completion: f64, params: VehicleParams) -> Option<f64> {
    let mut best = None;
    let mut speed = 20.0;
    while speed <= 200.0 {
        let sc = scenario_tight_gap_with(gap, dx, speed, margin, completion, params).unwrap();
        let tr = run(&sc, &Controller::Ideal).unwrap();
        if tr.collided {
            break;
        }
        best = Some(speed);
        speed += 5.0;
    }
    best
}

fn main() {
    for &stiff in &[2.0e5] {
        for &inertia in &[2200.0] {
            for &margin in &[1.2, 1.5, 1.8] {
                for &completion in &[0.88, 0.90, 0.92] {
                    let mut params = VehicleParams::default();
                    params.cornering_stiffness_front = stiff;
                    params.cornering_stiffness_rear = stiff;
                    params.yaw_inertia = inertia;
                    let mut grid = [[None; 5]; 4];
                    for (i, &gap) in GAPS.iter().enumerate() {
                        for (j, &dx) in DXS.iter().enumerate() {
                            grid[i][j] = cell_max(gap, dx, margin, completion, params);
                        }
                    }
                    let mut within = 0;
                    for i in 0..4 {
                        for j in 0..5 {
                            if let Some(v) = grid[i][j] {
                                if (v - TARGET[i][j]).abs() <= 25.0 {
                                    within += 1;
                                }
                            }
                        }
                    }
                    let anchor_a = grid[1][1]; // (0.4, 30) → 80
                    let anchor_b = grid[3][4]; // (0.9, 60) → 170
                    let headline = {
                        let sc =
                            scenario_tight_gap_with(0.2, 50.0, 110.0, margin, completion, params)
                                .unwrap();
                        let tr = run(&sc, &Controller::Ideal).unwrap();
                        (!tr.collided, tr.peak_demand())
                    };
                    println!(
                        "C={stiff:9.0} J={inertia} m={margin:.1} c={completion:.2}: within25={within:2}/20 a(80)={:?} b(170)={:?} headline={:?}",
                        anchor_a, anchor_b, headline
                    );
                    for i in 0..4 {
                        let row: Vec<String> = (0..5)
                            .map(|j| match grid[i][j] {
                                Some(v) => format!("{v:4.0}"),
                                None => "   -".into(),
                            })
                            .collect();
                        println!("    gap {:4.2}: {}", GAPS[i], row.join(" "));
                    }
                }
            }
        }
    }
}
