//! Manual probe: fine scan of tight-gap knobs scored against all grid gates.

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
    for &(stiff, inertia) in &[(2.0e5, 2200.0), (2.0e5, 2000.0), (2.2e5, 2200.0), (2.2e5, 2000.0), (2.4e5, 2200.0), (2.4e5, 2000.0)] {
        let mut params = VehicleParams::default();
        params.cornering_stiffness_front = stiff;
        params.cornering_stiffness_rear = stiff;
        params.yaw_inertia = inertia;
        println!("=== C={stiff} J={inertia} ===");
        for &margin in &[1.25, 1.3, 1.35] {
            for &completion in &[0.875, 0.88] {
            let mut grid = [[None; 5]; 4];
            for (i, &gap) in GAPS.iter().enumerate() {
                for (j, &dx) in DXS.iter().enumerate() {
                    grid[i][j] = cell_max(gap, dx, margin, completion, params);
                }
            }
            let mut within = 0;
            let mut nones = 0;
            for i in 0..4 {
                for j in 0..5 {
                    match grid[i][j] {
                        Some(v) if (v - TARGET[i][j]).abs() <= 25.0 => within += 1,
                        None => nones += 1,
                        _ => {}
                    }
                }
            }
            let at = |i: usize, j: usize| grid[i][j].unwrap_or(0.0);
            let mut monotone = true;
            for i in 0..4 {
                for j in 0..5 {
                    if i + 1 < 4 && at(i + 1, j) < at(i, j) {
                        monotone = false;
                    }
                    if j + 1 < 5 && at(i, j + 1) < at(i, j) {
                        monotone = false;
                    }
                }
            }
            let anchor_a = at(1, 1);
            let anchor_b = at(3, 4);
            let sc = scenario_tight_gap_with(0.2, 50.0, 110.0, margin, completion, params).unwrap();
            let tr = run(&sc, &Controller::Ideal).unwrap();
            let head_ok = !tr.collided;
            let head_d = tr.peak_demand();
            let pass = monotone
                && within >= 15
                && nones == 0
                && (anchor_a - 80.0).abs() <= 25.0
                && (anchor_b - 170.0).abs() <= 25.0
                && head_ok
                && (4.0..=8.0).contains(&head_d);
            println!(
                "m={margin:.2} c={completion:.2}: within={within:2} nones={nones} mono={monotone} a={anchor_a:3.0} b={anchor_b:3.0} head=({head_ok},{head_d:.2}) PASS={pass}"
            );
            if pass {
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
