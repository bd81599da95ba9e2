//! Manual probe: run the headline tight-gap case and print the outcome.

use driver_model::scenario::{max_speed_sweep, run, scenario_tight_gap, Controller};

fn main() {
    for &(gap, dx, speed) in &[
        (0.2, 50.0, 110.0),
        (0.2, 50.0, 150.0),
        (0.4, 30.0, 80.0),
        (0.9, 60.0, 170.0),
        (0.2, 50.0, 70.0),
    ] {
        let sc = scenario_tight_gap(gap, dx, speed).unwrap();
        let trace = run(&sc, &Controller::Ideal).unwrap();
        let peak_d = trace.peak_demand();
        let peak_c = trace.peak_capability();
        let min_s = trace.min_separation();
        let max_wheel = trace
            .rows
            .iter()
            .map(|r| r.wheel_deg.abs())
            .fold(0.0, f64::max);
        println!(
            "gap={gap} dx={dx} v={speed}: collided={} peakD={:.2} peakC={:.2} minSep={:?} maxWheel={:.1} rows={}",
            trace.collided, peak_d, peak_c, min_s, max_wheel, trace.rows.len()
        );
    }

    let t0 = std::time::Instant::now();
    let grid = max_speed_sweep(
        &[0.2, 0.4, 0.6, 0.9],
        &[20.0, 30.0, 40.0, 50.0, 60.0],
        5.0,
        20.0,
        200.0,
        None,
    )
    .unwrap();
    println!("sweep in {:.1}s, monotone={}", t0.elapsed().as_secs_f64(), grid.is_monotone());
    println!("      dx:   20    30    40    50    60");
    for (i, gap) in grid.gaps_m.iter().enumerate() {
        let row: Vec<String> = grid.cells[i]
            .iter()
            .map(|c| match c {
                Some(v) => format!("{v:5.0}"),
                None => "    -".to_string(),
            })
            .collect();
        println!("gap {:4.2}: {}", gap, row.join(" "));
    }
    println!("paper:");
    println!("gap 0.20:    45    75    95   110   125");
    println!("gap 0.40:    50    80   100   125   145");
    println!("gap 0.60:    60    85   105   130   155");
    println!("gap 0.90:    70    90   115   140   170");
}
