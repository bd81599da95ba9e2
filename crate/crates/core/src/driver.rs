//! Parameterized human driver model and identification.
//!
//! Three parameters separate a human trace from the ideal model: a
//! sensitivity gain scaling the reaction to difficulty, a minimum noticeable
//! difficulty below which the driver does not react, and a maximum steering
//! rate capping each tick's change. Identification replays the steering
//! gain and difficulty along the recorded trajectory, drops saturated and
//! uninformative rows, and solves a two-parameter least squares through the
//! normal equations.

use serde::{Deserialize, Serialize};

use crate::error::{IdentError, ModelError};
use crate::motivation::MotivationSignals;
use crate::plant::{self, VehicleState};
use crate::scenario::{Scenario, SimTrace};
use crate::steering::{evaluate_obstacles, MovingObstacle, ObstacleEvaluation, WorldSnapshot};
use crate::vec2::Vec2;

/// Normal matrices above this condition number are treated as degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// The three human driver parameters, in tire-angle units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverParams {
    /// Sensitivity gain toward task difficulty (1 matches the ideal model).
    pub k_sen: f64,
    /// Minimum noticeable difficulty threshold, s⁻¹.
    pub td_min: f64,
    /// Maximum steering rate, rad/s of tire angle.
    pub max_steer_rate: f64,
}

impl DriverParams {
    pub fn new(k_sen: f64, td_min: f64, max_steer_rate: f64) -> Result<Self, ModelError> {
        if !(k_sen > 0.0) {
            return Err(ModelError::Configuration(format!(
                "sensitivity gain must be positive, got {k_sen}"
            )));
        }
        if !(td_min >= 0.0) {
            return Err(ModelError::Configuration(format!(
                "difficulty threshold must be nonnegative, got {td_min}"
            )));
        }
        if !(max_steer_rate > 0.0) {
            return Err(ModelError::Configuration(format!(
                "maximum steering rate must be positive, got {max_steer_rate}"
            )));
        }
        Ok(DriverParams {
            k_sen,
            td_min,
            max_steer_rate,
        })
    }

    /// Unit gain, zero threshold, unbounded rate: identical to the ideal model.
    pub fn ideal_limit() -> Self {
        DriverParams {
            k_sen: 1.0,
            td_min: 0.0,
            max_steer_rate: f64::INFINITY,
        }
    }
}

/// Parameterized steering change: threshold, gain, then rate cap.
pub fn parametric_delta(k_s: f64, td: f64, params: &DriverParams, t_s: f64) -> f64 {
    if td <= params.td_min {
        return 0.0;
    }
    let raw = params.k_sen * k_s * (td - params.td_min);
    let cap = params.max_steer_rate * t_s;
    raw.clamp(-cap, cap)
}

/// One row of a recorded driving trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverTraceRow {
    pub t: f64,
    pub position: Vec2,
    pub yaw: f64,
    /// Body-frame (longitudinal, lateral) velocity, m/s.
    pub body_vel: Vec2,
    pub yaw_rate: f64,
    /// Tire steering angle, rad.
    pub steer_tire: f64,
    /// Steering wheel angle, deg; what a rig logs.
    pub steer_wheel_deg: f64,
}

/// A uniformly sampled driving trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverTrace {
    pub period: f64,
    pub rows: Vec<DriverTraceRow>,
}

impl DriverTrace {
    pub fn from_rows(rows: Vec<DriverTraceRow>) -> Result<Self, IdentError> {
        if rows.len() < 2 {
            return Err(IdentError::TooFewRows(rows.len(), 2));
        }
        let period = rows[1].t - rows[0].t;
        if !(period > 0.0) {
            return Err(IdentError::NonUniformSampling(1));
        }
        for (i, w) in rows.windows(2).enumerate() {
            let dt = w[1].t - w[0].t;
            if (dt - period).abs() > 1e-6 * period {
                return Err(IdentError::NonUniformSampling(i + 1));
            }
        }
        Ok(DriverTrace { period, rows })
    }

    /// View a simulation log as a driver trace.
    pub fn from_sim(trace: &SimTrace) -> Result<Self, IdentError> {
        let rows = trace
            .rows
            .iter()
            .map(|r| DriverTraceRow {
                t: r.t,
                position: r.state.position,
                yaw: r.state.yaw,
                body_vel: r.state.body_vel,
                yaw_rate: r.state.yaw_rate,
                steer_tire: r.state.steering,
                steer_wheel_deg: r.wheel_deg,
            })
            .collect();
        DriverTrace::from_rows(rows)
    }

    /// Tire-angle first differences Δδ_d between consecutive rows.
    pub fn steering_differences(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].steer_tire - w[0].steer_tire)
            .collect()
    }
}

/// Maximum absolute measured steering rate, rad/s tire angle.
pub fn max_steering_rate(trace: &DriverTrace) -> Result<f64, IdentError> {
    if trace.rows.len() < 2 {
        return Err(IdentError::TooFewRows(trace.rows.len(), 2));
    }
    Ok(trace
        .steering_differences()
        .iter()
        .map(|d| d.abs() / trace.period)
        .fold(0.0, f64::max))
}

/// Controller-side signals recomputed along a recorded trajectory.
#[derive(Debug, Clone)]
pub struct ReplayRow {
    pub t: f64,
    pub evaluations: Vec<ObstacleEvaluation>,
    pub off_track: bool,
    /// False when the row cannot be evaluated (off track or standstill).
    pub usable: bool,
}

impl ReplayRow {
    /// Signals of the most demanding obstacle.
    pub fn governing_signals(&self) -> MotivationSignals {
        self.evaluations
            .iter()
            .map(|e| e.signals)
            .max_by(|a, b| a.demand.total_cmp(&b.demand))
            .unwrap_or_else(MotivationSignals::quiet)
    }

    /// The single obstacle with positive difficulty, when exactly one is
    /// active; rows with mixed left/right difficulty cannot be attributed to
    /// one gain and are skipped by extraction.
    pub fn lone_active(&self) -> Option<&ObstacleEvaluation> {
        let mut active = self
            .evaluations
            .iter()
            .filter(|e| e.signals.difficulty > 0.0);
        match (active.next(), active.next()) {
            (Some(e), None) => Some(e),
            _ => None,
        }
    }
}

/// Re-evaluate collision geometry, motivation, and steering gain at every
/// recorded row against the scenario's obstacles and road edges. The plant
/// model supplies the accelerations at the recorded state and steering, so a
/// replayed synthetic trace reproduces the in-loop signals exactly.
pub fn model_replay(trace: &DriverTrace, scenario: &Scenario) -> Result<Vec<ReplayRow>, IdentError> {
    let params = &scenario.params;
    let mut out = Vec::with_capacity(trace.rows.len());
    for row in &trace.rows {
        let off_track = scenario
            .track_region
            .map_or(false, |region| !region.contains(row.position));
        if off_track {
            out.push(ReplayRow {
                t: row.t,
                evaluations: Vec::new(),
                off_track: true,
                usable: false,
            });
            continue;
        }
        let state = VehicleState {
            position: row.position,
            yaw: row.yaw,
            body_vel: row.body_vel,
            yaw_rate: row.yaw_rate,
            steering: row.steer_tire,
        };
        let ego = match plant::body_kinematics(&state, row.steer_tire, params) {
            Ok(k) => k,
            Err(ModelError::Standstill(_)) => {
                out.push(ReplayRow {
                    t: row.t,
                    evaluations: Vec::new(),
                    off_track: false,
                    usable: false,
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let snapshot = WorldSnapshot {
            ego,
            obstacles: scenario
                .obstacles
                .iter()
                .map(|o| {
                    let (shape, kinematics) = o.sample(row.t);
                    MovingObstacle {
                        id: o.id,
                        shape,
                        kinematics,
                    }
                })
                .collect(),
            road_edges: scenario
                .road_edges
                .iter()
                .enumerate()
                .map(|(i, e)| (scenario.obstacles.len() + i, e))
                .collect(),
        };
        let evaluations = match evaluate_obstacles(&snapshot, params, row.steer_tire) {
            Ok(evals) => evals,
            Err(ModelError::Contact(_)) => {
                out.push(ReplayRow {
                    t: row.t,
                    evaluations: Vec::new(),
                    off_track: false,
                    usable: false,
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        out.push(ReplayRow {
            t: row.t,
            evaluations,
            off_track: false,
            usable: true,
        });
    }
    Ok(out)
}

/// One regression sample: measured steering change with the replayed gain
/// and difficulty that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Measured tire-angle change, rad.
    pub delta: f64,
    pub k_s: f64,
    pub td: f64,
}

/// Pick the regression samples: unsaturated (strictly below the rate cap),
/// nonzero, with exactly one active difficulty and a nondegenerate gain.
pub fn extract_samples(
    trace: &DriverTrace,
    replay: &[ReplayRow],
    max_rate: f64,
    t_s: f64,
) -> Result<Vec<Sample>, IdentError> {
    let diffs = trace.steering_differences();
    let cap = max_rate * t_s;
    let mut samples = Vec::new();
    for (k, &delta) in diffs.iter().enumerate() {
        let Some(row) = replay.get(k) else { break };
        if !row.usable {
            continue;
        }
        if !(delta.abs() < cap) || delta == 0.0 {
            continue;
        }
        let Some(active) = row.lone_active() else {
            continue;
        };
        let Some(k_s) = active.k_s else { continue };
        samples.push(Sample {
            delta,
            k_s,
            td: active.signals.difficulty,
        });
    }
    if samples.len() < 3 {
        return Err(IdentError::InsufficientData(samples.len()));
    }
    Ok(samples)
}

/// Two-parameter least squares Δδ* = K_s·TD·θ₁ − K_s·θ₂ with
/// θ = (K_sen, K_sen·TD_min), solved through the 2×2 normal equations with a
/// condition-number guard.
pub fn estimate_params(samples: &[Sample]) -> Result<(f64, f64), IdentError> {
    if samples.len() < 3 {
        return Err(IdentError::InsufficientData(samples.len()));
    }
    let (mut m11, mut m12, mut m22, mut v1, mut v2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let p1 = s.k_s * s.td;
        let p2 = -s.k_s;
        m11 += p1 * p1;
        m12 += p1 * p2;
        m22 += p2 * p2;
        v1 += p1 * s.delta;
        v2 += p2 * s.delta;
    }
    // eigenvalues of the symmetric normal matrix
    let tr = m11 + m22;
    let disc = ((m11 - m22).powi(2) + 4.0 * m12 * m12).sqrt();
    let lam_max = (tr + disc) / 2.0;
    let lam_min = (tr - disc) / 2.0;
    if !(lam_min > 0.0) || lam_max / lam_min > CONDITION_LIMIT {
        return Err(IdentError::DegenerateData(if lam_min > 0.0 {
            lam_max / lam_min
        } else {
            f64::INFINITY
        }));
    }
    let det = m11 * m22 - m12 * m12;
    let theta1 = (v1 * m22 - v2 * m12) / det;
    let theta2 = (m11 * v2 - m12 * v1) / det;
    if theta1.abs() < 1e-12 {
        return Err(IdentError::ZeroSensitivity);
    }
    Ok((theta1, theta2 / theta1))
}

/// Identification outcome with row-level diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Identification {
    pub params: DriverParams,
    pub total_rows: usize,
    pub off_track_rows: usize,
    pub used_samples: usize,
}

/// Full pipeline: measured rate, replayed signals, sample extraction, and
/// the least-squares estimate.
pub fn identify(trace: &DriverTrace, scenario: &Scenario) -> Result<Identification, IdentError> {
    let rate = max_steering_rate(trace)?;
    if rate == 0.0 {
        // constant steering: no reaction to estimate from
        return Err(IdentError::ZeroSensitivity);
    }
    let replay = model_replay(trace, scenario)?;
    let off_track_rows = replay.iter().filter(|r| r.off_track).count();
    if off_track_rows * 2 > replay.len() {
        return Err(IdentError::OffTrack(off_track_rows, replay.len()));
    }
    let samples = extract_samples(trace, &replay, rate, trace.period)?;
    let (k_sen, td_min) = estimate_params(&samples)?;
    let params = DriverParams::new(k_sen, td_min.max(0.0), rate)
        .map_err(|_| IdentError::ZeroSensitivity)?;
    Ok(Identification {
        params,
        total_rows: trace.rows.len(),
        off_track_rows,
        used_samples: samples.len(),
    })
}

/// Fit statistics between a human and a model steering-wheel series (deg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub mean_abs_error_deg: f64,
    pub std_error_deg: f64,
    /// Mean absolute error over the human trace's peak wheel angle, percent.
    pub normalized_mean_error_pct: f64,
    pub std_normalized_pct: f64,
    pub correlation: f64,
}

/// Compare two aligned steering-wheel angle series.
pub fn fit_report(human_wheel_deg: &[f64], model_wheel_deg: &[f64]) -> Result<FitReport, IdentError> {
    if human_wheel_deg.len() != model_wheel_deg.len() {
        return Err(IdentError::LengthMismatch(
            human_wheel_deg.len(),
            model_wheel_deg.len(),
        ));
    }
    if human_wheel_deg.is_empty() {
        return Err(IdentError::TooFewRows(0, 1));
    }
    let n = human_wheel_deg.len() as f64;
    let errors: Vec<f64> = human_wheel_deg
        .iter()
        .zip(model_wheel_deg)
        .map(|(h, m)| h - m)
        .collect();
    let mean_abs = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    let mean_err = errors.iter().sum::<f64>() / n;
    let std_err = (errors.iter().map(|e| (e - mean_err).powi(2)).sum::<f64>() / n).sqrt();
    let peak = human_wheel_deg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (norm_mean, norm_std) = if peak > 1e-12 {
        (100.0 * mean_abs / peak, 100.0 * std_err / peak)
    } else {
        (0.0, 0.0)
    };

    let mean_h = human_wheel_deg.iter().sum::<f64>() / n;
    let mean_m = model_wheel_deg.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_h = 0.0;
    let mut var_m = 0.0;
    for (h, m) in human_wheel_deg.iter().zip(model_wheel_deg) {
        cov += (h - mean_h) * (m - mean_m);
        var_h += (h - mean_h).powi(2);
        var_m += (m - mean_m).powi(2);
    }
    // identical series correlate perfectly; flat series carry no shape
    let correlation = if mean_abs == 0.0 {
        1.0
    } else if var_h <= 1e-18 || var_m <= 1e-18 {
        0.0
    } else {
        (cov / (var_h.sqrt() * var_m.sqrt())).clamp(-1.0, 1.0)
    };

    Ok(FitReport {
        mean_abs_error_deg: mean_abs,
        std_error_deg: std_err,
        normalized_mean_error_pct: norm_mean,
        std_normalized_pct: norm_std,
        correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from_steering(period: f64, tire: &[f64]) -> DriverTrace {
        let rows = tire
            .iter()
            .enumerate()
            .map(|(k, &s)| DriverTraceRow {
                t: k as f64 * period,
                position: Vec2::new(k as f64, 0.0),
                yaw: 0.0,
                body_vel: Vec2::new(16.7, 0.0),
                yaw_rate: 0.0,
                steer_tire: s,
                steer_wheel_deg: s * 16.0 * 180.0 / std::f64::consts::PI,
            })
            .collect();
        DriverTrace::from_rows(rows).unwrap()
    }

    #[test]
    fn max_rate_from_differences() {
        let ts = 0.5;
        // per-tick changes 1, 3, -4 deg over 0.5 s → 8 deg/s peak
        let degs = [0.0, 1.0, 4.0, 0.0];
        let tire: Vec<f64> = degs.iter().map(|d| d * std::f64::consts::PI / 180.0).collect();
        let trace = trace_from_steering(ts, &tire);
        let rate = max_steering_rate(&trace).unwrap();
        assert!((rate - 8.0f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn constant_steering_rate_is_zero() {
        let trace = trace_from_steering(0.1, &[0.2, 0.2, 0.2]);
        assert_eq!(max_steering_rate(&trace).unwrap(), 0.0);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let rows = vec![DriverTraceRow {
            t: 0.0,
            position: Vec2::ZERO,
            yaw: 0.0,
            body_vel: Vec2::new(10.0, 0.0),
            yaw_rate: 0.0,
            steer_tire: 0.0,
            steer_wheel_deg: 0.0,
        }];
        assert!(matches!(
            DriverTrace::from_rows(rows),
            Err(IdentError::TooFewRows(1, 2))
        ));
    }

    #[test]
    fn parametric_delta_branches() {
        let p = DriverParams::new(0.9, 0.5, 2.0).unwrap();
        let ts = 1.0 / 24.0;
        assert_eq!(parametric_delta(0.5, 0.4, &p, ts), 0.0); // below threshold
        assert_eq!(parametric_delta(0.5, 0.5, &p, ts), 0.0); // at threshold
        let unc = parametric_delta(0.5, 0.6, &p, ts);
        assert!((unc - 0.9 * 0.5 * 0.1).abs() < 1e-15);
        // raw 0.1 rad against a 0.05 rad cap
        let p2 = DriverParams::new(1.0, 0.0, 0.1).unwrap();
        let capped = parametric_delta(1.0, 0.1, &p2, 0.5);
        assert_eq!(capped, 0.05);
        let capped_neg = parametric_delta(-1.0, 0.1, &p2, 0.5);
        assert_eq!(capped_neg, -0.05);
    }

    #[test]
    fn ideal_limit_reproduces_ideal_law() {
        let p = DriverParams::ideal_limit();
        for &(k_s, td) in &[(0.3, 1.7), (-0.2, 0.4), (0.9, 0.0)] {
            let d = parametric_delta(k_s, td, &p, 1.0 / 24.0);
            assert_eq!(d, crate::steering::per_obstacle_delta(k_s, td));
        }
    }

    #[test]
    fn saturation_boundary_is_strict() {
        // dyadic steps keep the first differences exact, so a row at exactly
        // the cap is distinguishable from one just below it
        let ts = 1.0 / 32.0;
        let cap = 1.0 / 128.0;
        let rate_tire = cap / ts;
        let deltas = [cap * 0.5, cap, cap * 0.75, -cap * 2.0, cap * 0.25];
        let mut tire = vec![0.0];
        for d in deltas {
            tire.push(tire.last().unwrap() + d);
        }
        let trace = trace_from_steering(ts, &tire);
        let replay: Vec<ReplayRow> = (0..trace.rows.len())
            .map(|k| ReplayRow {
                t: k as f64 * ts,
                evaluations: vec![ObstacleEvaluation {
                    id: 0,
                    signals: MotivationSignals {
                        demand: 1.0,
                        capability: 0.3,
                        difficulty: 0.7,
                        ttc: Some(1.0),
                        tta: None,
                    },
                    k_s: Some(0.2),
                    pair: None,
                    min_separation: Some(3.0),
                    degenerate: false,
                }],
                off_track: false,
                usable: true,
            })
            .collect();
        let samples = extract_samples(&trace, &replay, rate_tire, ts).unwrap();
        // rows 1 (exactly cap) and 3 (beyond cap) are dropped
        assert_eq!(samples.len(), 3);
    }

    #[test]
    fn estimate_recovers_exact_parameters() {
        let k_sen = 0.92;
        let td_min = 0.05;
        // spread of gains and difficulties above the threshold
        let mut samples = Vec::new();
        for i in 0..40 {
            let k_s = 0.05 + 0.01 * (i % 7) as f64;
            let td = td_min + 0.002 + 0.0015 * i as f64;
            samples.push(Sample {
                delta: k_sen * k_s * (td - td_min),
                k_s,
                td,
            });
        }
        let (k, t) = estimate_params(&samples).unwrap();
        assert!((k - k_sen).abs() / k_sen < 1e-9, "k_sen {k}");
        assert!((t - td_min).abs() / td_min < 1e-6, "td_min {t}");
    }

    #[test]
    fn constant_difficulty_is_degenerate() {
        let samples: Vec<Sample> = (0..10)
            .map(|i| Sample {
                delta: 0.001 * i as f64,
                k_s: 0.1 + 0.01 * i as f64,
                td: 0.8,
            })
            .collect();
        // φ columns are proportional: rank deficient
        assert!(matches!(
            estimate_params(&samples),
            Err(IdentError::DegenerateData(_))
        ));
    }

    #[test]
    fn normal_equations_match_explicit_pseudo_inverse() {
        let samples: Vec<Sample> = (0..25)
            .map(|i| {
                let k_s = 0.08 + 0.012 * (i % 5) as f64;
                let td = 0.1 + 0.03 * i as f64;
                Sample {
                    delta: 0.7 * k_s * (td - 0.04) + 1e-5 * ((i * 7 % 11) as f64 - 5.0),
                    k_s,
                    td,
                }
            })
            .collect();
        let (k1, t1) = estimate_params(&samples).unwrap();

        // explicit pinv(φ)·y = (φᵀφ)⁻¹ φᵀ y applied row by row
        let (mut m11, mut m12, mut m22) = (0.0, 0.0, 0.0);
        for s in &samples {
            let (p1, p2) = (s.k_s * s.td, -s.k_s);
            m11 += p1 * p1;
            m12 += p1 * p2;
            m22 += p2 * p2;
        }
        let det = m11 * m22 - m12 * m12;
        let (i11, i12, i22) = (m22 / det, -m12 / det, m11 / det);
        let mut theta = (0.0, 0.0);
        for s in &samples {
            let (p1, p2) = (s.k_s * s.td, -s.k_s);
            let g1 = i11 * p1 + i12 * p2;
            let g2 = i12 * p1 + i22 * p2;
            theta.0 += g1 * s.delta;
            theta.1 += g2 * s.delta;
        }
        let (k2, t2) = (theta.0, theta.1 / theta.0);
        assert!((k1 - k2).abs() <= 1e-10 * k2.abs());
        assert!((t1 - t2).abs() <= 1e-10 * t2.abs().max(1e-6));
    }

    #[test]
    fn adding_saturated_rows_changes_nothing() {
        let ts = 1.0 / 24.0;
        let rate = 1.5;
        let cap = rate * ts;
        let eval = |k_s: f64, td: f64| ObstacleEvaluation {
            id: 0,
            signals: MotivationSignals {
                demand: td + 0.2,
                capability: 0.2,
                difficulty: td,
                ttc: Some(1.0 / (td + 0.2)),
                tta: Some(5.0),
            },
            k_s: Some(k_s),
            pair: None,
            min_separation: Some(2.0),
            degenerate: false,
        };
        let build = |extra_saturated: bool| {
            let mut tire = vec![0.0];
            let mut evals = Vec::new();
            for i in 0..30 {
                let k_s = 0.1 + 0.004 * (i % 6) as f64;
                let td = 0.1 + 0.01 * i as f64;
                let mut d = 0.8 * k_s * (td - 0.03);
                if d.abs() >= cap {
                    d = cap * 0.9;
                }
                tire.push(tire.last().unwrap() + d);
                evals.push(eval(k_s, td));
            }
            if extra_saturated {
                for _ in 0..5 {
                    tire.push(tire.last().unwrap() + cap); // exactly at the cap
                    evals.push(eval(0.2, 0.5));
                }
            }
            let trace = trace_from_steering(ts, &tire);
            let replay: Vec<ReplayRow> = evals
                .into_iter()
                .enumerate()
                .map(|(k, e)| ReplayRow {
                    t: k as f64 * ts,
                    evaluations: vec![e],
                    off_track: false,
                    usable: true,
                })
                .collect();
            let samples = extract_samples(&trace, &replay, rate, ts).unwrap();
            estimate_params(&samples).unwrap()
        };
        let base = build(false);
        let with_saturated = build(true);
        assert_eq!(base, with_saturated);
    }

    #[test]
    fn fit_report_zero_error_fixed_point() {
        let series = vec![0.0, 10.0, 25.0, 40.0, 12.0, -5.0];
        let r = fit_report(&series, &series).unwrap();
        assert_eq!(r.mean_abs_error_deg, 0.0);
        assert_eq!(r.std_error_deg, 0.0);
        assert_eq!(r.normalized_mean_error_pct, 0.0);
        assert_eq!(r.correlation, 1.0);

        let flat = vec![3.0; 8];
        let rf = fit_report(&flat, &flat).unwrap();
        assert_eq!(rf.correlation, 1.0);
        assert_eq!(rf.mean_abs_error_deg, 0.0);
    }

    #[test]
    fn fit_report_statistics_definitions() {
        let human = vec![0.0, 10.0, 20.0];
        let model = vec![1.0, 8.0, 23.0];
        let r = fit_report(&human, &model).unwrap();
        // errors: -1, 2, -3
        assert!((r.mean_abs_error_deg - 2.0).abs() < 1e-12);
        let mean = (-1.0 + 2.0 - 3.0) / 3.0;
        let var = ((-1.0f64 - mean).powi(2) + (2.0 - mean).powi(2) + (-3.0 - mean).powi(2)) / 3.0;
        assert!((r.std_error_deg - var.sqrt()).abs() < 1e-12);
        assert!((r.normalized_mean_error_pct - 100.0 * 2.0 / 20.0).abs() < 1e-12);
    }

    #[test]
    fn fit_report_length_mismatch() {
        assert!(matches!(
            fit_report(&[1.0, 2.0], &[1.0]),
            Err(IdentError::LengthMismatch(2, 1))
        ));
    }
}
