//! Benchmark scenarios and the simulation harness.
//!
//! Obstacle tracks are analytic (constant drift plus a logistic lateral
//! transition) so positions, velocities, accelerations, and the tangent-yaw
//! derivatives are exact. The harness ticks the controller at the control
//! period, integrates the plant through RK4 substeps with zero-order-hold
//! steering, and checks collisions by separating-axis overlap against
//! obstacles and corner tests against road edges, at every substep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::DriverParams;
use crate::error::ModelError;
use crate::geometry::{OrientedBox, RoadEdge, RoadSide};
use crate::kinematics::BodyKinematics;
use crate::motivation::MotivationSignals;
use crate::plant::{self, VehicleState};
use crate::steering::{
    self, assemble_decision, evaluate_obstacles, per_obstacle_delta, MovingObstacle,
    ObstacleDecision, SteeringDecision, VehicleParams, WorldSnapshot,
};
use crate::vec2::Vec2;

/// Default control period, s.
pub const DEFAULT_CONTROL_PERIOD: f64 = 1.0 / 24.0;

/// Plant substeps per control period.
pub const SUBSTEPS_PER_TICK: u32 = 10;

/// Lateral clearance between the ego's side and the road edge at the start
/// of the tight-gap scenario.
pub const TIGHT_GAP_ROAD_MARGIN: f64 = 1.25;

/// The lateral transition is considered complete at this sigmoid fraction.
pub const SIGMOID_COMPLETION: f64 = 0.88;

/// Post-transition exposure appended to the tight-gap run, m of travel.
pub const TIGHT_GAP_TAIL_METERS: f64 = 50.0;

/// Parallel travel before the obstacle begins its lateral transition, m.
pub const TIGHT_GAP_LEAD_METERS: f64 = 0.0;

/// Logistic sigmoid 1/(1 + e^(−a(t−b))).
pub fn sigmoid(t: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + (-a * (t - b)).exp())
}

/// One axis of an obstacle path: start + rate·t + amp·sig(t, a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisPath {
    pub start: f64,
    pub rate: f64,
    pub sig_amp: f64,
    pub sig_a: f64,
    pub sig_b: f64,
}

impl AxisPath {
    pub fn linear(start: f64, rate: f64) -> Self {
        AxisPath {
            start,
            rate,
            sig_amp: 0.0,
            sig_a: 1.0,
            sig_b: 0.0,
        }
    }

    pub fn with_sigmoid(start: f64, rate: f64, amp: f64, a: f64, b: f64) -> Self {
        AxisPath {
            start,
            rate,
            sig_amp: amp,
            sig_a: a,
            sig_b: b,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.start + self.rate * t + self.sig_amp * sigmoid(t, self.sig_a, self.sig_b)
    }

    pub fn d1(&self, t: f64) -> f64 {
        let s = sigmoid(t, self.sig_a, self.sig_b);
        self.rate + self.sig_amp * self.sig_a * s * (1.0 - s)
    }

    pub fn d2(&self, t: f64) -> f64 {
        let s = sigmoid(t, self.sig_a, self.sig_b);
        let a = self.sig_a;
        self.sig_amp * a * a * s * (1.0 - s) * (1.0 - 2.0 * s)
    }

    pub fn d3(&self, t: f64) -> f64 {
        let s = sigmoid(t, self.sig_a, self.sig_b);
        let a = self.sig_a;
        self.sig_amp * a * a * a * s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s)
    }

    fn mirrored(&self) -> Self {
        AxisPath {
            start: -self.start,
            rate: -self.rate,
            sig_amp: -self.sig_amp,
            ..*self
        }
    }
}

/// How the obstacle yaw follows its path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum YawPolicy {
    /// Yaw, yaw rate, and yaw acceleration from the path tangent.
    PathTangent,
    Fixed(f64),
}

/// An obstacle with analytic planar motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleTrack {
    pub id: usize,
    pub name: String,
    pub length: f64,
    pub width: f64,
    pub x: AxisPath,
    pub y: AxisPath,
    pub yaw_policy: YawPolicy,
}

impl ObstacleTrack {
    /// Pose and full kinematics at time `t`.
    pub fn sample(&self, t: f64) -> (OrientedBox, BodyKinematics) {
        let position = Vec2::new(self.x.value(t), self.y.value(t));
        let velocity = Vec2::new(self.x.d1(t), self.y.d1(t));
        let acceleration = Vec2::new(self.x.d2(t), self.y.d2(t));
        let jerk = Vec2::new(self.x.d3(t), self.y.d3(t));

        let (yaw, yaw_rate, yaw_accel) = match self.yaw_policy {
            YawPolicy::Fixed(psi) => (psi, 0.0, 0.0),
            YawPolicy::PathTangent => {
                let v2 = velocity.norm_sq();
                if v2 < 1e-12 {
                    (0.0, 0.0, 0.0)
                } else {
                    let yaw = velocity.y.atan2(velocity.x);
                    let num = velocity.cross(acceleration);
                    let yaw_rate = num / v2;
                    let num_dot = velocity.cross(jerk);
                    let v2_dot = 2.0 * velocity.dot(acceleration);
                    let yaw_accel = (num_dot * v2 - num * v2_dot) / (v2 * v2);
                    (yaw, yaw_rate, yaw_accel)
                }
            }
        };

        let shape = OrientedBox::from_dims(position, yaw, self.length, self.width);
        let kinematics = BodyKinematics {
            position,
            yaw,
            velocity,
            yaw_rate,
            acceleration,
            yaw_accel,
        };
        (shape, kinematics)
    }

    fn mirrored(&self) -> Self {
        ObstacleTrack {
            y: self.y.mirrored(),
            yaw_policy: match self.yaw_policy {
                YawPolicy::PathTangent => YawPolicy::PathTangent,
                YawPolicy::Fixed(psi) => YawPolicy::Fixed(-psi),
            },
            ..self.clone()
        }
    }
}

/// Drivable region of a track, used to flag off-track trace rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrackRegion {
    /// Straight approach, quarter-annulus corner, and exit leg.
    TurnNinety {
        half_width: f64,
        approach_len: f64,
        center_y: f64,
        inner_radius: f64,
        outer_radius: f64,
        mirrored: bool,
    },
}

impl TrackRegion {
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            TrackRegion::TurnNinety {
                half_width,
                approach_len,
                center_y,
                inner_radius,
                outer_radius,
                mirrored,
            } => {
                let p = if mirrored { Vec2::new(p.x, -p.y) } else { p };
                let straight =
                    p.x >= -approach_len && p.x <= 0.0 && p.y.abs() <= half_width;
                let center = Vec2::new(0.0, center_y);
                let rad = (p - center).norm();
                let corner = p.x >= 0.0
                    && p.y <= center_y
                    && rad >= inner_radius
                    && rad <= outer_radius;
                let exit = p.y >= center_y && p.x >= inner_radius && p.x <= outer_radius;
                straight || corner || exit
            }
        }
    }
}

/// A runnable scenario: ego start, plant parameters, obstacles, road edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub ego_start: VehicleState,
    pub params: VehicleParams,
    pub obstacles: Vec<ObstacleTrack>,
    pub road_edges: Vec<RoadEdge>,
    pub duration: f64,
    pub control_period: f64,
    pub track_region: Option<TrackRegion>,
    /// Free-form construction notes carried into run metadata.
    pub notes: String,
}

impl Scenario {
    /// The same scene reflected about the road axis (y → −y).
    pub fn mirrored(&self) -> Scenario {
        let mut ego = self.ego_start;
        ego.position.y = -ego.position.y;
        ego.yaw = -ego.yaw;
        ego.body_vel.y = -ego.body_vel.y;
        ego.yaw_rate = -ego.yaw_rate;
        ego.steering = -ego.steering;
        Scenario {
            name: format!("{}-mirrored", self.name),
            ego_start: ego,
            params: self.params,
            obstacles: self.obstacles.iter().map(|o| o.mirrored()).collect(),
            road_edges: self
                .road_edges
                .iter()
                .map(|e| {
                    RoadEdge::new(
                        e.points.iter().map(|p| Vec2::new(p.x, -p.y)).collect(),
                        match e.side {
                            RoadSide::Left => RoadSide::Right,
                            RoadSide::Right => RoadSide::Left,
                        },
                    )
                })
                .collect(),
            duration: self.duration,
            control_period: self.control_period,
            track_region: self.track_region.map(|r| match r {
                TrackRegion::TurnNinety {
                    half_width,
                    approach_len,
                    center_y,
                    inner_radius,
                    outer_radius,
                    mirrored,
                } => TrackRegion::TurnNinety {
                    half_width,
                    approach_len,
                    center_y,
                    inner_radius,
                    outer_radius,
                    mirrored: !mirrored,
                },
            }),
            notes: self.notes.clone(),
        }
    }
}

/// Tight-gap intrusion: a sedan running parallel 5 m to the ego's right
/// closes laterally over a horizontal distance `d_x` until only `gap` meters
/// of free clearance (beyond the ego width) remain against the left road
/// edge. Both vehicles hold the same speed.
pub fn scenario_tight_gap(gap: f64, d_x: f64, speed_kmh: f64) -> Result<Scenario, ModelError> {
    scenario_tight_gap_with(
        gap,
        d_x,
        speed_kmh,
        TIGHT_GAP_ROAD_MARGIN,
        SIGMOID_COMPLETION,
        VehicleParams::default(),
    )
}

/// Tight-gap construction with the free geometry exposed: initial road-edge
/// clearance and the sigmoid completion fraction over `d_x`.
pub fn scenario_tight_gap_with(
    gap: f64,
    d_x: f64,
    speed_kmh: f64,
    road_margin: f64,
    completion: f64,
    params: VehicleParams,
) -> Result<Scenario, ModelError> {
    if gap <= 0.0 || d_x <= 0.0 || speed_kmh <= 0.0 {
        return Err(ModelError::Configuration(format!(
            "tight-gap needs positive gap/d_x/speed, got {gap}/{d_x}/{speed_kmh}"
        )));
    }
    if !(completion > 0.5 && completion < 1.0) || road_margin <= 0.0 {
        return Err(ModelError::Configuration(format!(
            "tight-gap needs completion in (0.5, 1) and positive margin, got {completion}/{road_margin}"
        )));
    }
    let v = speed_kmh / 3.6;
    let edge_y = params.box_width / 2.0 + road_margin;

    let obstacle_len = 3.6;
    let obstacle_width = 1.6;
    // final obstacle center leaves exactly ego-width + gap of free space
    let final_center_y = edge_y - params.box_width - gap - obstacle_width / 2.0;
    let amplitude = final_center_y - (-5.0);
    if amplitude <= 0.0 {
        return Err(ModelError::Configuration(format!(
            "gap {gap} leaves no lateral motion (amplitude {amplitude})"
        )));
    }
    // sigmoid completes (both tails) over the horizontal distance d_x,
    // entered after a stretch of parallel travel
    let a_dist = 2.0 * (completion / (1.0 - completion)).ln() / d_x;
    let a_time = a_dist * v;
    let b_time = (TIGHT_GAP_LEAD_METERS + d_x / 2.0) / v;

    let duration = (TIGHT_GAP_LEAD_METERS + d_x + TIGHT_GAP_TAIL_METERS) / v;
    let edge = RoadEdge::new(
        vec![
            Vec2::new(-30.0, edge_y),
            Vec2::new(v * duration + 60.0, edge_y),
        ],
        RoadSide::Left,
    );

    Ok(Scenario {
        name: "tight-gap".to_string(),
        ego_start: VehicleState::cruise(Vec2::ZERO, 0.0, v),
        params,
        obstacles: vec![ObstacleTrack {
            id: 0,
            name: "sedan".to_string(),
            length: obstacle_len,
            width: obstacle_width,
            x: AxisPath::linear(0.0, v),
            y: AxisPath::with_sigmoid(-5.0, 0.0, amplitude, a_time, b_time),
            yaw_policy: YawPolicy::PathTangent,
        }],
        road_edges: vec![edge],
        duration,
        control_period: DEFAULT_CONTROL_PERIOD,
        track_region: None,
        notes: format!(
            "gap={gap} m, d_x={d_x} m, speed={speed_kmh} km/h, road margin {road_margin} m, \
             lateral transition to {completion} completion over d_x"
        ),
    })
}

/// Four-obstacle traffic at 80 km/h: bus and motorcycle on the left, sedan
/// and van on the right, with logistic lateral transitions against the ego's
/// nominal horizontal schedule.
pub fn scenario_multi_obstacle() -> Scenario {
    let params = VehicleParams::default();
    let v = 80.0 / 3.6;
    let tracks = vec![
        ObstacleTrack {
            id: 0,
            name: "bus".to_string(),
            length: 8.6,
            width: 2.5,
            x: AxisPath::linear(5.0, v),
            y: AxisPath::linear(5.0, 0.0),
            yaw_policy: YawPolicy::PathTangent,
        },
        ObstacleTrack {
            id: 1,
            name: "motorcycle".to_string(),
            length: 1.6,
            width: 0.4,
            x: AxisPath::with_sigmoid(2.0, v, 2.3, 4.34, 6.1),
            y: AxisPath::with_sigmoid(-5.0, 0.0, 6.6, 4.34, 6.1),
            yaw_policy: YawPolicy::PathTangent,
        },
        ObstacleTrack {
            id: 2,
            name: "sedan".to_string(),
            length: 3.6,
            width: 1.6,
            x: AxisPath::linear(-2.0, v),
            y: AxisPath::with_sigmoid(-6.0, 0.0, 7.0, 4.55, 6.1),
            yaw_policy: YawPolicy::PathTangent,
        },
        ObstacleTrack {
            id: 3,
            name: "van".to_string(),
            length: 5.5,
            width: 2.2,
            x: AxisPath::with_sigmoid(-1.0, v, -2.25, 4.55, 6.1),
            y: AxisPath::with_sigmoid(6.0, 0.0, -2.6, 4.55, 6.1),
            yaw_policy: YawPolicy::PathTangent,
        },
    ];
    Scenario {
        name: "multi-obstacle".to_string(),
        ego_start: VehicleState::cruise(Vec2::ZERO, 0.0, v),
        params,
        obstacles: tracks,
        road_edges: Vec::new(),
        duration: 12.0,
        control_period: DEFAULT_CONTROL_PERIOD,
        track_region: None,
        notes: "motorcycle row read as x=2+x_V+2.3·sig(t,4.34,6.1), y=-5+6.6·sig(t,4.34,6.1); \
                obstacle schedules use the nominal ego advance x_V(t)=V·t"
            .to_string(),
    }
}

/// 90-degree turn track: 200 m straight approach into a left-hand quarter
/// turn with inner radius 30 m and outer radius 38 m on an 8 m wide path,
/// driven at a constant 60 km/h.
pub fn scenario_turn_90() -> Scenario {
    let params = VehicleParams::default();
    let v = 60.0 / 3.6;
    let half_width = 4.0;
    let approach = 200.0;
    let inner_r = 30.0;
    let outer_r = 38.0;
    let center_y = half_width + inner_r;
    let exit_len = 120.0;

    let arc = |radius: f64| -> Vec<Vec2> {
        let steps = 90usize; // 1° spacing, chord error ≈ 1.5 mm
        (0..=steps)
            .map(|i| {
                let phi = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
                Vec2::new(radius * phi.sin(), center_y - radius * phi.cos())
            })
            .collect()
    };

    let mut inner_pts = vec![Vec2::new(-approach - 10.0, half_width)];
    inner_pts.extend(arc(inner_r));
    inner_pts.push(Vec2::new(inner_r, center_y + exit_len));
    let mut outer_pts = vec![Vec2::new(-approach - 10.0, -half_width)];
    outer_pts.extend(arc(outer_r));
    outer_pts.push(Vec2::new(outer_r, center_y + exit_len));

    Scenario {
        name: "turn-90".to_string(),
        ego_start: VehicleState::cruise(Vec2::new(-approach, 0.0), 0.0, v),
        params,
        obstacles: Vec::new(),
        road_edges: vec![
            RoadEdge::new(inner_pts, RoadSide::Left),
            RoadEdge::new(outer_pts, RoadSide::Right),
        ],
        duration: 18.0,
        control_period: DEFAULT_CONTROL_PERIOD,
        track_region: Some(TrackRegion::TurnNinety {
            half_width,
            approach_len: approach + 10.0,
            center_y,
            inner_radius: inner_r,
            outer_radius: outer_r,
            mirrored: false,
        }),
        notes: "8 m wide: 200 m straight then a 90° left turn, radii 30/38 m, 60 km/h".to_string(),
    }
}

/// Who commands the steering during a run.
#[derive(Debug, Clone)]
pub enum Controller {
    /// Uncapped Δδ_i = K_s·TD_i model.
    Ideal,
    /// Threshold, sensitivity, and rate-capped human model.
    Parameterized(DriverParams),
    /// Apply a recorded tire-angle sequence (one value per tick).
    Replay(Vec<f64>),
}

/// One logged control tick. The state and steering are those *entering* the
/// tick; `aggregate_delta` is the change decided at it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub state: VehicleState,
    pub wheel_deg: f64,
    pub per_obstacle: Vec<ObstacleDecision>,
    pub aggregate_delta: f64,
    pub collision: bool,
    pub cpu_us: f64,
    pub min_separation: Option<f64>,
}

impl TraceRow {
    /// Signals of the most demanding obstacle this tick.
    pub fn governing_signals(&self) -> MotivationSignals {
        self.per_obstacle
            .iter()
            .map(|o| o.signals)
            .max_by(|a, b| a.demand.total_cmp(&b.demand))
            .unwrap_or_else(MotivationSignals::quiet)
    }
}

/// Full simulation log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimTrace {
    pub scenario: String,
    pub control_period: f64,
    pub steering_ratio: f64,
    pub notes: String,
    pub rows: Vec<TraceRow>,
    pub collided: bool,
}

impl SimTrace {
    pub fn peak_demand(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.governing_signals().demand)
            .fold(0.0, f64::max)
    }

    pub fn peak_capability(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.per_obstacle.iter().map(|o| o.signals.capability))
            .fold(0.0, f64::max)
    }

    pub fn peak_difficulty(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.per_obstacle.iter().map(|o| o.signals.difficulty))
            .fold(0.0, f64::max)
    }

    pub fn min_separation(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.min_separation)
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |m| m.min(s))))
    }

    /// Tire steering angles per tick, the replay-controller input format.
    pub fn steering_sequence(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.state.steering).collect()
    }
}

fn collision_at(
    ego_box: &OrientedBox,
    obstacles: &[(OrientedBox, BodyKinematics)],
    road_edges: &[RoadEdge],
) -> bool {
    for (shape, _) in obstacles {
        if ego_box.overlaps(shape) {
            return true;
        }
    }
    for edge in road_edges {
        for corner in ego_box.corners() {
            if edge.violates(corner) {
                return true;
            }
        }
    }
    false
}

/// Run a scenario under the given controller. Terminates at the scenario
/// duration or at first contact; a collision marks only the final row.
pub fn run(scenario: &Scenario, controller: &Controller) -> Result<SimTrace, ModelError> {
    scenario.params.validate()?;
    let params = &scenario.params;
    let ts = scenario.control_period;
    if !(ts > 0.0) {
        return Err(ModelError::Configuration(format!(
            "control period must be positive, got {ts}"
        )));
    }
    let substep = ts / SUBSTEPS_PER_TICK as f64;
    let ticks = (scenario.duration / ts).ceil() as usize;

    let mut state = scenario.ego_start;
    let mut rows: Vec<TraceRow> = Vec::with_capacity(ticks + 1);
    let mut collided = false;
    let wheel = |tire: f64| tire * params.steering_ratio * 180.0 / std::f64::consts::PI;

    for k in 0..ticks {
        let t = k as f64 * ts;
        let obstacles: Vec<(OrientedBox, BodyKinematics)> =
            scenario.obstacles.iter().map(|o| o.sample(t)).collect();
        let ego_box = params.footprint(state.position, state.yaw);

        if collision_at(&ego_box, &obstacles, &scenario.road_edges) {
            rows.push(TraceRow {
                t,
                state,
                wheel_deg: wheel(state.steering),
                per_obstacle: Vec::new(),
                aggregate_delta: 0.0,
                collision: true,
                cpu_us: 0.0,
                min_separation: None,
            });
            collided = true;
            break;
        }

        let ego = plant::body_kinematics(&state, state.steering, params)?;
        let snapshot = WorldSnapshot {
            ego,
            obstacles: scenario
                .obstacles
                .iter()
                .zip(&obstacles)
                .map(|(track, (shape, kin))| MovingObstacle {
                    id: track.id,
                    shape: *shape,
                    kinematics: *kin,
                })
                .collect(),
            road_edges: scenario
                .road_edges
                .iter()
                .enumerate()
                .map(|(i, e)| (scenario.obstacles.len() + i, e))
                .collect(),
        };

        let started = std::time::Instant::now();
        let decision = match tick_decision(&snapshot, params, state.steering, controller, ts, k) {
            Ok(d) => d,
            Err(ModelError::Contact(_)) => {
                // a candidate pair reached contact between overlap checks
                rows.push(TraceRow {
                    t,
                    state,
                    wheel_deg: wheel(state.steering),
                    per_obstacle: Vec::new(),
                    aggregate_delta: 0.0,
                    collision: true,
                    cpu_us: 0.0,
                    min_separation: Some(0.0),
                });
                collided = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let cpu_us = started.elapsed().as_secs_f64() * 1e6;

        rows.push(TraceRow {
            t,
            state,
            wheel_deg: wheel(state.steering),
            per_obstacle: decision.per_obstacle.clone(),
            aggregate_delta: decision.aggregate_delta,
            collision: false,
            cpu_us,
            min_separation: decision.min_separation,
        });

        // integrate to the next tick, watching for tunneling at substeps
        let mut hit = false;
        for i in 0..SUBSTEPS_PER_TICK {
            state = plant::integrate(&state, decision.new_steering, substep, params)?;
            let t_sub = t + (i + 1) as f64 * substep;
            let sub_obstacles: Vec<(OrientedBox, BodyKinematics)> = scenario
                .obstacles
                .iter()
                .map(|o| o.sample(t_sub))
                .collect();
            let sub_box = params.footprint(state.position, state.yaw);
            if collision_at(&sub_box, &sub_obstacles, &scenario.road_edges) {
                hit = true;
            }
        }
        if hit {
            rows.push(TraceRow {
                t: t + ts,
                state,
                wheel_deg: wheel(state.steering),
                per_obstacle: Vec::new(),
                aggregate_delta: 0.0,
                collision: true,
                cpu_us: 0.0,
                min_separation: None,
            });
            collided = true;
            break;
        }
    }

    Ok(SimTrace {
        scenario: scenario.name.clone(),
        control_period: ts,
        steering_ratio: params.steering_ratio,
        notes: scenario.notes.clone(),
        rows,
        collided,
    })
}

fn tick_decision(
    snapshot: &WorldSnapshot,
    params: &VehicleParams,
    delta_k: f64,
    controller: &Controller,
    ts: f64,
    tick: usize,
) -> Result<SteeringDecision, ModelError> {
    match controller {
        Controller::Ideal => steering::control_step(snapshot, params, delta_k),
        Controller::Parameterized(dp) => {
            let evals = evaluate_obstacles(snapshot, params, delta_k)?;
            let cap = dp.max_steer_rate * ts;
            Ok(assemble_decision(&evals, delta_k, Some(cap), |k_s, td| {
                crate::driver::parametric_delta(k_s, td, dp, ts)
            }))
        }
        Controller::Replay(deltas) => {
            let evals = evaluate_obstacles(snapshot, params, delta_k)?;
            let mut decision = assemble_decision(&evals, delta_k, None, per_obstacle_delta);
            let next = deltas
                .get(tick + 1)
                .or(deltas.last())
                .copied()
                .unwrap_or(delta_k);
            decision.aggregate_delta = next - delta_k;
            decision.new_steering = next;
            decision.clamped = false;
            Ok(decision)
        }
    }
}

/// Maximum collision-free speed per (gap, d_x) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub gaps_m: Vec<f64>,
    pub dx_m: Vec<f64>,
    pub step_kmh: f64,
    pub speed_min_kmh: f64,
    pub speed_max_kmh: f64,
    /// `cells[i][j]` is the highest collision-free speed for `gaps_m[i]`,
    /// `dx_m[j]`, or `None` when every scanned speed collides.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl SweepGrid {
    /// Nondecreasing along growing gap and growing d_x.
    pub fn is_monotone(&self) -> bool {
        let at = |i: usize, j: usize| self.cells[i][j].unwrap_or(0.0);
        for i in 0..self.gaps_m.len() {
            for j in 0..self.dx_m.len() {
                if i + 1 < self.gaps_m.len() && at(i + 1, j) < at(i, j) {
                    return false;
                }
                if j + 1 < self.dx_m.len() && at(i, j + 1) < at(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Scan speeds upward per cell, stopping at the first collision, and record
/// the highest collision-free speed reached. Cells run in parallel;
/// `workers` bounds the pool when given.
pub fn max_speed_sweep(
    gaps: &[f64],
    dxs: &[f64],
    step_kmh: f64,
    speed_min_kmh: f64,
    speed_max_kmh: f64,
    workers: Option<usize>,
) -> Result<SweepGrid, ModelError> {
    if !(step_kmh > 0.0 && step_kmh <= 5.0) {
        return Err(ModelError::Configuration(format!(
            "sweep step must be in (0, 5] km/h, got {step_kmh}"
        )));
    }
    let cells_of = |gap: f64, dx: f64| -> Result<Option<f64>, ModelError> {
        let mut best = None;
        let mut speed = speed_min_kmh;
        while speed <= speed_max_kmh + 1e-9 {
            let scenario = scenario_tight_gap(gap, dx, speed)?;
            let trace = run(&scenario, &Controller::Ideal)?;
            if trace.collided {
                break;
            }
            best = Some(speed);
            speed += step_kmh;
        }
        Ok(best)
    };

    let jobs: Vec<(usize, usize, f64, f64)> = gaps
        .iter()
        .enumerate()
        .flat_map(|(i, &g)| dxs.iter().enumerate().map(move |(j, &d)| (i, j, g, d)))
        .collect();

    let compute = || -> Result<Vec<(usize, usize, Option<f64>)>, ModelError> {
        jobs.par_iter()
            .map(|&(i, j, g, d)| cells_of(g, d).map(|c| (i, j, c)))
            .collect()
    };
    let results = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ModelError::Configuration(format!("worker pool: {e}")))?
            .install(compute),
        None => compute(),
    }?;

    let mut cells = vec![vec![None; dxs.len()]; gaps.len()];
    for (i, j, c) in results {
        cells[i][j] = c;
    }
    Ok(SweepGrid {
        gaps_m: gaps.to_vec(),
        dx_m: dxs.to_vec(),
        step_kmh,
        speed_min_kmh,
        speed_max_kmh,
        cells,
    })
}
