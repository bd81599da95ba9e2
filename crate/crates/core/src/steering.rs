//! Steering law: task difficulty is driven to zero through the smallest
//! steering change that restores the Lyapunov decrease condition.
//!
//! Per obstacle, the candidate pair with maximum demand defines the signals.
//! The steering gain divides the closing-rate inner product by the projection
//! of the steering-to-acceleration Jacobian onto the relative position, so
//! the resulting Δδ cancels the difficulty exactly to first order. Left and
//! right requirements are combined by keeping the extreme change of each
//! sign.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::geometry::{
    candidate_pairs_box, road_crossings, road_proximities, AttachPointPair, ObstacleKind,
    OrientedBox, RoadEdge,
};
use crate::kinematics::{relative_state, BodyKinematics, RelativeState};
use crate::motivation::{signals, MotivationSignals};
use crate::plant::VehicleState;
use crate::vec2::Vec2;

/// Steering projections below this cannot be inverted; the obstacle
/// contributes no steering change this tick and is flagged.
pub const H_PROJECTION_EPS: f64 = 1e-6;

/// Physical tire-angle stop.
pub const MAX_TIRE_ANGLE: f64 = 0.6;

/// Collision pairs further out than this time-to-collision are not attended
/// to; no action is needed while the available time is long.
pub const ATTENTION_TTC_HORIZON: f64 = 8.0;

const GRAVITY: f64 = 9.81;

/// Vehicle and tire parameters of the bicycle model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleParams {
    /// Vehicle mass, kg.
    pub mass: f64,
    /// Yaw moment of inertia, kg·m².
    pub yaw_inertia: f64,
    /// Center of mass to front axle, m.
    pub lf: f64,
    /// Center of mass to rear axle, m.
    pub lr: f64,
    /// Front cornering stiffness, N/rad.
    pub cornering_stiffness_front: f64,
    /// Rear cornering stiffness, N/rad.
    pub cornering_stiffness_rear: f64,
    /// Lumped aerodynamic drag coefficient ½ρC_dA, kg/m. Unused while the
    /// longitudinal speed is held, kept as a plant parameter.
    pub drag_coeff: f64,
    /// Steering-wheel angle per tire angle.
    pub steering_ratio: f64,
    /// Bounding-box length, m.
    pub box_length: f64,
    /// Bounding-box width, m.
    pub box_width: f64,
    /// Tire-road friction coefficient.
    pub friction_mu: f64,
    /// Static front axle load, N.
    pub wheel_load_front: f64,
    /// Static rear axle load, N.
    pub wheel_load_rear: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        let mass = 1500.0;
        let lf = 1.2;
        let lr = 1.4;
        let weight = mass * GRAVITY;
        // per-axle stiffness; saturation onset μF_z/C ≈ 2° of slip
        VehicleParams {
            mass,
            yaw_inertia: 2000.0,
            lf,
            lr,
            cornering_stiffness_front: 2.0e5,
            cornering_stiffness_rear: 2.0e5,
            drag_coeff: 0.4,
            steering_ratio: 16.0,
            box_length: 4.4,
            box_width: 1.7,
            friction_mu: 0.9,
            wheel_load_front: weight * lr / (lf + lr),
            wheel_load_rear: weight * lf / (lf + lr),
        }
    }
}

impl VehicleParams {
    pub fn wheelbase(&self) -> f64 {
        self.lf + self.lr
    }

    /// Bounding box at the given pose.
    pub fn footprint(&self, position: Vec2, yaw: f64) -> OrientedBox {
        OrientedBox::from_dims(position, yaw, self.box_length, self.box_width)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("lf", self.lf),
            ("lr", self.lr),
            ("cornering_stiffness_front", self.cornering_stiffness_front),
            ("cornering_stiffness_rear", self.cornering_stiffness_rear),
            ("steering_ratio", self.steering_ratio),
            ("box_length", self.box_length),
            ("box_width", self.box_width),
            ("friction_mu", self.friction_mu),
            ("wheel_load_front", self.wheel_load_front),
            ("wheel_load_rear", self.wheel_load_rear),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::Configuration(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.drag_coeff < 0.0 || !self.drag_coeff.is_finite() {
            return Err(ModelError::Configuration(format!(
                "drag_coeff must be nonnegative, got {}",
                self.drag_coeff
            )));
        }
        if self.wheelbase() >= self.box_length {
            return Err(ModelError::Configuration(format!(
                "wheelbase {} must be shorter than box length {}",
                self.wheelbase(),
                self.box_length
            )));
        }
        Ok(())
    }
}

/// Partial derivatives of the body accelerations with respect to the tire
/// steering angle, in the linear tire regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelJacobian {
    /// ∂f_x/∂δ, m/s² per rad.
    pub dfx_ddelta: f64,
    /// ∂f_y/∂δ, m/s² per rad.
    pub dfy_ddelta: f64,
    /// ∂ψ̈/∂δ, rad/s² per rad.
    pub dg_ddelta: f64,
}

/// Front lateral slip angle arctan((ẏ + l_f·ψ̇)/ẋ).
pub fn front_slip_angle(state: &VehicleState, params: &VehicleParams) -> Result<f64, ModelError> {
    let vx = state.body_vel.x;
    if vx < crate::plant::MIN_LONGITUDINAL_SPEED {
        return Err(ModelError::Standstill(vx));
    }
    Ok(((state.body_vel.y + params.lf * state.yaw_rate) / vx).atan())
}

/// Steering Jacobian of the linear-tire bicycle accelerations.
///
/// Front lateral force C·(δ − β_fm) differentiated through the wheel-frame
/// decomposition; rear force and constant terms drop out.
pub fn acceleration_jacobian(params: &VehicleParams, delta: f64, beta_fm: f64) -> AccelJacobian {
    let c = params.cornering_stiffness_front;
    let (s, cos) = delta.sin_cos();
    let slip = beta_fm - delta;
    AccelJacobian {
        dfx_ddelta: (c / params.mass) * (slip * cos - s),
        dfy_ddelta: (c / params.mass) * (cos + slip * s),
        dg_ddelta: (c * params.lf / params.yaw_inertia) * (cos + slip * s),
    }
}

/// Scalar projection (∂R̈_p/∂δ)·R_rel with the attach point `vp` and the
/// relative position expressed in the vehicle frame.
pub fn h_projection(jac: &AccelJacobian, vp: Vec2, r_rel_vehicle: Vec2) -> f64 {
    (jac.dfx_ddelta - vp.y * jac.dg_ddelta) * r_rel_vehicle.x
        + (jac.dfy_ddelta + vp.x * jac.dg_ddelta) * r_rel_vehicle.y
}

/// Steering control gain K_s = (ṙ·r)/h.
pub fn steering_gain(rel: &RelativeState, h_proj: f64) -> Result<f64, ModelError> {
    if h_proj.abs() < H_PROJECTION_EPS {
        return Err(ModelError::DegenerateProjection(h_proj));
    }
    Ok(rel.r_dot.dot(rel.r) / h_proj)
}

/// Per-obstacle steering change Δδ_i = K_s·TD.
pub fn per_obstacle_delta(k_s: f64, td: f64) -> f64 {
    k_s * td
}

/// Combine per-obstacle changes: the extreme positive and extreme negative
/// requirements are summed; everything else is dominated.
pub fn aggregate(deltas: &[f64]) -> f64 {
    let mut max = 0f64;
    let mut min = 0f64;
    for &d in deltas {
        max = max.max(d);
        min = min.min(d);
    }
    max + min
}

/// A moving obstacle at one control tick.
#[derive(Debug, Clone, Copy)]
pub struct MovingObstacle {
    pub id: usize,
    pub shape: OrientedBox,
    pub kinematics: BodyKinematics,
}

/// Immutable world snapshot consumed by one control step.
#[derive(Debug, Clone)]
pub struct WorldSnapshot<'a> {
    /// Ego center-of-mass kinematics including the true plant accelerations
    /// at the current steering angle.
    pub ego: BodyKinematics,
    pub obstacles: Vec<MovingObstacle>,
    pub road_edges: Vec<(usize, &'a RoadEdge)>,
}

/// Signals and gain for one obstacle after max-demand pair selection.
#[derive(Debug, Clone, Copy)]
pub struct ObstacleEvaluation {
    pub id: usize,
    pub signals: MotivationSignals,
    /// Steering gain at the governing pair; `None` when no pair approaches
    /// or the projection is degenerate.
    pub k_s: Option<f64>,
    /// Governing pair, when any candidate approaches.
    pub pair: Option<AttachPointPair>,
    /// Smallest separation over this obstacle's candidate pairs.
    pub min_separation: Option<f64>,
    /// Steering momentarily cannot influence this obstacle.
    pub degenerate: bool,
}

/// Per-obstacle outcome carried in a steering decision.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObstacleDecision {
    pub id: usize,
    pub delta: f64,
    pub signals: MotivationSignals,
    pub degenerate: bool,
}

/// Full outcome of one control step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteeringDecision {
    pub per_obstacle: Vec<ObstacleDecision>,
    pub aggregate_delta: f64,
    pub new_steering: f64,
    /// The physical tire stop was hit.
    pub clamped: bool,
    /// Smallest candidate-pair separation seen this tick.
    pub min_separation: Option<f64>,
}

/// Evaluate every obstacle and road edge of a snapshot: candidate pairs,
/// relative kinematics, max-demand pair selection, signals, and gain.
pub fn evaluate_obstacles(
    snapshot: &WorldSnapshot,
    params: &VehicleParams,
    delta_k: f64,
) -> Result<Vec<ObstacleEvaluation>, ModelError> {
    let ego = &snapshot.ego;
    let ego_box = params.footprint(ego.position, ego.yaw);
    // body-frame velocities for the slip angle
    let body_vel = ego.velocity.rotated(-ego.yaw);
    if body_vel.x < crate::plant::MIN_LONGITUDINAL_SPEED {
        return Err(ModelError::Standstill(body_vel.x));
    }
    let beta_fm = ((body_vel.y + params.lf * ego.yaw_rate) / body_vel.x).atan();
    let jac = acceleration_jacobian(params, delta_k, beta_fm);
    let heading = ego.velocity;

    let mut evaluations = Vec::with_capacity(snapshot.obstacles.len() + snapshot.road_edges.len());

    for obstacle in &snapshot.obstacles {
        let v_rel = obstacle.kinematics.velocity - ego.velocity;
        let candidates: Vec<(AttachPointPair, RelativeState)> =
            candidate_pairs_box(&ego_box, &obstacle.shape, v_rel)
                .into_iter()
                .map(|pair| {
                    let rel = relative_state(
                        ego,
                        pair.vehicle_local,
                        &obstacle.kinematics,
                        pair.obstacle_local,
                    );
                    (pair, rel)
                })
                .collect();
        evaluations.push(evaluate_one(obstacle.id, ego, &candidates, &jac)?);
    }
    for (id, edge) in &snapshot.road_edges {
        let mut candidates: Vec<RoadCandidate> = road_crossings(&ego_box, heading, edge)
            .into_iter()
            .map(|crossing| {
                let v_corner = ego.point_velocity(crossing.vehicle_local);
                let a_corner = ego.point_acceleration(crossing.vehicle_local);
                // urgency comes from the crossing point ahead on the edge;
                // the steering gain from the lateral closure toward the
                // crossed segment, whose foot point slides along it
                let ray = RelativeState {
                    r: crossing.hit_world - crossing.corner_world,
                    r_dot: -v_corner,
                    r_ddot: -a_corner,
                };
                let lateral = RelativeState {
                    r: crossing.foot_world - crossing.corner_world,
                    r_dot: -crossing.normal * v_corner.dot(crossing.normal),
                    r_ddot: -crossing.normal * a_corner.dot(crossing.normal),
                };
                let pair = AttachPointPair {
                    vehicle_local: crossing.vehicle_local,
                    obstacle_local: crossing.hit_world,
                    kind: ObstacleKind::RoadEdge,
                };
                RoadCandidate { pair, ray, lateral }
            })
            .collect();
        // corners closing on the nearby edge, including by rotation the
        // forward rays cannot see
        for prox in road_proximities(&ego_box, edge) {
            let v_corner = ego.point_velocity(prox.vehicle_local);
            if v_corner.dot(prox.normal) <= 0.0 {
                continue;
            }
            let a_corner = ego.point_acceleration(prox.vehicle_local);
            let lateral = RelativeState {
                r: prox.foot_world - prox.corner_world,
                r_dot: -prox.normal * v_corner.dot(prox.normal),
                r_ddot: -prox.normal * a_corner.dot(prox.normal),
            };
            let pair = AttachPointPair {
                vehicle_local: prox.vehicle_local,
                obstacle_local: prox.foot_world,
                kind: ObstacleKind::RoadEdge,
            };
            candidates.push(RoadCandidate {
                pair,
                ray: lateral,
                lateral,
            });
        }
        evaluations.push(evaluate_road(*id, ego, &candidates, &jac)?);
    }
    Ok(evaluations)
}

struct RoadCandidate {
    pair: AttachPointPair,
    ray: RelativeState,
    lateral: RelativeState,
}

fn evaluate_road(
    id: usize,
    ego: &BodyKinematics,
    candidates: &[RoadCandidate],
    jac: &AccelJacobian,
) -> Result<ObstacleEvaluation, ModelError> {
    let mut best: Option<(f64, f64, &RoadCandidate)> = None;
    let mut min_separation: Option<f64> = None;

    for cand in candidates {
        let gap = cand.lateral.r.norm();
        if gap < crate::kinematics::CONTACT_TOL {
            return Err(ModelError::Contact(gap));
        }
        min_separation = Some(min_separation.map_or(gap, |m: f64| m.min(gap)));
        let d = crate::motivation::demand(&cand.ray)?;
        let better = match &best {
            None => true,
            Some((bd, bs, _)) => d > *bd || (d == *bd && gap < *bs),
        };
        if better {
            best = Some((d, gap, cand));
        }
    }

    let Some((d, _, cand)) = best else {
        return Ok(ObstacleEvaluation {
            id,
            signals: MotivationSignals::quiet(),
            k_s: None,
            pair: None,
            min_separation,
            degenerate: false,
        });
    };

    if d > 0.0 && d < 1.0 / ATTENTION_TTC_HORIZON {
        return Ok(ObstacleEvaluation {
            id,
            signals: MotivationSignals::quiet(),
            k_s: None,
            pair: Some(cand.pair),
            min_separation,
            degenerate: false,
        });
    }

    let sig = signals(&cand.ray)?;
    if d <= 0.0 {
        return Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: None,
            pair: Some(cand.pair),
            min_separation,
            degenerate: false,
        });
    }

    // an opening lateral pair cannot provide a stabilizing gain
    if cand.lateral.r_dot.dot(cand.lateral.r) >= 0.0 {
        return Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: None,
            pair: Some(cand.pair),
            min_separation,
            degenerate: false,
        });
    }

    let r_vehicle = cand.lateral.r.rotated(-ego.yaw);
    let h = h_projection(jac, cand.pair.vehicle_local, r_vehicle);
    match steering_gain(&cand.lateral, h) {
        Ok(k_s) => Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: Some(k_s),
            pair: Some(cand.pair),
            min_separation,
            degenerate: false,
        }),
        Err(ModelError::DegenerateProjection(_)) => Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: None,
            pair: Some(cand.pair),
            min_separation,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

fn evaluate_one(
    id: usize,
    ego: &BodyKinematics,
    candidates: &[(AttachPointPair, RelativeState)],
    jac: &AccelJacobian,
) -> Result<ObstacleEvaluation, ModelError> {
    let mut best: Option<(f64, f64, AttachPointPair, RelativeState)> = None; // (demand, s, pair, rel)
    let mut min_separation: Option<f64> = None;

    for (pair, rel) in candidates {
        let s = rel.r.norm();
        if s < crate::kinematics::CONTACT_TOL {
            return Err(ModelError::Contact(s));
        }
        min_separation = Some(min_separation.map_or(s, |m: f64| m.min(s)));
        let d = crate::motivation::demand(rel)?;
        // ties broken by smaller separation, then by candidate order
        let better = match &best {
            None => true,
            Some((bd, bs, _, _)) => d > *bd || (d == *bd && s < *bs),
        };
        if better {
            best = Some((d, s, *pair, *rel));
        }
    }

    let Some((d, _, pair, rel)) = best else {
        return Ok(ObstacleEvaluation {
            id,
            signals: MotivationSignals::quiet(),
            k_s: None,
            pair: None,
            min_separation,
            degenerate: false,
        });
    };

    // beyond the attention horizon nothing needs doing yet
    if d > 0.0 && d < 1.0 / ATTENTION_TTC_HORIZON {
        return Ok(ObstacleEvaluation {
            id,
            signals: MotivationSignals::quiet(),
            k_s: None,
            pair: Some(pair),
            min_separation,
            degenerate: false,
        });
    }

    let sig = signals(&rel)?;
    if d <= 0.0 {
        return Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: None,
            pair: Some(pair),
            min_separation,
            degenerate: false,
        });
    }

    let r_vehicle = (rel.r).rotated(-ego.yaw);
    let h = h_projection(jac, pair.vehicle_local, r_vehicle);
    match steering_gain(&rel, h) {
        Ok(k_s) => Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: Some(k_s),
            pair: Some(pair),
            min_separation,
            degenerate: false,
        }),
        Err(ModelError::DegenerateProjection(_)) => Ok(ObstacleEvaluation {
            id,
            signals: sig,
            k_s: None,
            pair: Some(pair),
            min_separation,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Build a steering decision from per-obstacle evaluations with an arbitrary
/// per-obstacle law Δδ_i = law(K_s, TD). `rate_cap` bounds the aggregate
/// change when the driver model is rate limited.
pub fn assemble_decision(
    evaluations: &[ObstacleEvaluation],
    delta_k: f64,
    rate_cap: Option<f64>,
    law: impl Fn(f64, f64) -> f64,
) -> SteeringDecision {
    let per_obstacle: Vec<ObstacleDecision> = evaluations
        .iter()
        .map(|e| {
            let delta = match e.k_s {
                Some(k_s) => law(k_s, e.signals.difficulty),
                None => 0.0,
            };
            ObstacleDecision {
                id: e.id,
                delta,
                signals: e.signals,
                degenerate: e.degenerate,
            }
        })
        .collect();

    let deltas: Vec<f64> = per_obstacle.iter().map(|d| d.delta).collect();
    let mut agg = aggregate(&deltas);
    if let Some(cap) = rate_cap {
        agg = agg.clamp(-cap, cap);
    }
    let unclamped = delta_k + agg;
    let new_steering = unclamped.clamp(-MAX_TIRE_ANGLE, MAX_TIRE_ANGLE);
    let min_separation = evaluations
        .iter()
        .filter_map(|e| e.min_separation)
        .fold(None, |acc: Option<f64>, s| {
            Some(acc.map_or(s, |m| m.min(s)))
        });

    SteeringDecision {
        per_obstacle,
        aggregate_delta: agg,
        new_steering,
        clamped: new_steering != unclamped,
        min_separation,
    }
}

/// One control step of the ideal (uncapped) model: evaluate all obstacles,
/// apply Δδ_i = K_s·TD_i per obstacle, aggregate, and update the steering
/// angle.
pub fn control_step(
    snapshot: &WorldSnapshot,
    params: &VehicleParams,
    delta_k: f64,
) -> Result<SteeringDecision, ModelError> {
    let evaluations = evaluate_obstacles(snapshot, params, delta_k)?;
    Ok(assemble_decision(
        &evaluations,
        delta_k,
        None,
        per_obstacle_delta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn slip_angle_values() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 10.0);
        assert_eq!(front_slip_angle(&state, &p).unwrap(), 0.0);
        state.body_vel.y = 1.0;
        let beta = front_slip_angle(&state, &p).unwrap();
        assert!((beta - 0.1f64.atan()).abs() < 1e-15);
    }

    #[test]
    fn jacobian_at_zero_angles() {
        let p = params();
        let jac = acceleration_jacobian(&p, 0.0, 0.0);
        assert_eq!(jac.dfx_ddelta, 0.0);
        assert!((jac.dfy_ddelta - p.cornering_stiffness_front / p.mass).abs() < 1e-12);
        assert!(
            (jac.dg_ddelta - p.cornering_stiffness_front * p.lf / p.yaw_inertia).abs() < 1e-12
        );
    }

    /// Linear-tire accelerations the Jacobian linearizes; kept in test code
    /// as the finite-difference oracle.
    fn linear_accel(p: &VehicleParams, state: &VehicleState, delta: f64) -> (f64, f64, f64) {
        let vx = state.body_vel.x;
        let beta_fm = ((state.body_vel.y + p.lf * state.yaw_rate) / vx).atan();
        let alpha_r = ((state.body_vel.y - p.lr * state.yaw_rate) / vx).atan();
        let f_front = -p.cornering_stiffness_front * (beta_fm - delta);
        let f_rear = -p.cornering_stiffness_rear * alpha_r;
        let fx = -f_front * delta.sin() / p.mass;
        let fy = (f_front * delta.cos() + f_rear) / p.mass;
        let g = (f_front * p.lf * delta.cos() - f_rear * p.lr) / p.yaw_inertia;
        (fx, fy, g)
    }

    #[test]
    fn jacobian_matches_finite_differences_of_linear_tire_model() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 25.0);
        state.body_vel.y = 0.8;
        state.yaw_rate = 0.15;
        let beta_fm = front_slip_angle(&state, &p).unwrap();
        let h = 1e-6;
        for &delta in &[-0.3, -0.05, 0.0, 0.02, 0.25] {
            let jac = acceleration_jacobian(&p, delta, beta_fm);
            let (fx_p, fy_p, g_p) = linear_accel(&p, &state, delta + h);
            let (fx_m, fy_m, g_m) = linear_accel(&p, &state, delta - h);
            let fd = (
                (fx_p - fx_m) / (2.0 * h),
                (fy_p - fy_m) / (2.0 * h),
                (g_p - g_m) / (2.0 * h),
            );
            let scale = p.cornering_stiffness_front / p.mass;
            assert!((fd.0 - jac.dfx_ddelta).abs() <= 1e-6 * scale, "fx at {delta}");
            assert!((fd.1 - jac.dfy_ddelta).abs() <= 1e-6 * scale, "fy at {delta}");
            assert!(
                (fd.2 - jac.dg_ddelta).abs() <= 1e-6 * (scale * p.mass * p.lf / p.yaw_inertia),
                "g at {delta}"
            );
        }
    }

    #[test]
    fn jacobian_matches_plant_in_linear_regime() {
        // the controller Jacobian must linearize the plant it steers
        let p = params();
        // near-zero slip keeps the tanh tire curve at its linear slope
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 20.0);
        state.body_vel.y = 0.01;
        state.yaw_rate = 0.001;
        let beta_fm = front_slip_angle(&state, &p).unwrap();
        let delta = 0.001;
        let jac = acceleration_jacobian(&p, delta, beta_fm);
        let h = 1e-7;
        let dp = plant::derivatives(&state, delta + h, &p).unwrap();
        let dm = plant::derivatives(&state, delta - h, &p).unwrap();
        // lat_acc = f_y − ẋψ̇, the state-independent part differences out
        let fd_fy = (dp.lat_acc - dm.lat_acc) / (2.0 * h);
        let fd_g = (dp.yaw_acc - dm.yaw_acc) / (2.0 * h);
        assert!(
            (fd_fy - jac.dfy_ddelta).abs() / jac.dfy_ddelta.abs() < 1e-3,
            "plant fy slope {fd_fy} vs jacobian {}",
            jac.dfy_ddelta
        );
        assert!(
            (fd_g - jac.dg_ddelta).abs() / jac.dg_ddelta.abs() < 1e-3,
            "plant g slope {fd_g} vs jacobian {}",
            jac.dg_ddelta
        );
    }

    #[test]
    fn h_projection_center_of_mass_case() {
        let jac = AccelJacobian {
            dfx_ddelta: 1.0,
            dfy_ddelta: -2.0,
            dg_ddelta: 0.7,
        };
        let r = Vec2::new(3.0, -4.0);
        let h0 = h_projection(&jac, Vec2::ZERO, r);
        assert!((h0 - (1.0 * 3.0 + -2.0 * -4.0)).abs() < 1e-15);
        // flipping y_rel flips exactly the second term
        let h_flip = h_projection(&jac, Vec2::ZERO, Vec2::new(3.0, 4.0));
        assert!((h0 + h_flip - 2.0 * jac.dfx_ddelta * 3.0).abs() < 1e-12);
    }

    #[test]
    fn gain_and_closure_identity() {
        let rel = RelativeState {
            r: Vec2::new(10.0, 0.0),
            r_dot: Vec2::new(-5.0, 0.0),
            r_ddot: Vec2::ZERO,
        };
        let k = steering_gain(&rel, -100.0).unwrap();
        assert!((k - 0.5).abs() < 1e-15);

        // substituting Δδ = K_s·TD into the stability margin gives zero
        let h = -100.0;
        let td = 0.37;
        let delta = per_obstacle_delta(k, td);
        let lhs = td - (h / rel.r_dot.dot(rel.r)) * delta;
        assert!(lhs.abs() < 1e-12);
    }

    #[test]
    fn degenerate_projection_is_an_error() {
        let rel = RelativeState {
            r: Vec2::new(10.0, 0.0),
            r_dot: Vec2::new(-5.0, 0.0),
            r_ddot: Vec2::ZERO,
        };
        assert!(matches!(
            steering_gain(&rel, 1e-9),
            Err(ModelError::DegenerateProjection(_))
        ));
    }

    #[test]
    fn aggregate_keeps_extremes_of_each_sign() {
        assert!((aggregate(&[0.02, -0.01, 0.005]) - 0.01).abs() < 1e-15);
        assert_eq!(aggregate(&[0.1, 0.3]), 0.3);
        assert_eq!(aggregate(&[]), 0.0);
        assert_eq!(aggregate(&[-0.2, -0.05]), -0.2);
    }

    fn snapshot_with_right_obstacle<'a>(speed: f64) -> WorldSnapshot<'a> {
        let p = params();
        let state = VehicleState::cruise(Vec2::ZERO, 0.0, speed);
        let ego = plant::body_kinematics(&state, 0.0, &p).unwrap();
        // obstacle to the right, converging laterally toward the ego
        let obstacle_kin = BodyKinematics {
            position: Vec2::new(0.0, -4.0),
            yaw: 0.0,
            velocity: Vec2::new(speed, 2.0),
            yaw_rate: 0.0,
            acceleration: Vec2::ZERO,
            yaw_accel: 0.0,
        };
        WorldSnapshot {
            ego,
            obstacles: vec![MovingObstacle {
                id: 0,
                shape: OrientedBox::from_dims(obstacle_kin.position, 0.0, 3.6, 1.6),
                kinematics: obstacle_kin,
            }],
            road_edges: Vec::new(),
        }
    }

    #[test]
    fn no_approach_leaves_steering_unchanged() {
        let p = params();
        let state = VehicleState::cruise(Vec2::ZERO, 0.0, 20.0);
        let ego = plant::body_kinematics(&state, 0.0, &p).unwrap();
        let snapshot = WorldSnapshot {
            ego,
            obstacles: Vec::new(),
            road_edges: Vec::new(),
        };
        let decision = control_step(&snapshot, &p, 0.05).unwrap();
        assert_eq!(decision.aggregate_delta, 0.0);
        assert_eq!(decision.new_steering, 0.05);
        assert!(!decision.clamped);
    }

    #[test]
    fn right_obstacle_requires_positive_delta() {
        let p = params();
        let snapshot = snapshot_with_right_obstacle(20.0);
        let decision = control_step(&snapshot, &p, 0.0).unwrap();
        assert!(
            decision.aggregate_delta > 0.0,
            "right obstacle must push the steering counterclockwise: {decision:?}"
        );
        let active = decision
            .per_obstacle
            .iter()
            .find(|o| o.signals.difficulty > 0.0);
        assert!(active.is_some(), "approaching obstacle must register demand");
    }

    #[test]
    fn decisions_are_deterministic() {
        let p = params();
        let snapshot = snapshot_with_right_obstacle(25.0);
        let a = control_step(&snapshot, &p, 0.01).unwrap();
        let b = control_step(&snapshot, &p, 0.01).unwrap();
        assert_eq!(a.aggregate_delta.to_bits(), b.aggregate_delta.to_bits());
        assert_eq!(a.new_steering.to_bits(), b.new_steering.to_bits());
        for (x, y) in a.per_obstacle.iter().zip(&b.per_obstacle) {
            assert_eq!(x.delta.to_bits(), y.delta.to_bits());
        }
    }
}
