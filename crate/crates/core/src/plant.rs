//! Planar nonlinear bicycle plant.
//!
//! Linear-then-saturating lateral tire forces (tanh, bounded by μF_z),
//! longitudinal speed held exactly constant (scenarios fix speed and pedals
//! are unused), classical RK4 integration at a substep beneath the control
//! period with zero-order-hold steering.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::kinematics::BodyKinematics;
use crate::steering::VehicleParams;
use crate::vec2::{normalize_angle, Vec2};

/// Below this longitudinal speed the slip-angle model is undefined.
pub const MIN_LONGITUDINAL_SPEED: f64 = 0.1;

/// Plant state: world pose, body-frame velocities, yaw rate, and the tire
/// steering angle currently applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub position: Vec2,
    pub yaw: f64,
    /// Body-frame velocity (longitudinal, lateral) in m/s.
    pub body_vel: Vec2,
    pub yaw_rate: f64,
    /// Tire steering angle in radians.
    pub steering: f64,
}

impl VehicleState {
    /// Straight-ahead cruise at `speed` m/s from `position` with heading `yaw`.
    pub fn cruise(position: Vec2, yaw: f64, speed: f64) -> Self {
        VehicleState {
            position,
            yaw,
            body_vel: Vec2::new(speed, 0.0),
            yaw_rate: 0.0,
            steering: 0.0,
        }
    }
}

/// Time derivative of the plant state. Longitudinal acceleration is zero by
/// construction (speed held).
#[derive(Debug, Clone, Copy)]
pub struct StateDerivative {
    pub pos_dot: Vec2,
    pub yaw_dot: f64,
    /// d(ẏ)/dt in the body frame.
    pub lat_acc: f64,
    pub yaw_acc: f64,
}

/// Front and rear axle lateral forces in newtons.
///
/// Slip angles follow the (velocity-angle − steer) convention; the force is
/// −μF_z·tanh(Cα/(μF_z)): slope C at small slip, saturating at the friction
/// limit.
pub fn lateral_tire_forces(
    state: &VehicleState,
    delta: f64,
    params: &VehicleParams,
) -> Result<(f64, f64), ModelError> {
    let vx = state.body_vel.x;
    if vx < MIN_LONGITUDINAL_SPEED {
        return Err(ModelError::Standstill(vx));
    }
    let vy = state.body_vel.y;
    let beta_front = ((vy + params.lf * state.yaw_rate) / vx).atan();
    let alpha_front = beta_front - delta;
    let alpha_rear = ((vy - params.lr * state.yaw_rate) / vx).atan();

    let f_front = saturating_force(
        alpha_front,
        params.cornering_stiffness_front,
        params.friction_mu * params.wheel_load_front,
    );
    let f_rear = saturating_force(
        alpha_rear,
        params.cornering_stiffness_rear,
        params.friction_mu * params.wheel_load_rear,
    );
    Ok((f_front, f_rear))
}

fn saturating_force(alpha: f64, stiffness: f64, limit: f64) -> f64 {
    -limit * (stiffness * alpha / limit).tanh()
}

/// Plant equations of motion at the given steering angle.
pub fn derivatives(
    state: &VehicleState,
    delta: f64,
    params: &VehicleParams,
) -> Result<StateDerivative, ModelError> {
    let (f_front, f_rear) = lateral_tire_forces(state, delta, params)?;
    let fy = (f_front * delta.cos() + f_rear) / params.mass;
    let g = (f_front * params.lf * delta.cos() - f_rear * params.lr) / params.yaw_inertia;
    Ok(StateDerivative {
        pos_dot: state.body_vel.rotated(state.yaw),
        yaw_dot: state.yaw_rate,
        lat_acc: fy - state.body_vel.x * state.yaw_rate,
        yaw_acc: g,
    })
}

/// One classical RK4 step of length `dt` with steering held at `delta`.
pub fn integrate(
    state: &VehicleState,
    delta: f64,
    dt: f64,
    params: &VehicleParams,
) -> Result<VehicleState, ModelError> {
    assert!(dt > 0.0, "integration step must be positive");
    let k1 = derivatives(state, delta, params)?;
    let s2 = advance(state, &k1, dt / 2.0);
    let k2 = derivatives(&s2, delta, params)?;
    let s3 = advance(state, &k2, dt / 2.0);
    let k3 = derivatives(&s3, delta, params)?;
    let s4 = advance(state, &k3, dt);
    let k4 = derivatives(&s4, delta, params)?;

    let sixth = dt / 6.0;
    let mut out = VehicleState {
        position: state.position
            + (k1.pos_dot + 2.0 * k2.pos_dot + 2.0 * k3.pos_dot + k4.pos_dot) * sixth,
        yaw: state.yaw + (k1.yaw_dot + 2.0 * k2.yaw_dot + 2.0 * k3.yaw_dot + k4.yaw_dot) * sixth,
        body_vel: Vec2::new(
            state.body_vel.x,
            state.body_vel.y
                + (k1.lat_acc + 2.0 * k2.lat_acc + 2.0 * k3.lat_acc + k4.lat_acc) * sixth,
        ),
        yaw_rate: state.yaw_rate
            + (k1.yaw_acc + 2.0 * k2.yaw_acc + 2.0 * k3.yaw_acc + k4.yaw_acc) * sixth,
        steering: delta,
    };
    out.yaw = normalize_angle(out.yaw);
    Ok(out)
}

fn advance(state: &VehicleState, d: &StateDerivative, dt: f64) -> VehicleState {
    VehicleState {
        position: state.position + d.pos_dot * dt,
        yaw: state.yaw + d.yaw_dot * dt,
        body_vel: Vec2::new(state.body_vel.x, state.body_vel.y + d.lat_acc * dt),
        yaw_rate: state.yaw_rate + d.yaw_acc * dt,
        steering: state.steering,
    }
}

/// World-frame rigid-body kinematics of the center of mass at the current
/// state and steering, including the true plant accelerations. This is what
/// the steering controller observes.
pub fn body_kinematics(
    state: &VehicleState,
    delta: f64,
    params: &VehicleParams,
) -> Result<BodyKinematics, ModelError> {
    let d = derivatives(state, delta, params)?;
    // inertial acceleration in body coordinates; longitudinal speed is held,
    // so the x component is purely kinematic
    let a_body = Vec2::new(
        -state.yaw_rate * state.body_vel.y,
        d.lat_acc + state.yaw_rate * state.body_vel.x,
    );
    Ok(BodyKinematics {
        position: state.position,
        yaw: state.yaw,
        velocity: state.body_vel.rotated(state.yaw),
        yaw_rate: state.yaw_rate,
        acceleration: a_body.rotated(state.yaw),
        yaw_accel: d.yaw_acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn zero_slip_means_zero_forces() {
        let state = VehicleState::cruise(Vec2::ZERO, 0.0, 20.0);
        let (ff, fr) = lateral_tire_forces(&state, 0.0, &params()).unwrap();
        assert_eq!(ff, 0.0);
        assert_eq!(fr, 0.0);
    }

    #[test]
    fn forces_bounded_by_friction_limit() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 20.0);
        state.body_vel.y = 8.0;
        state.yaw_rate = 1.5;
        for &d in &[-0.6, -0.2, 0.0, 0.2, 0.6] {
            let (ff, fr) = lateral_tire_forces(&state, d, &p).unwrap();
            assert!(ff.abs() <= p.friction_mu * p.wheel_load_front + 1e-9);
            assert!(fr.abs() <= p.friction_mu * p.wheel_load_rear + 1e-9);
        }
    }

    #[test]
    fn small_slip_slope_matches_stiffness() {
        let p = params();
        let limit = p.friction_mu * p.wheel_load_front;
        let c = p.cornering_stiffness_front;
        // tanh(x)/x = 1 - x²/3 + O(x⁴): 0.5% secant-slope error at x ≈ 0.1225
        let alpha_half_pct = 0.1225 * limit / c;
        let f = saturating_force(alpha_half_pct, c, limit);
        let slope = -f / alpha_half_pct;
        assert!((slope - c).abs() / c < 0.005, "slope {slope} vs {c}");
        // and safely inside 3% out to x = 0.3
        let alpha3 = 0.3 * limit / c;
        let slope3 = -saturating_force(alpha3, c, limit) / alpha3;
        assert!((slope3 - c).abs() / c < 0.03);
    }

    #[test]
    fn standstill_is_an_error() {
        let state = VehicleState::cruise(Vec2::ZERO, 0.0, 0.05);
        assert!(matches!(
            lateral_tire_forces(&state, 0.0, &params()),
            Err(ModelError::Standstill(_))
        ));
    }

    #[test]
    fn straight_line_has_no_lateral_motion() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 27.78);
        let dt = 1.0 / 240.0;
        while state.position.x < 100.0 {
            state = integrate(&state, 0.0, dt, &p).unwrap();
        }
        assert!(state.position.y.abs() < 1e-9);
        assert!(state.yaw.abs() < 1e-12);
        assert_eq!(state.body_vel.x, 27.78);
    }

    #[test]
    fn longitudinal_speed_held_bitwise() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, 30.556);
        for k in 0..2000 {
            let delta = 0.05 * ((k as f64) * 0.01).sin();
            state = integrate(&state, delta, 1.0 / 240.0, &p).unwrap();
            assert_eq!(state.body_vel.x, 30.556);
        }
    }

    #[test]
    fn steady_state_yaw_rate_matches_linear_bicycle() {
        let p = params();
        let v = 20.0;
        let delta = 0.01;
        // linear bicycle equilibrium: F_f + F_r = m·v·ψ̇, F_f·lf = F_r·lr,
        // with F_f = C_f(δ - (ẏ+lf·ψ̇)/v), F_r = -C_r(ẏ-lr·ψ̇)/v.
        // Solve the 2×2 system for (ẏ, ψ̇).
        let cf = p.cornering_stiffness_front;
        let cr = p.cornering_stiffness_rear;
        let (lf, lr, m) = (p.lf, p.lr, p.mass);
        // a11·ẏ + a12·ψ̇ = b1 (force balance), a21·ẏ + a22·ψ̇ = b2 (moment)
        let a11 = -(cf + cr) / v;
        let a12 = (-cf * lf + cr * lr) / v - m * v;
        let b1 = -cf * delta;
        let a21 = (-cf * lf + cr * lr) / v;
        let a22 = -(cf * lf * lf + cr * lr * lr) / v;
        let b2 = -cf * lf * delta;
        let det = a11 * a22 - a12 * a21;
        let yaw_rate_ss = (a11 * b2 - a21 * b1) / det;

        let mut state = VehicleState::cruise(Vec2::ZERO, 0.0, v);
        for _ in 0..2400 {
            state = integrate(&state, delta, 1.0 / 240.0, &p).unwrap();
        }
        assert!(
            (state.yaw_rate - yaw_rate_ss).abs() / yaw_rate_ss.abs() < 0.02,
            "converged {} vs linear {}",
            state.yaw_rate,
            yaw_rate_ss
        );
    }

    #[test]
    fn rk4_global_error_is_fourth_order() {
        let p = params();
        let start = {
            let mut s = VehicleState::cruise(Vec2::ZERO, 0.0, 25.0);
            s.body_vel.y = 0.5;
            s.yaw_rate = 0.1;
            s
        };
        let delta = 0.03;
        let horizon = 1.0;
        let run = |dt: f64| {
            let mut s = start;
            let n = (horizon / dt).round() as usize;
            for _ in 0..n {
                s = integrate(&s, delta, dt, &p).unwrap();
            }
            s
        };
        let reference = run(1.0 / 3840.0);
        let err = |s: &VehicleState| {
            (s.position - reference.position).norm()
                + (s.yaw - reference.yaw).abs()
                + (s.body_vel.y - reference.body_vel.y).abs()
                + (s.yaw_rate - reference.yaw_rate).abs()
        };
        let e1 = err(&run(1.0 / 60.0));
        let e2 = err(&run(1.0 / 120.0));
        let ratio = e1 / e2;
        assert!(
            (10.0..26.0).contains(&ratio),
            "error ratio {ratio} not ~16 (e1={e1:.3e}, e2={e2:.3e})"
        );
    }

    #[test]
    fn controller_sees_plant_acceleration() {
        let p = params();
        let mut state = VehicleState::cruise(Vec2::ZERO, 0.3, 22.0);
        state.body_vel.y = 0.4;
        state.yaw_rate = 0.12;
        let kin = body_kinematics(&state, 0.02, &p).unwrap();
        // finite-difference the world velocity of the integrated trajectory
        let h = 1e-6;
        let fwd = integrate(&state, 0.02, h, &p).unwrap();
        let v0 = state.body_vel.rotated(state.yaw);
        let v1 = fwd.body_vel.rotated(fwd.yaw);
        let fd = (v1 - v0) / h;
        assert!(
            (fd - kin.acceleration).norm() < 1e-4,
            "fd {fd:?} vs {:?}",
            kin.acceleration
        );
    }
}
