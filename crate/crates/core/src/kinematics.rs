//! Relative kinematics between matched collision points.
//!
//! Given full rigid-body states for the vehicle and an obstacle plus the
//! body-frame attach points, computes the relative position, velocity, and
//! acceleration vectors and the scalar separation with its derivatives.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::vec2::Vec2;

/// Separations below this count as contact (collision has occurred).
pub const CONTACT_TOL: f64 = 1e-9;

/// World-frame rigid-body state: pose, twist, and accelerations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyKinematics {
    pub position: Vec2,
    pub yaw: f64,
    pub velocity: Vec2,
    pub yaw_rate: f64,
    pub acceleration: Vec2,
    pub yaw_accel: f64,
}

impl BodyKinematics {
    /// A fixed body at the world origin; used for static road geometry,
    /// whose attach points are world coordinates.
    pub fn stationary() -> Self {
        BodyKinematics {
            position: Vec2::ZERO,
            yaw: 0.0,
            velocity: Vec2::ZERO,
            yaw_rate: 0.0,
            acceleration: Vec2::ZERO,
            yaw_accel: 0.0,
        }
    }

    /// World position of a body-frame point.
    pub fn point_position(&self, local: Vec2) -> Vec2 {
        self.position + local.rotated(self.yaw)
    }

    /// World velocity of a body-frame point: v + ψ̇·R'(ψ)p.
    pub fn point_velocity(&self, local: Vec2) -> Vec2 {
        self.velocity + local.rotated(self.yaw).perp() * self.yaw_rate
    }

    /// World acceleration of a body-frame point, with centripetal (ψ̇²) and
    /// angular (ψ̈) contributions.
    pub fn point_acceleration(&self, local: Vec2) -> Vec2 {
        let r = local.rotated(self.yaw);
        self.acceleration + r.perp() * self.yaw_accel - r * (self.yaw_rate * self.yaw_rate)
    }
}

/// Relative position/velocity/acceleration from the vehicle attach point to
/// the obstacle attach point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeState {
    pub r: Vec2,
    pub r_dot: Vec2,
    pub r_ddot: Vec2,
}

/// Scalar separation and its time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationScalars {
    pub s: f64,
    pub s_dot: f64,
    pub s_ddot: f64,
}

/// Relative state between the obstacle point `oc` and vehicle point `vp`
/// (both body-frame offsets). Each body contributes the standard rigid-body
/// point derivatives independently.
pub fn relative_state(
    vehicle: &BodyKinematics,
    vp: Vec2,
    obstacle: &BodyKinematics,
    oc: Vec2,
) -> RelativeState {
    RelativeState {
        r: obstacle.point_position(oc) - vehicle.point_position(vp),
        r_dot: obstacle.point_velocity(oc) - vehicle.point_velocity(vp),
        r_ddot: obstacle.point_acceleration(oc) - vehicle.point_acceleration(vp),
    }
}

/// Separation S = |r| with Ṡ and S̈ from the relative vectors.
pub fn separation_scalars(rel: &RelativeState) -> Result<SeparationScalars, ModelError> {
    let s = rel.r.norm();
    if s < CONTACT_TOL {
        return Err(ModelError::Contact(s));
    }
    let s_dot = rel.r_dot.dot(rel.r) / s;
    let s_ddot = (rel.r_dot.dot(rel.r_dot) + rel.r_ddot.dot(rel.r)) / s - s_dot * s_dot / s;
    Ok(SeparationScalars { s, s_dot, s_ddot })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(
        position: Vec2,
        yaw: f64,
        velocity: Vec2,
        yaw_rate: f64,
        acceleration: Vec2,
        yaw_accel: f64,
    ) -> BodyKinematics {
        BodyKinematics {
            position,
            yaw,
            velocity,
            yaw_rate,
            acceleration,
            yaw_accel,
        }
    }

    #[test]
    fn static_bodies_reduce_to_offsets() {
        let v = body(Vec2::new(1.0, 1.0), 0.0, Vec2::ZERO, 0.0, Vec2::ZERO, 0.0);
        let o = body(Vec2::new(5.0, 2.0), 0.0, Vec2::ZERO, 0.0, Vec2::ZERO, 0.0);
        let rel = relative_state(&v, Vec2::new(1.0, 0.5), &o, Vec2::new(-1.0, 0.0));
        assert_eq!(rel.r, Vec2::new(2.0, 0.5));
        assert_eq!(rel.r_dot, Vec2::ZERO);
        assert_eq!(rel.r_ddot, Vec2::ZERO);
    }

    #[test]
    fn spinning_vehicle_point_velocity() {
        // vp=(1,0), ψ=0, ψ̇=1: the vehicle point moves at (0,1), so ṙ = (0,-1)
        let v = body(Vec2::ZERO, 0.0, Vec2::ZERO, 1.0, Vec2::ZERO, 0.0);
        let o = body(Vec2::new(10.0, 0.0), 0.0, Vec2::ZERO, 0.0, Vec2::ZERO, 0.0);
        let rel = relative_state(&v, Vec2::new(1.0, 0.0), &o, Vec2::ZERO);
        assert!((rel.r_dot.x).abs() < 1e-15);
        assert!((rel.r_dot.y + 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_separation_scalars() {
        let rel = RelativeState {
            r: Vec2::new(10.0, 0.0),
            r_dot: Vec2::new(-5.0, 0.0),
            r_ddot: Vec2::new(1.0, 0.0),
        };
        let s = separation_scalars(&rel).unwrap();
        assert_eq!(s.s, 10.0);
        assert_eq!(s.s_dot, -5.0);
        assert!((s.s_ddot - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_velocity_gives_zero_s_dot() {
        let rel = RelativeState {
            r: Vec2::new(3.0, 4.0),
            r_dot: Vec2::ZERO,
            r_ddot: Vec2::new(0.4, 1.0),
        };
        let s = separation_scalars(&rel).unwrap();
        assert_eq!(s.s, 5.0);
        assert_eq!(s.s_dot, 0.0);
        let expect = rel.r_ddot.dot(rel.r) / 5.0;
        assert!((s.s_ddot - expect).abs() < 1e-12);
    }

    #[test]
    fn contact_is_an_error() {
        let rel = RelativeState {
            r: Vec2::new(1e-12, 0.0),
            r_dot: Vec2::new(-1.0, 0.0),
            r_ddot: Vec2::ZERO,
        };
        assert!(matches!(
            separation_scalars(&rel),
            Err(ModelError::Contact(_))
        ));
    }

    /// Analytic test trajectory with closed-form derivatives.
    fn trajectory_at(t: f64) -> (BodyKinematics, BodyKinematics) {
        // vehicle: sinusoidal weave; obstacle: decelerating arc
        let v = body(
            Vec2::new(8.0 * t, 0.7 * (1.3 * t).sin()),
            0.3 * (0.9 * t).sin(),
            Vec2::new(8.0, 0.7 * 1.3 * (1.3 * t).cos()),
            0.3 * 0.9 * (0.9 * t).cos(),
            Vec2::new(0.0, -0.7 * 1.3 * 1.3 * (1.3 * t).sin()),
            -0.3 * 0.9 * 0.9 * (0.9 * t).sin(),
        );
        let o = body(
            Vec2::new(30.0 - 2.0 * t - 0.4 * t * t, 5.0 + 0.5 * t),
            0.2 * t + 0.05 * t * t,
            Vec2::new(-2.0 - 0.8 * t, 0.5),
            0.2 + 0.1 * t,
            Vec2::new(-0.8, 0.0),
            0.1,
        );
        (v, o)
    }

    #[test]
    fn relative_derivatives_match_finite_differences() {
        let vp = Vec2::new(2.2, 0.85);
        let oc = Vec2::new(-1.8, -0.8);
        let h = 1e-5;
        for &t in &[0.0, 0.37, 1.1, 2.6] {
            let (v, o) = trajectory_at(t);
            let rel = relative_state(&v, vp, &o, oc);
            let (vm, om) = trajectory_at(t - h);
            let (vpl, opl) = trajectory_at(t + h);
            let rm = relative_state(&vm, vp, &om, oc);
            let rp = relative_state(&vpl, vp, &opl, oc);

            let fd_rdot = (rp.r - rm.r) / (2.0 * h);
            let fd_rddot = (rp.r_dot - rm.r_dot) / (2.0 * h);
            assert!(
                (fd_rdot - rel.r_dot).norm() <= 1e-6 * rel.r_dot.norm().max(1.0),
                "t={t}: r_dot {fd_rdot:?} vs {:?}",
                rel.r_dot
            );
            assert!(
                (fd_rddot - rel.r_ddot).norm() <= 1e-6 * rel.r_ddot.norm().max(1.0),
                "t={t}: r_ddot {fd_rddot:?} vs {:?}",
                rel.r_ddot
            );

            // scalar derivatives against finite differences of s
            let s = separation_scalars(&rel).unwrap();
            let sm = separation_scalars(&rm).unwrap();
            let sp = separation_scalars(&rp).unwrap();
            let fd_sdot = (sp.s - sm.s) / (2.0 * h);
            let fd_sddot = (sp.s_dot - sm.s_dot) / (2.0 * h);
            assert!((fd_sdot - s.s_dot).abs() <= 1e-6 * s.s_dot.abs().max(1.0));
            assert!((fd_sddot - s.s_ddot).abs() <= 1e-6 * s.s_ddot.abs().max(1.0));
        }
    }

    #[test]
    fn frame_invariance_under_shared_translation_and_velocity() {
        let (mut v, mut o) = trajectory_at(0.8);
        let vp = Vec2::new(1.0, -0.5);
        let oc = Vec2::new(0.5, 0.3);
        let base = relative_state(&v, vp, &o, oc);
        let shift = Vec2::new(123.0, -45.0);
        let vel = Vec2::new(3.0, 7.0);
        v.position += shift;
        o.position += shift;
        v.velocity += vel;
        o.velocity += vel;
        let moved = relative_state(&v, vp, &o, oc);
        assert!((moved.r - base.r).norm() < 1e-12);
        assert!((moved.r_dot - base.r_dot).norm() < 1e-12);
        assert!((moved.r_ddot - base.r_ddot).norm() < 1e-12);
    }

    #[test]
    fn swapping_bodies_negates_vectors_keeps_scalars() {
        let (v, o) = trajectory_at(1.4);
        let vp = Vec2::new(2.0, 0.8);
        let oc = Vec2::new(-1.5, 0.2);
        let ab = relative_state(&v, vp, &o, oc);
        let ba = relative_state(&o, oc, &v, vp);
        assert!((ab.r + ba.r).norm() < 1e-12);
        assert!((ab.r_dot + ba.r_dot).norm() < 1e-12);
        assert!((ab.r_ddot + ba.r_ddot).norm() < 1e-12);
        let sa = separation_scalars(&ab).unwrap();
        let sb = separation_scalars(&ba).unwrap();
        assert!((sa.s - sb.s).abs() < 1e-12);
        assert!((sa.s_dot - sb.s_dot).abs() < 1e-12);
        assert!((sa.s_ddot - sb.s_ddot).abs() < 1e-12);
    }
}
