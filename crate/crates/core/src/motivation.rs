//! Task demand, capability, and task difficulty.
//!
//! Demand is the inverse time-to-collision of a pair of collision points;
//! capability the inverse of the time needed to drive the closing rate to
//! zero at the current relative acceleration. Difficulty is the positive
//! excess of demand over capability and drives the steering update.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::kinematics::{separation_scalars, RelativeState};

/// Per-pair motivational signals. `ttc`/`tta` are `None` when there is no
/// approach or no avoidance event (never an infinite float).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotivationSignals {
    pub demand: f64,
    pub capability: f64,
    pub difficulty: f64,
    pub ttc: Option<f64>,
    pub tta: Option<f64>,
}

impl MotivationSignals {
    pub fn quiet() -> Self {
        MotivationSignals {
            demand: 0.0,
            capability: 0.0,
            difficulty: 0.0,
            ttc: None,
            tta: None,
        }
    }
}

/// Task demand D = −(ṙ·r)/(r·r) when approaching, else 0.
pub fn demand(rel: &RelativeState) -> Result<f64, ModelError> {
    let rr = rel.r.norm_sq();
    if rr.sqrt() < crate::kinematics::CONTACT_TOL {
        return Err(ModelError::Contact(rr.sqrt()));
    }
    let closing = rel.r_dot.dot(rel.r);
    if closing < 0.0 {
        Ok(-closing / rr)
    } else {
        Ok(0.0)
    }
}

/// Capability C for a pair with demand `d`. Zero when there is no demand;
/// otherwise max(0, −(ṙ·ṙ)/(ṙ·r) − (r̈·r)/(ṙ·r) − D), which equals −S̈/Ṡ
/// on an approach.
pub fn capability(rel: &RelativeState, d: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let closing = rel.r_dot.dot(rel.r); // < 0 on an approach
    let c = -rel.r_dot.dot(rel.r_dot) / closing - rel.r_ddot.dot(rel.r) / closing - d;
    c.max(0.0)
}

/// Task difficulty TD = D − C when positive, else 0.
pub fn task_difficulty(d: f64, c: f64) -> f64 {
    if d > c {
        d - c
    } else {
        0.0
    }
}

/// All motivational signals for one collision pair.
pub fn signals(rel: &RelativeState) -> Result<MotivationSignals, ModelError> {
    let d = demand(rel)?;
    let c = capability(rel, d);
    Ok(MotivationSignals {
        demand: d,
        capability: c,
        difficulty: task_difficulty(d, c),
        ttc: (d > 0.0).then(|| 1.0 / d),
        tta: (c > 0.0).then(|| 1.0 / c),
    })
}

/// Equivalent capability route through the separation scalars: −S̈/Ṡ on an
/// approach with S̈ > 0. Exposed for cross-checking the vector form.
pub fn capability_from_separation(rel: &RelativeState) -> Result<f64, ModelError> {
    let sep = separation_scalars(rel)?;
    if sep.s_dot < 0.0 && sep.s_ddot > 0.0 {
        Ok(-sep.s_ddot / sep.s_dot)
    } else {
        Ok(0.0)
    }
}
