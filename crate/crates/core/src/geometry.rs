//! Collision-point detection between oriented boxes and road edges.
//!
//! Candidate collision points are found by casting rays from body vertices
//! along the relative-velocity direction against the other body's edges, and
//! from the vehicle vertices along its heading against road-edge polylines.
//! Demand ranking downstream picks the governing pair.

use serde::{Deserialize, Serialize};

use crate::vec2::{normalize_angle, Vec2};

/// Hits closer than this are considered the same collision pair.
pub const DEDUP_TOL: f64 = 1e-6;

/// Relative speeds below this give no approach direction to cast along.
pub const MIN_RELATIVE_SPEED: f64 = 1e-6;

const RAY_PARALLEL_TOL: f64 = 1e-12;

/// Rectangle with a pose in the world frame. `half_length` extends along the
/// local x axis (forward), `half_width` along local y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox {
    pub center: Vec2,
    pub yaw: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl OrientedBox {
    pub fn new(center: Vec2, yaw: f64, half_length: f64, half_width: f64) -> Self {
        assert!(
            half_length > 0.0 && half_width > 0.0,
            "box half-extents must be positive"
        );
        OrientedBox {
            center,
            yaw: normalize_angle(yaw),
            half_length,
            half_width,
        }
    }

    /// Convenience constructor from full length × width.
    pub fn from_dims(center: Vec2, yaw: f64, length: f64, width: f64) -> Self {
        OrientedBox::new(center, yaw, length / 2.0, width / 2.0)
    }

    pub fn local_to_world(&self, local: Vec2) -> Vec2 {
        self.center + local.rotated(self.yaw)
    }

    pub fn world_to_local(&self, world: Vec2) -> Vec2 {
        (world - self.center).rotated(-self.yaw)
    }

    /// Corners in local frame, counterclockwise from front-left.
    pub fn local_corners(&self) -> [Vec2; 4] {
        let l = self.half_length;
        let w = self.half_width;
        [
            Vec2::new(l, w),
            Vec2::new(-l, w),
            Vec2::new(-l, -w),
            Vec2::new(l, -w),
        ]
    }

    pub fn corners(&self) -> [Vec2; 4] {
        self.local_corners().map(|c| self.local_to_world(c))
    }

    /// Edges as world-frame segments, each joining consecutive corners.
    pub fn edges(&self) -> [(Vec2, Vec2); 4] {
        let c = self.corners();
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }

    /// Distance from a local-frame point to the box boundary (0 on it).
    pub fn boundary_distance_local(&self, local: Vec2) -> f64 {
        let dx = local.x.abs() - self.half_length;
        let dy = local.y.abs() - self.half_width;
        if dx <= 0.0 && dy <= 0.0 {
            // inside: distance to the nearest face
            (-dx).min(-dy)
        } else {
            let ox = dx.max(0.0);
            let oy = dy.max(0.0);
            (ox * ox + oy * oy).sqrt()
        }
    }

    /// Separating-axis overlap test (closed boxes; touching counts as overlap).
    pub fn overlaps(&self, other: &OrientedBox) -> bool {
        let axes = [
            Vec2::new(self.yaw.cos(), self.yaw.sin()),
            Vec2::new(-self.yaw.sin(), self.yaw.cos()),
            Vec2::new(other.yaw.cos(), other.yaw.sin()),
            Vec2::new(-other.yaw.sin(), other.yaw.cos()),
        ];
        let a = self.corners();
        let b = other.corners();
        for axis in axes {
            let (min_a, max_a) = project(&a, axis);
            let (min_b, max_b) = project(&b, axis);
            if max_a < min_b || max_b < min_a {
                return false;
            }
        }
        true
    }
}

fn project(corners: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    let mut min = corners[0].dot(axis);
    let mut max = min;
    for c in &corners[1..] {
        let p = c.dot(axis);
        min = min.min(p);
        max = max.max(p);
    }
    (min, max)
}

/// Which side of the road an edge bounds, relative to the travel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoadSide {
    Left,
    Right,
}

/// Static road boundary as an ordered polyline along the travel direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub points: Vec<Vec2>,
    pub side: RoadSide,
}

impl RoadEdge {
    pub fn new(points: Vec<Vec2>, side: RoadSide) -> Self {
        assert!(points.len() >= 2, "road edge needs at least 2 points");
        for w in points.windows(2) {
            assert!(
                w[0].distance(w[1]) > 0.0,
                "road edge has coincident consecutive points"
            );
        }
        RoadEdge { points, side }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// True when `p` lies beyond the edge, outside the drivable region.
    ///
    /// For a left edge the road interior is to the right of the point order;
    /// a point to the polyline's left has crossed it.
    pub fn violates(&self, p: Vec2) -> bool {
        // side test against the segment nearest to p
        let mut best_d2 = f64::INFINITY;
        let mut best_cross = 0.0;
        for (a, b) in self.segments() {
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
            let closest = a + ab * t;
            let d2 = (p - closest).norm_sq();
            if d2 < best_d2 {
                best_d2 = d2;
                best_cross = ab.cross(p - a);
            }
        }
        match self.side {
            RoadSide::Left => best_cross > 0.0,
            RoadSide::Right => best_cross < 0.0,
        }
    }
}

/// What body the obstacle-side attach point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstacleKind {
    Box,
    RoadEdge,
}

/// Matched candidate collision points: one on the vehicle boundary, one on
/// the obstacle boundary (or road polyline). Box points are body-frame
/// offsets; road points are fixed world coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttachPointPair {
    pub vehicle_local: Vec2,
    pub obstacle_local: Vec2,
    pub kind: ObstacleKind,
}

/// Nearest intersection of the forward ray `origin + t·direction` (t ≥ 0)
/// with the closed segment `[a, b]`, if any. `direction` must be unit length.
pub fn ray_segment_intersection(origin: Vec2, direction: Vec2, a: Vec2, b: Vec2) -> Option<Vec2> {
    debug_assert!((direction.norm() - 1.0).abs() < 1e-9);
    let seg = b - a;
    let denom = direction.cross(seg);
    if denom.abs() < RAY_PARALLEL_TOL {
        return None;
    }
    let diff = a - origin;
    let t = diff.cross(seg) / denom;
    let u = diff.cross(direction) / denom;
    if t >= 0.0 && (0.0..=1.0).contains(&u) {
        Some(origin + direction * t)
    } else {
        None
    }
}

fn nearest_box_hit(origin: Vec2, direction: Vec2, target: &OrientedBox) -> Option<Vec2> {
    let mut best: Option<(f64, Vec2)> = None;
    for (a, b) in target.edges() {
        if let Some(p) = ray_segment_intersection(origin, direction, a, b) {
            let t = (p - origin).dot(direction);
            if best.map_or(true, |(bt, _)| t < bt) {
                best = Some((t, p));
            }
        }
    }
    best.map(|(_, p)| p)
}

/// Candidate collision pairs between the vehicle and a moving box obstacle.
///
/// `v_rel` is the obstacle velocity minus the vehicle velocity in the world
/// frame. Obstacle vertices are cast along `v_rel`; vehicle vertices along
/// its negation. Each nearest hit yields one pair; coincident hits (within
/// [`DEDUP_TOL`]) are deduplicated. Near-zero relative velocity yields an
/// empty set: without an approach direction the demand is zero anyway.
pub fn candidate_pairs_box(
    vehicle: &OrientedBox,
    obstacle: &OrientedBox,
    v_rel: Vec2,
) -> Vec<AttachPointPair> {
    let Some(dir) = v_rel.normalized(MIN_RELATIVE_SPEED) else {
        return Vec::new();
    };

    let mut pairs: Vec<(Vec2, Vec2)> = Vec::new(); // (vehicle world, obstacle world)

    // obstacle vertices travel along +v_rel in the vehicle's rest frame
    for corner in obstacle.corners() {
        if let Some(hit) = nearest_box_hit(corner, dir, vehicle) {
            pairs.push((hit, corner));
        }
    }
    // vehicle vertices travel along -v_rel in the obstacle's rest frame
    for corner in vehicle.corners() {
        if let Some(hit) = nearest_box_hit(corner, -dir, obstacle) {
            pairs.push((corner, hit));
        }
    }

    let mut out: Vec<AttachPointPair> = Vec::new();
    let mut kept: Vec<(Vec2, Vec2)> = Vec::new();
    for (vw, ow) in pairs {
        let dup = kept
            .iter()
            .any(|(kv, ko)| kv.distance(vw) < DEDUP_TOL && ko.distance(ow) < DEDUP_TOL);
        if !dup {
            kept.push((vw, ow));
            out.push(AttachPointPair {
                vehicle_local: vehicle.world_to_local(vw),
                obstacle_local: obstacle.world_to_local(ow),
                kind: ObstacleKind::Box,
            });
        }
    }
    out
}

/// A vehicle vertex on a crossing course with a road edge.
///
/// The forward ray locates the crossed segment; the lateral geometry (the
/// perpendicular foot on that segment's line) describes how the vertex
/// closes on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadCrossing {
    pub vehicle_local: Vec2,
    pub corner_world: Vec2,
    /// Ray intersection with the crossed segment.
    pub hit_world: Vec2,
    /// Perpendicular foot of the vertex on the crossed segment's line.
    pub foot_world: Vec2,
    /// Unit normal from the vertex toward the line.
    pub normal: Vec2,
    /// Perpendicular distance to the line, m.
    pub lateral_gap: f64,
}

/// Vehicle vertices on a crossing course with the edge, one forward ray per
/// vertex along `heading_dir` (the velocity direction of the vehicle center
/// of mass), keeping the nearest polyline hit per vertex.
pub fn road_crossings(
    vehicle: &OrientedBox,
    heading_dir: Vec2,
    edge: &RoadEdge,
) -> Vec<RoadCrossing> {
    let Some(dir) = heading_dir.normalized(MIN_RELATIVE_SPEED) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for corner in vehicle.corners() {
        let mut best: Option<(f64, Vec2, Vec2, Vec2)> = None;
        for (a, b) in edge.segments() {
            if let Some(p) = ray_segment_intersection(corner, dir, a, b) {
                let t = (p - corner).dot(dir);
                if best.map_or(true, |(bt, _, _, _)| t < bt) {
                    best = Some((t, p, a, b));
                }
            }
        }
        if let Some((_, hit, a, b)) = best {
            let tangent = (b - a).normalized(1e-12).expect("degenerate road segment");
            let diff = corner - a;
            let foot = a + tangent * diff.dot(tangent);
            let perp = foot - corner;
            let gap = perp.norm();
            if let Some(normal) = perp.normalized(1e-12) {
                out.push(RoadCrossing {
                    vehicle_local: vehicle.world_to_local(corner),
                    corner_world: corner,
                    hit_world: hit,
                    foot_world: foot,
                    normal,
                    lateral_gap: gap,
                });
            }
        }
    }
    out
}

/// Lateral proximity of a vehicle vertex to its nearest edge segment,
/// independent of the forward rays. Catches rotation-driven closure that
/// the ray casts cannot see (a rear corner swinging toward the edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadProximity {
    pub vehicle_local: Vec2,
    pub corner_world: Vec2,
    /// Nearest point of the polyline.
    pub foot_world: Vec2,
    /// Unit normal from the vertex toward the nearest point.
    pub normal: Vec2,
    pub lateral_gap: f64,
}

/// Nearest-point geometry for every vehicle vertex against the edge.
pub fn road_proximities(vehicle: &OrientedBox, edge: &RoadEdge) -> Vec<RoadProximity> {
    let mut out = Vec::with_capacity(4);
    for corner in vehicle.corners() {
        let mut best: Option<(f64, Vec2)> = None;
        for (a, b) in edge.segments() {
            let ab = b - a;
            let t = ((corner - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
            let foot = a + ab * t;
            let d2 = (corner - foot).norm_sq();
            if best.map_or(true, |(bd, _)| d2 < bd) {
                best = Some((d2, foot));
            }
        }
        if let Some((d2, foot)) = best {
            let gap = d2.sqrt();
            if let Some(normal) = (foot - corner).normalized(1e-12) {
                out.push(RoadProximity {
                    vehicle_local: vehicle.world_to_local(corner),
                    corner_world: corner,
                    foot_world: foot,
                    normal,
                    lateral_gap: gap,
                });
            }
        }
    }
    out
}

/// Candidate collision pairs between the vehicle and a static road edge:
/// the nearest forward-ray hit per vehicle vertex, with the obstacle point
/// fixed in the world.
pub fn candidate_pairs_road(
    vehicle: &OrientedBox,
    heading_dir: Vec2,
    edge: &RoadEdge,
) -> Vec<AttachPointPair> {
    road_crossings(vehicle, heading_dir, edge)
        .into_iter()
        .map(|c| AttachPointPair {
            vehicle_local: c.vehicle_local,
            obstacle_local: c.hit_world,
            kind: ObstacleKind::RoadEdge,
        })
        .collect()
}
