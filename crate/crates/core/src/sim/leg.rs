//! Two-link sagittal leg. Angles are measured from the body's downward axis;
//! with both angles zero the leg hangs straight down.

use nalgebra::{Matrix2, Vector2};

use super::RobotParams;

/// Foot position relative to the hip (body frame) and its joint Jacobian.
pub fn leg_kinematics(th_hip: f64, th_knee: f64, p: &RobotParams) -> (Vector2<f64>, Matrix2<f64>) {
    let (l1, l2) = (p.l_ulimb, p.l_llimb);
    let a = th_hip;
    let b = th_hip + th_knee;
    let pos = Vector2::new(l1 * a.sin() + l2 * b.sin(), -l1 * a.cos() - l2 * b.cos());
    let jac = Matrix2::new(
        l1 * a.cos() + l2 * b.cos(),
        l2 * b.cos(),
        l1 * a.sin() + l2 * b.sin(),
        l2 * b.sin(),
    );
    (pos, jac)
}

/// Joint angles placing the foot at `foot` (body frame), knee angle in `[0, pi]`.
///
/// Targets outside the reachable annulus are projected onto it.
pub fn leg_inverse_kinematics(foot: Vector2<f64>, p: &RobotParams) -> (f64, f64) {
    let (l1, l2) = (p.l_ulimb, p.l_llimb);
    let r_min = (l2 - l1).abs() + 1e-9;
    let r_max = l1 + l2 - 1e-9;
    let r = foot.norm().clamp(r_min, r_max);
    let cos_k = ((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let th_knee = cos_k.acos();
    let alpha = foot.x.atan2(-foot.y);
    let th_hip = alpha - (l2 * th_knee.sin()).atan2(l1 + l2 * th_knee.cos());
    (th_hip, th_knee)
}
