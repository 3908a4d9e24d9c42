use nalgebra::Vector2;

use super::ContactModel;

/// Ground reaction on one physical foot: `(tangential, normal)`.
///
/// Penalty spring-damper normal force (never pulling), and Coulomb friction
/// linearly regularized below `v_slip_eps`.
pub fn contact_forces(foot_pos: Vector2<f64>, foot_vel: Vector2<f64>, c: &ContactModel) -> Vector2<f64> {
    let f_n = normal_force(foot_pos.y, foot_vel.y, c);
    Vector2::new(friction_force(foot_vel.x, f_n, c), f_n)
}

pub fn normal_force(z: f64, zdot: f64, c: &ContactModel) -> f64 {
    if z > 0.0 {
        return 0.0;
    }
    (-c.k_n * z - c.c_n * zdot).max(0.0)
}

pub fn friction_force(xdot: f64, f_n: f64, c: &ContactModel) -> f64 {
    -c.mu * f_n * (xdot / c.v_slip_eps).clamp(-1.0, 1.0)
}

/// Elastic energy stored in the normal penalty spring.
pub fn penetration_energy(z: f64, c: &ContactModel) -> f64 {
    if z >= 0.0 {
        0.0
    } else {
        0.5 * c.k_n * z * z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airborne_foot() {
        let f = contact_forces(Vector2::new(0.0, 0.01), Vector2::new(1.0, -1.0), &ContactModel::default());
        assert_eq!(f, Vector2::zeros());
    }

    #[test]
    fn static_penetration() {
        let f = contact_forces(Vector2::new(0.0, -0.001), Vector2::zeros(), &ContactModel::default());
        assert!((f.y - 20.0).abs() < 1e-12);
        assert_eq!(f.x, 0.0);
    }

    #[test]
    fn sliding_hits_coulomb_cap() {
        let c = ContactModel::default();
        let f = contact_forces(Vector2::new(0.0, -0.001), Vector2::new(0.5, 0.0), &c);
        assert!((f.x + 12.0).abs() < 1e-12);
        let f = contact_forces(Vector2::new(0.0, -0.001), Vector2::new(-0.5, 0.0), &c);
        assert!((f.x - 12.0).abs() < 1e-12);
    }

    #[test]
    fn separating_contact_does_not_pull() {
        let f = contact_forces(Vector2::new(0.0, -0.0001), Vector2::new(0.0, 1.0), &ContactModel::default());
        assert_eq!(f.y, 0.0);
    }
}
