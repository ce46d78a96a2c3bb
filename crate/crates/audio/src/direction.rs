use crate::AudioError;
use serde::{Deserialize, Serialize};

/// A direction in the array frame: inclination theta in [0, 180] measured
/// from the +z axis, azimuth phi in [0, 360) from +x toward +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl Direction {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Result<Direction, AudioError> {
        if !(0.0..=180.0).contains(&theta_deg)
            || !(0.0..360.0).contains(&phi_deg)
            || theta_deg.is_nan()
            || phi_deg.is_nan()
        {
            return Err(AudioError::BadDirection(theta_deg, phi_deg));
        }
        Ok(Direction { theta_deg, phi_deg })
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let t = self.theta_deg.to_radians();
        let p = self.phi_deg.to_radians();
        [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
    }

    /// Direction of a point seen from the origin; `None` at the origin.
    pub fn from_position(pos: [f64; 3]) -> Option<Direction> {
        let r = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
        if r == 0.0 {
            return None;
        }
        let theta = (pos[2] / r).clamp(-1.0, 1.0).acos().to_degrees();
        let mut phi = pos[1].atan2(pos[0]).to_degrees();
        if phi < 0.0 {
            phi += 360.0;
        }
        if phi >= 360.0 {
            phi = 0.0;
        }
        Some(Direction {
            theta_deg: theta,
            phi_deg: phi,
        })
    }

    /// Great-circle angle to another direction, in degrees.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
        dot.acos().to_degrees()
    }

    /// Azimuth mirror phi -> 360 - phi (left/right swap).
    pub fn mirrored(&self) -> Direction {
        let phi = if self.phi_deg == 0.0 {
            0.0
        } else {
            360.0 - self.phi_deg
        };
        Direction {
            theta_deg: self.theta_deg,
            phi_deg: phi,
        }
    }
}

/// Analytic response of the collocated XYZO array: one omni pressure
/// channel and three orthogonal velocity-gradient channels. Frequency-flat
/// with squared norm 2.
pub fn steering_vector(d: &Direction) -> [f64; 4] {
    let u = d.unit_vector();
    [1.0, u[0], u[1], u[2]]
}

/// The full search grid at `resolution` degrees: theta 0..=180, phi 0..360.
pub fn grid(resolution_deg: u32) -> Vec<Direction> {
    assert!(resolution_deg > 0 && 180 % resolution_deg == 0);
    let mut out = Vec::new();
    let mut theta = 0u32;
    while theta <= 180 {
        let mut phi = 0u32;
        while phi < 360 {
            out.push(Direction {
                theta_deg: theta as f64,
                phi_deg: phi as f64,
            });
            phi += resolution_deg;
        }
        theta += resolution_deg;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steering_examples() {
        let pole = steering_vector(&Direction::new(0.0, 0.0).unwrap());
        assert!((pole[0] - 1.0).abs() < 1e-15);
        assert!(pole[1].abs() < 1e-15 && pole[2].abs() < 1e-15);
        assert!((pole[3] - 1.0).abs() < 1e-15);

        let x_axis = steering_vector(&Direction::new(90.0, 0.0).unwrap());
        assert!((x_axis[1] - 1.0).abs() < 1e-12);
        assert!(x_axis[2].abs() < 1e-12 && x_axis[3].abs() < 1e-12);
    }

    #[test]
    fn norm_is_sqrt2_on_full_grid() {
        for d in grid(5) {
            let a = steering_vector(&d);
            let n2: f64 = a.iter().map(|v| v * v).sum();
            assert!((n2 - 2.0).abs() < 1e-12, "direction {d:?}");
        }
    }

    #[test]
    fn position_roundtrip() {
        let d = Direction::new(70.0, 200.0).unwrap();
        let u = d.unit_vector();
        let back = Direction::from_position([u[0] * 3.0, u[1] * 3.0, u[2] * 3.0]).unwrap();
        assert!((back.theta_deg - 70.0).abs() < 1e-9);
        assert!((back.phi_deg - 200.0).abs() < 1e-9);
        assert!(Direction::from_position([0.0; 3]).is_none());
    }

    #[test]
    fn angle_to_basics() {
        let a = Direction::new(90.0, 0.0).unwrap();
        let b = Direction::new(90.0, 90.0).unwrap();
        assert!((a.angle_to(&b) - 90.0).abs() < 1e-9);
        assert!(a.angle_to(&a).abs() < 1e-9);
    }

    #[test]
    fn grid_size() {
        assert_eq!(grid(5).len(), 37 * 72);
        assert_eq!(grid(45).len(), 5 * 8);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Direction::new(-1.0, 0.0).is_err());
        assert!(Direction::new(0.0, 360.0).is_err());
    }
}
