//! Head-related transfer functions. The default provider is an analytic
//! spherical-head model: a Woodworth-style interaural delay plus a
//! first-order head-shadow filter. Left and right responses swap exactly
//! under azimuth mirroring.

use crate::direction::Direction;
use num_complex::Complex64;

pub trait HrtfProvider {
    /// Complex (left, right) ear gains for a plane wave from `d` at
    /// frequency `hz`.
    fn gains(&self, d: &Direction, hz: f64) -> (Complex64, Complex64);
}

#[derive(Debug, Clone, Copy)]
pub struct SphericalHeadHrtf {
    pub head_radius_m: f64,
    pub speed_of_sound: f64,
}

impl Default for SphericalHeadHrtf {
    fn default() -> Self {
        SphericalHeadHrtf {
            head_radius_m: 0.0875,
            speed_of_sound: 343.0,
        }
    }
}

impl SphericalHeadHrtf {
    /// Arrival delay relative to the near-ear tangent point, seconds; zero
    /// at the ear axis, growing around the head for shadowed directions.
    fn delay(&self, cos_psi: f64) -> f64 {
        let a_c = self.head_radius_m / self.speed_of_sound;
        let psi = cos_psi.clamp(-1.0, 1.0).acos();
        if psi <= std::f64::consts::FRAC_PI_2 {
            a_c * (1.0 - cos_psi)
        } else {
            a_c * (1.0 + psi - std::f64::consts::FRAC_PI_2)
        }
    }

    /// One-pole/one-zero head shadow: near side is boosted toward 2x at
    /// high frequency, the far side attenuated toward 0.1x.
    fn shadow(&self, cos_psi: f64, hz: f64) -> Complex64 {
        let alpha = 1.05 + 0.95 * cos_psi;
        let f0 = self.speed_of_sound / (std::f64::consts::TAU * self.head_radius_m);
        let jw = Complex64::new(0.0, hz / (2.0 * f0));
        (1.0 + alpha * jw) / (1.0 + jw)
    }

    fn ear_gain(&self, cos_psi: f64, hz: f64) -> Complex64 {
        let t = self.delay(cos_psi);
        let phase = Complex64::new(0.0, -std::f64::consts::TAU * hz * t).exp();
        self.shadow(cos_psi, hz) * phase
    }
}

impl HrtfProvider for SphericalHeadHrtf {
    fn gains(&self, d: &Direction, hz: f64) -> (Complex64, Complex64) {
        let u = d.unit_vector();
        // ears on the y axis: left at +y, right at -y
        let left = self.ear_gain(u[1], hz);
        let right = self.ear_gain(-u[1], hz);
        (left, right)
    }
}
