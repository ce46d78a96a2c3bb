//! Energy-gated target sound detection against a running noise floor.

use crate::frame::ArrayFrame;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VadConfig {
    /// A frame is voice when its omni-channel power exceeds
    /// `factor * noise_floor`.
    pub factor: f64,
    /// Exponential update rate of the floor on non-voice frames.
    pub alpha: f64,
    /// Lower bound keeping the floor away from exact zero.
    pub floor_min: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        VadConfig {
            factor: 5.0,
            alpha: 0.2,
            floor_min: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TargetDetector {
    cfg: VadConfig,
    noise_floor: f64,
}

impl TargetDetector {
    pub fn new(cfg: VadConfig) -> TargetDetector {
        TargetDetector {
            noise_floor: cfg.floor_min,
            cfg,
        }
    }

    pub fn noise_floor(&self) -> f64 {
        self.noise_floor
    }

    /// Mean-square power of the pressure (omni) channel.
    pub fn frame_power(frame: &ArrayFrame) -> f64 {
        let ch = frame.channel(0);
        ch.iter().map(|v| v * v).sum::<f64>() / ch.len() as f64
    }

    /// Detects target sound and updates the floor on non-voice frames.
    pub fn detect(&mut self, frame: &ArrayFrame) -> bool {
        let power = Self::frame_power(frame);
        let voiced = power > self.cfg.factor * self.noise_floor;
        if !voiced {
            self.noise_floor = ((1.0 - self.cfg.alpha) * self.noise_floor
                + self.cfg.alpha * power)
                .max(self.cfg.floor_min);
        }
        voiced
    }
}
