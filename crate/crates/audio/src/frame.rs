use crate::AudioError;

/// Samples per analysis frame (30 blocks of 512).
pub const FRAME_LEN: usize = 15360;
pub const BLOCK_LEN: usize = 512;
pub const NUM_BLOCKS: usize = 30;

/// One four-channel analysis frame, channel order O, X, Y, Z.
#[derive(Debug, Clone)]
pub struct ArrayFrame {
    channels: [Vec<f64>; 4],
    pub sample_rate: f64,
}

impl ArrayFrame {
    pub fn new(channels: [Vec<f64>; 4], sample_rate: f64) -> Result<ArrayFrame, AudioError> {
        for ch in &channels {
            if ch.len() != FRAME_LEN {
                return Err(AudioError::BadFrameLength {
                    expected: FRAME_LEN,
                    got: ch.len(),
                });
            }
        }
        Ok(ArrayFrame {
            channels,
            sample_rate,
        })
    }

    /// Cuts one frame out of a longer 4-channel capture, zero-padding past
    /// the end.
    pub fn from_capture(capture: &[Vec<f64>; 4], offset: usize, sample_rate: f64) -> ArrayFrame {
        let mut channels: [Vec<f64>; 4] = Default::default();
        for (dst, src) in channels.iter_mut().zip(capture.iter()) {
            let mut v = vec![0.0; FRAME_LEN];
            for (i, slot) in v.iter_mut().enumerate() {
                if offset + i < src.len() {
                    *slot = src[offset + i];
                }
            }
            *dst = v;
        }
        ArrayFrame {
            channels,
            sample_rate,
        }
    }

    pub fn channel(&self, i: usize) -> &[f64] {
        &self.channels[i]
    }

    pub fn channels(&self) -> &[Vec<f64>; 4] {
        &self.channels
    }

    /// The b-th block of 512 samples of channel `ch`.
    pub fn block(&self, ch: usize, b: usize) -> &[f64] {
        &self.channels[ch][b * BLOCK_LEN..(b + 1) * BLOCK_LEN]
    }

    pub fn scaled(&self, c: f64) -> ArrayFrame {
        let mut channels: [Vec<f64>; 4] = Default::default();
        for (dst, src) in channels.iter_mut().zip(self.channels.iter()) {
            *dst = src.iter().map(|&v| v * c).collect();
        }
        ArrayFrame {
            channels,
            sample_rate: self.sample_rate,
        }
    }
}
