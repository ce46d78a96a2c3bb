//! Key-color background substitution before encoding and clean
//! segmentation-map recovery after decoding.
//!
//! The background of a masked frame is replaced with a single key color;
//! after the codec roundtrip the mask is recovered by color proximity and
//! cleaned with a neighborhood filter that strips compression outliers.

use item_media::{ForegroundMask, Frame};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChromaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Media(#[from] item_media::MediaError),
}

/// Keying color in YCbCr. The default is a saturated blue far away from
/// the synthetic foreground palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyColor {
    pub y: u8,
    pub cb: u8,
    pub cr: u8,
}

impl Default for KeyColor {
    fn default() -> Self {
        KeyColor {
            y: 41,
            cb: 240,
            cr: 110,
        }
    }
}

impl KeyColor {
    /// Euclidean distance in YCbCr space.
    pub fn distance(&self, y: u8, cb: u8, cr: u8) -> f64 {
        let dy = self.y as f64 - y as f64;
        let dcb = self.cb as f64 - cb as f64;
        let dcr = self.cr as f64 - cr as f64;
        (dy * dy + dcb * dcb + dcr * dcr).sqrt()
    }

    fn distance_sq(&self, y: u8, cb: u8, cr: u8) -> i64 {
        let dy = self.y as i64 - y as i64;
        let dcb = self.cb as i64 - cb as i64;
        let dcr = self.cr as i64 - cr as i64;
        dy * dy + dcb * dcb + dcr * dcr
    }
}

/// Tunables for mask recovery after decoding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RecoveryParams {
    /// Maximum YCbCr distance to the key for a pixel to count as background.
    pub color_tolerance: f64,
    /// A foreground pixel with strictly more than this many background
    /// 8-neighbors is reassigned to background.
    pub neighbor_threshold: u8,
}

impl Default for RecoveryParams {
    fn default() -> Self {
        RecoveryParams {
            color_tolerance: 32.0,
            neighbor_threshold: 5,
        }
    }
}

/// Replaces background pixels (mask = false) with the key color.
///
/// A chroma sample is keyed unless its whole 2x2 luma cell is foreground.
/// This is deliberately stricter than the majority rule used for
/// compositing: any cell containing a background pixel reads back the exact
/// key color, so `recover_mask` at tolerance 0 inverts `apply_key` exactly.
pub fn apply_key(frame: &Frame, mask: &ForegroundMask, key: KeyColor) -> Result<Frame, ChromaError> {
    if mask.width() != frame.width() || mask.height() != frame.height() {
        return Err(ChromaError::DimensionMismatch(format!(
            "mask {}x{} vs frame {}x{}",
            mask.width(),
            mask.height(),
            frame.width(),
            frame.height()
        )));
    }
    let w = frame.width();
    let (mut y, mut cb, mut cr) = frame.clone().into_planes();
    for py in 0..frame.height() {
        for px in 0..w {
            if !mask.get(px, py) {
                y[py * w + px] = key.y;
            }
        }
    }
    let sub = mask.subsample_unanimous();
    let cw = frame.chroma_width();
    for cy in 0..frame.chroma_height() {
        for cx in 0..cw {
            if !sub.get(cx, cy) {
                cb[cy * cw + cx] = key.cb;
                cr[cy * cw + cx] = key.cr;
            }
        }
    }
    Ok(Frame::from_planes(frame.width(), frame.height(), y, cb, cr)?)
}

/// Recovers a foreground mask by color proximity: a pixel is background iff
/// its YCbCr distance to the key is <= tolerance (chroma upsampled by
/// replication).
pub fn recover_mask(decoded: &Frame, key: KeyColor, color_tolerance: f64) -> ForegroundMask {
    let w = decoded.width();
    let h = decoded.height();
    let tol_sq = color_tolerance * color_tolerance;
    let mut bits = vec![false; w * h];
    for py in 0..h {
        for px in 0..w {
            let (y, cb, cr) = decoded.pixel(px, py);
            let d = key.distance_sq(y, cb, cr) as f64;
            bits[py * w + px] = d > tol_sq;
        }
    }
    ForegroundMask::from_bits(w, h, bits).expect("sized to frame")
}

/// One cleaning pass: every decision reads the input mask (not the partially
/// updated output), so the result is independent of scan order. Pixels
/// outside the frame count as background; background never turns into
/// foreground.
pub fn clean_mask(mask: &ForegroundMask, neighbor_threshold: u8) -> ForegroundMask {
    let w = mask.width() as i64;
    let h = mask.height() as i64;
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as usize, y as usize) {
                continue;
            }
            let mut bg = 0u8;
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        bg += 1;
                    } else if !mask.get(nx as usize, ny as usize) {
                        bg += 1;
                    }
                }
            }
            if bg > neighbor_threshold {
                out.set(x as usize, y as usize, false);
            }
        }
    }
    out
}

/// Runs `clean_mask` until it stops changing, returning the fixpoint and the
/// number of passes applied.
pub fn clean_mask_fixpoint(mask: &ForegroundMask, neighbor_threshold: u8) -> (ForegroundMask, usize) {
    let mut cur = mask.clone();
    let mut passes = 0;
    loop {
        let next = clean_mask(&cur, neighbor_threshold);
        passes += 1;
        if next == cur {
            return (next, passes);
        }
        cur = next;
    }
}

/// F1 score of a recovered mask against ground truth (foreground positive).
pub fn mask_f1(recovered: &ForegroundMask, truth: &ForegroundMask) -> f64 {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fne = 0u64;
    for (r, t) in recovered.bits().iter().zip(truth.bits()) {
        match (r, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fne += 1,
            (false, false) => {}
        }
    }
    if 2 * tp + fp + fne == 0 {
        return 1.0;
    }
    2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fne as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use item_media::{synth_chat_sequence, SynthSpec};

    fn sample() -> (Frame, ForegroundMask) {
        let seq = synth_chat_sequence(&SynthSpec::default()).unwrap();
        (seq.frames()[0].clone(), seq.masks().unwrap()[0].clone())
    }

    #[test]
    fn all_foreground_mask_leaves_frame_unchanged() {
        let (frame, _) = sample();
        let full = ForegroundMask::from_bits(
            frame.width(),
            frame.height(),
            vec![true; frame.width() * frame.height()],
        )
        .unwrap();
        let keyed = apply_key(&frame, &full, KeyColor::default()).unwrap();
        assert_eq!(keyed, frame);
    }

    #[test]
    fn all_background_mask_yields_constant_key_frame() {
        let (frame, _) = sample();
        let empty = ForegroundMask::new_background(frame.width(), frame.height());
        let key = KeyColor::default();
        let keyed = apply_key(&frame, &empty, key).unwrap();
        assert!(keyed.y().iter().all(|&v| v == key.y));
        assert!(keyed.cb().iter().all(|&v| v == key.cb));
        assert!(keyed.cr().iter().all(|&v| v == key.cr));
    }

    #[test]
    fn uncompressed_roundtrip_recovers_exact_mask() {
        let (frame, mask) = sample();
        let keyed = apply_key(&frame, &mask, KeyColor::default()).unwrap();
        let rec = recover_mask(&keyed, KeyColor::default(), 0.0);
        assert_eq!(rec, mask);
    }

    #[test]
    fn saturated_tolerance_marks_everything_background() {
        let (frame, mask) = sample();
        let keyed = apply_key(&frame, &mask, KeyColor::default()).unwrap();
        let rec = recover_mask(&keyed, KeyColor::default(), 441.0);
        assert_eq!(rec.popcount(), 0);
    }

    #[test]
    fn palette_guard_distance_holds() {
        let key = KeyColor::default();
        for &(y, cb, cr) in item_media::synth::FOREGROUND_PALETTE {
            let d = key.distance(y, cb, cr);
            assert!(d >= 48.0, "palette entry ({y},{cb},{cr}) too close: {d}");
        }
    }

    #[test]
    fn isolated_pixel_removed_at_default_threshold() {
        let mut m = ForegroundMask::new_background(16, 16);
        m.set(8, 8, true);
        let cleaned = clean_mask(&m, 5);
        assert_eq!(cleaned.popcount(), 0);
    }

    #[test]
    fn solid_square_interior_survives() {
        let mut m = ForegroundMask::new_background(16, 16);
        for y in 5..10 {
            for x in 5..10 {
                m.set(x, y, true);
            }
        }
        let cleaned = clean_mask(&m, 5);
        assert!(cleaned.get(7, 7));
    }

    #[test]
    fn two_by_two_block_survives_threshold_7() {
        let mut m = ForegroundMask::new_background(16, 16);
        for y in 6..8 {
            for x in 6..8 {
                m.set(x, y, true);
            }
        }
        // each pixel has exactly 5 background neighbors: 5 > 7 is false
        let cleaned = clean_mask(&m, 7);
        assert_eq!(cleaned, m);
    }

    #[test]
    fn border_counts_as_background() {
        let mut m = ForegroundMask::new_background(8, 8);
        m.set(0, 0, true);
        m.set(1, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        // corner pixel: 3 in-frame fg neighbors, 5 border bg -> stays at 5
        let cleaned = clean_mask(&m, 4);
        assert!(!cleaned.get(0, 0));
    }

    #[test]
    fn cleaning_never_grows_foreground() {
        let (_, mask) = sample();
        let cleaned = clean_mask(&mask, 5);
        for (c, m) in cleaned.bits().iter().zip(mask.bits()) {
            assert!(!c || *m);
        }
    }

    #[test]
    fn recover_is_monotone_in_tolerance() {
        let (frame, mask) = sample();
        let keyed = apply_key(&frame, &mask, KeyColor::default()).unwrap();
        let mut prev_bg = 0;
        for tol in [0.0, 8.0, 16.0, 32.0, 64.0, 128.0, 441.0] {
            let rec = recover_mask(&keyed, KeyColor::default(), tol);
            let bg = rec.width() * rec.height() - rec.popcount();
            assert!(bg >= prev_bg, "background shrank at tol {tol}");
            prev_bg = bg;
        }
    }

    #[test]
    fn fixpoint_reached_quickly_on_noisy_masks() {
        // generator masks plus salt noise, mimicking recovery outliers
        let spec = SynthSpec {
            frame_count: 6,
            seed: 42,
            ..SynthSpec::default()
        };
        let seq = synth_chat_sequence(&spec).unwrap();
        for (i, m) in seq.masks().unwrap().iter().enumerate() {
            let mut noisy = m.clone();
            let mut s = 0x9e3779b97f4a7c15u64.wrapping_add(i as u64);
            for _ in 0..40 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = (s >> 33) as usize % noisy.width();
                let y = (s >> 17) as usize % noisy.height();
                noisy.set(x, y, true);
            }
            let (_, passes) = clean_mask_fixpoint(&noisy, 5);
            assert!(passes <= 3, "fixpoint took {passes} passes");
        }
    }
}
