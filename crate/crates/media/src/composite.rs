use crate::{ForegroundMask, Frame, MediaError};

/// Pastes the masked pixels of `object` over `background` at `offset`
/// (luma coordinates, both components even so chroma stays aligned).
///
/// Chroma planes are composited at half resolution: an object chroma sample
/// replaces the background sample when the majority (>= 2 of 4) of its 2x2
/// luma cell is foreground.
pub fn composite_over(
    object: &Frame,
    mask: &ForegroundMask,
    background: &Frame,
    offset: (usize, usize),
) -> Result<Frame, MediaError> {
    if mask.width() != object.width() || mask.height() != object.height() {
        return Err(MediaError::DimensionMismatch("mask vs object".into()));
    }
    let (ox, oy) = offset;
    if ox % 2 != 0 || oy % 2 != 0 {
        return Err(MediaError::OddOffset);
    }
    if ox + object.width() > background.width() || oy + object.height() > background.height() {
        return Err(MediaError::OffsetOutOfBounds);
    }

    let bw = background.width();
    let (mut y, mut cb, mut cr) = background.clone().into_planes();
    for py in 0..object.height() {
        for px in 0..object.width() {
            if mask.get(px, py) {
                y[(oy + py) * bw + ox + px] = object.luma(px, py);
            }
        }
    }
    let sub = mask.subsample_majority();
    let bcw = background.chroma_width();
    for cy in 0..object.chroma_height() {
        for cx in 0..object.chroma_width() {
            if sub.get(cx, cy) {
                let (ocb, ocr) = object.chroma(cx, cy);
                let idx = (oy / 2 + cy) * bcw + ox / 2 + cx;
                cb[idx] = ocb;
                cr[idx] = ocr;
            }
        }
    }
    Frame::from_planes(background.width(), background.height(), y, cb, cr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker_frame(w: usize, h: usize) -> Frame {
        let mut y = vec![0u8; w * h];
        for (i, v) in y.iter_mut().enumerate() {
            *v = if (i / w + i % w) % 2 == 0 { 200 } else { 40 };
        }
        Frame::from_planes(w, h, y, vec![90; w * h / 4], vec![150; w * h / 4]).unwrap()
    }

    #[test]
    fn empty_mask_returns_background() {
        let obj = Frame::constant(32, 32, (1, 2, 3)).unwrap();
        let bg = checker_frame(64, 48);
        let m = ForegroundMask::new_background(32, 32);
        let out = composite_over(&obj, &m, &bg, (16, 16)).unwrap();
        assert_eq!(out, bg);
    }

    #[test]
    fn full_mask_equal_sizes_returns_object() {
        let obj = checker_frame(64, 48);
        let bg = Frame::constant(64, 48, (7, 8, 9)).unwrap();
        let m = ForegroundMask::from_bits(64, 48, vec![true; 64 * 48]).unwrap();
        let out = composite_over(&obj, &m, &bg, (0, 0)).unwrap();
        assert_eq!(out, obj);
    }

    #[test]
    fn popcount_accounting_on_half_mask() {
        let obj = Frame::constant(32, 32, (250, 16, 16)).unwrap();
        let bg = Frame::constant(64, 48, (10, 128, 128)).unwrap();
        let mut m = ForegroundMask::new_background(32, 32);
        for y in 0..16 {
            for x in 0..32 {
                m.set(x, y, true);
            }
        }
        let out = composite_over(&obj, &m, &bg, (0, 0)).unwrap();
        let from_obj = out.y().iter().filter(|&&v| v == 250).count();
        let from_bg = out.y().iter().filter(|&&v| v == 10).count();
        assert_eq!(from_obj, m.popcount());
        assert_eq!(from_obj + from_bg, 64 * 48);
    }

    #[test]
    fn idempotent() {
        let obj = checker_frame(32, 32);
        let bg = Frame::constant(64, 48, (7, 8, 9)).unwrap();
        let mut m = ForegroundMask::new_background(32, 32);
        for y in 4..20 {
            for x in 3..29 {
                m.set(x, y, (x + y) % 3 != 0);
            }
        }
        let once = composite_over(&obj, &m, &bg, (16, 8)).unwrap();
        let twice = composite_over(&obj, &m, &once, (16, 8)).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rejects_bad_offsets() {
        let obj = Frame::constant(32, 32, (1, 2, 3)).unwrap();
        let bg = Frame::constant(64, 48, (0, 0, 0)).unwrap();
        let m = ForegroundMask::new_background(32, 32);
        assert!(matches!(
            composite_over(&obj, &m, &bg, (33, 0)),
            Err(MediaError::OddOffset)
        ));
        assert!(matches!(
            composite_over(&obj, &m, &bg, (34, 0)),
            Err(MediaError::OffsetOutOfBounds)
        ));
    }
}
