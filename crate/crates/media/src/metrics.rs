use crate::{ForegroundMask, Frame, MediaError};

/// PSNR is capped at this value when the luma planes are identical.
pub const PSNR_CAP_DB: f64 = 99.0;

/// Luma PSNR in decibels, optionally restricted to a pixel region.
pub fn psnr_luma(a: &Frame, b: &Frame, region: Option<&ForegroundMask>) -> Result<f64, MediaError> {
    if !a.same_dimensions(b) {
        return Err(MediaError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if let Some(m) = region {
        if m.width() != a.width() || m.height() != a.height() {
            return Err(MediaError::DimensionMismatch("region vs frame".into()));
        }
    }
    let mut sum = 0u64;
    let mut count = 0u64;
    let (ya, yb) = (a.y(), b.y());
    match region {
        None => {
            for (pa, pb) in ya.iter().zip(yb.iter()) {
                let d = *pa as i64 - *pb as i64;
                sum += (d * d) as u64;
            }
            count = ya.len() as u64;
        }
        Some(m) => {
            for (i, &fg) in m.bits().iter().enumerate() {
                if fg {
                    let d = ya[i] as i64 - yb[i] as i64;
                    sum += (d * d) as u64;
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(MediaError::EmptyRegion);
    }
    if sum == 0 {
        return Ok(PSNR_CAP_DB);
    }
    let mse = sum as f64 / count as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}
