//! Sum of absolute Hadamard-transformed differences. The atomic unit is a
//! 4x4 Hadamard; larger blocks are sums of 4x4 SATDs. Values are
//! unnormalized (no halving), consistently across the whole codec.

use crate::CodecError;

/// Counts 4x4 Hadamard evaluations; the hardware-independent complexity
/// proxy reported by the encoder.
#[derive(Debug, Default, Clone, Copy)]
pub struct SatdCounter {
    pub hadamard_4x4: u64,
}

/// 4x4 Hadamard of a residual, in place of a full transform: butterflies
/// over rows then columns.
pub fn hadamard4(residual: &[i32; 16]) -> [i32; 16] {
    let mut tmp = [0i32; 16];
    for i in 0..4 {
        let r = &residual[i * 4..i * 4 + 4];
        let t0 = r[0] + r[1];
        let t1 = r[0] - r[1];
        let t2 = r[2] + r[3];
        let t3 = r[2] - r[3];
        tmp[i * 4] = t0 + t2;
        tmp[i * 4 + 1] = t1 + t3;
        tmp[i * 4 + 2] = t0 - t2;
        tmp[i * 4 + 3] = t1 - t3;
    }
    let mut out = [0i32; 16];
    for j in 0..4 {
        let (a, b, c, d) = (tmp[j], tmp[4 + j], tmp[8 + j], tmp[12 + j]);
        let t0 = a + b;
        let t1 = a - b;
        let t2 = c + d;
        let t3 = c - d;
        out[j] = t0 + t2;
        out[4 + j] = t1 + t3;
        out[8 + j] = t0 - t2;
        out[12 + j] = t1 - t3;
    }
    out
}

/// SATD of one 4x4 sub-block at (bx, by) within two strided sample grids.
#[inline]
fn satd4_at(
    a: &[u8],
    a_stride: usize,
    b: &[u8],
    b_stride: usize,
    bx: usize,
    by: usize,
    counter: &mut SatdCounter,
) -> u64 {
    let mut res = [0i32; 16];
    for y in 0..4 {
        for x in 0..4 {
            res[y * 4 + x] =
                a[(by + y) * a_stride + bx + x] as i32 - b[(by + y) * b_stride + bx + x] as i32;
        }
    }
    counter.hadamard_4x4 += 1;
    hadamard4(&res).iter().map(|c| c.unsigned_abs() as u64).sum()
}

/// SATD over a w x h block (both multiples of 4), given as packed slices
/// with explicit strides.
pub fn satd_strided(
    a: &[u8],
    a_stride: usize,
    b: &[u8],
    b_stride: usize,
    w: usize,
    h: usize,
    counter: &mut SatdCounter,
) -> u64 {
    debug_assert!(w % 4 == 0 && h % 4 == 0);
    let mut total = 0u64;
    for by in (0..h).step_by(4) {
        for bx in (0..w).step_by(4) {
            total += satd4_at(a, a_stride, b, b_stride, bx, by, counter);
        }
    }
    total
}

const LEGAL_BLOCKS: [(usize, usize); 7] =
    [(4, 4), (8, 4), (4, 8), (8, 8), (16, 8), (8, 16), (16, 16)];

/// Public SATD over two packed blocks of one of the codec's partition
/// shapes.
pub fn satd(a: &[u8], b: &[u8], w: usize, h: usize) -> Result<u64, CodecError> {
    if !LEGAL_BLOCKS.contains(&(w, h)) {
        return Err(CodecError::BadBlockSize(w, h));
    }
    if a.len() != w * h || b.len() != w * h {
        return Err(CodecError::BlockLenMismatch(format!(
            "expected {} samples, got {} and {}",
            w * h,
            a.len(),
            b.len()
        )));
    }
    let mut c = SatdCounter::default();
    Ok(satd_strided(a, w, b, w, w, h, &mut c))
}
