//! H.264-style 4x4 integer transform with the standard MF/V quantizer
//! tables (dead-zone uniform quantization, step doubling every 6 qp,
//! Qstep(4) = 1.0). All arithmetic is integer, so encoder and decoder
//! reconstructions agree exactly.

/// Zigzag scan order for a 4x4 block, as row-major indices.
pub const ZIGZAG: [usize; 16] = [0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15];

/// Forward core transform W = Cf * X * Cf^T.
pub fn forward4(block: &[i32; 16]) -> [i32; 16] {
    let mut tmp = [0i32; 16];
    for i in 0..4 {
        let r = &block[i * 4..i * 4 + 4];
        let s0 = r[0] + r[3];
        let s1 = r[1] + r[2];
        let d0 = r[0] - r[3];
        let d1 = r[1] - r[2];
        tmp[i * 4] = s0 + s1;
        tmp[i * 4 + 1] = 2 * d0 + d1;
        tmp[i * 4 + 2] = s0 - s1;
        tmp[i * 4 + 3] = d0 - 2 * d1;
    }
    let mut out = [0i32; 16];
    for j in 0..4 {
        let (a, b, c, d) = (tmp[j], tmp[4 + j], tmp[8 + j], tmp[12 + j]);
        let s0 = a + d;
        let s1 = b + c;
        let d0 = a - d;
        let d1 = b - c;
        out[j] = s0 + s1;
        out[4 + j] = 2 * d0 + d1;
        out[8 + j] = s0 - s1;
        out[12 + j] = d0 - 2 * d1;
    }
    out
}

/// Inverse core transform with the standard bit-exact butterfly; input is
/// dequantized coefficients, output residual includes the final (x+32)>>6.
pub fn inverse4(coeff: &[i64; 16]) -> [i32; 16] {
    let mut tmp = [0i64; 16];
    for i in 0..4 {
        let r = &coeff[i * 4..i * 4 + 4];
        let e0 = r[0] + r[2];
        let e1 = r[0] - r[2];
        let e2 = (r[1] >> 1) - r[3];
        let e3 = r[1] + (r[3] >> 1);
        tmp[i * 4] = e0 + e3;
        tmp[i * 4 + 1] = e1 + e2;
        tmp[i * 4 + 2] = e1 - e2;
        tmp[i * 4 + 3] = e0 - e3;
    }
    let mut out = [0i32; 16];
    for j in 0..4 {
        let (a, b, c, d) = (tmp[j], tmp[4 + j], tmp[8 + j], tmp[12 + j]);
        let e0 = a + c;
        let e1 = a - c;
        let e2 = (b >> 1) - d;
        let e3 = b + (d >> 1);
        out[j] = ((e0 + e3 + 32) >> 6) as i32;
        out[4 + j] = ((e1 + e2 + 32) >> 6) as i32;
        out[8 + j] = ((e1 - e2 + 32) >> 6) as i32;
        out[12 + j] = ((e0 - e3 + 32) >> 6) as i32;
    }
    out
}

// Quantizer multipliers by qp%6 and coefficient class:
// class 0 = both frequencies even, class 1 = both odd, class 2 = mixed.
const MF: [[i64; 3]; 6] = [
    [13107, 5243, 8066],
    [11916, 4660, 7490],
    [10082, 4194, 6554],
    [9362, 3647, 5825],
    [8192, 3355, 5243],
    [7282, 2893, 4559],
];

const V: [[i64; 3]; 6] = [
    [10, 16, 13],
    [11, 18, 14],
    [13, 20, 16],
    [14, 23, 18],
    [16, 25, 20],
    [18, 29, 23],
];

#[inline]
fn coeff_class(idx: usize) -> usize {
    let (i, j) = (idx / 4, idx % 4);
    match (i % 2, j % 2) {
        (0, 0) => 0,
        (1, 1) => 1,
        _ => 2,
    }
}

/// Dead-zone quantization of forward-transform output. The rounding offset
/// is 1/3 of the step for intra blocks and 1/6 for inter blocks.
pub fn quantize(coeff: &[i32; 16], qp: u8, intra: bool) -> [i32; 16] {
    let qbits = 15 + qp as i64 / 6;
    let table = &MF[qp as usize % 6];
    let f = if intra {
        (1i64 << qbits) / 3
    } else {
        (1i64 << qbits) / 6
    };
    let mut out = [0i32; 16];
    for idx in 0..16 {
        let w = coeff[idx] as i64;
        let mf = table[coeff_class(idx)];
        let level = (w.abs() * mf + f) >> qbits;
        out[idx] = if w < 0 { -level as i32 } else { level as i32 };
    }
    out
}

pub fn dequantize(levels: &[i32; 16], qp: u8) -> [i64; 16] {
    let shift = qp as i64 / 6;
    let table = &V[qp as usize % 6];
    let mut out = [0i64; 16];
    for idx in 0..16 {
        out[idx] = levels[idx] as i64 * table[coeff_class(idx)] << shift;
    }
    out
}

/// Full residual coding roundtrip for one 4x4 block: returns (levels,
/// reconstructed residual).
pub fn code_residual4(residual: &[i32; 16], qp: u8, intra: bool) -> ([i32; 16], [i32; 16]) {
    let levels = quantize(&forward4(residual), qp, intra);
    (levels, inverse4(&dequantize(&levels, qp)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_residual_codes_to_zero() {
        let (levels, recon) = code_residual4(&[0; 16], 28, false);
        assert_eq!(levels, [0; 16]);
        assert_eq!(recon, [0; 16]);
    }

    #[test]
    fn near_lossless_at_qp_zero() {
        let mut r = [0i32; 16];
        for (i, v) in r.iter_mut().enumerate() {
            *v = ((i as i32 * 37) % 255) - 127;
        }
        let (_, recon) = code_residual4(&r, 0, true);
        for (a, b) in r.iter().zip(recon.iter()) {
            assert!((a - b).abs() <= 2, "{a} vs {b}");
        }
    }

    #[test]
    fn error_bounded_by_step_at_mid_qp() {
        // Qstep(28) = 2^(24/6) = 16; reconstruction error per sample stays
        // within a small multiple of the step.
        let mut r = [0i32; 16];
        let mut s = 99u64;
        for v in r.iter_mut() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            *v = ((s >> 33) % 511) as i32 - 255;
        }
        let (_, recon) = code_residual4(&r, 28, false);
        for (a, b) in r.iter().zip(recon.iter()) {
            assert!((a - b).abs() <= 24, "{a} vs {b}");
        }
    }

    #[test]
    fn dc_only_block_reconstructs_flat() {
        let r = [10i32; 16];
        let (levels, recon) = code_residual4(&r, 20, true);
        assert!(levels[1..].iter().all(|&l| l == 0));
        assert!(recon.iter().all(|&v| (v - 10).abs() <= 2));
        assert!(recon.iter().all(|&v| v == recon[0]));
    }

    #[test]
    fn zigzag_is_a_permutation() {
        let mut seen = [false; 16];
        for &z in &ZIGZAG {
            assert!(!seen[z]);
            seen[z] = true;
        }
    }

    #[test]
    fn quant_step_doubles_every_six_qp() {
        // same input, qp and qp+6: levels at qp+6 are about half
        let mut r = [0i32; 16];
        for (i, v) in r.iter_mut().enumerate() {
            *v = (i as i32 - 8) * 30;
        }
        let w = forward4(&r);
        let l20 = quantize(&w, 20, false);
        let l26 = quantize(&w, 26, false);
        for (a, b) in l20.iter().zip(l26.iter()) {
            assert!((a / 2 - b).abs() <= 1, "{a} vs {b}");
        }
    }
}
