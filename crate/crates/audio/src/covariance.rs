//! Per-bin sample covariance of an analysis frame: 30 Hamming-windowed
//! 512-point blocks averaged per one-sided frequency bin, then diagonal
//! loading.

use crate::fft::{fft_real, hamming};
use crate::frame::{ArrayFrame, BLOCK_LEN, NUM_BLOCKS};
use crate::linalg::Mat4;
use num_complex::Complex64;

/// One-sided bins of a 512-point transform: 0..=256.
pub const NUM_BINS: usize = BLOCK_LEN / 2 + 1;

/// Relative diagonal loading strength.
const LOADING: f64 = 1e-3;
/// Absolute floor so silent frames still produce positive-definite
/// matrices.
const LOADING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CovarianceStack {
    /// Loaded covariance per one-sided bin.
    pub bins: Vec<Mat4>,
    /// The loading actually added at each bin.
    pub delta: Vec<f64>,
    pub sample_rate: f64,
}

impl CovarianceStack {
    /// Frequency in Hz of bin k.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate / BLOCK_LEN as f64
    }

    /// Bin range covering [lo_hz, Nyquist].
    pub fn band_from_hz(&self, lo_hz: f64) -> std::ops::Range<usize> {
        let lo = (lo_hz * BLOCK_LEN as f64 / self.sample_rate).ceil() as usize;
        lo.min(NUM_BINS - 1)..NUM_BINS
    }
}

/// Estimates the loaded covariance stack of one frame.
pub fn estimate_covariance(frame: &ArrayFrame) -> CovarianceStack {
    let window = hamming(BLOCK_LEN);
    let mut spectra: Vec<Vec<Complex64>> = Vec::with_capacity(4 * NUM_BLOCKS);
    for ch in 0..4 {
        for b in 0..NUM_BLOCKS {
            let mut block = frame.block(ch, b).to_vec();
            for (v, w) in block.iter_mut().zip(window.iter()) {
                *v *= w;
            }
            spectra.push(fft_real(&block));
        }
    }
    let mut bins = Vec::with_capacity(NUM_BINS);
    let mut delta = Vec::with_capacity(NUM_BINS);
    for k in 0..NUM_BINS {
        let mut r = Mat4::zero();
        for b in 0..NUM_BLOCKS {
            let x = [
                spectra[b][k],
                spectra[NUM_BLOCKS + b][k],
                spectra[2 * NUM_BLOCKS + b][k],
                spectra[3 * NUM_BLOCKS + b][k],
            ];
            r.add_outer(&x);
        }
        r.scale(1.0 / NUM_BLOCKS as f64);
        let d = (LOADING * r.trace_real() / 4.0).max(LOADING_FLOOR);
        r.add_diagonal(d);
        bins.push(r);
        delta.push(d);
    }
    CovarianceStack {
        bins,
        delta,
        sample_rate: frame.sample_rate,
    }
}
