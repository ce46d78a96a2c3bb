//! Shared FFT helpers on top of rustfft.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Symmetric Hamming window of length n.
pub fn hamming(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.54 - 0.46 * (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Forward FFT of a real block; returns the full complex spectrum.
pub fn fft_real(block: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = block.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(block.len())
        .process(&mut buf);
    buf
}

/// Inverse FFT returning the real part, normalized by 1/N.
pub fn ifft_real(spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(spectrum.len())
        .process(&mut buf);
    let n = spectrum.len() as f64;
    buf.iter().map(|c| c.re / n).collect()
}

/// Full linear convolution via zero-padded FFT; output length a+b-1.
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fb.resize(n, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= *y;
    }
    planner.plan_fft_inverse(n).process(&mut fa);
    fa.truncate(out_len);
    fa.iter().map(|c| c.re / n as f64).collect()
}

/// Direct O(n*m) convolution; the oracle the FFT paths are tested against.
pub fn direct_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
