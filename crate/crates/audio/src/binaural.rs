//! MMSE binaural filter design and overlap-add rendering.
//!
//! Per frequency bin, with uncorrelated unit-power plane waves from every
//! grid direction, the combiner minimizing E|Y - g^H X|^2 solves
//! (A A^H + delta I) g = A h*, where A stacks steering vectors column-wise
//! and h collects one ear's HRTF gains over the grid. The 512 per-bin gain
//! vectors per ear become four 512-tap time-domain filters per ear via
//! inverse FFT of the conjugate-symmetric per-channel transfer.

use crate::fft::ifft_real;
use crate::field::SteeringField;
use crate::hrtf::HrtfProvider;
use crate::linalg::Mat4;
use crate::AudioError;
use num_complex::Complex64;
use rustfft::FftPlanner;

pub const FILTER_TAPS: usize = 512;
const ONE_SIDED: usize = FILTER_TAPS / 2 + 1;

/// Relative diagonal loading of the design system; tiny, so a target that
/// equals one input channel recovers the unit selector to far better than
/// 1e-9.
const DESIGN_LOADING: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BinauralFilterBank {
    /// Four per-channel filters per ear, 512 taps each.
    pub left: [Vec<f64>; 4],
    pub right: [Vec<f64>; 4],
}

#[derive(Debug, Clone)]
pub struct BankDesign {
    pub bank: BinauralFilterBank,
    /// Relative normal-equations residual per one-sided bin and ear.
    pub residual_rel: Vec<f64>,
}

/// Designs the per-ear filter banks for `field` at `sample_rate`.
pub fn design_binaural_filters(
    hrtf: &dyn HrtfProvider,
    field: &SteeringField,
    sample_rate: f64,
) -> Result<BankDesign, AudioError> {
    if field.is_empty() {
        return Err(AudioError::FieldMismatch("empty steering field".into()));
    }
    let k = field.len();
    // per-ear, per-channel one-sided transfer
    let mut transfer =
        [[vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED]],
         [vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED], vec![Complex64::new(0.0, 0.0); ONE_SIDED]]];
    let mut residual_rel = Vec::with_capacity(2 * ONE_SIDED);

    for bin in 0..ONE_SIDED {
        let hz = bin as f64 * sample_rate / FILTER_TAPS as f64;
        // M = A A^H + delta I at this bin
        let mut m = Mat4::zero();
        for d in 0..k {
            m.add_outer(&field.vector(d, bin));
        }
        let delta = DESIGN_LOADING * m.trace_real() / 4.0;
        m.add_diagonal(delta);
        let inv = m.inverse().ok_or(AudioError::SingularSystem)?;

        for ear in 0..2 {
            // rhs = A h*
            let mut rhs = [Complex64::new(0.0, 0.0); 4];
            for d in 0..k {
                let (l, r) = hrtf.gains(&field.directions[d], hz);
                let h = if ear == 0 { l } else { r };
                let a = field.vector(d, bin);
                for (slot, ac) in rhs.iter_mut().zip(a.iter()) {
                    *slot += ac * h.conj();
                }
            }
            let g = inv.mul_vec(&rhs);
            // residual of the solve, relative to the right-hand side
            let back = m.mul_vec(&g);
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..4 {
                num += (back[i] - rhs[i]).norm_sqr();
                den += rhs[i].norm_sqr();
            }
            residual_rel.push(if den > 0.0 { (num / den).sqrt() } else { 0.0 });
            // per-channel transfer is conj(g): Y = sum_ch conj(g_ch) X_ch
            for ch in 0..4 {
                let mut t = g[ch].conj();
                if bin == 0 || bin == ONE_SIDED - 1 {
                    t = Complex64::new(t.re, 0.0);
                }
                transfer[ear][ch][bin] = t;
            }
        }
    }

    let build = |tr: &[Vec<Complex64>; 4]| -> [Vec<f64>; 4] {
        let mut out: [Vec<f64>; 4] = Default::default();
        for (ch, slot) in out.iter_mut().enumerate() {
            let mut spec = vec![Complex64::new(0.0, 0.0); FILTER_TAPS];
            spec[..ONE_SIDED].copy_from_slice(&tr[ch]);
            for kk in 1..ONE_SIDED - 1 {
                spec[FILTER_TAPS - kk] = tr[ch][kk].conj();
            }
            *slot = ifft_real(&spec);
        }
        out
    };
    let bank = BinauralFilterBank {
        left: build(&transfer[0]),
        right: build(&transfer[1]),
    };
    Ok(BankDesign { bank, residual_rel })
}

/// Overlap-add block sizes. `fft_len` must cover hop + filter tail.
#[derive(Debug, Clone, Copy)]
pub struct RenderParams {
    pub hop: usize,
    pub fft_len: usize,
}

impl Default for RenderParams {
    fn default() -> Self {
        RenderParams {
            hop: 512,
            fft_len: 1024,
        }
    }
}

impl RenderParams {
    /// The 1535-point variant: 1024-sample segments convolved with the
    /// 512-tap filters at the exact linear-convolution length.
    pub fn long_segments() -> RenderParams {
        RenderParams {
            hop: 1024,
            fft_len: 1535,
        }
    }

    fn validate(&self) -> Result<(), AudioError> {
        if self.hop == 0 || self.fft_len < self.hop + FILTER_TAPS - 1 {
            return Err(AudioError::FieldMismatch(format!(
                "fft_len {} too short for hop {} with {FILTER_TAPS}-tap filters",
                self.fft_len, self.hop
            )));
        }
        Ok(())
    }
}

/// Renders a 4-channel capture to stereo by frequency-domain overlap-add
/// convolution. Output length is input length + 511 (the full filter tail).
pub fn render_binaural(
    signal: &[Vec<f64>; 4],
    bank: &BinauralFilterBank,
    params: RenderParams,
) -> Result<(Vec<f64>, Vec<f64>), AudioError> {
    params.validate()?;
    let n = signal[0].len();
    if signal.iter().any(|ch| ch.len() != n) {
        return Err(AudioError::SourceLengthMismatch);
    }
    let out_len = n + FILTER_TAPS - 1;
    let mut left = vec![0.0f64; out_len];
    let mut right = vec![0.0f64; out_len];
    if n == 0 {
        return Ok((left, right));
    }

    let fft_len = params.fft_len;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);

    let spectrum_of = |taps: &[f64]| -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = taps.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(fft_len, Complex64::new(0.0, 0.0));
        fwd.process(&mut buf);
        buf
    };
    let filt_l: Vec<Vec<Complex64>> = bank.left.iter().map(|f| spectrum_of(f)).collect();
    let filt_r: Vec<Vec<Complex64>> = bank.right.iter().map(|f| spectrum_of(f)).collect();

    let mut offset = 0usize;
    while offset < n {
        let take = params.hop.min(n - offset);
        let mut acc_l = vec![Complex64::new(0.0, 0.0); fft_len];
        let mut acc_r = vec![Complex64::new(0.0, 0.0); fft_len];
        for ch in 0..4 {
            let mut block: Vec<Complex64> = signal[ch][offset..offset + take]
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            block.resize(fft_len, Complex64::new(0.0, 0.0));
            fwd.process(&mut block);
            for i in 0..fft_len {
                acc_l[i] += block[i] * filt_l[ch][i];
                acc_r[i] += block[i] * filt_r[ch][i];
            }
        }
        inv.process(&mut acc_l);
        inv.process(&mut acc_r);
        let scale = 1.0 / fft_len as f64;
        let tail = (take + FILTER_TAPS - 1).min(out_len - offset);
        for i in 0..tail {
            left[offset + i] += acc_l[i].re * scale;
            right[offset + i] += acc_r[i].re * scale;
        }
        offset += take;
    }
    Ok((left, right))
}
