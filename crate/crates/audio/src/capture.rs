//! Synthetic four-channel array capture: plane-wave projection through the
//! analytic steering model, synthetic exponential-decay reverberation, and
//! per-channel additive white Gaussian noise at a requested SNR.

use crate::direction::{steering_vector, Direction};
use crate::fft::fft_convolve;
use crate::AudioError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Direct-path delay before the diffuse tail starts, in samples.
const TAIL_ONSET: usize = 16;

/// Ratio of tail energy to direct energy at RT60 = 300 ms; scales linearly
/// with rt60 below that.
const TAIL_ENERGY_AT_300MS: f64 = 0.8;

fn reverb_tail(rt60_ms: f64, sample_rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n60 = rt60_ms / 1000.0 * sample_rate;
    let len = (1.5 * n60) as usize;
    if len == 0 {
        return Vec::new();
    }
    // amplitude decays 60 dB over n60 samples
    let mut tail: Vec<f64> = (0..len)
        .map(|n| {
            let g: f64 = rng.sample(StandardNormal);
            g * 10f64.powf(-3.0 * n as f64 / n60)
        })
        .collect();
    let energy: f64 = tail.iter().map(|v| v * v).sum();
    if energy > 0.0 {
        let target = TAIL_ENERGY_AT_300MS * rt60_ms / 300.0;
        let s = (target / energy).sqrt();
        tail.iter_mut().for_each(|v| *v *= s);
    }
    tail
}

/// Simulates the array capture of `sources`. Each source is projected
/// through its steering vector (direct path); reverberation adds a
/// per-channel decorrelated tail; white Gaussian noise is scaled per
/// channel to the requested SNR (channels with zero signal power stay
/// noiseless, diagonal loading downstream handles them). Pass
/// `f64::INFINITY` for a noiseless capture. Deterministic in `seed`.
pub fn synth_array_capture(
    sources: &[(Direction, Vec<f64>)],
    snr_db: f64,
    rt60_ms: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<[Vec<f64>; 4], AudioError> {
    if sources.is_empty() && snr_db.is_finite() {
        return Err(AudioError::NoSignalReference);
    }
    let len = sources.first().map(|(_, s)| s.len()).unwrap_or(0);
    if sources.iter().any(|(_, s)| s.len() != len) {
        return Err(AudioError::SourceLengthMismatch);
    }

    let mut channels: [Vec<f64>; 4] = [
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for (si, (dir, signal)) in sources.iter().enumerate() {
        let a = steering_vector(dir);
        // direct path
        for (ch, gain) in a.iter().enumerate() {
            if *gain != 0.0 {
                for (dst, &s) in channels[ch].iter_mut().zip(signal.iter()) {
                    *dst += gain * s;
                }
            }
        }
        // diffuse tail, independent per channel
        if rt60_ms > 0.0 {
            for ch in 0..4 {
                let mut tail_rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (0x5EED << 16) ^ ((si as u64) << 8) ^ ch as u64);
                let tail = reverb_tail(rt60_ms, sample_rate, &mut tail_rng);
                if tail.is_empty() {
                    continue;
                }
                let echo = fft_convolve(signal, &tail);
                for (i, dst) in channels[ch].iter_mut().enumerate() {
                    let j = i as i64 - TAIL_ONSET as i64;
                    if j >= 0 && (j as usize) < echo.len() {
                        *dst += echo[j as usize];
                    }
                }
            }
        }
    }

    if snr_db.is_finite() {
        for ch in channels.iter_mut() {
            let power: f64 = ch.iter().map(|v| v * v).sum::<f64>() / len.max(1) as f64;
            if power == 0.0 {
                continue;
            }
            let noise_std = (power / 10f64.powf(snr_db / 10.0)).sqrt();
            for v in ch.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *v += noise_std * g;
            }
        }
    }
    Ok(channels)
}

/// Burst-modulated white noise; a deterministic wideband stand-in for
/// speech in localization experiments.
pub fn speech_like(len: usize, sample_rate: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syllable = (0.18 * sample_rate) as usize;
    (0..len)
        .map(|i| {
            let phase = (i % syllable) as f64 / syllable as f64;
            let envelope = (std::f64::consts::PI * phase).sin().powi(2) + 0.05;
            let g: f64 = rng.sample(StandardNormal);
            envelope * g
        })
        .collect()
}
