//! Sequence encoder: GOP structure, per-macroblock mode decision, entropy
//! coding, and the encoder-side reconstruction used as the reference for
//! the next frame.

use crate::bitstream::BitWriter;
use crate::config::CodecConfig;
use crate::mode_decision::{decide_mode_fast, decide_mode_full, MbCtx, MbMode};
use crate::satd::SatdCounter;
use crate::stats::{mode_index, EncodeStats, FrameStats};
use crate::syntax::{write_mb, FrameState, MbEnv};
use crate::CodecError;
use item_chroma::KeyColor;
use item_media::{psnr_luma, Frame, VideoSequence};

pub const MAGIC: &[u8; 8] = b"ITEMOBJ1";
pub const HEADER_LEN: usize = 8 + 2 + 2 + 1 + 4 + 4 + 4 + 4 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionPath {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub width: usize,
    pub height: usize,
    pub qp: u8,
    pub gop: u32,
    pub fps: (u32, u32),
    pub frame_count: u32,
    pub payload_bits: u64,
}

impl StreamHeader {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.width as u16).to_le_bytes());
        out.extend_from_slice(&(self.height as u16).to_le_bytes());
        out.push(self.qp);
        out.extend_from_slice(&self.gop.to_le_bytes());
        out.extend_from_slice(&self.fps.0.to_le_bytes());
        out.extend_from_slice(&self.fps.1.to_le_bytes());
        out.extend_from_slice(&self.frame_count.to_le_bytes());
        out.extend_from_slice(&self.payload_bits.to_le_bytes());
    }

    pub fn parse(data: &[u8]) -> Result<StreamHeader, CodecError> {
        if data.len() < HEADER_LEN {
            return Err(CodecError::Corrupt("stream shorter than header"));
        }
        if &data[0..8] != MAGIC {
            return Err(CodecError::Corrupt("bad magic"));
        }
        let rd16 = |o: usize| u16::from_le_bytes(data[o..o + 2].try_into().unwrap());
        let rd32 = |o: usize| u32::from_le_bytes(data[o..o + 4].try_into().unwrap());
        let h = StreamHeader {
            width: rd16(8) as usize,
            height: rd16(10) as usize,
            qp: data[12],
            gop: rd32(13),
            fps: (rd32(17), rd32(21)),
            frame_count: rd32(25),
            payload_bits: u64::from_le_bytes(data[29..37].try_into().unwrap()),
        };
        if h.width == 0 || h.height == 0 || h.width % 16 != 0 || h.height % 16 != 0 {
            return Err(CodecError::Corrupt("bad dimensions in header"));
        }
        if h.qp > 51 {
            return Err(CodecError::Corrupt("qp out of range in header"));
        }
        if h.gop == 0 || h.fps.0 == 0 || h.fps.1 == 0 || h.frame_count == 0 {
            return Err(CodecError::Corrupt("zero field in header"));
        }
        Ok(h)
    }
}

/// Per-macroblock record of the gate inputs, for scale-table training.
#[derive(Debug, Clone, Copy)]
pub struct GateSample {
    pub j16_half: f64,
    pub j8x8_half: f64,
    pub best_mode: MbMode,
}

pub struct EncodeOutput {
    pub bytes: Vec<u8>,
    pub stats: EncodeStats,
    /// Encoder-side reconstruction (what the decoder must reproduce).
    pub recon: VideoSequence,
    /// Gate samples collected when requested.
    pub gate_samples: Vec<GateSample>,
}

fn key_mb_map(frame: &Frame, key: KeyColor) -> Vec<bool> {
    let mbw = frame.width() / 16;
    let mbh = frame.height() / 16;
    let mut out = vec![false; mbw * mbh];
    for mby in 0..mbh {
        'mb: for mbx in 0..mbw {
            for y in 0..16 {
                for x in 0..16 {
                    if frame.luma(mbx * 16 + x, mby * 16 + y) != key.y {
                        continue 'mb;
                    }
                }
            }
            for y in 0..8 {
                for x in 0..8 {
                    let (cb, cr) = frame.chroma(mbx * 8 + x, mby * 8 + y);
                    if cb != key.cb || cr != key.cr {
                        continue 'mb;
                    }
                }
            }
            out[mby * mbw + mbx] = true;
        }
    }
    out
}

pub fn encode_sequence(
    seq: &VideoSequence,
    cfg: &CodecConfig,
    path: DecisionPath,
) -> Result<EncodeOutput, CodecError> {
    encode_sequence_inner(seq, cfg, path, false)
}

/// Like `encode_sequence` but also returns per-MB gate samples (full path
/// training hook).
pub fn encode_sequence_collecting(
    seq: &VideoSequence,
    cfg: &CodecConfig,
    path: DecisionPath,
) -> Result<EncodeOutput, CodecError> {
    encode_sequence_inner(seq, cfg, path, true)
}

fn encode_sequence_inner(
    seq: &VideoSequence,
    cfg: &CodecConfig,
    path: DecisionPath,
    collect: bool,
) -> Result<EncodeOutput, CodecError> {
    cfg.validate()?;
    let (w, h) = (seq.width(), seq.height());
    if w % 16 != 0 || h % 16 != 0 {
        return Err(CodecError::BadDimensions(w, h));
    }
    let mbw = w / 16;
    let mbh = h / 16;

    let mut writer = BitWriter::new();
    let mut stats = Vec::with_capacity(seq.len());
    let mut recon_frames: Vec<Frame> = Vec::with_capacity(seq.len());
    let mut gate_samples = Vec::new();
    let mut prev_key_map: Vec<bool> = vec![false; mbw * mbh];

    for (fi, frame) in seq.frames().iter().enumerate() {
        let intra_frame = fi as u32 % cfg.gop == 0;
        let reference = if intra_frame {
            None
        } else {
            recon_frames.last()
        };
        let key_map = key_mb_map(frame, cfg.key);
        let mut state = FrameState::new(w, h);
        let mut counter = SatdCounter::default();
        let mut mode_counts = [0u32; 7];
        let bits_before = writer.bit_len();
        let t0 = std::time::Instant::now();

        for mby in 0..mbh {
            for mbx in 0..mbw {
                let ctx = MbCtx {
                    src: frame,
                    reference,
                    state: &state,
                    cfg,
                    mbx,
                    mby,
                    intra_frame,
                    key_mb_cur: key_map[mby * mbw + mbx],
                    key_mb_prev: prev_key_map[mby * mbw + mbx],
                };
                let out = match path {
                    DecisionPath::Fast => decide_mode_fast(&ctx, &mut counter),
                    DecisionPath::Full => decide_mode_full(&ctx, &mut counter),
                };
                if collect && !intra_frame {
                    if let Some((j16, j8x8)) = out.gate_costs {
                        gate_samples.push(GateSample {
                            j16_half: j16,
                            j8x8_half: j8x8,
                            best_mode: out.decision.mode,
                        });
                    }
                }
                mode_counts[mode_index(out.decision.mode)] += 1;
                let env = MbEnv {
                    state: &state,
                    reference,
                    qp: cfg.qp,
                    mbx,
                    mby,
                };
                write_mb(&out.syntax, &env, intra_frame, &mut writer);
                state.commit(mbx, mby, &out.syntax, &out.recon);
            }
        }

        let md_time_us = t0.elapsed().as_micros() as u64;
        let recon = state.into_frame();
        let psnr = psnr_luma(frame, &recon, None)?;
        stats.push(FrameStats {
            frame: fi,
            intra: intra_frame,
            bits: writer.bit_len() - bits_before,
            psnr_y: psnr,
            md_time_us,
            satd_count: counter.hadamard_4x4,
            mode_counts,
        });
        recon_frames.push(recon);
        prev_key_map = key_map;
    }

    let header = StreamHeader {
        width: w,
        height: h,
        qp: cfg.qp,
        gop: cfg.gop,
        fps: seq.fps(),
        frame_count: seq.len() as u32,
        payload_bits: writer.bit_len() as u64,
    };
    let mut bytes = Vec::with_capacity(HEADER_LEN + writer.bit_len() / 8 + 1);
    header.write(&mut bytes);
    bytes.extend_from_slice(&writer.into_bytes());

    Ok(EncodeOutput {
        bytes,
        stats: EncodeStats { frames: stats },
        recon: VideoSequence::new(recon_frames, None, seq.fps())?,
        gate_samples,
    })
}
