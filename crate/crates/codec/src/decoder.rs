//! Bitstream decoder. Reuses the encoder's reconstruction path, so a valid
//! stream reproduces the encoder-side reconstruction bit for bit; corrupt
//! streams yield errors, never panics.

use crate::bitstream::BitReader;
use crate::encoder::{StreamHeader, HEADER_LEN};
use crate::syntax::{apply_mb, parse_mb, FrameState, MbEnv};
use crate::CodecError;
use item_media::{Frame, VideoSequence};

pub struct DecodeOutput {
    pub header: StreamHeader,
    pub seq: VideoSequence,
}

pub fn decode_sequence(bytes: &[u8]) -> Result<DecodeOutput, CodecError> {
    let header = StreamHeader::parse(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let avail_bits = payload.len() * 8;
    if header.payload_bits > avail_bits as u64 {
        return Err(CodecError::Corrupt("payload shorter than declared"));
    }
    if payload.len() > (header.payload_bits as usize).div_ceil(8) {
        return Err(CodecError::Corrupt("trailing bytes after payload"));
    }
    // padding bits after the declared payload must be zero
    for bit in header.payload_bits as usize..avail_bits {
        if payload[bit / 8] & (0x80 >> (bit % 8)) != 0 {
            return Err(CodecError::Corrupt("nonzero padding bits"));
        }
    }
    if header.frame_count > 1 << 20 {
        return Err(CodecError::Corrupt("implausible frame count"));
    }

    let mut r = BitReader::with_limit(payload, header.payload_bits as usize);
    let mbw = header.width / 16;
    let mbh = header.height / 16;
    let mut frames: Vec<Frame> = Vec::with_capacity(header.frame_count as usize);

    for fi in 0..header.frame_count {
        let intra_frame = fi % header.gop == 0;
        let reference = if intra_frame { None } else { frames.last() };
        let mut state = FrameState::new(header.width, header.height);
        for mby in 0..mbh {
            for mbx in 0..mbw {
                let env = MbEnv {
                    state: &state,
                    reference,
                    qp: header.qp,
                    mbx,
                    mby,
                };
                let syntax = parse_mb(&mut r, &env, intra_frame)?;
                let recon = apply_mb(&syntax, &env);
                state.commit(mbx, mby, &syntax, &recon);
            }
        }
        frames.push(state.into_frame());
    }
    if r.bits_left() > 0 {
        return Err(CodecError::Corrupt("payload longer than frames consumed"));
    }

    let seq = VideoSequence::new(frames, None, header.fps)?;
    Ok(DecodeOutput { header, seq })
}
