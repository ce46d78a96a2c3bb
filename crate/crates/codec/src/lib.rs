//! Block-based object video codec with an exhaustive rate-distortion mode
//! decision and a fast path that prunes the search using motion and intra
//! cost estimates.
//!
//! The container is the documented non-standard "ITEMOBJ1" format (see
//! `docs/bitstream.md`): 16x16 macroblocks, H.264-style 4x4 integer
//! transform and quantizer, half/quarter-pel motion compensation, and
//! Exp-Golomb entropy coding. Encoder and decoder share one reconstruction
//! path, so decoded frames are bit-identical to the encoder-side
//! reconstruction by construction.

pub mod bitstream;
pub mod config;
pub mod decoder;
pub mod encoder;
pub mod interp;
pub mod mode_decision;
pub mod motion;
pub mod predict;
pub mod satd;
pub mod stats;
pub mod syntax;
pub mod train;
pub mod transform;

pub use config::{skip_threshold, BetaTable, CodecConfig};
pub use decoder::{decode_sequence, DecodeOutput};
pub use encoder::{encode_sequence, encode_sequence_collecting, DecisionPath, EncodeOutput};
pub use mode_decision::{decide_mode_fast, decide_mode_full, DecisionTrace, MbMode, ModeDecision};
pub use motion::MotionVector;
pub use satd::satd;
pub use stats::{EncodeStats, FrameStats};
pub use train::train_beta;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("qp {0} outside [0, 51]")]
    QpOutOfRange(u8),
    #[error("frame dimensions {0}x{1} are not multiples of 16")]
    BadDimensions(usize, usize),
    #[error("block dimensions {0}x{1} unsupported")]
    BadBlockSize(usize, usize),
    #[error("block length mismatch: {0}")]
    BlockLenMismatch(String),
    #[error("corrupt bitstream: {0}")]
    Corrupt(&'static str),
    #[error("empty training corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Media(#[from] item_media::MediaError),
}
