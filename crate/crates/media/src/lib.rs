//! Video data model for the tele-immersion workbench: planar 4:2:0 frames,
//! YUV4MPEG2 file I/O, binary mask sidecars, a deterministic synthetic
//! chat-sequence generator, luma PSNR, and mask-driven compositing.

pub mod composite;
pub mod frame;
pub mod mask;
pub mod metrics;
pub mod sequence;
pub mod synth;
pub mod y4m;

pub use composite::composite_over;
pub use frame::Frame;
pub use mask::ForegroundMask;
pub use metrics::psnr_luma;
pub use sequence::VideoSequence;
pub use synth::{synth_chat_sequence, SynthSpec};
pub use y4m::{load_y4m, write_y4m};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MediaError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("frame dimensions {width}x{height} are not multiples of 16")]
    InvalidDimensions { width: usize, height: usize },
    #[error("plane size mismatch: expected {expected} samples, got {got}")]
    PlaneSize { expected: usize, got: usize },
    #[error("malformed YUV4MPEG2 header: {0}")]
    MalformedHeader(String),
    #[error("unsupported chroma sampling {0:?} (only C420 variants are accepted)")]
    UnsupportedSampling(String),
    #[error("file truncated mid-frame")]
    Truncated,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("region mask selects no pixels")]
    EmptyRegion,
    #[error("composite offset out of bounds")]
    OffsetOutOfBounds,
    #[error("composite offset must be even in both coordinates (chroma alignment)")]
    OddOffset,
    #[error("bad magic in mask sidecar")]
    BadMagic,
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),
    #[error("sequence construction error: {0}")]
    SequenceShape(String),
}
