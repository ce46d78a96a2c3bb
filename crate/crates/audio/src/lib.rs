//! Acoustic vector-sensor array processing: capture simulation for the
//! four-channel XYZO array, minimum-variance 3D direction-of-arrival
//! estimation, MMSE binaural filter design and overlap-add rendering,
//! energy-based target detection, and G.711 audio plumbing.

pub mod binaural;
pub mod capture;
pub mod covariance;
pub mod direction;
pub mod doa;
pub mod fft;
pub mod field;
pub mod frame;
pub mod g711;
pub mod hrtf;
pub mod linalg;
pub mod vad;
pub mod wav;

pub use binaural::{design_binaural_filters, render_binaural, BinauralFilterBank, RenderParams};
pub use capture::synth_array_capture;
pub use covariance::{estimate_covariance, CovarianceStack};
pub use direction::{steering_vector, Direction};
pub use doa::{doa_estimate, spatial_spectrum, DoaEstimate};
pub use field::SteeringField;
pub use frame::{ArrayFrame, BLOCK_LEN, FRAME_LEN, NUM_BLOCKS};
pub use hrtf::{HrtfProvider, SphericalHeadHrtf};
pub use vad::TargetDetector;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid direction: theta {0}, phi {1}")]
    BadDirection(f64, f64),
    #[error("array frame must hold exactly {expected} samples per channel, got {got}")]
    BadFrameLength { expected: usize, got: usize },
    #[error("source signals must share one length")]
    SourceLengthMismatch,
    #[error("finite snr requested with no sources")]
    NoSignalReference,
    #[error("empty frequency band")]
    EmptyBand,
    #[error("steering field mismatch: {0}")]
    FieldMismatch(String),
    #[error("malformed steering field file: {0}")]
    MalformedField(String),
    #[error("malformed wav: {0}")]
    MalformedWav(String),
    #[error("singular system in filter design")]
    SingularSystem,
}
