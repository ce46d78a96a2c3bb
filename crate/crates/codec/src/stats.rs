use crate::mode_decision::MbMode;
use serde::{Deserialize, Serialize};

pub const MODE_NAMES: [&str; 7] = [
    "skip", "16x16", "16x8", "8x16", "p8x8", "i4mb", "i16mb",
];

pub fn mode_index(m: MbMode) -> usize {
    match m {
        MbMode::Skip => 0,
        MbMode::Inter16x16 => 1,
        MbMode::Inter16x8 => 2,
        MbMode::Inter8x16 => 3,
        MbMode::P8x8 => 4,
        MbMode::I4x4 => 5,
        MbMode::I16x16 => 6,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameStats {
    pub frame: usize,
    pub intra: bool,
    pub bits: usize,
    pub psnr_y: f64,
    /// Wall-clock mode-decision time. Excluded from deterministic outputs.
    pub md_time_us: u64,
    /// 4x4 Hadamard evaluations spent on mode decision.
    pub satd_count: u64,
    pub mode_counts: [u32; 7],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodeStats {
    pub frames: Vec<FrameStats>,
}

impl EncodeStats {
    pub fn total_bits(&self) -> usize {
        self.frames.iter().map(|f| f.bits).sum()
    }

    pub fn total_satd(&self) -> u64 {
        self.frames.iter().map(|f| f.satd_count).sum()
    }

    pub fn mean_psnr_y(&self) -> f64 {
        self.frames.iter().map(|f| f.psnr_y).sum::<f64>() / self.frames.len() as f64
    }

    pub fn total_md_time_us(&self) -> u64 {
        self.frames.iter().map(|f| f.md_time_us).sum()
    }

    /// Mean bitrate in kbit/s at the given frame rate.
    pub fn bitrate_kbps(&self, fps: (u32, u32)) -> f64 {
        let hz = fps.0 as f64 / fps.1 as f64;
        self.total_bits() as f64 * hz / self.frames.len() as f64 / 1000.0
    }

    /// CSV rows: frame, bits, psnr_y, md_time_us, then the mode histogram.
    /// Timing is zeroed unless `with_timing` (it is the one
    /// non-reproducible column).
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("frame,intra,bits,psnr_y,md_time_us,satd_count");
        for n in MODE_NAMES {
            out.push_str(",n_");
            out.push_str(n);
        }
        out.push('\n');
        for f in &self.frames {
            let t = if with_timing { f.md_time_us } else { 0 };
            out.push_str(&format!(
                "{},{},{},{:.4},{},{}",
                f.frame, f.intra as u8, f.bits, f.psnr_y, t, f.satd_count
            ));
            for c in f.mode_counts {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}
