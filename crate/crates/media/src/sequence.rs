use crate::{ForegroundMask, Frame, MediaError};

/// An ordered run of frames with an optional parallel list of foreground
/// masks and a rational frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSequence {
    frames: Vec<Frame>,
    masks: Option<Vec<ForegroundMask>>,
    fps: (u32, u32),
}

impl VideoSequence {
    pub fn new(
        frames: Vec<Frame>,
        masks: Option<Vec<ForegroundMask>>,
        fps: (u32, u32),
    ) -> Result<Self, MediaError> {
        if frames.is_empty() {
            return Err(MediaError::SequenceShape("no frames".into()));
        }
        if fps.0 == 0 || fps.1 == 0 {
            return Err(MediaError::SequenceShape("zero frame rate".into()));
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for f in &frames {
            if f.width() != w || f.height() != h {
                return Err(MediaError::SequenceShape(
                    "frames disagree on dimensions".into(),
                ));
            }
        }
        if let Some(ms) = &masks {
            if ms.len() != frames.len() {
                return Err(MediaError::SequenceShape(
                    "mask list not index-aligned with frames".into(),
                ));
            }
            for m in ms {
                if m.width() != w || m.height() != h {
                    return Err(MediaError::SequenceShape(
                        "mask dimensions disagree with frames".into(),
                    ));
                }
            }
        }
        Ok(VideoSequence { frames, masks, fps })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn masks(&self) -> Option<&[ForegroundMask]> {
        self.masks.as_deref()
    }

    pub fn fps(&self) -> (u32, u32) {
        self.fps
    }

    pub fn fps_hz(&self) -> f64 {
        self.fps.0 as f64 / self.fps.1 as f64
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Same frames without masks (e.g. after keying, masks no longer apply).
    pub fn with_frames(&self, frames: Vec<Frame>) -> Result<Self, MediaError> {
        VideoSequence::new(frames, None, self.fps)
    }
}
