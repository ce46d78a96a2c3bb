use crate::MediaError;

/// One planar 8-bit YCbCr 4:2:0 frame. Luma dimensions are multiples of 16
/// (macroblock-aligned); chroma planes are half resolution in each direction.
///
/// Frames are immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    y: Vec<u8>,
    cb: Vec<u8>,
    cr: Vec<u8>,
}

impl Frame {
    pub fn from_planes(
        width: usize,
        height: usize,
        y: Vec<u8>,
        cb: Vec<u8>,
        cr: Vec<u8>,
    ) -> Result<Self, MediaError> {
        if width == 0 || height == 0 || width % 16 != 0 || height % 16 != 0 {
            return Err(MediaError::InvalidDimensions { width, height });
        }
        if y.len() != width * height {
            return Err(MediaError::PlaneSize {
                expected: width * height,
                got: y.len(),
            });
        }
        let csize = (width / 2) * (height / 2);
        if cb.len() != csize {
            return Err(MediaError::PlaneSize {
                expected: csize,
                got: cb.len(),
            });
        }
        if cr.len() != csize {
            return Err(MediaError::PlaneSize {
                expected: csize,
                got: cr.len(),
            });
        }
        Ok(Frame {
            width,
            height,
            y,
            cb,
            cr,
        })
    }

    /// Frame filled with a single YCbCr color.
    pub fn constant(width: usize, height: usize, ycbcr: (u8, u8, u8)) -> Result<Self, MediaError> {
        let csize = (width / 2) * (height / 2);
        Frame::from_planes(
            width,
            height,
            vec![ycbcr.0; width * height],
            vec![ycbcr.1; csize],
            vec![ycbcr.2; csize],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn chroma_width(&self) -> usize {
        self.width / 2
    }

    pub fn chroma_height(&self) -> usize {
        self.height / 2
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn cb(&self) -> &[u8] {
        &self.cb
    }

    pub fn cr(&self) -> &[u8] {
        &self.cr
    }

    #[inline]
    pub fn luma(&self, x: usize, y: usize) -> u8 {
        self.y[y * self.width + x]
    }

    /// Chroma samples addressed in chroma-plane coordinates.
    #[inline]
    pub fn chroma(&self, cx: usize, cy: usize) -> (u8, u8) {
        let idx = cy * self.chroma_width() + cx;
        (self.cb[idx], self.cr[idx])
    }

    /// YCbCr triple at a luma pixel, chroma fetched by replication.
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> (u8, u8, u8) {
        let (cb, cr) = self.chroma(x / 2, y / 2);
        (self.luma(x, y), cb, cr)
    }

    pub fn into_planes(self) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        (self.y, self.cb, self.cr)
    }

    pub fn same_dimensions(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }
}
