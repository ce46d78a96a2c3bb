use crate::MediaError;
use std::io::{Read, Write};
use std::path::Path;

/// Per-pixel foreground map aligned with a frame's luma plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForegroundMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

const MASK_MAGIC: &[u8; 8] = b"ITEMMASK";

impl ForegroundMask {
    pub fn new_background(width: usize, height: usize) -> Self {
        ForegroundMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, MediaError> {
        if bits.len() != width * height {
            return Err(MediaError::PlaneSize {
                expected: width * height,
                got: bits.len(),
            });
        }
        Ok(ForegroundMask {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of foreground pixels.
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn foreground_fraction(&self) -> f64 {
        self.popcount() as f64 / (self.width * self.height) as f64
    }

    fn subsample_count(&self, min_count: u32) -> ForegroundMask {
        let cw = self.width / 2;
        let ch = self.height / 2;
        let mut out = ForegroundMask::new_background(cw, ch);
        for cy in 0..ch {
            for cx in 0..cw {
                let mut n = 0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        if self.get(2 * cx + dx, 2 * cy + dy) {
                            n += 1;
                        }
                    }
                }
                out.set(cx, cy, n >= min_count);
            }
        }
        out
    }

    /// Half-resolution mask for chroma planes: a 2x2 luma cell maps to
    /// foreground when at least 2 of its 4 pixels are foreground.
    pub fn subsample_majority(&self) -> ForegroundMask {
        self.subsample_count(2)
    }

    /// Half-resolution mask where a cell is foreground only when all 4 of
    /// its luma pixels are. Keying chroma with this rule guarantees every
    /// background pixel reads back the exact key color.
    pub fn subsample_unanimous(&self) -> ForegroundMask {
        self.subsample_count(4)
    }

    /// Serializes one mask record: magic, u32 LE width/height, then rows
    /// bit-packed MSB-first, each row padded to a whole byte.
    pub fn write_record<W: Write>(&self, w: &mut W) -> Result<(), MediaError> {
        w.write_all(MASK_MAGIC)?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        w.write_all(&(self.height as u32).to_le_bytes())?;
        let row_bytes = self.width.div_ceil(8);
        let mut row = vec![0u8; row_bytes];
        for y in 0..self.height {
            row.iter_mut().for_each(|b| *b = 0);
            for x in 0..self.width {
                if self.get(x, y) {
                    row[x / 8] |= 0x80 >> (x % 8);
                }
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    pub fn read_record<R: Read>(r: &mut R) -> Result<Option<Self>, MediaError> {
        let mut magic = [0u8; 8];
        match r.read_exact(&mut magic) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        if &magic != MASK_MAGIC {
            return Err(MediaError::BadMagic);
        }
        let mut dims = [0u8; 8];
        r.read_exact(&mut dims)
            .map_err(|_| MediaError::Truncated)?;
        let width = u32::from_le_bytes(dims[0..4].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(dims[4..8].try_into().unwrap()) as usize;
        if width == 0 || height == 0 || width > 1 << 16 || height > 1 << 16 {
            return Err(MediaError::MalformedHeader(format!(
                "mask dimensions {width}x{height}"
            )));
        }
        let row_bytes = width.div_ceil(8);
        let mut bits = vec![false; width * height];
        let mut row = vec![0u8; row_bytes];
        for y in 0..height {
            r.read_exact(&mut row).map_err(|_| MediaError::Truncated)?;
            for x in 0..width {
                bits[y * width + x] = row[x / 8] & (0x80 >> (x % 8)) != 0;
            }
        }
        Ok(Some(ForegroundMask {
            width,
            height,
            bits,
        }))
    }
}

/// Writes a sequence of masks as concatenated sidecar records.
pub fn write_masks<P: AsRef<Path>>(path: P, masks: &[ForegroundMask]) -> Result<(), MediaError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for m in masks {
        m.write_record(&mut f)?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_masks<P: AsRef<Path>>(path: P) -> Result<Vec<ForegroundMask>, MediaError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    while let Some(m) = ForegroundMask::read_record(&mut f)? {
        out.push(m);
    }
    Ok(out)
}
