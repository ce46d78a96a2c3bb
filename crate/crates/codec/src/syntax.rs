//! Macroblock syntax: serialization to/from the entropy-coded stream and
//! the reconstruction path shared by the encoder and the decoder.
//!
//! Layout per macroblock (see `docs/bitstream.md`): mode code, motion or
//! intra-mode payload, a 6-bit coded-block pattern (4 luma quadrants, Cb,
//! Cr), then run/level/EOB coefficient blocks in zigzag order.

use crate::bitstream::{BitReader, BitWriter};
use crate::interp::{predict_chroma, predict_luma, Plane};
use crate::mode_decision::MbMode;
use crate::motion::MotionVector;
use crate::predict::{
    most_probable_mode, predict16, predict4, predict_chroma_dc, Intra16Mode, Intra4Mode, Nbr4,
};
use crate::transform::{dequantize, forward4, inverse4, quantize, ZIGZAG};
use crate::CodecError;
use item_media::Frame;

/// Largest coefficient magnitude the syntax admits.
pub const MAX_LEVEL: i32 = 1 << 20;
/// Largest motion-vector component magnitude (quarter-pel units).
pub const MAX_MV: i32 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum SubMode {
    S8x8 = 0,
    S8x4 = 1,
    S4x8 = 2,
    S4x4 = 3,
}

impl SubMode {
    pub fn from_index(i: u8) -> Option<SubMode> {
        match i {
            0 => Some(SubMode::S8x8),
            1 => Some(SubMode::S8x4),
            2 => Some(SubMode::S4x8),
            3 => Some(SubMode::S4x4),
            _ => None,
        }
    }

    /// Sub-partition rectangles relative to the owning 8x8 block.
    pub fn rects(self) -> &'static [(usize, usize, usize, usize)] {
        match self {
            SubMode::S8x8 => &[(0, 0, 8, 8)],
            SubMode::S8x4 => &[(0, 0, 8, 4), (0, 4, 8, 4)],
            SubMode::S4x8 => &[(0, 0, 4, 8), (4, 0, 4, 8)],
            SubMode::S4x4 => &[(0, 0, 4, 4), (4, 0, 4, 4), (0, 4, 4, 4), (4, 4, 4, 4)],
        }
    }
}

/// Partition rectangles (x, y, w, h) in macroblock luma coordinates, in
/// motion-vector signalling order.
pub fn partitions(mode: MbMode, sub_modes: &[SubMode; 4]) -> Vec<(usize, usize, usize, usize)> {
    match mode {
        MbMode::Skip => vec![(0, 0, 16, 16)],
        MbMode::Inter16x16 => vec![(0, 0, 16, 16)],
        MbMode::Inter16x8 => vec![(0, 0, 16, 8), (0, 8, 16, 8)],
        MbMode::Inter8x16 => vec![(0, 0, 8, 16), (8, 0, 8, 16)],
        MbMode::P8x8 => {
            let mut out = Vec::new();
            for (b, &(bx, by)) in [(0usize, 0usize), (8, 0), (0, 8), (8, 8)].iter().enumerate() {
                for &(sx, sy, w, h) in sub_modes[b].rects() {
                    out.push((bx + sx, by + sy, w, h));
                }
            }
            out
        }
        MbMode::I4x4 | MbMode::I16x16 => vec![],
    }
}

#[derive(Debug, Clone)]
pub struct MbSyntax {
    pub mode: MbMode,
    pub sub_modes: [SubMode; 4],
    /// Differentials against the macroblock predictor, in partition order.
    pub mvds: Vec<MotionVector>,
    pub i4_modes: [Intra4Mode; 16],
    pub i16_mode: Intra16Mode,
    pub cbp_luma: [bool; 4],
    pub cbp_cb: bool,
    pub cbp_cr: bool,
    /// 4x4 luma blocks in raster order within the MB.
    pub luma_levels: [[i32; 16]; 16],
    pub cb_levels: [[i32; 16]; 4],
    pub cr_levels: [[i32; 16]; 4],
}

impl Default for MbSyntax {
    fn default() -> Self {
        MbSyntax {
            mode: MbMode::Skip,
            sub_modes: [SubMode::S8x8; 4],
            mvds: Vec::new(),
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
            cbp_luma: [false; 4],
            cbp_cb: false,
            cbp_cr: false,
            luma_levels: [[0; 16]; 16],
            cb_levels: [[0; 16]; 4],
            cr_levels: [[0; 16]; 4],
        }
    }
}

impl MbSyntax {
    pub fn is_intra(&self) -> bool {
        matches!(self.mode, MbMode::I4x4 | MbMode::I16x16)
    }
}

/// Per-macroblock state the predictor chain needs.
#[derive(Debug, Clone, Copy)]
pub struct MbInfo {
    pub coded: bool,
    pub mode: MbMode,
    pub rep_mv: MotionVector,
    /// 4x4 intra modes (index form) when the MB is I4x4-coded, else 255s.
    pub i4: [u8; 16],
}

impl Default for MbInfo {
    fn default() -> Self {
        MbInfo {
            coded: false,
            mode: MbMode::Skip,
            rep_mv: MotionVector::ZERO,
            i4: [255; 16],
        }
    }
}

impl MbInfo {
    pub fn is_intra(&self) -> bool {
        self.coded && matches!(self.mode, MbMode::I4x4 | MbMode::I16x16)
    }
}

/// Reconstruction state of the frame being coded, shared between encoder
/// and decoder.
pub struct FrameState {
    pub w: usize,
    pub h: usize,
    pub mb_w: usize,
    pub mb_h: usize,
    pub y: Vec<u8>,
    pub cb: Vec<u8>,
    pub cr: Vec<u8>,
    pub info: Vec<MbInfo>,
}

impl FrameState {
    pub fn new(w: usize, h: usize) -> FrameState {
        FrameState {
            w,
            h,
            mb_w: w / 16,
            mb_h: h / 16,
            y: vec![0; w * h],
            cb: vec![0; w * h / 4],
            cr: vec![0; w * h / 4],
            info: vec![MbInfo::default(); (w / 16) * (h / 16)],
        }
    }

    pub fn info_at(&self, mbx: i64, mby: i64) -> Option<&MbInfo> {
        if mbx < 0 || mby < 0 || mbx >= self.mb_w as i64 || mby >= self.mb_h as i64 {
            return None;
        }
        let i = &self.info[mby as usize * self.mb_w + mbx as usize];
        i.coded.then_some(i)
    }

    /// Median motion-vector predictor from the left, top and top-right
    /// macroblocks (absent or intra neighbors contribute the zero vector).
    pub fn mv_predictor(&self, mbx: usize, mby: usize) -> MotionVector {
        let fetch = |dx: i64, dy: i64| -> MotionVector {
            match self.info_at(mbx as i64 + dx, mby as i64 + dy) {
                Some(i) if !i.is_intra() => i.rep_mv,
                _ => MotionVector::ZERO,
            }
        };
        MotionVector::median3(fetch(-1, 0), fetch(0, -1), fetch(1, -1))
    }

    /// Count of intra-coded macroblocks among {left, top, top-left,
    /// top-right}.
    pub fn intra_neighbor_count(&self, mbx: usize, mby: usize) -> u32 {
        [(-1i64, 0i64), (0, -1), (-1, -1), (1, -1)]
            .iter()
            .filter(|&&(dx, dy)| {
                self.info_at(mbx as i64 + dx, mby as i64 + dy)
                    .is_some_and(|i| i.is_intra())
            })
            .count() as u32
    }

    pub fn into_frame(self) -> Frame {
        Frame::from_planes(self.w, self.h, self.y, self.cb, self.cr).expect("state is well-formed")
    }

    pub fn commit(&mut self, mbx: usize, mby: usize, syntax: &MbSyntax, recon: &MbRecon) {
        let x0 = mbx * 16;
        let y0 = mby * 16;
        for y in 0..16 {
            let dst = (y0 + y) * self.w + x0;
            self.y[dst..dst + 16].copy_from_slice(&recon.y[y * 16..y * 16 + 16]);
        }
        let cw = self.w / 2;
        for y in 0..8 {
            let dst = (y0 / 2 + y) * cw + x0 / 2;
            self.cb[dst..dst + 8].copy_from_slice(&recon.cb[y * 8..y * 8 + 8]);
            self.cr[dst..dst + 8].copy_from_slice(&recon.cr[y * 8..y * 8 + 8]);
        }
        let rep = match syntax.mode {
            MbMode::Skip => self.mv_predictor(mbx, mby),
            MbMode::I4x4 | MbMode::I16x16 => MotionVector::ZERO,
            _ => {
                let pred = self.mv_predictor(mbx, mby);
                MotionVector::new(pred.x + syntax.mvds[0].x, pred.y + syntax.mvds[0].y)
            }
        };
        let mut i4 = [255u8; 16];
        if syntax.mode == MbMode::I4x4 {
            for (slot, m) in i4.iter_mut().zip(syntax.i4_modes.iter()) {
                *slot = m.index();
            }
        }
        self.info[mby * self.mb_w + mbx] = MbInfo {
            coded: true,
            mode: syntax.mode,
            rep_mv: rep,
            i4,
        };
    }
}

/// Reconstructed samples of one macroblock.
#[derive(Debug, Clone)]
pub struct MbRecon {
    pub y: [u8; 256],
    pub cb: [u8; 64],
    pub cr: [u8; 64],
}

impl Default for MbRecon {
    fn default() -> Self {
        MbRecon {
            y: [0; 256],
            cb: [0; 64],
            cr: [0; 64],
        }
    }
}

/// Everything reconstruction needs besides the syntax itself.
pub struct MbEnv<'a> {
    pub state: &'a FrameState,
    pub reference: Option<&'a Frame>,
    pub qp: u8,
    pub mbx: usize,
    pub mby: usize,
}

impl<'a> MbEnv<'a> {
    pub fn x0(&self) -> usize {
        self.mbx * 16
    }

    pub fn y0(&self) -> usize {
        self.mby * 16
    }

    /// Committed reconstructed luma sample; `None` outside the frame or in
    /// regions raster order has not reached yet.
    pub fn recon_luma(&self, x: i64, y: i64) -> Option<u8> {
        if x < 0 || y < 0 || x >= self.state.w as i64 || y >= self.state.h as i64 {
            return None;
        }
        let y0 = self.y0() as i64;
        let x0 = self.x0() as i64;
        if y >= y0 && (y >= y0 + 16 || x >= x0) {
            return None;
        }
        Some(self.state.y[y as usize * self.state.w + x as usize])
    }

    fn recon_chroma(&self, plane: &[u8], cx: i64, cy: i64) -> Option<u8> {
        let cw = self.state.w as i64 / 2;
        let ch = self.state.h as i64 / 2;
        if cx < 0 || cy < 0 || cx >= cw || cy >= ch {
            return None;
        }
        let cy0 = self.y0() as i64 / 2;
        let cx0 = self.x0() as i64 / 2;
        if cy >= cy0 && (cy >= cy0 + 8 || cx >= cx0) {
            return None;
        }
        Some(plane[cy as usize * cw as usize + cx as usize])
    }
}

/// Intra mode of the 4x4 block to the left / above block `k`, looking into
/// the in-progress MB first and falling back to neighbor macroblocks.
pub fn neighbor_i4_mode(
    env: &MbEnv,
    modes_so_far: &[Intra4Mode; 16],
    coded_mask: u16,
    k: usize,
    left: bool,
) -> Option<Intra4Mode> {
    let bx = k % 4;
    let by = k / 4;
    if left {
        if bx > 0 {
            let kk = k - 1;
            return (coded_mask & (1 << kk) != 0).then(|| modes_so_far[kk]);
        }
        let info = env.state.info_at(env.mbx as i64 - 1, env.mby as i64)?;
        if info.mode != MbMode::I4x4 {
            return None;
        }
        Intra4Mode::from_index(info.i4[by * 4 + 3])
    } else {
        if by > 0 {
            let kk = k - 4;
            return (coded_mask & (1 << kk) != 0).then(|| modes_so_far[kk]);
        }
        let info = env.state.info_at(env.mbx as i64, env.mby as i64 - 1)?;
        if info.mode != MbMode::I4x4 {
            return None;
        }
        Intra4Mode::from_index(info.i4[3 * 4 + bx])
    }
}

/// Most probable mode for block `k` given the in-progress mode choices.
pub fn block_mpm(
    env: &MbEnv,
    modes_so_far: &[Intra4Mode; 16],
    coded_mask: u16,
    k: usize,
) -> Intra4Mode {
    let left = neighbor_i4_mode(env, modes_so_far, coded_mask, k, true);
    let top = neighbor_i4_mode(env, modes_so_far, coded_mask, k, false);
    most_probable_mode(left, top)
}

/// Gathers the prediction neighborhood of 4x4 block `k`, reading committed
/// frame samples outside the MB and `scratch` for already-reconstructed
/// blocks inside it.
pub fn gather_nbr4(env: &MbEnv, scratch: &[u8; 256], coded_mask: u16, k: usize) -> Nbr4 {
    let bx = k % 4;
    let by = k / 4;
    let gx = env.x0() as i64 + bx as i64 * 4;
    let gy = env.y0() as i64 + by as i64 * 4;

    let in_mb_coded = |lx: i64, ly: i64| -> Option<u8> {
        // (lx, ly) in MB-local luma coordinates
        if !(0..16).contains(&lx) || !(0..16).contains(&ly) {
            return None;
        }
        let blk = (ly / 4) * 4 + lx / 4;
        (coded_mask & (1 << blk) != 0).then(|| scratch[(ly * 16 + lx) as usize])
    };
    let sample = |dx: i64, dy: i64| -> Option<u8> {
        let lx = bx as i64 * 4 + dx;
        let ly = by as i64 * 4 + dy;
        if (0..16).contains(&lx) && (0..16).contains(&ly) {
            in_mb_coded(lx, ly)
        } else {
            env.recon_luma(gx + dx, gy + dy)
        }
    };

    let mut top = None;
    if sample(0, -1).is_some() {
        let mut t = [0u8; 4];
        for (i, slot) in t.iter_mut().enumerate() {
            *slot = sample(i as i64, -1).unwrap();
        }
        top = Some(t);
    }
    let mut left = None;
    if sample(-1, 0).is_some() {
        let mut l = [0u8; 4];
        for (i, slot) in l.iter_mut().enumerate() {
            *slot = sample(-1, i as i64).unwrap();
        }
        left = Some(l);
    }
    let top_left = sample(-1, -1);
    // top-right requires the four samples above-right to be decoded already
    let mut top_right = None;
    if top.is_some() {
        let tr_ok = (0..4).all(|i| sample(4 + i, -1).is_some());
        if tr_ok {
            let mut t = [0u8; 4];
            for (i, slot) in t.iter_mut().enumerate() {
                *slot = sample(4 + i as i64, -1).unwrap();
            }
            top_right = Some(t);
        }
    }
    Nbr4 {
        top,
        top_right,
        left,
        top_left,
    }
}

/// Neighbor rows/columns for whole-MB intra prediction.
pub fn gather_mb_neighbors(env: &MbEnv) -> (Option<[u8; 16]>, Option<[u8; 16]>, Option<u8>) {
    let x0 = env.x0() as i64;
    let y0 = env.y0() as i64;
    let top = if env.recon_luma(x0, y0 - 1).is_some() {
        let mut t = [0u8; 16];
        for (i, slot) in t.iter_mut().enumerate() {
            *slot = env.recon_luma(x0 + i as i64, y0 - 1).unwrap();
        }
        Some(t)
    } else {
        None
    };
    let left = if env.recon_luma(x0 - 1, y0).is_some() {
        let mut l = [0u8; 16];
        for (i, slot) in l.iter_mut().enumerate() {
            *slot = env.recon_luma(x0 - 1, y0 + i as i64).unwrap();
        }
        Some(l)
    } else {
        None
    };
    let tl = env.recon_luma(x0 - 1, y0 - 1);
    (top, left, tl)
}

fn gather_chroma_neighbors(env: &MbEnv, plane: &[u8]) -> (Option<[u8; 8]>, Option<[u8; 8]>) {
    let cx0 = env.x0() as i64 / 2;
    let cy0 = env.y0() as i64 / 2;
    let top = if env.recon_chroma(plane, cx0, cy0 - 1).is_some() {
        let mut t = [0u8; 8];
        for (i, slot) in t.iter_mut().enumerate() {
            *slot = env.recon_chroma(plane, cx0 + i as i64, cy0 - 1).unwrap();
        }
        Some(t)
    } else {
        None
    };
    let left = if env.recon_chroma(plane, cx0 - 1, cy0).is_some() {
        let mut l = [0u8; 8];
        for (i, slot) in l.iter_mut().enumerate() {
            *slot = env.recon_chroma(plane, cx0 - 1, cy0 + i as i64).unwrap();
        }
        Some(l)
    } else {
        None
    };
    (top, left)
}

#[inline]
fn add_residual4(pred: &mut [u8], stride: usize, x0: usize, y0: usize, res: &[i32; 16]) {
    for y in 0..4 {
        for x in 0..4 {
            let p = &mut pred[(y0 + y) * stride + x0 + x];
            *p = (*p as i32 + res[y * 4 + x]).clamp(0, 255) as u8;
        }
    }
}

/// Quantizes `src - pred` for a 4x4 block, returns levels and writes the
/// reconstruction back into `pred`.
#[allow(clippy::too_many_arguments)]
fn code_block_into(
    src: &[u8],
    src_stride: usize,
    pred: &mut [u8],
    stride: usize,
    x0: usize,
    y0: usize,
    sx0: usize,
    sy0: usize,
    qp: u8,
    intra: bool,
) -> [i32; 16] {
    let mut res = [0i32; 16];
    for y in 0..4 {
        for x in 0..4 {
            res[y * 4 + x] = src[(sy0 + y) * src_stride + sx0 + x] as i32
                - pred[(y0 + y) * stride + x0 + x] as i32;
        }
    }
    let levels = quantize(&forward4(&res), qp, intra);
    let recon = inverse4(&dequantize(&levels, qp));
    add_residual4(pred, stride, x0, y0, &recon);
    levels
}

/// Applies dequantized levels onto the prediction in place.
fn apply_block_levels(
    levels: &[i32; 16],
    pred: &mut [u8],
    stride: usize,
    x0: usize,
    y0: usize,
    qp: u8,
) {
    let recon = inverse4(&dequantize(levels, qp));
    add_residual4(pred, stride, x0, y0, &recon);
}

#[inline]
fn quadrant_of_block(k: usize) -> usize {
    let bx = k % 4;
    let by = k / 4;
    (by / 2) * 2 + bx / 2
}

/// Absolute motion vectors of a syntax element given the frame state.
pub fn resolve_mvs(syntax: &MbSyntax, state: &FrameState, mbx: usize, mby: usize) -> Vec<MotionVector> {
    let pred = state.mv_predictor(mbx, mby);
    match syntax.mode {
        MbMode::Skip => vec![pred],
        _ => syntax
            .mvds
            .iter()
            .map(|d| MotionVector::new(pred.x + d.x, pred.y + d.y))
            .collect(),
    }
}

/// The encoder-side builder: predicts, quantizes and reconstructs one MB
/// according to `plan`, producing the syntax element and reconstruction.
pub struct MbPlan {
    pub mode: MbMode,
    pub sub_modes: [SubMode; 4],
    /// Absolute motion vectors in partition order (empty for intra/skip).
    pub mvs: Vec<MotionVector>,
    pub i4_modes: [Intra4Mode; 16],
    pub i16_mode: Intra16Mode,
}

fn inter_prediction(
    env: &MbEnv,
    mode: MbMode,
    sub_modes: &[SubMode; 4],
    mvs: &[MotionVector],
) -> MbRecon {
    let reference = env.reference.expect("inter modes require a reference");
    let ref_y = Plane {
        data: reference.y(),
        w: reference.width(),
        h: reference.height(),
    };
    let ref_cb = Plane {
        data: reference.cb(),
        w: reference.chroma_width(),
        h: reference.chroma_height(),
    };
    let ref_cr = Plane {
        data: reference.cr(),
        w: reference.chroma_width(),
        h: reference.chroma_height(),
    };
    let mut out = MbRecon::default();
    let parts = partitions(mode, sub_modes);
    debug_assert_eq!(parts.len(), mvs.len());
    let mut buf = [0u8; 256];
    for (&(px, py, w, h), &mv) in parts.iter().zip(mvs.iter()) {
        predict_luma(
            ref_y,
            env.x0() + px,
            env.y0() + py,
            (mv.x, mv.y),
            w,
            h,
            &mut buf[..w * h],
        );
        for y in 0..h {
            for x in 0..w {
                out.y[(py + y) * 16 + px + x] = buf[y * w + x];
            }
        }
        let (cw, ch) = (w / 2, h / 2);
        for (plane, dst) in [(ref_cb, &mut out.cb), (ref_cr, &mut out.cr)] {
            predict_chroma(
                plane,
                (env.x0() + px) / 2,
                (env.y0() + py) / 2,
                (mv.x, mv.y),
                cw,
                ch,
                &mut buf[..cw * ch],
            );
            for y in 0..ch {
                for x in 0..cw {
                    dst[(py / 2 + y) * 8 + px / 2 + x] = buf[y * cw + x];
                }
            }
        }
    }
    out
}

enum LumaLevels<'a> {
    Code(&'a mut [[i32; 16]; 16]),
    Apply(&'a [[i32; 16]; 16], [bool; 4]),
}

/// Shared luma residual pass for intra-4x4 coding: walks blocks in raster
/// order, predicting from the reconstruction as it grows.
fn i4_luma_pass(
    env: &MbEnv,
    src: Option<&Frame>,
    modes: &[Intra4Mode; 16],
    recon: &mut MbRecon,
    mut levels: LumaLevels,
    qp: u8,
) {
    let mut coded_mask = 0u16;
    for k in 0..16 {
        let bx = (k % 4) * 4;
        let by = (k / 4) * 4;
        let n = gather_nbr4(env, &recon.y, coded_mask, k);
        let pred = predict4(modes[k], &n)
            .or_else(|| predict4(Intra4Mode::Dc, &n))
            .expect("DC prediction always available");
        for y in 0..4 {
            for x in 0..4 {
                recon.y[(by + y) * 16 + bx + x] = pred[y * 4 + x];
            }
        }
        match levels {
            LumaLevels::Code(ref mut lv) => {
                let f = src.expect("encoder pass needs source");
                lv[k] = code_block_into(
                    f.y(),
                    f.width(),
                    &mut recon.y,
                    16,
                    bx,
                    by,
                    env.x0() + bx,
                    env.y0() + by,
                    qp,
                    true,
                );
            }
            LumaLevels::Apply(lv, cbp) => {
                if cbp[quadrant_of_block(k)] {
                    apply_block_levels(&lv[k], &mut recon.y, 16, bx, by, qp);
                }
            }
        }
        coded_mask |= 1 << k;
    }
}

fn luma_pass_flat(
    env: &MbEnv,
    src: Option<&Frame>,
    recon: &mut MbRecon,
    levels: LumaLevels,
    qp: u8,
    intra: bool,
) {
    match levels {
        LumaLevels::Code(lv) => {
            let f = src.expect("encoder pass needs source");
            for k in 0..16 {
                let bx = (k % 4) * 4;
                let by = (k / 4) * 4;
                lv[k] = code_block_into(
                    f.y(),
                    f.width(),
                    &mut recon.y,
                    16,
                    bx,
                    by,
                    env.x0() + bx,
                    env.y0() + by,
                    qp,
                    intra,
                );
            }
        }
        LumaLevels::Apply(lv, cbp) => {
            for k in 0..16 {
                if cbp[quadrant_of_block(k)] {
                    let bx = (k % 4) * 4;
                    let by = (k / 4) * 4;
                    apply_block_levels(&lv[k], &mut recon.y, 16, bx, by, qp);
                }
            }
        }
    }
}

fn chroma_levels_pass(
    env: &MbEnv,
    src: Option<&Frame>,
    recon: &mut MbRecon,
    syntax: &mut MbSyntax,
    coding: bool,
    qp: u8,
    intra: bool,
) {
    for ch in 0..2 {
        for k in 0..4usize {
            let bx = (k % 2) * 4;
            let by = (k / 2) * 4;
            if coding {
                let f = src.expect("encoder pass needs source");
                let (plane, stride, lv) = if ch == 0 {
                    (f.cb(), f.chroma_width(), &mut syntax.cb_levels)
                } else {
                    (f.cr(), f.chroma_width(), &mut syntax.cr_levels)
                };
                let dst = if ch == 0 { &mut recon.cb } else { &mut recon.cr };
                lv[k] = code_block_into(
                    plane,
                    stride,
                    dst,
                    8,
                    bx,
                    by,
                    env.x0() / 2 + bx,
                    env.y0() / 2 + by,
                    qp,
                    intra,
                );
            } else {
                let (coded, lv) = if ch == 0 {
                    (syntax.cbp_cb, &syntax.cb_levels)
                } else {
                    (syntax.cbp_cr, &syntax.cr_levels)
                };
                if coded {
                    let dst = if ch == 0 { &mut recon.cb } else { &mut recon.cr };
                    apply_block_levels(&lv[k], dst, 8, bx, by, qp);
                }
            }
        }
    }
}

fn intra_chroma_prediction(env: &MbEnv, recon: &mut MbRecon) {
    let (t, l) = gather_chroma_neighbors(env, &env.state.cb);
    recon.cb = predict_chroma_dc(t.as_ref(), l.as_ref());
    let (t, l) = gather_chroma_neighbors(env, &env.state.cr);
    recon.cr = predict_chroma_dc(t.as_ref(), l.as_ref());
}

fn set_cbp_from_levels(syntax: &mut MbSyntax) {
    let mut cbp = [false; 4];
    for k in 0..16 {
        if syntax.luma_levels[k].iter().any(|&l| l != 0) {
            cbp[quadrant_of_block(k)] = true;
        }
    }
    syntax.cbp_luma = cbp;
    syntax.cbp_cb = syntax.cb_levels.iter().any(|b| b.iter().any(|&l| l != 0));
    syntax.cbp_cr = syntax.cr_levels.iter().any(|b| b.iter().any(|&l| l != 0));
}

// Zero out levels in quadrants whose cbp bit is clear, so encoder
// reconstruction matches what the decoder will see.
fn respect_cbp(syntax: &MbSyntax) -> bool {
    let mut ok = true;
    for k in 0..16 {
        if !syntax.cbp_luma[quadrant_of_block(k)] {
            ok &= syntax.luma_levels[k].iter().all(|&l| l == 0);
        }
    }
    ok
}

/// Builds syntax + reconstruction for one macroblock according to `plan`.
pub fn build_mb(plan: &MbPlan, env: &MbEnv, src: &Frame) -> (MbSyntax, MbRecon) {
    let mut syntax = MbSyntax {
        mode: plan.mode,
        sub_modes: plan.sub_modes,
        i4_modes: plan.i4_modes,
        i16_mode: plan.i16_mode,
        ..MbSyntax::default()
    };
    let mut recon;
    match plan.mode {
        MbMode::Skip => {
            let pred = env.state.mv_predictor(env.mbx, env.mby);
            recon = inter_prediction(env, MbMode::Skip, &plan.sub_modes, &[pred]);
            return (syntax, recon);
        }
        MbMode::Inter16x16 | MbMode::Inter16x8 | MbMode::Inter8x16 | MbMode::P8x8 => {
            let pred = env.state.mv_predictor(env.mbx, env.mby);
            syntax.mvds = plan
                .mvs
                .iter()
                .map(|m| MotionVector::new(m.x - pred.x, m.y - pred.y))
                .collect();
            recon = inter_prediction(env, plan.mode, &plan.sub_modes, &plan.mvs);
            luma_pass_flat(
                env,
                Some(src),
                &mut recon,
                LumaLevels::Code(&mut syntax.luma_levels),
                env.qp,
                false,
            );
            chroma_levels_pass(env, Some(src), &mut recon, &mut syntax, true, env.qp, false);
        }
        MbMode::I4x4 => {
            recon = MbRecon::default();
            intra_chroma_prediction(env, &mut recon);
            i4_luma_pass(
                env,
                Some(src),
                &plan.i4_modes,
                &mut recon,
                LumaLevels::Code(&mut syntax.luma_levels),
                env.qp,
            );
            chroma_levels_pass(env, Some(src), &mut recon, &mut syntax, true, env.qp, true);
        }
        MbMode::I16x16 => {
            let (t, l, tl) = gather_mb_neighbors(env);
            let pred = predict16(plan.i16_mode, t.as_ref(), l.as_ref(), tl)
                .or_else(|| predict16(Intra16Mode::Dc, t.as_ref(), l.as_ref(), tl))
                .expect("DC prediction always available");
            recon = MbRecon::default();
            recon.y = pred;
            intra_chroma_prediction(env, &mut recon);
            luma_pass_flat(
                env,
                Some(src),
                &mut recon,
                LumaLevels::Code(&mut syntax.luma_levels),
                env.qp,
                true,
            );
            chroma_levels_pass(env, Some(src), &mut recon, &mut syntax, true, env.qp, true);
        }
    }
    set_cbp_from_levels(&mut syntax);
    debug_assert!(respect_cbp(&syntax));
    (syntax, recon)
}

/// Decoder-side reconstruction of one macroblock from parsed syntax.
pub fn apply_mb(syntax: &MbSyntax, env: &MbEnv) -> MbRecon {
    let mut recon;
    match syntax.mode {
        MbMode::Skip => {
            let pred = env.state.mv_predictor(env.mbx, env.mby);
            recon = inter_prediction(env, MbMode::Skip, &syntax.sub_modes, &[pred]);
        }
        MbMode::Inter16x16 | MbMode::Inter16x8 | MbMode::Inter8x16 | MbMode::P8x8 => {
            let mvs = resolve_mvs(syntax, env.state, env.mbx, env.mby);
            recon = inter_prediction(env, syntax.mode, &syntax.sub_modes, &mvs);
            luma_pass_flat(
                env,
                None,
                &mut recon,
                LumaLevels::Apply(&syntax.luma_levels, syntax.cbp_luma),
                env.qp,
                false,
            );
            let mut scratch = syntax.clone();
            chroma_levels_pass(env, None, &mut recon, &mut scratch, false, env.qp, false);
        }
        MbMode::I4x4 => {
            recon = MbRecon::default();
            intra_chroma_prediction(env, &mut recon);
            i4_luma_pass(
                env,
                None,
                &syntax.i4_modes,
                &mut recon,
                LumaLevels::Apply(&syntax.luma_levels, syntax.cbp_luma),
                env.qp,
            );
            let mut scratch = syntax.clone();
            chroma_levels_pass(env, None, &mut recon, &mut scratch, false, env.qp, true);
        }
        MbMode::I16x16 => {
            let (t, l, tl) = gather_mb_neighbors(env);
            let pred = predict16(syntax.i16_mode, t.as_ref(), l.as_ref(), tl)
                .or_else(|| predict16(Intra16Mode::Dc, t.as_ref(), l.as_ref(), tl))
                .expect("DC prediction always available");
            recon = MbRecon::default();
            recon.y = pred;
            intra_chroma_prediction(env, &mut recon);
            luma_pass_flat(
                env,
                None,
                &mut recon,
                LumaLevels::Apply(&syntax.luma_levels, syntax.cbp_luma),
                env.qp,
                true,
            );
            let mut scratch = syntax.clone();
            chroma_levels_pass(env, None, &mut recon, &mut scratch, false, env.qp, true);
        }
    }
    recon
}

// --- entropy layer ---

fn mode_code(mode: MbMode, intra_frame: bool) -> u32 {
    if intra_frame {
        match mode {
            MbMode::I4x4 => 0,
            MbMode::I16x16 => 1,
            _ => unreachable!("inter mode in intra frame"),
        }
    } else {
        match mode {
            MbMode::Skip => 0,
            MbMode::Inter16x16 => 1,
            MbMode::Inter16x8 => 2,
            MbMode::Inter8x16 => 3,
            MbMode::P8x8 => 4,
            MbMode::I4x4 => 5,
            MbMode::I16x16 => 6,
        }
    }
}

fn mode_from_code(code: u32, intra_frame: bool) -> Result<MbMode, CodecError> {
    let m = if intra_frame {
        match code {
            0 => MbMode::I4x4,
            1 => MbMode::I16x16,
            _ => return Err(CodecError::Corrupt("bad intra-frame mode code")),
        }
    } else {
        match code {
            0 => MbMode::Skip,
            1 => MbMode::Inter16x16,
            2 => MbMode::Inter16x8,
            3 => MbMode::Inter8x16,
            4 => MbMode::P8x8,
            5 => MbMode::I4x4,
            6 => MbMode::I16x16,
            _ => return Err(CodecError::Corrupt("bad mode code")),
        }
    };
    Ok(m)
}

fn write_block_levels(w: &mut BitWriter, levels: &[i32; 16]) {
    let mut pos = 0usize;
    for z in 0..16 {
        let v = levels[ZIGZAG[z]];
        if v != 0 {
            w.put_ue((z - pos) as u32);
            w.put_se(v);
            pos = z + 1;
        }
    }
    if pos <= 15 {
        w.put_ue(16);
    }
}

fn read_block_levels(r: &mut BitReader) -> Result<[i32; 16], CodecError> {
    let mut out = [0i32; 16];
    let mut pos = 0usize;
    while pos < 16 {
        let run = r.get_ue()?;
        if run == 16 {
            return Ok(out);
        }
        if run as usize > 15 - pos {
            return Err(CodecError::Corrupt("coefficient run past end of block"));
        }
        pos += run as usize;
        let level = r.get_se()?;
        if level == 0 || level.abs() > MAX_LEVEL {
            return Err(CodecError::Corrupt("illegal coefficient level"));
        }
        out[ZIGZAG[pos]] = level;
        pos += 1;
    }
    Ok(out)
}

/// Serializes one macroblock. `env` supplies the neighbor context for
/// most-probable-mode coding.
pub fn write_mb(syntax: &MbSyntax, env: &MbEnv, intra_frame: bool, w: &mut BitWriter) {
    w.put_ue(mode_code(syntax.mode, intra_frame));
    match syntax.mode {
        MbMode::Skip => return,
        MbMode::Inter16x16 | MbMode::Inter16x8 | MbMode::Inter8x16 => {
            for d in &syntax.mvds {
                w.put_se(d.x);
                w.put_se(d.y);
            }
        }
        MbMode::P8x8 => {
            let mut mv_iter = syntax.mvds.iter();
            for b in 0..4 {
                w.put_ue(syntax.sub_modes[b] as u32);
                for _ in 0..syntax.sub_modes[b].rects().len() {
                    let d = mv_iter.next().expect("mvd per sub-partition");
                    w.put_se(d.x);
                    w.put_se(d.y);
                }
            }
        }
        MbMode::I4x4 => {
            let mut coded_mask = 0u16;
            for k in 0..16 {
                let mpm = block_mpm(env, &syntax.i4_modes, coded_mask, k);
                let m = syntax.i4_modes[k];
                if m == mpm {
                    w.put_bit(true);
                } else {
                    w.put_bit(false);
                    let rem = if m.index() < mpm.index() {
                        m.index()
                    } else {
                        m.index() - 1
                    };
                    w.put_bits(rem as u32, 3);
                }
                coded_mask |= 1 << k;
            }
        }
        MbMode::I16x16 => {
            w.put_ue(syntax.i16_mode as u32);
        }
    }
    for q in 0..4 {
        w.put_bit(syntax.cbp_luma[q]);
    }
    w.put_bit(syntax.cbp_cb);
    w.put_bit(syntax.cbp_cr);
    for k in 0..16 {
        if syntax.cbp_luma[quadrant_of_block(k)] {
            write_block_levels(w, &syntax.luma_levels[k]);
        }
    }
    if syntax.cbp_cb {
        for b in &syntax.cb_levels {
            write_block_levels(w, b);
        }
    }
    if syntax.cbp_cr {
        for b in &syntax.cr_levels {
            write_block_levels(w, b);
        }
    }
}

/// Parses one macroblock.
pub fn parse_mb(r: &mut BitReader, env: &MbEnv, intra_frame: bool) -> Result<MbSyntax, CodecError> {
    let mode = mode_from_code(r.get_ue()?, intra_frame)?;
    if !intra_frame && env.reference.is_none() {
        return Err(CodecError::Corrupt("inter frame without reference"));
    }
    let mut syntax = MbSyntax {
        mode,
        ..MbSyntax::default()
    };
    let read_mvd = |r: &mut BitReader| -> Result<MotionVector, CodecError> {
        let x = r.get_se()?;
        let y = r.get_se()?;
        if x.abs() > MAX_MV || y.abs() > MAX_MV {
            return Err(CodecError::Corrupt("motion vector out of range"));
        }
        Ok(MotionVector::new(x, y))
    };
    match mode {
        MbMode::Skip => return Ok(syntax),
        MbMode::Inter16x16 => {
            syntax.mvds.push(read_mvd(r)?);
        }
        MbMode::Inter16x8 | MbMode::Inter8x16 => {
            syntax.mvds.push(read_mvd(r)?);
            syntax.mvds.push(read_mvd(r)?);
        }
        MbMode::P8x8 => {
            for b in 0..4 {
                let sm = SubMode::from_index(
                    r.get_ue()?
                        .try_into()
                        .map_err(|_| CodecError::Corrupt("bad sub-mode code"))?,
                )
                .ok_or(CodecError::Corrupt("bad sub-mode code"))?;
                syntax.sub_modes[b] = sm;
                for _ in 0..sm.rects().len() {
                    syntax.mvds.push(read_mvd(r)?);
                }
            }
        }
        MbMode::I4x4 => {
            let mut coded_mask = 0u16;
            for k in 0..16 {
                let mpm = block_mpm(env, &syntax.i4_modes, coded_mask, k);
                let m = if r.get_bit()? {
                    mpm
                } else {
                    let rem = r.get_bits(3)? as u8;
                    let idx = if rem < mpm.index() { rem } else { rem + 1 };
                    Intra4Mode::from_index(idx).ok_or(CodecError::Corrupt("bad intra mode"))?
                };
                syntax.i4_modes[k] = m;
                coded_mask |= 1 << k;
            }
        }
        MbMode::I16x16 => {
            let idx: u8 = r
                .get_ue()?
                .try_into()
                .map_err(|_| CodecError::Corrupt("bad i16 mode"))?;
            syntax.i16_mode =
                Intra16Mode::from_index(idx).ok_or(CodecError::Corrupt("bad i16 mode"))?;
        }
    }
    for q in 0..4 {
        syntax.cbp_luma[q] = r.get_bit()?;
    }
    syntax.cbp_cb = r.get_bit()?;
    syntax.cbp_cr = r.get_bit()?;
    for k in 0..16 {
        if syntax.cbp_luma[quadrant_of_block(k)] {
            syntax.luma_levels[k] = read_block_levels(r)?;
        }
    }
    if syntax.cbp_cb {
        for b in 0..4 {
            syntax.cb_levels[b] = read_block_levels(r)?;
        }
    }
    if syntax.cbp_cr {
        for b in 0..4 {
            syntax.cr_levels[b] = read_block_levels(r)?;
        }
    }
    Ok(syntax)
}

/// Exact bit cost of a macroblock's syntax.
pub fn mb_bits(syntax: &MbSyntax, env: &MbEnv, intra_frame: bool) -> usize {
    let mut w = BitWriter::new();
    write_mb(syntax, env, intra_frame, &mut w);
    w.bit_len()
}
