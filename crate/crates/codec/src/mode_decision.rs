//! Macroblock mode decision. `decide_mode_full` is the exhaustive
//! rate-distortion reference; `decide_mode_fast` prunes it with a staged
//! filter: a key-color bypass, an early-skip gate on the skip motion cost,
//! intra/inter elimination from cost estimates and neighborhood statistics,
//! a scaled gate on sub-8x8 partitioning, and a final RDO over at most
//! three surviving candidates.

use crate::config::CodecConfig;
use crate::interp::Plane;
use crate::motion::{
    motion_search, quarter_refine, skip_cost, MotionVector, Precision, SearchArgs,
};
use crate::predict::{
    dominant_edge_angle, predict16, predict4, select_intra4_modes, Intra16Mode, Intra4Mode,
    ALL_INTRA16_MODES, ALL_INTRA4_MODES,
};
use crate::satd::{satd_strided, SatdCounter};
use crate::syntax::{build_mb, mb_bits, FrameState, MbEnv, MbPlan, MbRecon, MbSyntax, SubMode};
use item_media::Frame;

/// Macroblock coding modes in signalling / tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MbMode {
    Skip,
    Inter16x16,
    Inter16x8,
    Inter8x16,
    P8x8,
    I4x4,
    I16x16,
}

/// Which eliminations fired while deciding one macroblock.
#[derive(Debug, Clone, Default)]
pub struct DecisionTrace {
    pub blue_bypass: bool,
    pub step1_skip: bool,
    pub intra_eliminated: bool,
    pub inter_eliminated: bool,
    pub p8x8_eliminated: bool,
    pub skip_4x4_me: [bool; 4],
    /// Modes that reached the final RDO stage, in evaluation order.
    pub candidates: Vec<MbMode>,
}

#[derive(Debug, Clone)]
pub struct ModeDecision {
    pub mode: MbMode,
    pub mvs: Vec<MotionVector>,
    /// Best inter motion cost seen (half-pel), infinity when never computed.
    pub j_mv: f64,
    /// min(J_I4MB, J_I16MB), infinity when never computed.
    pub j_intra: f64,
    /// Rate-distortion cost of the chosen mode.
    pub j_rd: f64,
    pub trace: DecisionTrace,
}

/// Decision plus everything the encoder needs to commit the macroblock.
pub struct DecisionOutcome {
    pub decision: ModeDecision,
    pub syntax: MbSyntax,
    pub recon: MbRecon,
    pub bits: usize,
    /// Half-pel 16x16 and 8x8 motion costs, when the fast gate inputs were
    /// computed (used for scale-table training).
    pub gate_costs: Option<(f64, f64)>,
}

/// Per-macroblock decision context.
pub struct MbCtx<'a> {
    pub src: &'a Frame,
    pub reference: Option<&'a Frame>,
    pub state: &'a FrameState,
    pub cfg: &'a CodecConfig,
    pub mbx: usize,
    pub mby: usize,
    pub intra_frame: bool,
    /// Current MB consists entirely of key-color samples.
    pub key_mb_cur: bool,
    /// Co-located MB of the previous source frame is entirely key-colored.
    pub key_mb_prev: bool,
}

impl<'a> MbCtx<'a> {
    fn env(&self) -> MbEnv<'a> {
        MbEnv {
            state: self.state,
            reference: self.reference,
            qp: self.cfg.qp,
            mbx: self.mbx,
            mby: self.mby,
        }
    }

    fn src_plane(&self) -> Plane<'a> {
        Plane {
            data: self.src.y(),
            w: self.src.width(),
            h: self.src.height(),
        }
    }

    fn ref_plane(&self) -> Plane<'a> {
        let r = self.reference.expect("inter tools need a reference frame");
        Plane {
            data: r.y(),
            w: r.width(),
            h: r.height(),
        }
    }

    fn search_args(&self, px: usize, py: usize, w: usize, h: usize) -> SearchArgs<'a> {
        SearchArgs {
            src: self.src_plane(),
            reference: self.ref_plane(),
            x0: self.mbx * 16 + px,
            y0: self.mby * 16 + py,
            w,
            h,
            predictor: self.state.mv_predictor(self.mbx, self.mby),
            search_range: self.cfg.search_range,
            lambda_mv: self.cfg.lambda_mv(),
        }
    }
}

/// Sum of squared differences between source MB and reconstruction, over
/// luma and both chroma planes.
fn mb_ssd(ctx: &MbCtx, recon: &MbRecon) -> u64 {
    let (x0, y0) = (ctx.mbx * 16, ctx.mby * 16);
    let mut ssd = 0u64;
    let sw = ctx.src.width();
    for y in 0..16 {
        for x in 0..16 {
            let d = ctx.src.y()[(y0 + y) * sw + x0 + x] as i64 - recon.y[y * 16 + x] as i64;
            ssd += (d * d) as u64;
        }
    }
    let cw = ctx.src.chroma_width();
    for y in 0..8 {
        for x in 0..8 {
            let i = (y0 / 2 + y) * cw + x0 / 2 + x;
            let d = ctx.src.cb()[i] as i64 - recon.cb[y * 8 + x] as i64;
            ssd += (d * d) as u64;
            let d = ctx.src.cr()[i] as i64 - recon.cr[y * 8 + x] as i64;
            ssd += (d * d) as u64;
        }
    }
    ssd
}

struct Trial {
    syntax: MbSyntax,
    recon: MbRecon,
    bits: usize,
    j_rd: f64,
}

fn run_trial(ctx: &MbCtx, plan: &MbPlan) -> Trial {
    let env = ctx.env();
    let (syntax, recon) = build_mb(plan, &env, ctx.src);
    let bits = mb_bits(&syntax, &env, ctx.intra_frame);
    let ssd = mb_ssd(ctx, &recon);
    let j_rd = ssd as f64 + ctx.cfg.lambda_mode() * bits as f64;
    Trial {
        syntax,
        recon,
        bits,
        j_rd,
    }
}

// --- intra cost estimation ---

/// Source samples inside the current MB act as stand-ins for blocks that
/// would not be reconstructed yet at estimation time; everything outside
/// comes from committed reconstruction.
fn gather_nbr4_est(ctx: &MbCtx, k: usize) -> crate::predict::Nbr4 {
    let env = ctx.env();
    let bx = k % 4;
    let by = k / 4;
    let gx = (ctx.mbx * 16 + bx * 4) as i64;
    let gy = (ctx.mby * 16 + by * 4) as i64;
    let sw = ctx.src.width() as i64;
    let sh = ctx.src.height() as i64;
    let x0 = (ctx.mbx * 16) as i64;
    let y0 = (ctx.mby * 16) as i64;
    let sample = |dx: i64, dy: i64| -> Option<u8> {
        let (ax, ay) = (gx + dx, gy + dy);
        if ax < 0 || ay < 0 || ax >= sw || ay >= sh {
            return None;
        }
        let in_mb = ax >= x0 && ax < x0 + 16 && ay >= y0 && ay < y0 + 16;
        if in_mb {
            // blocks above and blocks to the left in the same block row are
            // earlier in raster order, so their samples are available
            let ok = ay < gy || (ax < gx && ay < gy + 4);
            if !ok {
                return None;
            }
            Some(ctx.src.y()[(ay * sw + ax) as usize])
        } else {
            env.recon_luma(ax, ay)
        }
    };
    let mut top = None;
    if (0..4).all(|i| sample(i, -1).is_some()) {
        let mut t = [0u8; 4];
        for (i, s) in t.iter_mut().enumerate() {
            *s = sample(i as i64, -1).unwrap();
        }
        top = Some(t);
    }
    let mut left = None;
    if (0..4).all(|i| sample(-1, i).is_some()) {
        let mut l = [0u8; 4];
        for (i, s) in l.iter_mut().enumerate() {
            *s = sample(-1, i as i64).unwrap();
        }
        left = Some(l);
    }
    let top_left = sample(-1, -1);
    let mut top_right = None;
    if top.is_some() && (0..4).all(|i| sample(4 + i, -1).is_some()) {
        let mut t = [0u8; 4];
        for (i, s) in t.iter_mut().enumerate() {
            *s = sample(4 + i as i64, -1).unwrap();
        }
        top_right = Some(t);
    }
    crate::predict::Nbr4 {
        top,
        top_right,
        left,
        top_left,
    }
}

fn src_block4(ctx: &MbCtx, k: usize) -> [u8; 16] {
    let bx = ctx.mbx * 16 + (k % 4) * 4;
    let by = ctx.mby * 16 + (k / 4) * 4;
    let sw = ctx.src.width();
    let mut out = [0u8; 16];
    for y in 0..4 {
        for x in 0..4 {
            out[y * 4 + x] = ctx.src.y()[(by + y) * sw + bx + x];
        }
    }
    out
}

/// Fast 4x4-intra cost: per block, the best of a candidate mode set under
/// SATD + 4*lambda for non-most-probable modes.
fn estimate_i4(
    ctx: &MbCtx,
    all_modes: bool,
    counter: &mut SatdCounter,
) -> ([Intra4Mode; 16], f64) {
    let env = ctx.env();
    let lambda = ctx.cfg.lambda_mode();
    let mut chosen = [Intra4Mode::Dc; 16];
    let mut coded_mask = 0u16;
    let mut total = 0.0;
    for k in 0..16 {
        let nbr = gather_nbr4_est(ctx, k);
        let src = src_block4(ctx, k);
        let mpm = crate::syntax::block_mpm(&env, &chosen, coded_mask, k);
        let candidates: Vec<Intra4Mode> = if all_modes {
            ALL_INTRA4_MODES.to_vec()
        } else {
            let left = coded_neighbor_mode(&env, &chosen, coded_mask, k, true);
            let top = coded_neighbor_mode(&env, &chosen, coded_mask, k, false);
            let mut block = [0i32; 16];
            for (b, s) in block.iter_mut().zip(src.iter()) {
                *b = *s as i32;
            }
            select_intra4_modes(dominant_edge_angle(&block), left, top).to_vec()
        };
        let mut best_mode = Intra4Mode::Dc;
        let mut best = f64::INFINITY;
        let mut sorted = candidates;
        sorted.sort_by_key(|m| m.index());
        sorted.dedup();
        for m in sorted {
            let Some(pred) = predict4(m, &nbr) else {
                continue;
            };
            let sa = satd_strided(&src, 4, &pred, 4, 4, 4, counter);
            let p = if m == mpm { 0.0 } else { 1.0 };
            let cost = sa as f64 + lambda * 4.0 * p;
            if cost < best {
                best = cost;
                best_mode = m;
            }
        }
        chosen[k] = best_mode;
        coded_mask |= 1 << k;
        total += best;
    }
    (chosen, total)
}

fn coded_neighbor_mode(
    env: &MbEnv,
    chosen: &[Intra4Mode; 16],
    coded_mask: u16,
    k: usize,
    left: bool,
) -> Option<Intra4Mode> {
    crate::syntax::neighbor_i4_mode(env, chosen, coded_mask, k, left)
}

/// Whole-MB intra cost: minimum SATD over the four 16x16 prediction modes
/// (no rate term).
fn estimate_i16(ctx: &MbCtx, counter: &mut SatdCounter) -> (Intra16Mode, f64) {
    let env = ctx.env();
    let (t, l, tl) = crate::syntax::gather_mb_neighbors(&env);
    let (x0, y0) = (ctx.mbx * 16, ctx.mby * 16);
    let sw = ctx.src.width();
    let mut src = [0u8; 256];
    for y in 0..16 {
        src[y * 16..y * 16 + 16]
            .copy_from_slice(&ctx.src.y()[(y0 + y) * sw + x0..(y0 + y) * sw + x0 + 16]);
    }
    let mut best_mode = Intra16Mode::Dc;
    let mut best = f64::INFINITY;
    for m in ALL_INTRA16_MODES {
        let Some(pred) = predict16(m, t.as_ref(), l.as_ref(), tl) else {
            continue;
        };
        let sa = satd_strided(&src, 16, &pred, 16, 16, 16, counter) as f64;
        if sa < best {
            best = sa;
            best_mode = m;
        }
    }
    (best_mode, best)
}

// --- inter cost estimation ---

struct InterCosts {
    mv16: MotionVector,
    j16: f64,
    mv16x8: [MotionVector; 2],
    j16x8: f64,
    mv8x16: [MotionVector; 2],
    j8x16: f64,
    mv8x8: [MotionVector; 4],
    /// Per-block 8x8 costs (half-pel).
    j8x8_blocks: [f64; 4],
}

fn search_basic_inter(ctx: &MbCtx, counter: &mut SatdCounter) -> InterCosts {
    let (mv16, j16) = motion_search(&ctx.search_args(0, 0, 16, 16), Precision::Half, counter);
    let mut mv16x8 = [MotionVector::ZERO; 2];
    let mut j16x8 = 0.0;
    for (i, py) in [0usize, 8].iter().enumerate() {
        let (mv, c) = motion_search(&ctx.search_args(0, *py, 16, 8), Precision::Half, counter);
        mv16x8[i] = mv;
        j16x8 += c;
    }
    let mut mv8x16 = [MotionVector::ZERO; 2];
    let mut j8x16 = 0.0;
    for (i, px) in [0usize, 8].iter().enumerate() {
        let (mv, c) = motion_search(&ctx.search_args(*px, 0, 8, 16), Precision::Half, counter);
        mv8x16[i] = mv;
        j8x16 += c;
    }
    let mut mv8x8 = [MotionVector::ZERO; 4];
    let mut j8x8_blocks = [0.0; 4];
    for (b, &(px, py)) in [(0usize, 0usize), (8, 0), (0, 8), (8, 8)].iter().enumerate() {
        let (mv, c) = motion_search(&ctx.search_args(px, py, 8, 8), Precision::Half, counter);
        mv8x8[b] = mv;
        j8x8_blocks[b] = c;
    }
    InterCosts {
        mv16,
        j16,
        mv16x8,
        j16x8,
        mv8x16,
        j8x16,
        mv8x8,
        j8x8_blocks,
    }
}

/// Chosen sub-partitioning of one 8x8 block with its MVs and half-pel cost.
struct SubChoice {
    sub: SubMode,
    mvs: Vec<MotionVector>,
    cost: f64,
}

/// Evaluates sub-partitions of 8x8 block `b`. When `early_stop` (fast path
/// Step 4), 4x4 search is skipped if the whole 8x8 beats both 8x4 and 4x8.
/// Returns the choice and whether 4x4 search was skipped.
fn choose_sub_partition(
    ctx: &MbCtx,
    b: usize,
    mv8: MotionVector,
    j8: f64,
    early_stop: bool,
    counter: &mut SatdCounter,
) -> (SubChoice, bool) {
    let (bx, by) = [(0usize, 0usize), (8, 0), (0, 8), (8, 8)][b];
    let mut options: Vec<SubChoice> = vec![SubChoice {
        sub: SubMode::S8x8,
        mvs: vec![mv8],
        cost: j8,
    }];
    for (sub, rects) in [
        (SubMode::S8x4, SubMode::S8x4.rects()),
        (SubMode::S4x8, SubMode::S4x8.rects()),
    ] {
        let mut mvs = Vec::new();
        let mut cost = 0.0;
        for &(sx, sy, w, h) in rects {
            let (mv, c) = motion_search(
                &ctx.search_args(bx + sx, by + sy, w, h),
                Precision::Half,
                counter,
            );
            mvs.push(mv);
            cost += c;
        }
        options.push(SubChoice { sub, mvs, cost });
    }
    let j8x4 = options[1].cost;
    let j4x8 = options[2].cost;
    let skipped_4x4 = early_stop && j8 < j8x4.min(j4x8);
    if !skipped_4x4 {
        let mut mvs = Vec::new();
        let mut cost = 0.0;
        for &(sx, sy, w, h) in SubMode::S4x4.rects() {
            let (mv, c) = motion_search(
                &ctx.search_args(bx + sx, by + sy, w, h),
                Precision::Half,
                counter,
            );
            mvs.push(mv);
            cost += c;
        }
        options.push(SubChoice {
            sub: SubMode::S4x4,
            mvs,
            cost,
        });
    }
    let mut best = 0;
    for (i, o) in options.iter().enumerate().skip(1) {
        if o.cost < options[best].cost {
            best = i;
        }
    }
    (options.swap_remove(best), skipped_4x4)
}

/// Quarter-pel refinement of every partition of an inter plan.
fn refine_plan_quarter(
    ctx: &MbCtx,
    mode: MbMode,
    sub_modes: &[SubMode; 4],
    mvs: &[MotionVector],
    counter: &mut SatdCounter,
) -> Vec<MotionVector> {
    let parts = crate::syntax::partitions(mode, sub_modes);
    parts
        .iter()
        .zip(mvs.iter())
        .map(|(&(px, py, w, h), &mv)| {
            quarter_refine(&ctx.search_args(px, py, w, h), mv, counter).0
        })
        .collect()
}

struct Candidate {
    mode: MbMode,
    cost: f64,
    sub_modes: [SubMode; 4],
    mvs: Vec<MotionVector>,
    i4_modes: [Intra4Mode; 16],
    i16_mode: Intra16Mode,
}

fn plan_of(c: &Candidate) -> MbPlan {
    MbPlan {
        mode: c.mode,
        sub_modes: c.sub_modes,
        mvs: c.mvs.clone(),
        i4_modes: c.i4_modes,
        i16_mode: c.i16_mode,
    }
}

/// RDO over candidates in enumeration order; ties keep the earlier mode.
fn rdo_select(ctx: &MbCtx, mut candidates: Vec<Candidate>) -> (Candidate, Trial) {
    candidates.sort_by(|a, b| a.mode.cmp(&b.mode));
    let mut best: Option<(Candidate, Trial)> = None;
    for c in candidates {
        let trial = run_trial(ctx, &plan_of(&c));
        match &best {
            Some((_, t)) if t.j_rd <= trial.j_rd => {}
            _ => best = Some((c, trial)),
        }
    }
    best.expect("at least one candidate")
}

fn outcome(
    ctx: &MbCtx,
    chosen: Candidate,
    trial: Trial,
    j_mv: f64,
    j_intra: f64,
    trace: DecisionTrace,
    gate_costs: Option<(f64, f64)>,
) -> DecisionOutcome {
    let mvs = crate::syntax::resolve_mvs(&trial.syntax, ctx.state, ctx.mbx, ctx.mby);
    DecisionOutcome {
        decision: ModeDecision {
            mode: chosen.mode,
            mvs,
            j_mv,
            j_intra,
            j_rd: trial.j_rd,
            trace,
        },
        syntax: trial.syntax,
        recon: trial.recon,
        bits: trial.bits,
        gate_costs,
    }
}

fn intra_candidates(
    ctx: &MbCtx,
    all_modes: bool,
    counter: &mut SatdCounter,
) -> (Candidate, Candidate, f64, f64) {
    let (i4_modes, j_i4) = estimate_i4(ctx, all_modes, counter);
    let (i16_mode, j_i16) = estimate_i16(ctx, counter);
    let c4 = Candidate {
        mode: MbMode::I4x4,
        cost: j_i4,
        sub_modes: [SubMode::S8x8; 4],
        mvs: vec![],
        i4_modes,
        i16_mode: Intra16Mode::Dc,
    };
    let c16 = Candidate {
        mode: MbMode::I16x16,
        cost: j_i16,
        sub_modes: [SubMode::S8x8; 4],
        mvs: vec![],
        i4_modes: [Intra4Mode::Dc; 16],
        i16_mode,
    };
    (c4, c16, j_i4, j_i16)
}

/// Exhaustive reference: quarter-pel motion estimation for every partition
/// shape, all intra modes, full RDO over the seven macroblock modes.
pub fn decide_mode_full(ctx: &MbCtx, counter: &mut SatdCounter) -> DecisionOutcome {
    let mut trace = DecisionTrace::default();
    if ctx.intra_frame {
        let (c4, c16, j_i4, j_i16) = intra_candidates(ctx, true, counter);
        trace.candidates = vec![MbMode::I4x4, MbMode::I16x16];
        let j_intra = j_i4.min(j_i16);
        let (chosen, trial) = rdo_select(ctx, vec![c4, c16]);
        return outcome(ctx, chosen, trial, f64::INFINITY, j_intra, trace, None);
    }

    let skip_mv = ctx.state.mv_predictor(ctx.mbx, ctx.mby);
    let j_skip = skip_cost(
        ctx.src_plane(),
        ctx.ref_plane(),
        ctx.mbx * 16,
        ctx.mby * 16,
        skip_mv,
        counter,
    ) as f64;
    let inter = search_basic_inter(ctx, counter);
    let j8x8_total: f64 = inter.j8x8_blocks.iter().sum();

    let mut sub_modes = [SubMode::S8x8; 4];
    let mut p8_mvs: Vec<MotionVector> = Vec::new();
    let mut j_p8 = 0.0;
    for b in 0..4 {
        let (choice, _) = choose_sub_partition(
            ctx,
            b,
            inter.mv8x8[b],
            inter.j8x8_blocks[b],
            false,
            counter,
        );
        sub_modes[b] = choice.sub;
        j_p8 += choice.cost;
        p8_mvs.extend(choice.mvs);
    }

    let (c4, c16, j_i4, j_i16) = intra_candidates(ctx, true, counter);
    let j_intra = j_i4.min(j_i16);
    let j_mv = j_skip.min(inter.j16).min(inter.j16x8).min(inter.j8x16).min(j_p8);

    let mk_inter = |mode: MbMode, cost: f64, mvs: Vec<MotionVector>, subs: [SubMode; 4]| Candidate {
        mode,
        cost,
        sub_modes: subs,
        mvs,
        i4_modes: [Intra4Mode::Dc; 16],
        i16_mode: Intra16Mode::Dc,
    };
    let mut candidates = vec![
        mk_inter(MbMode::Skip, j_skip, vec![], [SubMode::S8x8; 4]),
        mk_inter(
            MbMode::Inter16x16,
            inter.j16,
            vec![inter.mv16],
            [SubMode::S8x8; 4],
        ),
        mk_inter(
            MbMode::Inter16x8,
            inter.j16x8,
            inter.mv16x8.to_vec(),
            [SubMode::S8x8; 4],
        ),
        mk_inter(
            MbMode::Inter8x16,
            inter.j8x16,
            inter.mv8x16.to_vec(),
            [SubMode::S8x8; 4],
        ),
        mk_inter(MbMode::P8x8, j_p8, p8_mvs, sub_modes),
        c4,
        c16,
    ];
    for c in candidates.iter_mut() {
        if matches!(
            c.mode,
            MbMode::Inter16x16 | MbMode::Inter16x8 | MbMode::Inter8x16 | MbMode::P8x8
        ) {
            c.mvs = refine_plan_quarter(ctx, c.mode, &c.sub_modes, &c.mvs, counter);
        }
    }
    trace.candidates = candidates.iter().map(|c| c.mode).collect();
    trace.candidates.sort();
    let (chosen, trial) = rdo_select(ctx, candidates);
    outcome(
        ctx,
        chosen,
        trial,
        j_mv,
        j_intra,
        trace,
        Some((inter.j16, j8x8_total)),
    )
}

/// The staged fast mode decision.
pub fn decide_mode_fast(ctx: &MbCtx, counter: &mut SatdCounter) -> DecisionOutcome {
    let mut trace = DecisionTrace::default();

    // Intra frames are outside the staged filter; both paths make the
    // identical full intra decision there (the cost of evaluating all nine
    // 4x4 modes is negligible next to motion search).
    if ctx.intra_frame {
        let (c4, c16, j_i4, j_i16) = intra_candidates(ctx, true, counter);
        trace.candidates = vec![MbMode::I4x4, MbMode::I16x16];
        let j_intra = j_i4.min(j_i16);
        let (chosen, trial) = rdo_select(ctx, vec![c4, c16]);
        return outcome(ctx, chosen, trial, f64::INFINITY, j_intra, trace, None);
    }

    // Step 0: a macroblock that is pure key color now but was not in the
    // previous frame is freshly exposed background; code it I16x16 without
    // further search.
    if ctx.key_mb_cur && !ctx.key_mb_prev {
        trace.blue_bypass = true;
        trace.candidates = vec![MbMode::I16x16];
        let (i16_mode, j_i16) = estimate_i16(ctx, counter);
        let cand = Candidate {
            mode: MbMode::I16x16,
            cost: j_i16,
            sub_modes: [SubMode::S8x8; 4],
            mvs: vec![],
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode,
        };
        let (chosen, trial) = rdo_select(ctx, vec![cand]);
        return outcome(ctx, chosen, trial, f64::INFINITY, j_i16, trace, None);
    }

    // Step 1: early skip.
    let skip_mv = ctx.state.mv_predictor(ctx.mbx, ctx.mby);
    let j_skip = skip_cost(
        ctx.src_plane(),
        ctx.ref_plane(),
        ctx.mbx * 16,
        ctx.mby * 16,
        skip_mv,
        counter,
    ) as f64;
    if j_skip < ctx.cfg.skip_threshold() {
        trace.step1_skip = true;
        trace.candidates = vec![MbMode::Skip];
        let cand = Candidate {
            mode: MbMode::Skip,
            cost: j_skip,
            sub_modes: [SubMode::S8x8; 4],
            mvs: vec![],
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
        };
        let (chosen, trial) = rdo_select(ctx, vec![cand]);
        return outcome(ctx, chosen, trial, j_skip, f64::INFINITY, trace, None);
    }

    // Step 2: intra/inter elimination from cost estimates and the intra
    // clustering of the neighborhood.
    let (mv16, j16) = motion_search(&ctx.search_args(0, 0, 16, 16), Precision::Half, counter);
    let (c4, c16, j_i4, j_i16) = intra_candidates(ctx, false, counter);
    let j_intra = j_i4.min(j_i16);
    if j_intra > j16 {
        trace.intra_eliminated = true;
    } else if ctx.state.intra_neighbor_count(ctx.mbx, ctx.mby) >= 3 {
        trace.inter_eliminated = true;
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut j_mv = f64::INFINITY;
    let mut gate_costs = None;

    if !trace.inter_eliminated {
        // 8x8 costs feed the Step 3 gate even when P8x8 is then dropped.
        let mut mv8x8 = [MotionVector::ZERO; 4];
        let mut j8x8_blocks = [0.0f64; 4];
        for (b, &(px, py)) in [(0usize, 0usize), (8, 0), (0, 8), (8, 8)].iter().enumerate() {
            let (mv, c) = motion_search(&ctx.search_args(px, py, 8, 8), Precision::Half, counter);
            mv8x8[b] = mv;
            j8x8_blocks[b] = c;
        }
        let j8x8_total: f64 = j8x8_blocks.iter().sum();
        gate_costs = Some((j16, j8x8_total));

        // Step 3: drop sub-8x8 partitioning when 16x16 already wins at the
        // trained scale.
        let beta = ctx.cfg.beta_table.get(ctx.cfg.qp);
        let mut p8_candidate = None;
        if j16 < beta * j8x8_total {
            trace.p8x8_eliminated = true;
        } else {
            // Step 4: per-8x8 partition choice with early 4x4 cutoff.
            let mut sub_modes = [SubMode::S8x8; 4];
            let mut mvs = Vec::new();
            let mut cost = 0.0;
            for b in 0..4 {
                let (choice, skipped) =
                    choose_sub_partition(ctx, b, mv8x8[b], j8x8_blocks[b], true, counter);
                trace.skip_4x4_me[b] = skipped;
                sub_modes[b] = choice.sub;
                cost += choice.cost;
                mvs.extend(choice.mvs);
            }
            p8_candidate = Some((sub_modes, mvs, cost));
        }

        let mut j16x8 = 0.0;
        let mut mv16x8 = [MotionVector::ZERO; 2];
        for (i, py) in [0usize, 8].iter().enumerate() {
            let (mv, c) = motion_search(&ctx.search_args(0, *py, 16, 8), Precision::Half, counter);
            mv16x8[i] = mv;
            j16x8 += c;
        }
        let mut j8x16 = 0.0;
        let mut mv8x16 = [MotionVector::ZERO; 2];
        for (i, px) in [0usize, 8].iter().enumerate() {
            let (mv, c) = motion_search(&ctx.search_args(*px, 0, 8, 16), Precision::Half, counter);
            mv8x16[i] = mv;
            j8x16 += c;
        }

        j_mv = j_skip.min(j16).min(j16x8).min(j8x16);
        candidates.push(Candidate {
            mode: MbMode::Skip,
            cost: j_skip,
            sub_modes: [SubMode::S8x8; 4],
            mvs: vec![],
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
        });
        candidates.push(Candidate {
            mode: MbMode::Inter16x16,
            cost: j16,
            sub_modes: [SubMode::S8x8; 4],
            mvs: vec![mv16],
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
        });
        candidates.push(Candidate {
            mode: MbMode::Inter16x8,
            cost: j16x8,
            sub_modes: [SubMode::S8x8; 4],
            mvs: mv16x8.to_vec(),
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
        });
        candidates.push(Candidate {
            mode: MbMode::Inter8x16,
            cost: j8x16,
            sub_modes: [SubMode::S8x8; 4],
            mvs: mv8x16.to_vec(),
            i4_modes: [Intra4Mode::Dc; 16],
            i16_mode: Intra16Mode::Dc,
        });
        if let Some((sub_modes, mvs, cost)) = p8_candidate {
            j_mv = j_mv.min(cost);
            candidates.push(Candidate {
                mode: MbMode::P8x8,
                cost,
                sub_modes,
                mvs,
                i4_modes: [Intra4Mode::Dc; 16],
                i16_mode: Intra16Mode::Dc,
            });
        }
    }
    if !trace.intra_eliminated {
        candidates.push(c4);
        candidates.push(c16);
    }

    // Step 5: keep the three cheapest candidates, refine inter ones to
    // quarter-pel, decide by full RDO.
    candidates.sort_by(|a, b| {
        a.cost
            .partial_cmp(&b.cost)
            .unwrap()
            .then(a.mode.cmp(&b.mode))
    });
    candidates.truncate(3);
    for c in candidates.iter_mut() {
        if matches!(
            c.mode,
            MbMode::Inter16x16 | MbMode::Inter16x8 | MbMode::Inter8x16 | MbMode::P8x8
        ) {
            c.mvs = refine_plan_quarter(ctx, c.mode, &c.sub_modes, &c.mvs, counter);
        }
    }
    trace.candidates = candidates.iter().map(|c| c.mode).collect();
    let (chosen, trial) = rdo_select(ctx, candidates);
    outcome(ctx, chosen, trial, j_mv, j_intra, trace, gate_costs)
}
