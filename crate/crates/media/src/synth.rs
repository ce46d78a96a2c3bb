//! Deterministic synthetic chat-sequence generator.
//!
//! Emulates the content class the codec targets: one or more "head and
//! torso" actors over a static textured background, fast limb-like gesture
//! sprites, and optional global luma flicker. Ground-truth foreground masks
//! are produced alongside the pixels, standing in for a live segmenter.

use crate::{ForegroundMask, Frame, MediaError, VideoSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Foreground paint colors (YCbCr). Every entry keeps a Euclidean distance
/// of at least 48 from the keying color so chroma-key recovery is exact on
/// uncompressed frames; see the guard test in the chroma crate.
pub const FOREGROUND_PALETTE: &[(u8, u8, u8)] = &[
    (170, 110, 150), // skin
    (150, 105, 160), // darker skin
    (105, 120, 90),  // green shirt
    (100, 100, 140), // maroon shirt
    (120, 150, 95),  // blue-grey shirt
    (185, 115, 135), // bright jacket
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub seed: u64,
    pub actor_count: usize,
    /// Actor translation speed in pixels per frame.
    pub motion_amplitude: f64,
    /// Peak global per-frame luma offset, in [0, 32].
    pub lighting_flicker: u8,
    /// Expected gesture spawns per second per actor.
    pub gesture_rate: f64,
    pub fps: (u32, u32),
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            width: 64,
            height: 48,
            frame_count: 30,
            seed: 1,
            actor_count: 1,
            motion_amplitude: 1.0,
            lighting_flicker: 0,
            gesture_rate: 0.5,
            fps: (30, 1),
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<(), MediaError> {
        if self.width == 0 || self.height == 0 || self.width % 16 != 0 || self.height % 16 != 0 {
            return Err(MediaError::InvalidDimensions {
                width: self.width,
                height: self.height,
            });
        }
        if self.frame_count == 0 {
            return Err(MediaError::InvalidSpec("frame_count must be >= 1".into()));
        }
        if self.actor_count == 0 && self.gesture_rate > 0.0 {
            return Err(MediaError::InvalidSpec(
                "gesture_rate > 0 requires at least one actor".into(),
            ));
        }
        if self.lighting_flicker > 32 {
            return Err(MediaError::InvalidSpec("lighting_flicker > 32".into()));
        }
        if self.motion_amplitude < 0.0 || self.gesture_rate < 0.0 {
            return Err(MediaError::InvalidSpec("negative rate".into()));
        }
        if self.fps.0 == 0 || self.fps.1 == 0 {
            return Err(MediaError::InvalidSpec("zero frame rate".into()));
        }
        Ok(())
    }
}

struct Actor {
    skin: (u8, u8, u8),
    shirt: (u8, u8, u8),
    // reflective wander box for the torso center
    x0: f64,
    y0: f64,
    vx: f64,
    vy: f64,
    box_x: (f64, f64),
    box_y: (f64, f64),
    torso_w: i64,
    torso_h: i64,
    head_rx: i64,
    head_ry: i64,
}

struct Gesture {
    actor: usize,
    start: usize,
    duration: usize,
    side: f64,       // -1 left, +1 right
    sweep_deg: f64,  // total angular travel
    length: f64,
}

/// Bounces `x` inside [lo, hi].
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let span = hi - lo;
    let m = (x - lo).rem_euclid(2.0 * span);
    lo + if m <= span { m } else { 2.0 * span - m }
}

struct Canvas {
    w: usize,
    h: usize,
    y: Vec<u8>,
    cb: Vec<u8>,
    cr: Vec<u8>,
    mask: ForegroundMask,
}

impl Canvas {
    #[inline]
    fn paint(&mut self, x: i64, y: i64, color: (u8, u8, u8)) {
        if x < 0 || y < 0 || x >= self.w as i64 || y >= self.h as i64 {
            return;
        }
        let (x, y) = (x as usize, y as usize);
        self.y[y * self.w + x] = color.0;
        let cidx = (y / 2) * (self.w / 2) + x / 2;
        self.cb[cidx] = color.1;
        self.cr[cidx] = color.2;
        self.mask.set(x, y, true);
    }

    fn fill_rect(&mut self, cx: i64, cy: i64, w: i64, h: i64, color: (u8, u8, u8)) {
        for y in cy - h / 2..cy + h - h / 2 {
            for x in cx - w / 2..cx + w - w / 2 {
                self.paint(x, y, color);
            }
        }
    }

    fn fill_ellipse(&mut self, cx: i64, cy: i64, rx: i64, ry: i64, color: (u8, u8, u8)) {
        for y in cy - ry..=cy + ry {
            for x in cx - rx..=cx + rx {
                let nx = (x - cx) as f64 / rx as f64;
                let ny = (y - cy) as f64 / ry as f64;
                if nx * nx + ny * ny <= 1.0 {
                    self.paint(x, y, color);
                }
            }
        }
    }
}

/// Generates the sequence described by `spec`; a pure function of it.
pub fn synth_chat_sequence(spec: &SynthSpec) -> Result<VideoSequence, MediaError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width, spec.height);
    let fh = h as f64;

    // Static background: a soft global gradient, macroblock-scale shading
    // and 4x4-aligned micro-tiles. Texture lives at transform-block
    // granularity (flat inside every 4x4), so it costs intra bits without
    // leaving residual quantization noise that would defeat inter coding.
    let mb_x = w / 16;
    let mb_y = h / 16;
    let mut shade = vec![0i32; mb_x * mb_y];
    for s in shade.iter_mut() {
        *s = rng.random_range(-12..=12);
    }
    let micro_w = w / 4;
    let micro_h = h / 4;
    let mut micro = vec![0i32; micro_w * micro_h];
    for m in micro.iter_mut() {
        *m = rng.random_range(-7..=7);
    }
    let mut tile_cb = vec![0u8; mb_x * mb_y];
    let mut tile_cr = vec![0u8; mb_x * mb_y];
    for i in 0..mb_x * mb_y {
        tile_cb[i] = rng.random_range(96..=160);
        tile_cr[i] = rng.random_range(104..=168);
    }
    // furniture-like rectangles, snapped to the 4x4 grid
    let mut rects = Vec::new();
    for _ in 0..(w * h / 768).clamp(4, 24) {
        let rw = (rng.random_range(8..w / 2) / 4) * 4;
        let rh = (rng.random_range(8..h / 2) / 4) * 4;
        let rx = (rng.random_range(0..w - rw) / 4) * 4;
        let ry = (rng.random_range(0..h - rh) / 4) * 4;
        let delta: i32 = if rng.random::<bool>() {
            rng.random_range(14..=34)
        } else {
            -rng.random_range(14..=34)
        };
        rects.push((rx, ry, rw, rh, delta));
    }
    let mut bg_y = vec![0u8; w * h];
    let mut bg_cb = vec![0u8; (w / 2) * (h / 2)];
    let mut bg_cr = vec![0u8; (w / 2) * (h / 2)];
    for y in 0..h {
        for x in 0..w {
            let grad = (x as f64 * 0.20 + y as f64 * 0.15).round() as i32;
            let s = shade[(y / 16) * mb_x + x / 16];
            let m = micro[(y / 4) * micro_w + x / 4];
            let mut r = 0i32;
            for &(rx, ry, rw, rh, d) in &rects {
                if x >= rx && x < rx + rw && y >= ry && y < ry + rh {
                    r += d;
                }
            }
            bg_y[y * w + x] = (96 + grad + s + m + r).clamp(16, 235) as u8;
        }
    }
    for cy in 0..h / 2 {
        for cx in 0..w / 2 {
            let t = (cy / 8) * mb_x + cx / 8;
            bg_cb[cy * (w / 2) + cx] = tile_cb[t];
            bg_cr[cy * (w / 2) + cx] = tile_cr[t];
        }
    }

    // Actors
    let mut actors = Vec::with_capacity(spec.actor_count);
    for i in 0..spec.actor_count {
        let torso_w = (h as i64 / 3).max(4);
        let torso_h = (h as i64 * 9 / 25).max(4);
        let head_rx = (h as i64 / 10).max(2);
        let head_ry = (h as i64 / 8).max(2);
        let anchor_x = (i + 1) as f64 * w as f64 / (spec.actor_count + 1) as f64;
        let anchor_y = 0.60 * fh;
        let margin_x = (torso_w / 2 + 2) as f64;
        let margin_top = (torso_h / 2 + 2 * head_ry + 2) as f64;
        let margin_bot = (torso_h / 2) as f64;
        let wander = (3.0 * spec.motion_amplitude).max(4.0);
        let box_x = (
            (anchor_x - wander).max(margin_x),
            (anchor_x + wander).min(w as f64 - margin_x),
        );
        let box_y = (
            (anchor_y - wander * 0.5).max(margin_top),
            (anchor_y + wander * 0.5).min(fh - margin_bot),
        );
        let dir: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        actors.push(Actor {
            skin: FOREGROUND_PALETTE[i % 2],
            shirt: FOREGROUND_PALETTE[2 + i % 4],
            x0: anchor_x,
            y0: anchor_y,
            vx: spec.motion_amplitude * dir.cos(),
            vy: spec.motion_amplitude * 0.5 * dir.sin(),
            box_x,
            box_y,
            torso_w,
            torso_h,
            head_rx,
            head_ry,
        });
    }

    let fps_hz = spec.fps.0 as f64 / spec.fps.1 as f64;
    let spawn_p = (spec.gesture_rate / fps_hz).clamp(0.0, 1.0);
    let mut gestures: Vec<Gesture> = Vec::new();
    let mut frames = Vec::with_capacity(spec.frame_count);
    let mut masks = Vec::with_capacity(spec.frame_count);

    for t in 0..spec.frame_count {
        let flicker: i32 = if spec.lighting_flicker > 0 {
            rng.random_range(-(spec.lighting_flicker as i32)..=spec.lighting_flicker as i32)
        } else {
            0
        };
        if spawn_p > 0.0 {
            for a in 0..actors.len() {
                if rng.random::<f64>() < spawn_p {
                    gestures.push(Gesture {
                        actor: a,
                        start: t,
                        duration: ((fps_hz / 2.0).round() as usize).max(4),
                        side: if rng.random::<bool>() { 1.0 } else { -1.0 },
                        sweep_deg: rng.random_range(60.0..140.0),
                        length: fh / 3.0,
                    });
                }
            }
            gestures.retain(|g| t < g.start + g.duration);
        }

        let mut canvas = Canvas {
            w,
            h,
            y: bg_y.clone(),
            cb: bg_cb.clone(),
            cr: bg_cr.clone(),
            mask: ForegroundMask::new_background(w, h),
        };

        for a in &actors {
            let cx = reflect(a.x0 + a.vx * t as f64, a.box_x.0, a.box_x.1).round() as i64;
            let cy = reflect(a.y0 + a.vy * t as f64, a.box_y.0, a.box_y.1).round() as i64;
            canvas.fill_rect(cx, cy, a.torso_w, a.torso_h, a.shirt);
            let head_cy = cy - a.torso_h / 2 - a.head_ry;
            canvas.fill_ellipse(cx, head_cy, a.head_rx, a.head_ry, a.skin);
        }

        for g in &gestures {
            if t < g.start {
                continue;
            }
            let a = &actors[g.actor];
            let cx = reflect(a.x0 + a.vx * t as f64, a.box_x.0, a.box_x.1).round();
            let cy = reflect(a.y0 + a.vy * t as f64, a.box_y.0, a.box_y.1).round();
            let shoulder_x = cx + g.side * (a.torso_w / 2) as f64;
            let shoulder_y = cy - (a.torso_h / 2) as f64 * 0.7;
            let phase = (t - g.start) as f64 / g.duration as f64;
            let ang = (-80.0 + g.sweep_deg * phase).to_radians();
            let r = (a.torso_w as f64 / 8.0).max(1.5);
            for k in 0..=8 {
                let s = k as f64 / 8.0 * g.length;
                let px = shoulder_x + g.side * (ang.cos() * s);
                let py = shoulder_y - ang.sin() * s;
                canvas.fill_ellipse(
                    px.round() as i64,
                    py.round() as i64,
                    r.round() as i64,
                    r.round() as i64,
                    a.skin,
                );
            }
        }

        if flicker != 0 {
            for v in canvas.y.iter_mut() {
                *v = (*v as i32 + flicker).clamp(0, 255) as u8;
            }
        }

        frames.push(Frame::from_planes(w, h, canvas.y, canvas.cb, canvas.cr)?);
        masks.push(canvas.mask);
    }

    VideoSequence::new(frames, Some(masks), spec.fps)
}
