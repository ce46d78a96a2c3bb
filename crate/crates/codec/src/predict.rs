//! Intra prediction (9 modes at 4x4, 4 at 16x16, DC chroma) plus the
//! transform-domain dominant-edge estimate that drives fast intra mode
//! selection.

use crate::transform::forward4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u8)]
pub enum Intra4Mode {
    Vertical = 0,
    Horizontal = 1,
    Dc = 2,
    DiagDownLeft = 3,
    DiagDownRight = 4,
    VerticalRight = 5,
    HorizontalDown = 6,
    VerticalLeft = 7,
    HorizontalUp = 8,
}

pub const ALL_INTRA4_MODES: [Intra4Mode; 9] = [
    Intra4Mode::Vertical,
    Intra4Mode::Horizontal,
    Intra4Mode::Dc,
    Intra4Mode::DiagDownLeft,
    Intra4Mode::DiagDownRight,
    Intra4Mode::VerticalRight,
    Intra4Mode::HorizontalDown,
    Intra4Mode::VerticalLeft,
    Intra4Mode::HorizontalUp,
];

impl Intra4Mode {
    pub fn from_index(i: u8) -> Option<Self> {
        ALL_INTRA4_MODES.get(i as usize).copied()
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    /// Edge orientation each directional mode predicts well, in degrees.
    pub fn angle(self) -> Option<f64> {
        match self {
            Intra4Mode::Vertical => Some(90.0),
            Intra4Mode::Horizontal => Some(0.0),
            Intra4Mode::Dc => None,
            Intra4Mode::DiagDownLeft => Some(135.0),
            Intra4Mode::DiagDownRight => Some(45.0),
            Intra4Mode::VerticalRight => Some(67.5),
            Intra4Mode::HorizontalDown => Some(22.5),
            Intra4Mode::VerticalLeft => Some(112.5),
            Intra4Mode::HorizontalUp => Some(157.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Intra16Mode {
    Vertical = 0,
    Horizontal = 1,
    Dc = 2,
    Plane = 3,
}

pub const ALL_INTRA16_MODES: [Intra16Mode; 4] = [
    Intra16Mode::Vertical,
    Intra16Mode::Horizontal,
    Intra16Mode::Dc,
    Intra16Mode::Plane,
];

impl Intra16Mode {
    pub fn from_index(i: u8) -> Option<Self> {
        ALL_INTRA16_MODES.get(i as usize).copied()
    }
}

/// Neighboring reconstructed samples of a 4x4 block.
#[derive(Debug, Clone, Copy, Default)]
pub struct Nbr4 {
    pub top: Option<[u8; 4]>,
    pub top_right: Option<[u8; 4]>,
    pub left: Option<[u8; 4]>,
    pub top_left: Option<u8>,
}

impl Nbr4 {
    /// Above row extended to 8 samples, replicating the last sample when
    /// the top-right block is unavailable.
    fn above8(&self) -> Option<[i32; 8]> {
        let t = self.top?;
        let mut a = [0i32; 8];
        for i in 0..4 {
            a[i] = t[i] as i32;
        }
        match self.top_right {
            Some(tr) => {
                for i in 0..4 {
                    a[4 + i] = tr[i] as i32;
                }
            }
            None => {
                for i in 4..8 {
                    a[i] = t[3] as i32;
                }
            }
        }
        Some(a)
    }
}

/// Predicts a 4x4 block; `None` when the samples the mode needs are
/// unavailable (DC always succeeds, falling back to 128).
pub fn predict4(mode: Intra4Mode, n: &Nbr4) -> Option<[u8; 16]> {
    let mut out = [0u8; 16];
    match mode {
        Intra4Mode::Vertical => {
            let t = n.top?;
            for y in 0..4 {
                for x in 0..4 {
                    out[y * 4 + x] = t[x];
                }
            }
        }
        Intra4Mode::Horizontal => {
            let l = n.left?;
            for y in 0..4 {
                for x in 0..4 {
                    out[y * 4 + x] = l[y];
                }
            }
        }
        Intra4Mode::Dc => {
            let v = match (n.top, n.left) {
                (Some(t), Some(l)) => {
                    let s: i32 = t.iter().chain(l.iter()).map(|&v| v as i32).sum();
                    (s + 4) >> 3
                }
                (Some(t), None) => {
                    let s: i32 = t.iter().map(|&v| v as i32).sum();
                    (s + 2) >> 2
                }
                (None, Some(l)) => {
                    let s: i32 = l.iter().map(|&v| v as i32).sum();
                    (s + 2) >> 2
                }
                (None, None) => 128,
            };
            out = [v as u8; 16];
        }
        Intra4Mode::DiagDownLeft => {
            let a = n.above8()?;
            for y in 0..4usize {
                for x in 0..4usize {
                    let k = x + y;
                    let v = if k == 6 {
                        (a[6] + 3 * a[7] + 2) >> 2
                    } else {
                        (a[k] + 2 * a[k + 1] + a[k + 2] + 2) >> 2
                    };
                    out[y * 4 + x] = v as u8;
                }
            }
        }
        Intra4Mode::DiagDownRight => {
            let t = n.top?;
            let l = n.left?;
            let m = n.top_left? as i32;
            let at = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    t[i as usize] as i32
                }
            };
            let lf = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    l[i as usize] as i32
                }
            };
            for y in 0..4i32 {
                for x in 0..4i32 {
                    let v = match x - y {
                        k if k > 0 => (at(k - 2) + 2 * at(k - 1) + at(k) + 2) >> 2,
                        0 => (at(0) + 2 * m + lf(0) + 2) >> 2,
                        k => {
                            let j = -k;
                            (lf(j - 2) + 2 * lf(j - 1) + lf(j) + 2) >> 2
                        }
                    };
                    out[(y * 4 + x) as usize] = v as u8;
                }
            }
        }
        Intra4Mode::VerticalRight => {
            let t = n.top?;
            let l = n.left?;
            let m = n.top_left? as i32;
            let at = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    t[i as usize] as i32
                }
            };
            for y in 0..4i32 {
                for x in 0..4i32 {
                    let z = 2 * x - y;
                    let v = if z >= 0 && z % 2 == 0 {
                        (at(x - (y >> 1) - 1) + at(x - (y >> 1)) + 1) >> 1
                    } else if z >= 0 {
                        (at(x - (y >> 1) - 2) + 2 * at(x - (y >> 1) - 1) + at(x - (y >> 1)) + 2)
                            >> 2
                    } else if z == -1 {
                        (l[0] as i32 + 2 * m + t[0] as i32 + 2) >> 2
                    } else {
                        let j = y - 2 * x;
                        let lf = |i: i32| -> i32 {
                            if i < 0 {
                                m
                            } else {
                                l[i as usize] as i32
                            }
                        };
                        (lf(j - 1) + 2 * lf(j - 2) + lf(j - 3) + 2) >> 2
                    };
                    out[(y * 4 + x) as usize] = v as u8;
                }
            }
        }
        Intra4Mode::HorizontalDown => {
            let t = n.top?;
            let l = n.left?;
            let m = n.top_left? as i32;
            let lf = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    l[i as usize] as i32
                }
            };
            for y in 0..4i32 {
                for x in 0..4i32 {
                    let z = 2 * y - x;
                    let v = if z >= 0 && z % 2 == 0 {
                        (lf(y - (x >> 1) - 1) + lf(y - (x >> 1)) + 1) >> 1
                    } else if z >= 0 {
                        (lf(y - (x >> 1) - 2) + 2 * lf(y - (x >> 1) - 1) + lf(y - (x >> 1)) + 2)
                            >> 2
                    } else if z == -1 {
                        (l[0] as i32 + 2 * m + t[0] as i32 + 2) >> 2
                    } else {
                        let j = x - 2 * y;
                        let at = |i: i32| -> i32 {
                            if i < 0 {
                                m
                            } else {
                                t[i as usize] as i32
                            }
                        };
                        (at(j - 1) + 2 * at(j - 2) + at(j - 3) + 2) >> 2
                    };
                    out[(y * 4 + x) as usize] = v as u8;
                }
            }
        }
        Intra4Mode::VerticalLeft => {
            let a = n.above8()?;
            for y in 0..4usize {
                for x in 0..4usize {
                    let k = x + (y >> 1);
                    let v = if y % 2 == 0 {
                        (a[k] + a[k + 1] + 1) >> 1
                    } else {
                        (a[k] + 2 * a[k + 1] + a[k + 2] + 2) >> 2
                    };
                    out[y * 4 + x] = v as u8;
                }
            }
        }
        Intra4Mode::HorizontalUp => {
            let l = n.left?;
            let lf = |i: usize| l[i] as i32;
            for y in 0..4usize {
                for x in 0..4usize {
                    let z = x + 2 * y;
                    let v = if z > 5 {
                        lf(3)
                    } else if z == 5 {
                        (lf(2) + 3 * lf(3) + 2) >> 2
                    } else if z % 2 == 0 {
                        (lf(y + (x >> 1)) + lf(y + (x >> 1) + 1) + 1) >> 1
                    } else {
                        (lf(y + (x >> 1)) + 2 * lf(y + (x >> 1) + 1) + lf(y + (x >> 1) + 2) + 2)
                            >> 2
                    };
                    out[y * 4 + x] = v as u8;
                }
            }
        }
    }
    Some(out)
}

/// Predicts a whole 16x16 luma macroblock.
pub fn predict16(
    mode: Intra16Mode,
    top: Option<&[u8; 16]>,
    left: Option<&[u8; 16]>,
    top_left: Option<u8>,
) -> Option<[u8; 256]> {
    let mut out = [0u8; 256];
    match mode {
        Intra16Mode::Vertical => {
            let t = top?;
            for y in 0..16 {
                out[y * 16..y * 16 + 16].copy_from_slice(t);
            }
        }
        Intra16Mode::Horizontal => {
            let l = left?;
            for y in 0..16 {
                for x in 0..16 {
                    out[y * 16 + x] = l[y];
                }
            }
        }
        Intra16Mode::Dc => {
            let v = match (top, left) {
                (Some(t), Some(l)) => {
                    let s: i32 = t.iter().chain(l.iter()).map(|&v| v as i32).sum();
                    (s + 16) >> 5
                }
                (Some(t), None) => {
                    let s: i32 = t.iter().map(|&v| v as i32).sum();
                    (s + 8) >> 4
                }
                (None, Some(l)) => {
                    let s: i32 = l.iter().map(|&v| v as i32).sum();
                    (s + 8) >> 4
                }
                (None, None) => 128,
            };
            out = [v as u8; 256];
        }
        Intra16Mode::Plane => {
            let t = top?;
            let l = left?;
            let m = top_left? as i32;
            let at = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    t[i as usize] as i32
                }
            };
            let lf = |i: i32| -> i32 {
                if i < 0 {
                    m
                } else {
                    l[i as usize] as i32
                }
            };
            let mut hg = 0i32;
            let mut vg = 0i32;
            for x in 1..=8 {
                hg += x * (at(7 + x) - at(7 - x));
                vg += x * (lf(7 + x) - lf(7 - x));
            }
            let a = 16 * (lf(15) + at(15));
            let b = (5 * hg + 32) >> 6;
            let c = (5 * vg + 32) >> 6;
            for y in 0..16i32 {
                for x in 0..16i32 {
                    let v = (a + b * (x - 7) + c * (y - 7) + 16) >> 5;
                    out[(y * 16 + x) as usize] = v.clamp(0, 255) as u8;
                }
            }
        }
    }
    Some(out)
}

/// DC prediction for an 8x8 chroma block (the codec's only chroma intra
/// mode).
pub fn predict_chroma_dc(top: Option<&[u8; 8]>, left: Option<&[u8; 8]>) -> [u8; 64] {
    let v = match (top, left) {
        (Some(t), Some(l)) => {
            let s: i32 = t.iter().chain(l.iter()).map(|&v| v as i32).sum();
            (s + 8) >> 4
        }
        (Some(t), None) => {
            let s: i32 = t.iter().map(|&v| v as i32).sum();
            (s + 4) >> 3
        }
        (None, Some(l)) => {
            let s: i32 = l.iter().map(|&v| v as i32).sum();
            (s + 4) >> 3
        }
        (None, None) => 128,
    };
    [v as u8; 64]
}

/// Most probable 4x4 intra mode: the smaller of the two neighbor modes, DC
/// when either neighbor is missing or not intra 4x4 coded.
pub fn most_probable_mode(left: Option<Intra4Mode>, top: Option<Intra4Mode>) -> Intra4Mode {
    match (left, top) {
        (Some(l), Some(t)) => l.min(t),
        _ => Intra4Mode::Dc,
    }
}

/// Dominant edge orientation of a source 4x4 block, estimated from its
/// integer transform: theta = atan(sum of first-row AC / sum of
/// first-column AC), mapped to [0, 180). Returns `None` when both sums are
/// zero (no oriented structure).
pub fn dominant_edge_angle(block: &[i32; 16]) -> Option<f64> {
    let f = forward4(block);
    let row: i64 = (1..4).map(|j| f[j] as i64).sum();
    let col: i64 = (1..4).map(|i| f[i * 4] as i64).sum();
    if row == 0 && col == 0 {
        return None;
    }
    if col == 0 {
        return Some(90.0);
    }
    let mut deg = (row as f64 / col as f64).atan().to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    Some(deg)
}

/// Angular distance between orientations, mod 180.
fn orient_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Picks the 3 candidate modes for a 4x4 block: DC plus the two directional
/// modes closest to the edge angle (ties to the lower mode index). Without
/// an edge, DC plus the neighbor blocks' modes, padded from
/// {Vertical, Horizontal} to stay at three distinct modes.
pub fn select_intra4_modes(
    edge: Option<f64>,
    left_mode: Option<Intra4Mode>,
    top_mode: Option<Intra4Mode>,
) -> [Intra4Mode; 3] {
    match edge {
        Some(theta) => {
            let mut dir: Vec<Intra4Mode> = ALL_INTRA4_MODES
                .iter()
                .copied()
                .filter(|m| m.angle().is_some())
                .collect();
            dir.sort_by(|&a, &b| {
                let da = orient_dist(theta, a.angle().unwrap());
                let db = orient_dist(theta, b.angle().unwrap());
                da.partial_cmp(&db)
                    .unwrap()
                    .then(a.index().cmp(&b.index()))
            });
            [Intra4Mode::Dc, dir[0], dir[1]]
        }
        None => {
            let mut out = vec![Intra4Mode::Dc];
            for cand in [left_mode, top_mode].into_iter().flatten() {
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
            for pad in [Intra4Mode::Vertical, Intra4Mode::Horizontal] {
                if out.len() < 3 && !out.contains(&pad) {
                    out.push(pad);
                }
            }
            [out[0], out[1], out[2]]
        }
    }
}
