//! Block motion estimation: exhaustive integer search around the co-located
//! position, half-pel refinement with the 6-tap interpolator, optional
//! quarter-pel refinement. Cost is SATD + lambda_mv * R_mv with R_mv the
//! Exp-Golomb bit length of the differential against the predictor.

use crate::bitstream::se_len;
use crate::interp::{predict_luma, Plane};
use crate::satd::{satd_strided, SatdCounter};
use serde::{Deserialize, Serialize};

/// Motion vector in quarter-pel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MotionVector {
    pub x: i32,
    pub y: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { x: 0, y: 0 };

    pub fn new(x: i32, y: i32) -> Self {
        MotionVector { x, y }
    }

    pub fn l1(&self) -> u32 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }

    /// Component-wise median of three vectors (the H.264 predictor shape).
    pub fn median3(a: MotionVector, b: MotionVector, c: MotionVector) -> MotionVector {
        fn med(a: i32, b: i32, c: i32) -> i32 {
            a.max(b.min(c)).min(b.max(c))
        }
        MotionVector {
            x: med(a.x, b.x, c.x),
            y: med(a.y, b.y, c.y),
        }
    }
}

/// Exp-Golomb bit length of signalling `mv` against `pred`.
pub fn mv_rate_bits(mv: MotionVector, pred: MotionVector) -> u32 {
    se_len(mv.x - pred.x) + se_len(mv.y - pred.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Half,
    Quarter,
}

pub struct SearchArgs<'a> {
    /// Current frame luma.
    pub src: Plane<'a>,
    /// Reference (reconstructed previous frame) luma.
    pub reference: Plane<'a>,
    /// Top-left luma pixel of the partition.
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
    pub predictor: MotionVector,
    pub search_range: u8,
    pub lambda_mv: f64,
}

fn block_cost(
    a: &SearchArgs,
    mv: MotionVector,
    pred_buf: &mut [u8],
    counter: &mut SatdCounter,
) -> f64 {
    predict_luma(a.reference, a.x0, a.y0, (mv.x, mv.y), a.w, a.h, pred_buf);
    let src_off = a.y0 * a.src.w + a.x0;
    let sa = satd_strided(
        &a.src.data[src_off..],
        a.src.w,
        pred_buf,
        a.w,
        a.w,
        a.h,
        counter,
    );
    sa as f64 + a.lambda_mv * mv_rate_bits(mv, a.predictor) as f64
}

/// Deterministic comparison: cost, then |mv| L1, then raster order of the
/// displacement.
fn better(cost: f64, mv: MotionVector, best_cost: f64, best: MotionVector) -> bool {
    if cost != best_cost {
        return cost < best_cost;
    }
    if mv.l1() != best.l1() {
        return mv.l1() < best.l1();
    }
    (mv.y, mv.x) < (best.y, best.x)
}

/// Searches one partition and returns (mv, cost).
///
/// Integer candidates cover the square of `search_range` pixels around the
/// co-located block (so the zero vector is always a candidate), followed by
/// +-1 half-pel refinement and, at quarter precision, +-1 quarter-pel
/// refinement.
pub fn motion_search(
    a: &SearchArgs,
    precision: Precision,
    counter: &mut SatdCounter,
) -> (MotionVector, f64) {
    let mut pred_buf = vec![0u8; a.w * a.h];
    let sr = a.search_range as i32;
    let mut best = MotionVector::ZERO;
    let mut best_cost = f64::INFINITY;
    for dy in -sr..=sr {
        for dx in -sr..=sr {
            let mv = MotionVector::new(4 * dx, 4 * dy);
            let cost = block_cost(a, mv, &mut pred_buf, counter);
            if better(cost, mv, best_cost, best) {
                best_cost = cost;
                best = mv;
            }
        }
    }
    for step in [2i32, 1] {
        if step == 1 && precision != Precision::Quarter {
            break;
        }
        let center = best;
        for dy in [-step, 0, step] {
            for dx in [-step, 0, step] {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let mv = MotionVector::new(center.x + dx, center.y + dy);
                let cost = block_cost(a, mv, &mut pred_buf, counter);
                if better(cost, mv, best_cost, best) {
                    best_cost = cost;
                    best = mv;
                }
            }
        }
    }
    (best, best_cost)
}

/// Refines an already-found half-pel vector by +-1 quarter-pel; never
/// returns a higher cost than the input.
pub fn quarter_refine(
    a: &SearchArgs,
    half_mv: MotionVector,
    counter: &mut SatdCounter,
) -> (MotionVector, f64) {
    let mut pred_buf = vec![0u8; a.w * a.h];
    let mut best = half_mv;
    let mut best_cost = block_cost(a, half_mv, &mut pred_buf, counter);
    for dy in [-1i32, 0, 1] {
        for dx in [-1i32, 0, 1] {
            if dx == 0 && dy == 0 {
                continue;
            }
            let mv = MotionVector::new(half_mv.x + dx, half_mv.y + dy);
            let cost = block_cost(a, mv, &mut pred_buf, counter);
            if better(cost, mv, best_cost, best) {
                best_cost = cost;
                best = mv;
            }
        }
    }
    (best, best_cost)
}

/// Motion cost of skip mode: SATD at the median-predicted vector with no
/// rate term.
pub fn skip_cost(
    src: Plane,
    reference: Plane,
    x0: usize,
    y0: usize,
    skip_mv: MotionVector,
    counter: &mut SatdCounter,
) -> u64 {
    let mut pred_buf = [0u8; 256];
    predict_luma(reference, x0, y0, (skip_mv.x, skip_mv.y), 16, 16, &mut pred_buf);
    let src_off = y0 * src.w + x0;
    satd_strided(&src.data[src_off..], src.w, &pred_buf, 16, 16, 16, counter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> Vec<u8> {
        (0..w * h)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                ((x * 13 + y * 31 + (x * y) % 7) % 256) as u8
            })
            .collect()
    }

    #[test]
    fn static_content_zero_vector() {
        let data = textured(64, 48);
        let p = Plane {
            data: &data,
            w: 64,
            h: 48,
        };
        let args = SearchArgs {
            src: p,
            reference: p,
            x0: 16,
            y0: 16,
            w: 16,
            h: 16,
            predictor: MotionVector::ZERO,
            search_range: 8,
            lambda_mv: 4.0,
        };
        let mut c = SatdCounter::default();
        let (mv, cost) = motion_search(&args, Precision::Quarter, &mut c);
        assert_eq!(mv, MotionVector::ZERO);
        // SATD 0, rate = two one-bit codes
        assert!((cost - 4.0 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn finds_constructed_integer_translation() {
        // reference shifted right by 4 pixels: block content at x in the
        // current frame sits at x+4... build current = ref translated left
        let refdata = textured(64, 48);
        let mut cur = vec![0u8; 64 * 48];
        for y in 0..48 {
            for x in 0..64 {
                let sx = (x as i32 + 4).clamp(0, 63) as usize;
                cur[y * 64 + x] = refdata[y * 64 + sx];
            }
        }
        let args = SearchArgs {
            src: Plane {
                data: &cur,
                w: 64,
                h: 48,
            },
            reference: Plane {
                data: &refdata,
                w: 64,
                h: 48,
            },
            x0: 16,
            y0: 16,
            w: 16,
            h: 16,
            predictor: MotionVector::ZERO,
            search_range: 8,
            lambda_mv: 1.0,
        };
        let mut c = SatdCounter::default();
        let (mv, _) = motion_search(&args, Precision::Quarter, &mut c);
        assert_eq!(mv, MotionVector::new(16, 0));
    }

    #[test]
    fn cost_never_exceeds_zero_vector_cost() {
        let refdata = textured(64, 48);
        let cur = textured(64, 48)
            .iter()
            .map(|&v| v.wrapping_add(3))
            .collect::<Vec<_>>();
        let args = SearchArgs {
            src: Plane {
                data: &cur,
                w: 64,
                h: 48,
            },
            reference: Plane {
                data: &refdata,
                w: 64,
                h: 48,
            },
            x0: 32,
            y0: 16,
            w: 16,
            h: 16,
            predictor: MotionVector::new(4, -8),
            search_range: 4,
            lambda_mv: 5.85,
        };
        let mut c = SatdCounter::default();
        let (_, cost) = motion_search(&args, Precision::Half, &mut c);
        let mut buf = vec![0u8; 256];
        let zero_cost = block_cost(&args, MotionVector::ZERO, &mut buf, &mut c);
        assert!(cost <= zero_cost);
    }

    #[test]
    fn quarter_refine_never_worse() {
        let refdata = textured(64, 48);
        let cur = textured(64, 48);
        let args = SearchArgs {
            src: Plane {
                data: &cur,
                w: 64,
                h: 48,
            },
            reference: Plane {
                data: &refdata,
                w: 64,
                h: 48,
            },
            x0: 16,
            y0: 32,
            w: 8,
            h: 8,
            predictor: MotionVector::ZERO,
            search_range: 4,
            lambda_mv: 3.0,
        };
        let mut c = SatdCounter::default();
        let (hmv, hcost) = motion_search(&args, Precision::Half, &mut c);
        let (_, qcost) = quarter_refine(&args, hmv, &mut c);
        assert!(qcost <= hcost + 1e-12);
    }

    #[test]
    fn median_predictor() {
        let m = MotionVector::median3(
            MotionVector::new(4, 0),
            MotionVector::new(-8, 12),
            MotionVector::new(2, 2),
        );
        assert_eq!(m, MotionVector::new(2, 2));
    }

    #[test]
    fn skip_cost_zero_for_unchanged_colocated() {
        let data = textured(64, 48);
        let p = Plane {
            data: &data,
            w: 64,
            h: 48,
        };
        let mut c = SatdCounter::default();
        assert_eq!(skip_cost(p, p, 16, 16, MotionVector::ZERO, &mut c), 0);
    }
}
