//! Sub-pel motion-compensated prediction. Luma half-pel samples use the
//! 6-tap (1,-5,20,20,-5,1) filter; quarter-pel samples are bilinear
//! averages of the surrounding half-pel grid. Chroma is bilinear on an
//! eighth-pel grid. Out-of-frame taps clamp to the border, so prediction is
//! defined for every motion vector and identical in encoder and decoder.

/// Borrowed plane with dimensions.
#[derive(Clone, Copy)]
pub struct Plane<'a> {
    pub data: &'a [u8],
    pub w: usize,
    pub h: usize,
}

impl<'a> Plane<'a> {
    #[inline]
    fn at(&self, x: i64, y: i64) -> i32 {
        let cx = x.clamp(0, self.w as i64 - 1) as usize;
        let cy = y.clamp(0, self.h as i64 - 1) as usize;
        self.data[cy * self.w + cx] as i32
    }
}

#[inline]
fn tap6(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32) -> i32 {
    a - 5 * b + 20 * c + 20 * d - 5 * e + f
}

/// Sample on the half-pel grid (coordinates in half-pel units).
fn half_sample(p: Plane, hx: i64, hy: i64) -> i32 {
    let ix = hx >> 1;
    let iy = hy >> 1;
    match (hx & 1, hy & 1) {
        (0, 0) => p.at(ix, iy),
        (1, 0) => {
            let v = tap6(
                p.at(ix - 2, iy),
                p.at(ix - 1, iy),
                p.at(ix, iy),
                p.at(ix + 1, iy),
                p.at(ix + 2, iy),
                p.at(ix + 3, iy),
            );
            ((v + 16) >> 5).clamp(0, 255)
        }
        (0, 1) => {
            let v = tap6(
                p.at(ix, iy - 2),
                p.at(ix, iy - 1),
                p.at(ix, iy),
                p.at(ix, iy + 1),
                p.at(ix, iy + 2),
                p.at(ix, iy + 3),
            );
            ((v + 16) >> 5).clamp(0, 255)
        }
        _ => {
            // center position: 6-tap vertically over unrounded horizontal
            // intermediates
            let mut m = [0i32; 6];
            for (k, mv) in m.iter_mut().enumerate() {
                let yy = iy - 2 + k as i64;
                *mv = tap6(
                    p.at(ix - 2, yy),
                    p.at(ix - 1, yy),
                    p.at(ix, yy),
                    p.at(ix + 1, yy),
                    p.at(ix + 2, yy),
                    p.at(ix + 3, yy),
                );
            }
            ((tap6(m[0], m[1], m[2], m[3], m[4], m[5]) + 512) >> 10).clamp(0, 255)
        }
    }
}

/// Luma sample at quarter-pel position (qx, qy).
pub fn luma_sample_qpel(p: Plane, qx: i64, qy: i64) -> u8 {
    let v = match (qx & 1, qy & 1) {
        (0, 0) => half_sample(p, qx >> 1, qy >> 1),
        (1, 0) => {
            let a = half_sample(p, (qx - 1) >> 1, qy >> 1);
            let b = half_sample(p, (qx + 1) >> 1, qy >> 1);
            (a + b + 1) >> 1
        }
        (0, 1) => {
            let a = half_sample(p, qx >> 1, (qy - 1) >> 1);
            let b = half_sample(p, qx >> 1, (qy + 1) >> 1);
            (a + b + 1) >> 1
        }
        _ => {
            let a = half_sample(p, (qx - 1) >> 1, (qy - 1) >> 1);
            let b = half_sample(p, (qx + 1) >> 1, (qy - 1) >> 1);
            let c = half_sample(p, (qx - 1) >> 1, (qy + 1) >> 1);
            let d = half_sample(p, (qx + 1) >> 1, (qy + 1) >> 1);
            (a + b + c + d + 2) >> 2
        }
    };
    v as u8
}

/// Fills `out` with the w x h luma prediction for a block whose top-left
/// luma pixel is (x0, y0), displaced by mv in quarter-pel units.
pub fn predict_luma(
    p: Plane,
    x0: usize,
    y0: usize,
    mv: (i32, i32),
    w: usize,
    h: usize,
    out: &mut [u8],
) {
    let base_x = (x0 as i64) * 4 + mv.0 as i64;
    let base_y = (y0 as i64) * 4 + mv.1 as i64;
    if mv.0 & 3 == 0 && mv.1 & 3 == 0 {
        // integer displacement fast path
        let ix = base_x >> 2;
        let iy = base_y >> 2;
        for y in 0..h {
            for x in 0..w {
                out[y * w + x] = p.at(ix + x as i64, iy + y as i64) as u8;
            }
        }
        return;
    }
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = luma_sample_qpel(p, base_x + 4 * x as i64, base_y + 4 * y as i64);
        }
    }
}

/// Chroma prediction: the luma MV is halved onto the chroma grid, giving
/// eighth-pel positions interpolated bilinearly. (cx0, cy0) addresses the
/// chroma plane; the block is w x h chroma samples.
pub fn predict_chroma(
    p: Plane,
    cx0: usize,
    cy0: usize,
    mv: (i32, i32),
    w: usize,
    h: usize,
    out: &mut [u8],
) {
    let base_x = (cx0 as i64) * 8 + mv.0 as i64;
    let base_y = (cy0 as i64) * 8 + mv.1 as i64;
    for y in 0..h {
        for x in 0..w {
            let px = base_x + 8 * x as i64;
            let py = base_y + 8 * y as i64;
            let ix = px >> 3;
            let iy = py >> 3;
            let fx = (px & 7) as i32;
            let fy = (py & 7) as i32;
            let a = p.at(ix, iy);
            let b = p.at(ix + 1, iy);
            let c = p.at(ix, iy + 1);
            let d = p.at(ix + 1, iy + 1);
            let v = ((8 - fx) * (8 - fy) * a
                + fx * (8 - fy) * b
                + (8 - fx) * fy * c
                + fx * fy * d
                + 32)
                >> 6;
            out[y * w + x] = v as u8;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(w: usize, h: usize) -> Vec<u8> {
        (0..w * h).map(|i| (i * 31 % 256) as u8).collect()
    }

    #[test]
    fn integer_positions_pass_through() {
        let data = plane(16, 16);
        let p = Plane {
            data: &data,
            w: 16,
            h: 16,
        };
        let mut out = vec![0u8; 16];
        predict_luma(p, 4, 4, (8, -4), 4, 4, &mut out);
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(out[y * 4 + x], data[(3 + y) * 16 + 6 + x]);
            }
        }
    }

    #[test]
    fn half_pel_on_flat_plane_is_flat() {
        let data = vec![77u8; 256];
        let p = Plane {
            data: &data,
            w: 16,
            h: 16,
        };
        for (qx, qy) in [(1, 0), (2, 0), (0, 2), (2, 2), (1, 1), (3, 3)] {
            assert_eq!(luma_sample_qpel(p, 20 + qx, 20 + qy), 77);
        }
    }

    #[test]
    fn half_pel_midpoint_between_two_flat_halves() {
        // step edge: left half 0, right half 100; the 6-tap at the midpoint
        // of a long run gives the average
        let mut data = vec![0u8; 16 * 16];
        for y in 0..16 {
            for x in 8..16 {
                data[y * 16 + x] = 100;
            }
        }
        let p = Plane {
            data: &data,
            w: 16,
            h: 16,
        };
        // interior of the flat region: half-pel equals neighbors
        assert_eq!(luma_sample_qpel(p, 4 * 3 + 2, 4 * 8), 0);
        assert_eq!(luma_sample_qpel(p, 4 * 12 + 2, 4 * 8), 100);
    }

    #[test]
    fn out_of_frame_taps_clamp() {
        let data = plane(16, 16);
        let p = Plane {
            data: &data,
            w: 16,
            h: 16,
        };
        let mut out = vec![0u8; 16];
        predict_luma(p, 0, 0, (-400, -400), 4, 4, &mut out);
        assert!(out.iter().all(|&v| v == data[0]));
    }

    #[test]
    fn chroma_bilinear_weights() {
        let mut data = vec![0u8; 64];
        data[0] = 80; // a
        data[1] = 0;
        data[8] = 0;
        data[9] = 0;
        let p = Plane {
            data: &data,
            w: 8,
            h: 8,
        };
        let mut out = vec![0u8; 1];
        // mv (2,2) quarter-luma = (0.25, 0.25) chroma px: weights 36,12,12,4
        predict_chroma(p, 0, 0, (2, 2), 1, 1, &mut out);
        assert_eq!(out[0], ((6 * 6 * 80 + 32) >> 6) as u8);
    }
}
