//! Small dense complex linear algebra for the 4-channel array: 4x4
//! Hermitian matrices, Gauss-Jordan inversion with partial pivoting, and
//! quadratic forms.

use num_complex::Complex64;

pub type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    pub m: [[C; 4]; 4],
}

impl Mat4 {
    pub fn zero() -> Mat4 {
        Mat4 {
            m: [[C::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn identity() -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            out.m[i][i] = C::new(1.0, 0.0);
        }
        out
    }

    /// self += x * x^H (outer product of a column vector).
    pub fn add_outer(&mut self, x: &[C; 4]) {
        for i in 0..4 {
            for j in 0..4 {
                self.m[i][j] += x[i] * x[j].conj();
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for row in self.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
    }

    pub fn add_diagonal(&mut self, d: f64) {
        for i in 0..4 {
            self.m[i][i] += C::new(d, 0.0);
        }
    }

    pub fn trace_real(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    /// Frobenius norm of (self - self^H).
    pub fn hermitian_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let d = self.m[i][j] - self.m[j][i].conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul_vec(&self, x: &[C; 4]) -> [C; 4] {
        let mut out = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.m[i][j] * x[j];
            }
        }
        out
    }

    /// Gauss-Jordan with partial pivoting; `None` for singular input.
    pub fn inverse(&self) -> Option<Mat4> {
        let mut a = self.m;
        let mut inv = Mat4::identity().m;
        for col in 0..4 {
            let mut pivot = col;
            let mut best = a[col][col].norm();
            for (r, row) in a.iter().enumerate().skip(col + 1) {
                if row[col].norm() > best {
                    best = row[col].norm();
                    pivot = r;
                }
            }
            if best < 1e-300 {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for j in 0..4 {
                a[col][j] /= p;
                inv[col][j] /= p;
            }
            for r in 0..4 {
                if r == col {
                    continue;
                }
                let f = a[r][col];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..4 {
                    let acj = a[col][j];
                    let icj = inv[col][j];
                    a[r][j] -= f * acj;
                    inv[r][j] -= f * icj;
                }
            }
        }
        Some(Mat4 { m: inv })
    }

    /// x^H M x for a real vector x (real output; exact for Hermitian M).
    pub fn quad_form_real(&self, x: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            s += x[i] * x[i] * self.m[i][i].re;
            for j in i + 1..4 {
                s += 2.0 * x[i] * x[j] * self.m[i][j].re;
            }
        }
        s
    }

    /// x^H M x for a complex vector.
    pub fn quad_form(&self, x: &[C; 4]) -> f64 {
        let mx = self.mul_vec(x);
        let mut s = C::new(0.0, 0.0);
        for i in 0..4 {
            s += x[i].conj() * mx[i];
        }
        s.re
    }
}
