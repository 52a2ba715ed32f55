//! Constant-velocity linear-Gaussian box state, the single-mode alternative
//! to the particle filter. State is (cx, cy, h, r, vx, vy) with measurements
//! (cx, cy, h, r); r is the width/height aspect ratio.

use crate::motdata::BoundingBox;

const N: usize = 6;
const M: usize = 4;

type Mat = [[f64; N]; N];

fn identity() -> Mat {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn mat_transpose(a: &Mat) -> Mat {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// Invert a small symmetric positive-definite matrix (Gauss-Jordan).
fn invert4(a: [[f64; M]; M]) -> [[f64; M]; M] {
    let mut aug = [[0.0; 2 * M]; M];
    for i in 0..M {
        aug[i][..M].copy_from_slice(&a[i]);
        aug[i][M + i] = 1.0;
    }
    for col in 0..M {
        let mut pivot = col;
        for r in col + 1..M {
            if aug[r][col].abs() > aug[pivot][col].abs() {
                pivot = r;
            }
        }
        aug.swap(col, pivot);
        let p = aug[col][col];
        debug_assert!(p.abs() > 1e-12, "singular innovation covariance");
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..M {
            if r != col {
                let f = aug[r][col];
                for c in 0..2 * M {
                    aug[r][c] -= f * aug[col][c];
                }
            }
        }
    }
    let mut inv = [[0.0; M]; M];
    for i in 0..M {
        inv[i].copy_from_slice(&aug[i][M..]);
    }
    inv
}

#[derive(Debug, Clone)]
pub struct KalmanBoxState {
    x: [f64; N],
    p: Mat,
}

impl KalmanBoxState {
    pub fn new(bbox: &BoundingBox) -> Self {
        let (cx, cy) = bbox.center();
        let r = if bbox.h > 0.0 { bbox.w / bbox.h } else { 1.0 };
        let mut p = [[0.0; N]; N];
        // Position and size start fairly certain, velocity does not.
        for (i, v) in [4.0, 4.0, 4.0, 0.01, 100.0, 100.0].iter().enumerate() {
            p[i][i] = *v;
        }
        Self {
            x: [cx, cy, bbox.h, r, 0.0, 0.0],
            p,
        }
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.x[4], self.x[5])
    }

    pub fn set_velocity(&mut self, vx: f64, vy: f64) {
        self.x[4] = vx;
        self.x[5] = vy;
    }

    pub fn bbox(&self) -> BoundingBox {
        let h = self.x[2].max(1.0);
        let w = (self.x[3] * h).max(1.0);
        BoundingBox::from_center(self.x[0], self.x[1], w, h)
    }

    /// Shift the positional state by an affine camera-motion warp.
    pub fn warp(&mut self, t: &[f64; 6]) {
        let (nx, ny) = super::cmc::warp_point(t, self.x[0], self.x[1]);
        self.x[0] = nx;
        self.x[1] = ny;
        let sy = (t[1] * t[1] + t[4] * t[4]).sqrt();
        self.x[2] *= sy;
    }

    /// Constant-velocity transition.
    pub fn predict(&mut self) {
        let mut f = identity();
        f[0][4] = 1.0;
        f[1][5] = 1.0;
        self.x[0] += self.x[4];
        self.x[1] += self.x[5];
        let fp = mat_mul(&f, &self.p);
        self.p = mat_mul(&fp, &mat_transpose(&f));
        // Process noise: positions drift, size and aspect stay stiff.
        for (i, q) in [1.0, 1.0, 0.25, 1e-4, 0.25, 0.25].iter().enumerate() {
            self.p[i][i] += q;
        }
    }

    /// Measurement update from a detection box.
    pub fn update(&mut self, bbox: &BoundingBox) {
        let (cx, cy) = bbox.center();
        let r = if bbox.h > 0.0 { bbox.w / bbox.h } else { self.x[3] };
        let z = [cx, cy, bbox.h, r];
        let rnoise = [1.0, 1.0, 1.0, 1e-2];

        // H picks the first four state components, so S = P[0..4][0..4] + R.
        let mut s = [[0.0; M]; M];
        for i in 0..M {
            for j in 0..M {
                s[i][j] = self.p[i][j];
            }
            s[i][i] += rnoise[i];
        }
        let s_inv = invert4(s);

        // K = P H^T S^-1 (N x M).
        let mut k = [[0.0; M]; N];
        for i in 0..N {
            for j in 0..M {
                let mut acc = 0.0;
                for l in 0..M {
                    acc += self.p[i][l] * s_inv[l][j];
                }
                k[i][j] = acc;
            }
        }

        let y = [
            z[0] - self.x[0],
            z[1] - self.x[1],
            z[2] - self.x[2],
            z[3] - self.x[3],
        ];
        for i in 0..N {
            for j in 0..M {
                self.x[i] += k[i][j] * y[j];
            }
        }

        // P = (I - K H) P; with H = [I 0] this subtracts K * P[0..4][..].
        let mut kp = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                let mut acc = 0.0;
                for l in 0..M {
                    acc += k[i][l] * self.p[l][j];
                }
                kp[i][j] = acc;
            }
        }
        for i in 0..N {
            for j in 0..N {
                self.p[i][j] -= kp[i][j];
            }
        }
    }

    /// Distance between a measurement and the predicted position, for tests.
    pub fn innovation_magnitude(&self, bbox: &BoundingBox) -> f64 {
        let (cx, cy) = bbox.center();
        ((cx - self.x[0]).powi(2) + (cy - self.x[1]).powi(2)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stationary_target_converges_to_the_detection() {
        let z = BoundingBox::from_center(100.0, 80.0, 12.0, 16.0);
        let mut kf = KalmanBoxState::new(&BoundingBox::from_center(90.0, 70.0, 10.0, 14.0));
        for _ in 0..60 {
            kf.predict();
            kf.update(&z);
        }
        let b = kf.bbox();
        let (cx, cy) = b.center();
        assert_abs_diff_eq!(cx, 100.0, epsilon = 0.05);
        assert_abs_diff_eq!(cy, 80.0, epsilon = 0.05);
        assert_abs_diff_eq!(b.w, 12.0, epsilon = 0.1);
        assert_abs_diff_eq!(b.h, 16.0, epsilon = 0.1);
        let (vx, vy) = kf.velocity();
        assert!(vx.abs() < 0.05 && vy.abs() < 0.05);
    }

    #[test]
    fn constant_velocity_innovation_shrinks() {
        // Straight-line fixture: residuals after prediction must shrink to
        // (near) zero once the velocity estimate converges.
        let mut kf = KalmanBoxState::new(&BoundingBox::from_center(0.0, 0.0, 10.0, 10.0));
        let mut innovations = Vec::new();
        for t in 1..=40 {
            let z = BoundingBox::from_center(3.0 * t as f64, 1.5 * t as f64, 10.0, 10.0);
            kf.predict();
            innovations.push(kf.innovation_magnitude(&z));
            kf.update(&z);
        }
        // Monotone decrease after burn-in, reaching ~0.
        for w in innovations[5..].windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "innovation rose: {w:?}");
        }
        assert!(innovations.last().unwrap() < &0.05);
        let (vx, vy) = kf.velocity();
        assert_abs_diff_eq!(vx, 3.0, epsilon = 0.05);
        assert_abs_diff_eq!(vy, 1.5, epsilon = 0.05);
    }

    #[test]
    fn coasting_advances_linearly_by_velocity() {
        let mut kf = KalmanBoxState::new(&BoundingBox::from_center(0.0, 0.0, 10.0, 10.0));
        for t in 1..=20 {
            let z = BoundingBox::from_center(2.0 * t as f64, 0.0, 10.0, 10.0);
            kf.predict();
            kf.update(&z);
        }
        let (start, _) = kf.bbox().center();
        let (vx, _) = kf.velocity();
        for k in 1..=10 {
            kf.predict();
            let (cx, _) = kf.bbox().center();
            assert_abs_diff_eq!(cx, start + vx * k as f64, epsilon = 1e-6);
        }
    }
}
