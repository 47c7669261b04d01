//! Small dense matrices (at most 3×3) and their singular values.

use num_traits::Float;

/// Row-major `d×d` matrix stored in a 3×3 array; unused entries are 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub m: [[f64; 3]; 3],
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        Matrix { dim, m }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        if self.dim == 2 {
            m[0][0] * m[1][1] - m[0][1] * m[1][0]
        } else {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }

    /// `(σ_max, σ_min)`.
    pub fn singular_values(&self) -> (f64, f64) {
        if self.dim == 2 {
            let [a, b] = [self.m[0][0], self.m[0][1]];
            let [c, d] = [self.m[1][0], self.m[1][1]];
            // σ = (|p| ± |q|) with p, q the conformal/anticonformal parts
            let p = ((a + d).powi(2) + (c - b).powi(2)).sqrt() * 0.5;
            let q = ((a - d).powi(2) + (c + b).powi(2)).sqrt() * 0.5;
            (p + q, (p - q).abs())
        } else {
            let mut ata = [[0.0; 3]; 3];
            for (i, row) in ata.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (0..3).map(|k| self.m[k][i] * self.m[k][j]).sum();
                }
            }
            let ev = symmetric_eigenvalues(ata);
            let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
            (max.max(0.0).sqrt(), min.max(0.0).sqrt())
        }
    }
}

/// Eigenvalues of a symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    for _ in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let scale = (0..3).map(|i| a[i][i].powi(2)).sum::<f64>();
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- Jᵀ A J with J the rotation in the (p, q) plane
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}
