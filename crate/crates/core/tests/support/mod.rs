//! Independent oracles for the acceptance suite. These deliberately share
//! no code with the implementations they check.

/// Plain-array constant-velocity Kalman filter over [x, y, vx, vy] with
/// position measurements. Written without nalgebra so it shares nothing
/// with the GM-PHD implementation path.
pub struct OracleKalman {
    pub mean: [f64; 4],
    pub cov: [[f64; 4]; 4],
    accel_noise: f64,
    meas_var: f64,
}

fn mat_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += a[i][k] * bk[j];
            }
        }
    }
    out
}

fn transpose(a: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

impl OracleKalman {
    pub fn new(mean: [f64; 4], cov_diag: [f64; 4], accel_noise: f64, meas_noise: f64) -> Self {
        let mut cov = [[0.0; 4]; 4];
        for i in 0..4 {
            cov[i][i] = cov_diag[i];
        }
        Self { mean, cov, accel_noise, meas_var: meas_noise * meas_noise }
    }

    pub fn predict(&mut self, dt: f64) {
        let f = [
            [1.0, 0.0, dt, 0.0],
            [0.0, 1.0, 0.0, dt],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let m = self.mean;
        self.mean = [m[0] + dt * m[2], m[1] + dt * m[3], m[2], m[3]];
        let q = self.accel_noise * self.accel_noise;
        let (d2, d3, d4) = (dt * dt, dt * dt * dt, dt * dt * dt * dt);
        let mut qm = [[0.0; 4]; 4];
        qm[0][0] = q * d4 / 4.0;
        qm[1][1] = q * d4 / 4.0;
        qm[0][2] = q * d3 / 2.0;
        qm[2][0] = q * d3 / 2.0;
        qm[1][3] = q * d3 / 2.0;
        qm[3][1] = q * d3 / 2.0;
        qm[2][2] = q * d2;
        qm[3][3] = q * d2;
        let fp = mat_mul(&f, &self.cov);
        let fpf = mat_mul(&fp, &transpose(&f));
        for i in 0..4 {
            for j in 0..4 {
                self.cov[i][j] = fpf[i][j] + qm[i][j];
            }
        }
    }

    pub fn update(&mut self, z: [f64; 2]) {
        // S = HPH' + R (2x2), H = position selector.
        let s00 = self.cov[0][0] + self.meas_var;
        let s01 = self.cov[0][1];
        let s10 = self.cov[1][0];
        let s11 = self.cov[1][1] + self.meas_var;
        let det = s00 * s11 - s01 * s10;
        let (i00, i01, i10, i11) = (s11 / det, -s01 / det, -s10 / det, s00 / det);
        // K = P H' S^{-1} (4x2).
        let mut k = [[0.0; 2]; 4];
        for r in 0..4 {
            let ph0 = self.cov[r][0];
            let ph1 = self.cov[r][1];
            k[r][0] = ph0 * i00 + ph1 * i10;
            k[r][1] = ph0 * i01 + ph1 * i11;
        }
        let innov = [z[0] - self.mean[0], z[1] - self.mean[1]];
        for r in 0..4 {
            self.mean[r] += k[r][0] * innov[0] + k[r][1] * innov[1];
        }
        // P = (I - KH) P.
        let mut ikh = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                ikh[r][c] = if r == c { 1.0 } else { 0.0 };
            }
            ikh[r][0] -= k[r][0];
            ikh[r][1] -= k[r][1];
        }
        self.cov = mat_mul(&ikh, &self.cov);
    }
}

/// Exhaustive optimal SSE 2-partition of 1-dim values: every contiguous
/// split of the sorted values, means and SSE computed by direct loops.
pub fn optimal_two_partition_sse(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut best = f64::INFINITY;
    for split in 1..n {
        let (left, right) = sorted.split_at(split);
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let sse = |xs: &[f64]| {
            let m = mean(xs);
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        };
        let total = sse(left) + sse(right);
        if total < best {
            best = total;
        }
    }
    best
}
