//! Shared fixtures and independent reference implementations.

#![allow(dead_code, clippy::needless_range_loop)]

use gpr_clutter::cscan::ScanMeta;
use gpr_clutter::CScan;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn meta() -> ScanMeta {
    ScanMeta {
        dx: 0.02,
        dy: 0.02,
        epsilon_r: 4.0,
        bandwidth_hz: 8e9,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_cscan(rows: usize, cols: usize, t_len: usize, seed: u64) -> CScan {
    let mut r = rng(seed);
    let s = random_vec(&mut r, rows * cols * t_len);
    CScan::from_samples(rows, cols, t_len, 5e-12, &s, meta()).unwrap()
}

/// Sample-wise grid mean by an explicit double loop over (m, n).
pub fn brute_mean(c: &CScan) -> Vec<f64> {
    let mut out = vec![0.0; c.trace_len()];
    for m in 0..c.rows() {
        for n in 0..c.cols() {
            for (o, s) in out.iter_mut().zip(c.trace(m, n).samples()) {
                *o += s;
            }
        }
    }
    let count = (c.rows() * c.cols()) as f64;
    out.iter().map(|v| v / count).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Thin SVD of a matrix given as columns, by one-sided Jacobi rotations.
///
/// Returns `(sigma, u, v)` sorted by descending singular value, where
/// `u[k]` has the column length and `v[k]` has one entry per column.
pub fn jacobi_svd(columns: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = columns.len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat[p].len() {
                        let (x, y) = (mat[p][i], mat[q][i]);
                        mat[p][i] = c * x - s * y;
                        mat[q][i] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    let sig: Vec<f64> = a.iter().map(|col| norm(col)).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]));
    let sigma = order.iter().map(|&i| sig[i]).collect();
    let u = order
        .iter()
        .map(|&i| {
            a[i].iter()
                .map(|x| x / sig[i].max(f64::MIN_POSITIVE))
                .collect()
        })
        .collect();
    let vv = order.iter().map(|&i| v[i].clone()).collect();
    (sigma, u, vv)
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Grid position (m, n) nearest to a point in meters.
pub fn nearest_cell(x: f64, y: f64, dx: f64, dy: f64) -> (usize, usize) {
    ((y / dy).round() as usize, (x / dx).round() as usize)
}

/// Chebyshev distance in cells between two grid positions.
pub fn cell_distance(a: (usize, usize), b: (usize, usize)) -> usize {
    a.0.abs_diff(b.0).max(a.1.abs_diff(b.1))
}
