//! Average similarity function (ASF) imaging.
//!
//! Every trace is first scaled to unit energy; the correlation of two
//! traces is then the plain inner product of their normalized samples. Under
//! that convention the grid-average of all pairwise correlations at a
//! position equals the inner product of the position's normalized trace with
//! the average normalized trace, which is what [`asf_fast`] computes.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::cscan::{dot, unit_energy, CScan, CompensatedSum, Trace};
use crate::error::{Error, Result};

/// Per-position similarity map, row-major, values in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsfImage {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    pub dx: f64,
    pub dy: f64,
}

impl AsfImage {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, dx: f64, dy: f64) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} image needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("image contains non-finite values".into()));
        }
        Ok(AsfImage {
            rows,
            cols,
            values,
            dx,
            dy,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m * self.cols + n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Row-major sequential mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let mean = self.mean();
        let var =
            self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64;
        var.sqrt()
    }

    /// Position of the smallest value (first in row-major order on ties).
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[best] {
                best = i;
            }
        }
        (best / self.cols, best % self.cols)
    }
}

/// Correlation of two traces after scaling both to unit energy.
pub fn corr(q: &Trace, k: &Trace) -> Result<f64> {
    if q.len() != k.len() {
        return Err(Error::Dimension(format!(
            "traces have {} and {} samples",
            q.len(),
            k.len()
        )));
    }
    Ok(dot(&unit_energy(q.samples())?, &unit_energy(k.samples())?))
}

/// The same correlation evaluated as `Re(sum Q_k conj(K_k)) / T` over the
/// DFTs of the normalized traces.
pub fn corr_spectral(q: &Trace, k: &Trace) -> Result<f64> {
    if q.len() != k.len() {
        return Err(Error::Dimension(format!(
            "traces have {} and {} samples",
            q.len(),
            k.len()
        )));
    }
    let len = q.len();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let spectrum = |x: Vec<f64>| {
        let mut buf: Vec<Complex<f64>> = x.into_iter().map(|v| Complex::new(v, 0.0)).collect();
        fft.process(&mut buf);
        buf
    };
    let a = spectrum(unit_energy(q.samples())?);
    let b = spectrum(unit_energy(k.samples())?);
    let s: Complex<f64> = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
    Ok(s.re / len as f64)
}

fn normalized_traces(c: &CScan) -> Result<Vec<Vec<f64>>> {
    let cols = c.cols();
    c.traces()
        .par_iter()
        .enumerate()
        .map(|(i, t)| unit_energy(t.samples()).map_err(|e| e.at_position(i / cols, i % cols)))
        .collect()
}

fn image_from(c: &CScan, values: Vec<f64>) -> Result<AsfImage> {
    AsfImage::new(c.rows(), c.cols(), values, c.dx(), c.dy())
}

/// Grid-average of the correlation of each trace with every trace.
///
/// Quadratic in the number of traces; use [`asf_fast`] for real scans.
pub fn asf_full(c: &CScan) -> Result<AsfImage> {
    let unit = normalized_traces(c)?;
    let count = unit.len() as f64;
    let values = unit
        .par_iter()
        .map(|x| unit.iter().map(|y| dot(y, x)).sum::<f64>() / count)
        .collect();
    image_from(c, values)
}

/// Correlation of each normalized trace with the average normalized trace.
pub fn asf_fast(c: &CScan) -> Result<AsfImage> {
    let unit = normalized_traces(c)?;
    let mut acc = CompensatedSum::new(c.trace_len());
    for x in &unit {
        acc.add(x);
    }
    let avg = acc.mean();
    let values = unit.par_iter().map(|x| dot(&avg, x)).collect();
    image_from(c, values)
}

/// Affine map of the image onto `[0, 1]`; a constant image maps to 0.5.
pub fn image_minmax_scale(a: &AsfImage) -> Vec<f64> {
    let (lo, hi) = (a.min(), a.max());
    if hi <= lo {
        return vec![0.5; a.values.len()];
    }
    let span = hi - lo;
    a.values
        .iter()
        .map(|&v| {
            if v == lo {
                0.0
            } else if v == hi {
                1.0
            } else {
                ((v - lo) / span).clamp(0.0, 1.0)
            }
        })
        .collect()
}
