use std::ops::Range;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::cscan::{CScan, Trace};
use crate::error::{Error, Result};

/// Lower bound on `(min diag / max diag)^2` of the Cholesky factor below
/// which an unregularized normal matrix is treated as singular.
const MIN_RCOND: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerParams {
    /// Number of FIR taps. Taps are centered: lags run from
    /// `-(filter_len / 2)` to `filter_len - 1 - filter_len / 2`.
    pub filter_len: usize,
    /// Ridge weight, scaled by `trace(R) / filter_len`.
    pub ridge: f64,
}

impl Default for WienerParams {
    fn default() -> Self {
        WienerParams {
            filter_len: 16,
            ridge: 1e-6,
        }
    }
}

impl WienerParams {
    fn lead(&self) -> usize {
        self.filter_len / 2
    }

    /// Signed sample lag applied by tap `j`.
    pub fn lag(&self, j: usize) -> isize {
        j as isize - self.lead() as isize
    }
}

/// Least-squares FIR fit of one reference against arbitrary traces.
///
/// The normal matrix depends only on the reference, so it is factored once
/// and reused for every trace.
#[derive(Debug, Clone)]
pub struct WienerFit {
    params: WienerParams,
    reference: Vec<f64>,
    region: Range<usize>,
    chol: Cholesky<f64, Dyn>,
}

impl WienerFit {
    pub fn new(reference: &Trace, params: WienerParams) -> Result<Self> {
        let t_len = reference.len();
        let taps = params.filter_len;
        if taps == 0 || taps > t_len {
            return Err(Error::InvalidParameter(format!(
                "filter length must be in 1..={t_len}, got {taps}"
            )));
        }
        if !(params.ridge.is_finite() && params.ridge >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ridge must be >= 0, got {}",
                params.ridge
            )));
        }
        if reference.energy() <= 0.0 {
            return Err(Error::DegenerateReference);
        }

        let lead = params.lead();
        // every tap sees valid reference samples inside this window
        let region = (taps - 1 - lead)..(t_len - lead);
        let r = reference.samples();

        let mut normal = DMatrix::<f64>::zeros(taps, taps);
        for i in 0..taps {
            for j in 0..=i {
                let (li, lj) = (params.lag(i), params.lag(j));
                let v: f64 = region
                    .clone()
                    .map(|n| r[(n as isize - li) as usize] * r[(n as isize - lj) as usize])
                    .sum();
                normal[(i, j)] = v;
                normal[(j, i)] = v;
            }
        }
        let load = params.ridge * normal.trace() / taps as f64;
        for i in 0..taps {
            normal[(i, i)] += load;
        }

        let chol = Cholesky::new(normal).ok_or_else(|| {
            Error::Numerical(if params.ridge == 0.0 {
                "Wiener normal matrix is singular; use a ridge > 0".to_string()
            } else {
                "Wiener normal matrix is not positive definite".to_string()
            })
        })?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = (diag.min(), diag.max());
        if params.ridge == 0.0 && (lo / hi).powi(2) < MIN_RCOND {
            return Err(Error::Numerical(
                "Wiener normal matrix is ill-conditioned; use a ridge > 0".into(),
            ));
        }

        Ok(WienerFit {
            params,
            reference: r.to_vec(),
            region,
            chol,
        })
    }

    pub fn params(&self) -> WienerParams {
        self.params
    }

    /// Sample indices over which the squared residual is minimized.
    pub fn region(&self) -> Range<usize> {
        self.region.clone()
    }

    /// Reference delayed by the lag of tap `j`, zero outside the trace.
    fn shifted(&self, n: usize, j: usize) -> f64 {
        let idx = n as isize - self.params.lag(j);
        if idx < 0 || idx as usize >= self.reference.len() {
            0.0
        } else {
            self.reference[idx as usize]
        }
    }

    pub fn taps(&self, d: &[f64]) -> Result<Vec<f64>> {
        if d.len() != self.reference.len() {
            return Err(Error::Dimension(format!(
                "trace has {} samples, reference has {}",
                d.len(),
                self.reference.len()
            )));
        }
        let taps = self.params.filter_len;
        let p = DVector::from_fn(taps, |j, _| {
            self.region.clone().map(|n| d[n] * self.shifted(n, j)).sum()
        });
        Ok(self.chol.solve(&p).iter().copied().collect())
    }

    /// The fitted reference `w * r` over the whole trace.
    pub fn filtered_reference(&self, w: &[f64]) -> Vec<f64> {
        (0..self.reference.len())
            .map(|n| {
                w.iter()
                    .enumerate()
                    .map(|(j, wj)| wj * self.shifted(n, j))
                    .sum()
            })
            .collect()
    }

    /// `d - w * r` with `w` fitted to `d`.
    pub fn residual(&self, d: &[f64]) -> Result<Vec<f64>> {
        let w = self.taps(d)?;
        Ok(d.iter()
            .zip(self.filtered_reference(&w))
            .map(|(x, y)| x - y)
            .collect())
    }
}

/// Subtracts from every trace the FIR-filtered reference that best matches
/// it in the least-squares sense.
pub fn wiener_cancel(c: &CScan, reference: &Trace, p: WienerParams) -> Result<CScan> {
    if reference.len() != c.trace_len() {
        return Err(Error::Dimension(format!(
            "reference has {} samples, traces have {}",
            reference.len(),
            c.trace_len()
        )));
    }
    let fit = WienerFit::new(reference, p)?;
    c.try_map(|_, _, t| fit.residual(t.samples()))
}
