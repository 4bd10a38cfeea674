use nalgebra::{DMatrix, SVD};
use rayon::prelude::*;

use crate::cscan::{CScan, Trace};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Removes the `v` largest singular components of every line scan.
///
/// Line `m` is the `T x N` matrix whose columns are the traces
/// `(m, 0) .. (m, N-1)`; its left singular vectors are temporal signatures.
pub fn svd_remove(c: &CScan, v: usize) -> Result<CScan> {
    let (t_len, cols) = (c.trace_len(), c.cols());
    if v > cols.min(t_len) {
        return Err(Error::InvalidParameter(format!(
            "cannot remove {v} singular components from a {t_len}x{cols} line"
        )));
    }
    if v == 0 {
        return Ok(c.clone());
    }

    let lines = (0..c.rows())
        .into_par_iter()
        .map(|m| remove_line(c, m, v))
        .collect::<Result<Vec<_>>>()?;

    let traces = lines.into_iter().flatten().collect();
    CScan::new(c.rows(), cols, traces, c.meta())
}

fn remove_line(c: &CScan, m: usize, v: usize) -> Result<Vec<Trace>> {
    let (t_len, cols) = (c.trace_len(), c.cols());
    let x = DMatrix::from_fn(t_len, cols, |i, j| c.trace(m, j).samples()[i]);

    let svd = SVD::try_new(x.clone(), true, true, f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical(format!("SVD of line {m} did not converge")))?;
    let (u, vt) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => {
            return Err(Error::Numerical(format!(
                "SVD of line {m} returned no vectors"
            )))
        }
    };

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });

    let mut residual = x;
    for &k in order.iter().take(v) {
        let sigma = svd.singular_values[k];
        let uk = u.column(k);
        let vk = vt.row(k);
        residual -= (uk * vk) * sigma;
    }

    (0..cols)
        .map(|j| {
            let samples: Vec<f64> = residual.column(j).iter().copied().collect();
            c.trace(m, j).with_samples(samples)
        })
        .collect()
}
