//! Ground-clutter cancellation.
//!
//! Five methods over a [`CScan`]:
//!
//! * [`mean_subtract`] removes the grid-average trace from every trace.
//! * [`svd_remove`] drops the leading singular components of each line scan.
//! * [`fixed_gate`] zeroes one early-time window in every trace.
//! * [`wiener_cancel`] subtracts a per-trace least-squares FIR fit of a
//!   reference (normally the grid-average trace).
//! * [`combined_wiener_gate`] uses the Wiener residue to pre-detect target
//!   positions, then gates each original trace with a window ending midway
//!   between the ground peak and the next echo.

mod combined;
mod peaks;
mod svd;
mod wiener;

pub use combined::{asf_default_threshold, combined_wiener_gate, CombinedOutput};
pub use peaks::{
    adaptive_gate_from_peaks, analytic_envelope, envelope, fallback_gate, moving_average_envelope,
    pulse_width_samples, EnvelopeKind, PeakParams,
};
pub use svd::svd_remove;
pub use wiener::{wiener_cancel, WienerFit, WienerParams};

use std::fmt;
use std::str::FromStr;

use crate::cscan::{mean_trace, CScan};
use crate::error::{Error, Result};

/// How a gate window was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateSource {
    Fixed,
    AdaptiveMidpoint,
    Fallback,
}

impl GateSource {
    pub fn as_str(self) -> &'static str {
        match self {
            GateSource::Fixed => "fixed",
            GateSource::AdaptiveMidpoint => "adaptive-midpoint",
            GateSource::Fallback => "fallback",
        }
    }
}

impl fmt::Display for GateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(GateSource::Fixed),
            "adaptive-midpoint" => Ok(GateSource::AdaptiveMidpoint),
            "fallback" => Ok(GateSource::Fallback),
            other => Err(Error::InvalidParameter(format!(
                "unknown gate source `{other}`"
            ))),
        }
    }
}

/// Samples `[0, end_index)` are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateWindow {
    pub end_index: usize,
    pub source: GateSource,
}

impl GateWindow {
    pub fn fixed(end_index: usize) -> Self {
        GateWindow {
            end_index,
            source: GateSource::Fixed,
        }
    }
}

/// Subtracts the grid-average trace from every trace.
pub fn mean_subtract(c: &CScan) -> Result<CScan> {
    let mean = mean_trace(c);
    let mean = mean.samples();
    c.try_map(|_, _, t| Ok(t.samples().iter().zip(mean).map(|(x, m)| x - m).collect()))
}

/// Zeroes samples `[0, end_index)` of a sample buffer in place.
pub(crate) fn apply_gate(samples: &mut [f64], end_index: usize) {
    let end = end_index.min(samples.len());
    samples[..end].iter_mut().for_each(|s| *s = 0.0);
}

/// Zeroes the same early-time window in every trace.
pub fn fixed_gate(c: &CScan, w: GateWindow) -> Result<CScan> {
    if w.end_index > c.trace_len() {
        return Err(Error::InvalidParameter(format!(
            "gate end {} exceeds trace length {}",
            w.end_index,
            c.trace_len()
        )));
    }
    c.try_map(|_, _, t| {
        let mut s = t.samples().to_vec();
        apply_gate(&mut s, w.end_index);
        Ok(s)
    })
}

/// The global gate used when no explicit window is given: the fallback
/// window of the grid-average trace.
pub fn default_fixed_window(c: &CScan, pp: &PeakParams) -> Result<GateWindow> {
    let w = fallback_gate(&mean_trace(c), pp)?;
    Ok(GateWindow::fixed(w.end_index))
}
