use rayon::prelude::*;

use super::peaks::{adaptive_gate_from_peaks, fallback_gate, PeakParams};
use super::wiener::{wiener_cancel, WienerParams};
use super::{apply_gate, GateWindow};
use crate::cscan::{mean_trace, CScan};
use crate::error::Result;
use crate::imaging::{asf_fast, AsfImage};

/// Primary-detection threshold used when none is given: two standard
/// deviations below the image mean.
pub fn asf_default_threshold(a: &AsfImage) -> f64 {
    a.mean() - 2.0 * a.std()
}

#[derive(Debug, Clone)]
pub struct CombinedOutput {
    /// Original traces with their per-position gate applied.
    pub gated: CScan,
    /// Row-major gate windows, one per position.
    pub windows: Vec<GateWindow>,
    /// ASF of the Wiener residue.
    pub primary_asf: AsfImage,
    /// Threshold the primary ASF was compared against.
    pub threshold: f64,
    /// Row-major candidate-target flags (`primary_asf < threshold`).
    pub flagged: Vec<bool>,
}

impl CombinedOutput {
    pub fn window(&self, m: usize, n: usize) -> GateWindow {
        self.windows[m * self.gated.cols() + n]
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }
}

/// Wiener pre-detection followed by per-position time gating.
///
/// 1. reference = grid-average trace
/// 2. Wiener residue of every trace against the reference
/// 3. ASF of the residue
/// 4. positions with ASF below `asf_threshold` are candidate targets
/// 5. candidates get the peak-midpoint gate of their original trace, all
///    other positions the fallback gate
pub fn combined_wiener_gate(
    c: &CScan,
    p: WienerParams,
    pp: PeakParams,
    asf_threshold: Option<f64>,
) -> Result<CombinedOutput> {
    pp.validate()?;
    let reference = mean_trace(c);
    let residue = wiener_cancel(c, &reference, p)?;
    let primary_asf = asf_fast(&residue)?;
    let threshold = asf_threshold.unwrap_or_else(|| asf_default_threshold(&primary_asf));
    let flagged: Vec<bool> = primary_asf
        .values()
        .iter()
        .map(|&v| v < threshold)
        .collect();

    let cols = c.cols();
    let windows = c
        .traces()
        .par_iter()
        .zip(flagged.par_iter())
        .enumerate()
        .map(|(i, (t, &flag))| {
            let w = if flag {
                adaptive_gate_from_peaks(t, &pp)
            } else {
                fallback_gate(t, &pp)
            };
            w.map_err(|e| e.at_position(i / cols, i % cols))
        })
        .collect::<Result<Vec<_>>>()?;

    let gated = c.try_map(|m, n, t| {
        let mut s = t.samples().to_vec();
        apply_gate(&mut s, windows[m * cols + n].end_index);
        Ok(s)
    })?;

    Ok(CombinedOutput {
        gated,
        windows,
        primary_asf,
        threshold,
        flagged,
    })
}
