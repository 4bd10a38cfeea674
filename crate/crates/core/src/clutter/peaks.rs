use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{GateSource, GateWindow};
use crate::cscan::{CScan, Trace};
use crate::error::{Error, Result};
use crate::synth::pulse_sigma;

/// How the envelope used for peak picking is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// `|x|` smoothed by a centered moving average of `window` samples.
    RectifiedMovingAverage { window: usize },
    /// Magnitude of the analytic signal (FFT Hilbert transform, 2x zero pad).
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    /// A second peak must reach this fraction of the ground-peak envelope.
    pub second_peak_ratio: f64,
    /// Samples after the ground peak in which no second peak is accepted.
    pub min_peak_gap: usize,
    /// Window length past the ground peak when no second peak is found.
    pub fallback_extent: usize,
    pub envelope: EnvelopeKind,
}

/// Envelope full width at half maximum of the simulated pulse, in samples.
pub fn pulse_width_samples(bandwidth_hz: f64, dt: f64) -> usize {
    let fwhm = 2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * pulse_sigma(bandwidth_hz);
    ((fwhm / dt).round() as usize).max(1)
}

impl PeakParams {
    /// Defaults scaled to the pulse: gap of one pulse width, fallback of two,
    /// smoothing over one.
    pub fn for_pulse(bandwidth_hz: f64, dt: f64) -> Self {
        let width = pulse_width_samples(bandwidth_hz, dt);
        PeakParams {
            second_peak_ratio: 0.15,
            min_peak_gap: width,
            fallback_extent: 2 * width,
            envelope: EnvelopeKind::RectifiedMovingAverage { window: width },
        }
    }

    pub fn for_scan(c: &CScan) -> Self {
        Self::for_pulse(c.bandwidth_hz(), c.dt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.second_peak_ratio > 0.0 && self.second_peak_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "second peak ratio must be in (0, 1), got {}",
                self.second_peak_ratio
            )));
        }
        if self.min_peak_gap == 0 || self.fallback_extent == 0 {
            return Err(Error::InvalidParameter(
                "peak gap and fallback extent must be >= 1".into(),
            ));
        }
        if let EnvelopeKind::RectifiedMovingAverage { window: 0 } = self.envelope {
            return Err(Error::InvalidParameter(
                "smoothing window must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn moving_average_envelope(x: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let half = window / 2;
    let len = x.len();
    (0..len)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(len);
            x[lo..hi].iter().map(|v| v.abs()).sum::<f64>() / window as f64
        })
        .collect()
}

pub fn analytic_envelope(x: &[f64]) -> Vec<f64> {
    let len = x.len();
    let nfft = 2 * len;
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(nfft).process(&mut buf);
    // keep DC and Nyquist, double positive, drop negative frequencies
    for (k, b) in buf.iter_mut().enumerate() {
        if k == 0 || k == nfft / 2 {
            continue;
        }
        if k < nfft / 2 {
            *b *= 2.0;
        } else {
            *b = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(nfft).process(&mut buf);
    buf[..len].iter().map(|c| c.norm() / nfft as f64).collect()
}

pub fn envelope(x: &[f64], kind: EnvelopeKind) -> Vec<f64> {
    match kind {
        EnvelopeKind::RectifiedMovingAverage { window } => moving_average_envelope(x, window),
        EnvelopeKind::Analytic => analytic_envelope(x),
    }
}

fn first_argmax(e: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in e.iter().enumerate() {
        if *v > e[best] {
            best = i;
        }
    }
    best
}

fn ground_index(t: &Trace, pp: &PeakParams) -> Result<(usize, Vec<f64>)> {
    pp.validate()?;
    if t.energy() <= 0.0 {
        return Err(Error::DegenerateTrace { position: None });
    }
    let e = envelope(t.samples(), pp.envelope);
    Ok((first_argmax(&e), e))
}

fn fallback_window(i1: usize, len: usize, pp: &PeakParams) -> GateWindow {
    GateWindow {
        end_index: (i1 + pp.fallback_extent).min(len),
        source: GateSource::Fallback,
    }
}

/// Window that removes the ground peak plus `fallback_extent` samples.
pub fn fallback_gate(t: &Trace, pp: &PeakParams) -> Result<GateWindow> {
    let (i1, _) = ground_index(t, pp)?;
    Ok(fallback_window(i1, t.len(), pp))
}

/// Gate ending midway between the ground peak and the next envelope peak.
///
/// The ground peak is the global envelope maximum `i1`. The second peak is
/// the first local maximum after `i1 + min_peak_gap` reaching
/// `second_peak_ratio` of the ground peak. Without one, the fallback window
/// `i1 + fallback_extent` is returned.
pub fn adaptive_gate_from_peaks(t: &Trace, pp: &PeakParams) -> Result<GateWindow> {
    let (i1, e) = ground_index(t, pp)?;
    let floor = pp.second_peak_ratio * e[i1];
    let start = i1 + pp.min_peak_gap + 1;
    let second = (start.max(1)..e.len().saturating_sub(1))
        .find(|&i| e[i] >= e[i - 1] && e[i] > e[i + 1] && e[i] >= floor);

    Ok(match second {
        Some(i2) => GateWindow {
            end_index: (i1 + i2) / 2,
            source: GateSource::AdaptiveMidpoint,
        },
        None => fallback_window(i1, t.len(), pp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(len: usize, centers: &[(usize, f64)]) -> Vec<f64> {
        (0..len)
            .map(|i| {
                centers
                    .iter()
                    .map(|&(c, a)| a * (-0.5 * ((i as f64 - c as f64) / 4.0).powi(2)).exp())
                    .sum()
            })
            .collect()
    }

    fn params() -> PeakParams {
        PeakParams {
            second_peak_ratio: 0.15,
            min_peak_gap: 20,
            fallback_extent: 40,
            envelope: EnvelopeKind::RectifiedMovingAverage { window: 1 },
        }
    }

    #[test]
    fn midpoint_between_peaks() {
        let t = Trace::new(bump(400, &[(100, 1.0), (200, 0.4)]), 1.0).unwrap();
        let w = adaptive_gate_from_peaks(&t, &params()).unwrap();
        assert_eq!(w.end_index, 150);
        assert_eq!(w.source, GateSource::AdaptiveMidpoint);
    }

    #[test]
    fn weak_second_peak_falls_back() {
        let t = Trace::new(bump(400, &[(100, 1.0), (200, 0.1)]), 1.0).unwrap();
        let w = adaptive_gate_from_peaks(&t, &params()).unwrap();
        assert_eq!(w.end_index, 140);
        assert_eq!(w.source, GateSource::Fallback);
    }

    #[test]
    fn fallback_clamped_to_trace() {
        let t = Trace::new(bump(120, &[(100, 1.0)]), 1.0).unwrap();
        let w = adaptive_gate_from_peaks(&t, &params()).unwrap();
        assert_eq!(w.end_index, 120);
    }

    #[test]
    fn zero_trace_is_degenerate() {
        let t = Trace::new(vec![0.0; 64], 1.0).unwrap();
        assert!(matches!(
            adaptive_gate_from_peaks(&t, &params()),
            Err(Error::DegenerateTrace { .. })
        ));
    }

    #[test]
    fn moving_average_window() {
        let e = moving_average_envelope(&[0.0, -3.0, 0.0, 3.0, 0.0], 3);
        assert_eq!(e, vec![1.0, 1.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn analytic_envelope_of_narrowband_pulse() {
        // slowly varying envelope on a fast carrier: |analytic| ~ envelope
        let env: Vec<f64> = (0..512)
            .map(|i| (-0.5 * ((i as f64 - 256.0) / 40.0).powi(2)).exp())
            .collect();
        let x: Vec<f64> = env
            .iter()
            .enumerate()
            .map(|(i, e)| e * (2.0 * std::f64::consts::PI * 0.2 * i as f64).cos())
            .collect();
        let a = analytic_envelope(&x);
        for i in 100..412 {
            assert!((a[i] - env[i]).abs() < 1e-3, "{i}: {} vs {}", a[i], env[i]);
        }
    }

    #[test]
    fn default_widths_for_8ghz() {
        assert_eq!(pulse_width_samples(8e9, 5e-12), 19);
        let p = PeakParams::for_pulse(8e9, 5e-12);
        assert_eq!((p.min_peak_gap, p.fallback_extent), (19, 38));
    }
}
