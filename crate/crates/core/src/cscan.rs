//! A-scan traces, C-scan volumes and the CSCN binary container.
//!
//! A [`CScan`] is an `rows × cols` grid of [`Trace`]s stored row-major: the
//! row index `m` runs along y and the column index `n` along x. All traces
//! share the same length and sample interval.
//!
//! # Container layout
//!
//! Little-endian throughout:
//!
//! ```text
//! "CSCN"            4 bytes magic
//! version           u32 = 1
//! M, N, T           u32 each
//! dt, dx, dy        f64 each (seconds, meters, meters)
//! epsilon_r         f64
//! bandwidth_hz      f64
//! samples           M*N*T f32, row-major grid, samples contiguous per trace
//! ```
//!
//! Samples are stored as 32-bit floats; in-memory arithmetic is 64-bit, so a
//! save quantizes samples to the nearest `f32`.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CSCN";
pub const VERSION: u32 = 1;
/// Size of the fixed container header in bytes.
pub const HEADER_LEN: usize = 4 + 4 * 4 + 5 * 8;

/// One time-domain A-scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<f64>,
    dt: f64,
}

impl Trace {
    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "trace needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample interval must be positive, got {dt}"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Data(format!("non-finite sample at index {i}")));
        }
        Ok(Trace { samples, dt })
    }

    /// Builds a trace that is known to satisfy the invariants.
    pub(crate) fn from_parts(samples: Vec<f64>, dt: f64) -> Self {
        debug_assert!(samples.len() >= 2 && dt > 0.0);
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Trace { samples, dt }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    /// Returns a trace with the same sample interval and new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Trace> {
        if samples.len() != self.samples.len() {
            return Err(Error::Dimension(format!(
                "expected {} samples, got {}",
                self.samples.len(),
                samples.len()
            )));
        }
        Trace::new(samples, self.dt)
    }

    pub fn scaled(&self, factor: f64) -> Result<Trace> {
        self.with_samples(self.samples.iter().map(|s| s * factor).collect())
    }
}

pub(crate) fn energy(samples: &[f64]) -> f64 {
    samples.iter().map(|s| s * s).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales a trace to unit energy. Zero-energy traces are an error.
pub fn normalize_trace(t: &Trace) -> Result<Trace> {
    Ok(Trace::from_parts(unit_energy(t.samples())?, t.dt()))
}

pub(crate) fn unit_energy(samples: &[f64]) -> Result<Vec<f64>> {
    let e = energy(samples);
    if e <= 0.0 || !e.is_finite() {
        return Err(Error::DegenerateTrace { position: None });
    }
    let norm = e.sqrt();
    Ok(samples.iter().map(|s| s / norm).collect())
}

/// Acquisition metadata shared by every trace of a C-scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMeta {
    /// Meters per step along x (columns).
    pub dx: f64,
    /// Meters per step along y (rows).
    pub dy: f64,
    pub epsilon_r: f64,
    pub bandwidth_hz: f64,
}

impl ScanMeta {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.dx) || !positive(self.dy) {
            return Err(Error::InvalidParameter(format!(
                "scan steps must be positive, got dx={} dy={}",
                self.dx, self.dy
            )));
        }
        if !(self.epsilon_r.is_finite() && self.epsilon_r >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relative permittivity must be >= 1, got {}",
                self.epsilon_r
            )));
        }
        if !positive(self.bandwidth_hz) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        Ok(())
    }
}

/// A row-major grid of traces with shared length and sample interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CScan {
    rows: usize,
    cols: usize,
    traces: Vec<Trace>,
    meta: ScanMeta,
}

impl CScan {
    pub fn new(rows: usize, cols: usize, traces: Vec<Trace>, meta: ScanMeta) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid must be non-empty, got {rows}x{cols}"
            )));
        }
        if traces.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} grid needs {} traces, got {}",
                rows * cols,
                traces.len()
            )));
        }
        meta.validate()?;
        let (len, dt) = (traces[0].len(), traces[0].dt());
        for (i, t) in traces.iter().enumerate() {
            if t.len() != len || t.dt() != dt {
                return Err(Error::Dimension(format!(
                    "trace at ({}, {}) has {} samples / dt {} but trace (0, 0) has {} / {}",
                    i / cols,
                    i % cols,
                    t.len(),
                    t.dt(),
                    len,
                    dt
                )));
            }
        }
        Ok(CScan {
            rows,
            cols,
            traces,
            meta,
        })
    }

    /// Builds a C-scan from one flat row-major sample buffer.
    pub fn from_samples(
        rows: usize,
        cols: usize,
        trace_len: usize,
        dt: f64,
        samples: &[f64],
        meta: ScanMeta,
    ) -> Result<Self> {
        if trace_len == 0 || samples.len() != rows * cols * trace_len {
            return Err(Error::Dimension(format!(
                "{rows}x{cols}x{trace_len} grid needs {} samples, got {}",
                rows * cols * trace_len,
                samples.len()
            )));
        }
        let traces = samples
            .chunks_exact(trace_len)
            .map(|c| Trace::new(c.to_vec(), dt))
            .collect::<Result<Vec<_>>>()?;
        CScan::new(rows, cols, traces, meta)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn trace_len(&self) -> usize {
        self.traces[0].len()
    }

    pub fn dt(&self) -> f64 {
        self.traces[0].dt()
    }

    pub fn meta(&self) -> ScanMeta {
        self.meta
    }

    pub fn dx(&self) -> f64 {
        self.meta.dx
    }

    pub fn dy(&self) -> f64 {
        self.meta.dy
    }

    pub fn epsilon_r(&self) -> f64 {
        self.meta.epsilon_r
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.meta.bandwidth_hz
    }

    pub fn trace(&self, m: usize, n: usize) -> &Trace {
        assert!(m < self.rows && n < self.cols, "grid index out of range");
        &self.traces[m * self.cols + n]
    }

    /// Traces in row-major order.
    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    /// Iterates `(m, n, trace)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Trace)> {
        let cols = self.cols;
        self.traces
            .iter()
            .enumerate()
            .map(move |(i, t)| (i / cols, i % cols, t))
    }

    pub fn total_energy(&self) -> f64 {
        self.traces.iter().map(Trace::energy).sum()
    }

    /// Applies `f` to every trace (in parallel) and reassembles the grid in
    /// row-major order. The result does not depend on the thread count.
    pub fn try_map<F>(&self, f: F) -> Result<CScan>
    where
        F: Fn(usize, usize, &Trace) -> Result<Vec<f64>> + Sync,
    {
        let cols = self.cols;
        let traces = self
            .traces
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let samples = f(i / cols, i % cols, t)?;
                t.with_samples(samples)
                    .map_err(|e| e.at_position(i / cols, i % cols))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CScan {
            rows: self.rows,
            cols: self.cols,
            traces,
            meta: self.meta,
        })
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<CScan> {
        self.try_map(|_, _, t| Ok(t.samples().iter().map(|s| s * factor).collect()))
    }
}

/// Neumaier-compensated running sum of equal-length vectors.
pub(crate) struct CompensatedSum {
    sum: Vec<f64>,
    carry: Vec<f64>,
    count: usize,
}

impl CompensatedSum {
    pub(crate) fn new(len: usize) -> Self {
        CompensatedSum {
            sum: vec![0.0; len],
            carry: vec![0.0; len],
            count: 0,
        }
    }

    pub(crate) fn add(&mut self, x: &[f64]) {
        for ((s, c), &v) in self.sum.iter_mut().zip(self.carry.iter_mut()).zip(x) {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
        self.count += 1;
    }

    /// Mean with the division corrected by the exact remainder, so the
    /// mean of identical vectors reproduces them exactly.
    pub(crate) fn mean(&self) -> Vec<f64> {
        let k = self.count as f64;
        self.sum
            .iter()
            .zip(&self.carry)
            .map(|(&s, &c)| {
                let q = s / k;
                let rem = (-q).mul_add(k, s);
                q + (rem + c) / k
            })
            .collect()
    }
}

/// Sample-wise mean over all traces.
///
/// Traces are accumulated sequentially in row-major order with a
/// compensated (extended precision) sum, so the result is reproducible and
/// independent of how the grid was produced.
pub fn mean_trace(c: &CScan) -> Trace {
    let mut acc = CompensatedSum::new(c.trace_len());
    for t in c.traces() {
        acc.add(t.samples());
    }
    Trace::from_parts(acc.mean(), c.dt())
}

/// Serializes a C-scan into the CSCN container.
///
/// Fails only when a sample does not fit in an `f32`.
pub fn save_cscan(c: &CScan) -> Result<Vec<u8>> {
    let total = c.rows * c.cols * c.trace_len();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * total);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for dim in [c.rows, c.cols, c.trace_len()] {
        let dim =
            u32::try_from(dim).map_err(|_| Error::Data(format!("dimension {dim} exceeds u32")))?;
        out.extend_from_slice(&dim.to_le_bytes());
    }
    for v in [
        c.dt(),
        c.meta.dx,
        c.meta.dy,
        c.meta.epsilon_r,
        c.meta.bandwidth_hz,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for (m, n, t) in c.iter() {
        for &s in t.samples() {
            let q = s as f32;
            if !q.is_finite() {
                return Err(Error::Data(format!(
                    "sample {s} at ({m}, {n}) does not fit in f32"
                )));
            }
            out.extend_from_slice(&q.to_le_bytes());
        }
    }
    Ok(out)
}

/// Parses a CSCN container.
pub fn load_cscan(bytes: &[u8]) -> Result<CScan> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing CSCN magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());

    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let (rows, cols, len) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
    let dt = f64_at(20);
    let meta = ScanMeta {
        dx: f64_at(28),
        dy: f64_at(36),
        epsilon_r: f64_at(44),
        bandwidth_hz: f64_at(52),
    };

    let expected = rows
        .checked_mul(cols)
        .and_then(|v| v.checked_mul(len))
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("declared dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len(),
        });
    }

    let payload = &bytes[HEADER_LEN..];
    let mut traces = Vec::with_capacity(rows * cols);
    for (i, chunk) in payload.chunks_exact(4 * len.max(1)).enumerate() {
        let samples = chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
            .collect::<Vec<_>>();
        let trace = Trace::new(samples, dt).map_err(|e| match e {
            Error::Data(msg) => Error::Data(format!("trace ({}, {}): {msg}", i / cols, i % cols)),
            other => other,
        })?;
        traces.push(trace);
    }
    CScan::new(rows, cols, traces, meta)
}
