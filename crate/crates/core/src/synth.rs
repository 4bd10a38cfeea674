//! Synthetic UWB GPR scenes.
//!
//! Every trace is a geometric echo model: a jittered ground-surface pulse,
//! tapered echoes from buried targets inside their lateral footprint, an
//! optional uniform subsurface floor echo and white Gaussian noise. All
//! randomness comes from a ChaCha stream keyed by `(seed, m, n)`, so the
//! output does not depend on traversal order or thread count.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cscan::{CScan, ScanMeta, Trace};
use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Envelope standard deviation (seconds) of the simulated pulse.
pub fn pulse_sigma(bandwidth_hz: f64) -> f64 {
    1.0 / (PI * bandwidth_hz)
}

/// Gaussian-envelope cosine evaluated at a single instant.
#[inline]
pub fn pulse_at(t: f64, t0: f64, center_hz: f64, bandwidth_hz: f64) -> f64 {
    let sigma = pulse_sigma(bandwidth_hz);
    let tau = t - t0;
    let z = tau / sigma;
    (-0.5 * z * z).exp() * (2.0 * PI * center_hz * tau).cos()
}

/// Gaussian-envelope cosine centered at `t0` with envelope std
/// `1/(pi * bandwidth_hz)` and unit peak envelope.
pub fn gaussian_pulse(t: &[f64], t0: f64, center_hz: f64, bandwidth_hz: f64) -> Vec<f64> {
    t.iter()
        .map(|&ti| pulse_at(ti, t0, center_hz, bandwidth_hz))
        .collect()
}

/// Two-way travel time through `depth` meters of a medium.
pub fn two_way_delay(depth: f64, epsilon_r: f64) -> f64 {
    2.0 * depth * epsilon_r.sqrt() / SPEED_OF_LIGHT
}

/// Minimum separable depth `c / (2 B sqrt(eps_r))`.
pub fn min_separable_depth(bandwidth_hz: f64, epsilon_r: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * bandwidth_hz * epsilon_r.sqrt())
}

/// A buried scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    /// Position in the grid frame, meters (x along columns).
    pub x: f64,
    pub y: f64,
    /// Meters below the surface.
    pub depth: f64,
    /// Echo amplitude relative to a unit ground reflection; sign is polarity.
    pub reflectivity: f64,
    /// Lateral radius inside which the echo is visible, meters.
    pub footprint_radius: f64,
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub grid_m: usize,
    pub grid_n: usize,
    pub dx: f64,
    pub dy: f64,
    pub t_samples: usize,
    pub dt: f64,
    pub epsilon_r: f64,
    pub pulse_center_hz: f64,
    pub pulse_bandwidth_hz: f64,
    /// Nominal two-way air-gap delay of the ground reflection.
    pub ground_delay_s: f64,
    pub ground_amplitude: f64,
    pub ground_jitter_time_std_s: f64,
    pub ground_jitter_amp_std: f64,
    /// Depth of a laterally uniform subsurface reflector (e.g. a sandbox
    /// floor). Ignored when `floor_reflectivity` is zero.
    pub floor_depth: f64,
    pub floor_reflectivity: f64,
    pub targets: Vec<TargetSpec>,
    pub noise_std: f64,
    pub seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be >= 0, got {v}")))
            }
        };
        if self.grid_m == 0 || self.grid_n == 0 {
            return Err(Error::Config("grid must be non-empty".into()));
        }
        if self.t_samples < 2 {
            return Err(Error::Config("t_samples must be >= 2".into()));
        }
        positive("dx", self.dx)?;
        positive("dy", self.dy)?;
        positive("dt", self.dt)?;
        positive("pulse_center_hz", self.pulse_center_hz)?;
        positive("pulse_bandwidth_hz", self.pulse_bandwidth_hz)?;
        positive("ground_delay_s", self.ground_delay_s)?;
        positive("ground_amplitude", self.ground_amplitude)?;
        non_negative("ground_jitter_time_std_s", self.ground_jitter_time_std_s)?;
        non_negative("ground_jitter_amp_std", self.ground_jitter_amp_std)?;
        non_negative("noise_std", self.noise_std)?;
        if !(self.epsilon_r.is_finite() && self.epsilon_r >= 1.0) {
            return Err(Error::Config(format!(
                "epsilon_r must be >= 1, got {}",
                self.epsilon_r
            )));
        }

        let window = (self.t_samples - 1) as f64 * self.dt;
        if self.ground_delay_s > window {
            return Err(Error::Config(format!(
                "ground delay {:.4e} s lies beyond the {:.4e} s trace",
                self.ground_delay_s, window
            )));
        }
        if self.floor_reflectivity != 0.0 {
            positive("floor_depth", self.floor_depth)?;
            let delay = self.ground_delay_s + two_way_delay(self.floor_depth, self.epsilon_r);
            if delay > window {
                return Err(Error::Config(format!(
                    "floor echo at {delay:.4e} s lies beyond the {window:.4e} s trace"
                )));
            }
        }

        let (width, height) = (
            (self.grid_n - 1) as f64 * self.dx,
            (self.grid_m - 1) as f64 * self.dy,
        );
        for (i, t) in self.targets.iter().enumerate() {
            positive(&format!("target {i} depth"), t.depth)?;
            if t.reflectivity == 0.0 || !t.reflectivity.is_finite() {
                return Err(Error::Config(format!("target {i} has zero reflectivity")));
            }
            if t.footprint_radius.is_nan() || t.footprint_radius < self.dx.max(self.dy) {
                return Err(Error::Config(format!(
                    "target {i} footprint radius {} is smaller than the scan step",
                    t.footprint_radius
                )));
            }
            let gap_x = (-t.x).max(t.x - width).max(0.0);
            let gap_y = (-t.y).max(t.y - height).max(0.0);
            if gap_x.hypot(gap_y) >= t.footprint_radius {
                return Err(Error::Config(format!(
                    "target {i} footprint lies entirely outside the grid"
                )));
            }
            let delay = self.ground_delay_s + two_way_delay(t.depth, self.epsilon_r);
            if delay > window {
                return Err(Error::Config(format!(
                    "target {i} echo at {delay:.4e} s lies beyond the {window:.4e} s trace"
                )));
            }
        }
        Ok(())
    }

    pub fn time_axis(&self) -> Vec<f64> {
        (0..self.t_samples).map(|k| k as f64 * self.dt).collect()
    }

    /// Sample index nearest to the nominal (unjittered) echo of `target`.
    pub fn target_echo_index(&self, target: &TargetSpec) -> usize {
        ((self.ground_delay_s + two_way_delay(target.depth, self.epsilon_r)) / self.dt).round()
            as usize
    }

    pub fn meta(&self) -> ScanMeta {
        ScanMeta {
            dx: self.dx,
            dy: self.dy,
            epsilon_r: self.epsilon_r,
            bandwidth_hz: self.pulse_bandwidth_hz,
        }
    }
}

/// Per-position random draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundJitter {
    /// Ground echo time shift, seconds.
    pub time_s: f64,
    /// Relative ground amplitude perturbation.
    pub amplitude: f64,
}

fn position_rng(seed: u64, m: usize, n: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | n as u64);
    rng
}

/// The ground jitter drawn for grid position `(m, n)`.
pub fn ground_jitter(spec: &SceneSpec, m: usize, n: usize) -> GroundJitter {
    let mut rng = position_rng(spec.seed, m, n);
    draw_jitter(spec, &mut rng)
}

fn draw_jitter(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> GroundJitter {
    let zt: f64 = rng.sample(StandardNormal);
    let za: f64 = rng.sample(StandardNormal);
    GroundJitter {
        time_s: spec.ground_jitter_time_std_s * zt,
        amplitude: spec.ground_jitter_amp_std * za,
    }
}

/// Lateral taper `cos^2(pi r / 2R)` inside the footprint, zero outside.
pub fn footprint_weight(r: f64, radius: f64) -> f64 {
    if r >= radius {
        0.0
    } else {
        let c = (PI * r / (2.0 * radius)).cos();
        c * c
    }
}

fn synthesize_trace(spec: &SceneSpec, t: &[f64], m: usize, n: usize) -> Vec<f64> {
    let mut rng = position_rng(spec.seed, m, n);
    let jitter = draw_jitter(spec, &mut rng);
    let (fc, bw) = (spec.pulse_center_hz, spec.pulse_bandwidth_hz);

    let ground_t0 = spec.ground_delay_s + jitter.time_s;
    let ground_amp = spec.ground_amplitude * (1.0 + jitter.amplitude);
    let mut out: Vec<f64> = t
        .iter()
        .map(|&ti| ground_amp * pulse_at(ti, ground_t0, fc, bw))
        .collect();

    let (x, y) = (n as f64 * spec.dx, m as f64 * spec.dy);
    for target in &spec.targets {
        let w = footprint_weight((x - target.x).hypot(y - target.y), target.footprint_radius);
        if w == 0.0 {
            continue;
        }
        let amp = spec.ground_amplitude * target.reflectivity * w;
        let t0 = spec.ground_delay_s + two_way_delay(target.depth, spec.epsilon_r);
        for (o, &ti) in out.iter_mut().zip(t) {
            *o += amp * pulse_at(ti, t0, fc, bw);
        }
    }

    if spec.floor_reflectivity != 0.0 {
        let amp = spec.ground_amplitude * spec.floor_reflectivity;
        let t0 = spec.ground_delay_s + two_way_delay(spec.floor_depth, spec.epsilon_r);
        for (o, &ti) in out.iter_mut().zip(t) {
            *o += amp * pulse_at(ti, t0, fc, bw);
        }
    }

    for o in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *o += spec.noise_std * z;
    }
    out
}

/// Renders a scene into a C-scan.
pub fn simulate(spec: &SceneSpec) -> Result<CScan> {
    spec.validate()?;
    let t = spec.time_axis();
    let cols = spec.grid_n;
    let traces: Vec<Trace> = (0..spec.grid_m * cols)
        .into_par_iter()
        .map(|i| Trace::from_parts(synthesize_trace(spec, &t, i / cols, i % cols), spec.dt))
        .collect();
    CScan::new(spec.grid_m, cols, traces, spec.meta())
}

/// A 61x61 scan at 2 cm steps over 120 cm, 8 GHz bandwidth, eps_r = 4,
/// with eleven shallow targets (1-6 cm) over a mostly empty area.
pub fn default_scene() -> SceneSpec {
    let t = |x, y, depth, reflectivity, footprint_radius| TargetSpec {
        x,
        y,
        depth,
        reflectivity,
        footprint_radius,
    };
    SceneSpec {
        grid_m: 61,
        grid_n: 61,
        dx: 0.02,
        dy: 0.02,
        t_samples: 1024,
        dt: 5e-12,
        epsilon_r: 4.0,
        pulse_center_hz: 4e9,
        pulse_bandwidth_hz: 8e9,
        ground_delay_s: 1e-9,
        ground_amplitude: 1.0,
        ground_jitter_time_std_s: 20e-12,
        ground_jitter_amp_std: 0.05,
        floor_depth: 0.10,
        floor_reflectivity: 0.04,
        targets: vec![
            t(0.20, 0.30, 0.010, 0.30, 0.06),
            t(0.60, 0.20, 0.030, -0.40, 0.07),
            t(1.00, 0.25, 0.050, 0.35, 0.06),
            t(0.30, 0.70, 0.020, -0.40, 0.06),
            t(0.70, 0.60, 0.040, 0.25, 0.06),
            t(1.05, 0.75, 0.060, -0.35, 0.07),
            t(0.15, 1.05, 0.015, 0.40, 0.06),
            t(0.50, 0.95, 0.025, -0.25, 0.05),
            t(0.85, 1.00, 0.035, 0.30, 0.06),
            t(0.40, 0.45, 0.045, -0.40, 0.06),
            t(0.95, 0.50, 0.055, 0.30, 0.06),
        ],
        noise_std: 0.01,
        seed: 7,
    }
}

// --- scene text format -------------------------------------------------------

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Serializes a scene as `key = value` lines; targets are repeated
/// `target = x,y,depth,reflectivity,radius` lines.
pub fn scene_to_text(spec: &SceneSpec) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("grid_m", spec.grid_m.to_string());
    kv("grid_n", spec.grid_n.to_string());
    kv("dx", fmt_f64(spec.dx));
    kv("dy", fmt_f64(spec.dy));
    kv("t_samples", spec.t_samples.to_string());
    kv("dt", fmt_f64(spec.dt));
    kv("epsilon_r", fmt_f64(spec.epsilon_r));
    kv("pulse_center_hz", fmt_f64(spec.pulse_center_hz));
    kv("pulse_bandwidth_hz", fmt_f64(spec.pulse_bandwidth_hz));
    kv("ground_delay_s", fmt_f64(spec.ground_delay_s));
    kv("ground_amplitude", fmt_f64(spec.ground_amplitude));
    kv(
        "ground_jitter_time_std_s",
        fmt_f64(spec.ground_jitter_time_std_s),
    );
    kv("ground_jitter_amp_std", fmt_f64(spec.ground_jitter_amp_std));
    kv("floor_depth", fmt_f64(spec.floor_depth));
    kv("floor_reflectivity", fmt_f64(spec.floor_reflectivity));
    kv("noise_std", fmt_f64(spec.noise_std));
    kv("seed", spec.seed.to_string());
    for t in &spec.targets {
        kv(
            "target",
            format!(
                "{},{},{},{},{}",
                fmt_f64(t.x),
                fmt_f64(t.y),
                fmt_f64(t.depth),
                fmt_f64(t.reflectivity),
                fmt_f64(t.footprint_radius)
            ),
        );
    }
    s
}

/// Parses the `key = value` scene format. Blank lines and `#` comments are
/// ignored; keys not given keep their [`default_scene`] value, except that
/// listing any `target` line replaces the default target set.
pub fn parse_scene(text: &str) -> Result<SceneSpec> {
    let mut spec = default_scene();
    let mut targets = Vec::new();
    let mut saw_target = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());

        let float = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| err(format!("`{key}` expects a number, got `{v}`")))
        };
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| err(format!("`{key}` expects a non-negative integer, got `{v}`")))
        };

        match key {
            "grid_m" => spec.grid_m = count(value)?,
            "grid_n" => spec.grid_n = count(value)?,
            "dx" => spec.dx = float(value)?,
            "dy" => spec.dy = float(value)?,
            "t_samples" => spec.t_samples = count(value)?,
            "dt" => spec.dt = float(value)?,
            "epsilon_r" => spec.epsilon_r = float(value)?,
            "pulse_center_hz" => spec.pulse_center_hz = float(value)?,
            "pulse_bandwidth_hz" => spec.pulse_bandwidth_hz = float(value)?,
            "ground_delay_s" => spec.ground_delay_s = float(value)?,
            "ground_amplitude" => spec.ground_amplitude = float(value)?,
            "ground_jitter_time_std_s" => spec.ground_jitter_time_std_s = float(value)?,
            "ground_jitter_amp_std" => spec.ground_jitter_amp_std = float(value)?,
            "floor_depth" => spec.floor_depth = float(value)?,
            "floor_reflectivity" => spec.floor_reflectivity = float(value)?,
            "noise_std" => spec.noise_std = float(value)?,
            "seed" => {
                spec.seed = value.parse::<u64>().map_err(|_| {
                    err(format!("`seed` expects an unsigned integer, got `{value}`"))
                })?
            }
            "target" => {
                saw_target = true;
                if value.is_empty() {
                    // `target =` alone declares an empty target list
                    continue;
                }
                let fields = value
                    .split(',')
                    .map(|f| float(f.trim()))
                    .collect::<Result<Vec<_>>>()?;
                let [x, y, depth, reflectivity, footprint_radius] = fields[..] else {
                    return Err(err(format!(
                        "`target` expects x,y,depth,reflectivity,radius; got {} fields",
                        fields.len()
                    )));
                };
                targets.push(TargetSpec {
                    x,
                    y,
                    depth,
                    reflectivity,
                    footprint_radius,
                });
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if saw_target {
        spec.targets = targets;
    }
    Ok(spec)
}
