//! Simulates the default scene, writes it as a CSCN container plus a
//! ground-truth sidecar, and prints a few of its traces' echo times.
//!
//! ```bash
//! cargo run --release -p gpr-clutter --example simulate_scene -- /tmp/scene.cscn
//! ```

use std::path::PathBuf;

use gpr_clutter::clutter::{envelope, PeakParams};
use gpr_clutter::cscan::save_cscan;
use gpr_clutter::detect::TruthPoint;
use gpr_clutter::export::truth_to_csv;
use gpr_clutter::synth::{default_scene, min_separable_depth, simulate, two_way_delay};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("default_scene.cscn"));

    let scene = default_scene();
    let scan = simulate(&scene)?;
    println!(
        "{} x {} positions, {} samples at {} ps, {} targets",
        scan.rows(),
        scan.cols(),
        scan.trace_len(),
        scene.dt * 1e12,
        scene.targets.len()
    );
    println!(
        "depth resolution at {} GHz, eps_r {}: {:.2} mm",
        scene.pulse_bandwidth_hz / 1e9,
        scene.epsilon_r,
        min_separable_depth(scene.pulse_bandwidth_hz, scene.epsilon_r) * 1e3
    );

    let pp = PeakParams::for_scan(&scan);
    for target in &scene.targets[..3] {
        let (m, n) = (
            (target.y / scene.dy).round() as usize,
            (target.x / scene.dx).round() as usize,
        );
        let env = envelope(scan.trace(m, n).samples(), pp.envelope);
        let ground = env
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        println!(
            "target at ({m}, {n}), depth {:.0} mm: ground peak at sample {ground}, \
             echo expected at {} ({:.0} ps later)",
            target.depth * 1e3,
            scene.target_echo_index(target),
            two_way_delay(target.depth, scene.epsilon_r) * 1e12
        );
    }

    std::fs::write(&out, save_cscan(&scan)?)?;
    let truth_path = out.with_extension("truth.csv");
    let truth: Vec<TruthPoint> = scene.targets.iter().map(TruthPoint::from).collect();
    std::fs::write(&truth_path, truth_to_csv(&truth))?;
    println!("wrote {} and {}", out.display(), truth_path.display());
    Ok(())
}
