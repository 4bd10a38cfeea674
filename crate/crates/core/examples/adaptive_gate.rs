//! Per-trace time gating: where the adaptive window ends relative to the
//! ground peak and the target echo, for traces across one target.
//!
//! ```bash
//! cargo run --release -p gpr-clutter --example adaptive_gate
//! ```

use gpr_clutter::clutter::{adaptive_gate_from_peaks, EnvelopeKind, PeakParams};
use gpr_clutter::synth::{default_scene, simulate};
use gpr_clutter::Result;

fn main() -> Result<()> {
    let scene = default_scene();
    let scan = simulate(&scene)?;
    let ma = PeakParams::for_scan(&scan);
    let analytic = PeakParams {
        envelope: EnvelopeKind::Analytic,
        ..ma
    };
    println!(
        "second-peak ratio {}, gap {} samples, fallback {} samples",
        ma.second_peak_ratio, ma.min_peak_gap, ma.fallback_extent
    );

    let target = &scene.targets[2];
    let echo = scene.target_echo_index(target);
    let m = (target.y / scene.dy).round() as usize;
    let n0 = (target.x / scene.dx).round() as usize;
    println!(
        "target depth {:.0} mm, echo at sample {echo}; scanning row {m}",
        target.depth * 1e3
    );
    for n in n0.saturating_sub(5)..=(n0 + 5).min(scan.cols() - 1) {
        let t = scan.trace(m, n);
        let a = adaptive_gate_from_peaks(t, &ma)?;
        let b = adaptive_gate_from_peaks(t, &analytic)?;
        println!(
            "n = {n:>2}: moving-average envelope -> end {:>3} ({}), analytic -> end {:>3} ({})",
            a.end_index, a.source, b.end_index, b.source
        );
    }
    Ok(())
}
