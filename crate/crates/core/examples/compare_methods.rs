//! Runs all five clutter-cancellation methods on the default synthetic
//! scene and scores the ASF detections of each against ground truth.
//!
//! ```bash
//! cargo run --release -p gpr-clutter --example compare_methods
//! ```

use std::time::Instant;

use gpr_clutter::clutter::{
    combined_wiener_gate, default_fixed_window, fixed_gate, mean_subtract, svd_remove,
    wiener_cancel, PeakParams, WienerParams,
};
use gpr_clutter::cscan::mean_trace;
use gpr_clutter::detect::{
    default_threshold, detect_targets, score_detections, TruthPoint, DEFAULT_MATCH_RADIUS,
    DEFAULT_MIN_SEPARATION,
};
use gpr_clutter::imaging::asf_fast;
use gpr_clutter::{synth, CScan, Result};

fn score(name: &str, processed: &CScan, truth: &[TruthPoint]) -> Result<()> {
    let image = asf_fast(processed)?;
    let detections = detect_targets(&image, default_threshold(&image), DEFAULT_MIN_SEPARATION);
    let report = score_detections(&detections, truth, DEFAULT_MATCH_RADIUS);
    println!(
        "{name:<10} rate {:.3}  TP {:>2}  FN {:>2}  FP {:>2}  loc.err {:.4} m  matched {:?}",
        report.detection_rate,
        report.true_positives,
        report.false_negatives,
        report.false_positives,
        report.mean_localization_error,
        report.matched_truths(),
    );
    Ok(())
}

fn main() -> Result<()> {
    let scene = synth::default_scene();
    let truth: Vec<TruthPoint> = scene.targets.iter().map(TruthPoint::from).collect();

    let started = Instant::now();
    let scan = synth::simulate(&scene)?;
    println!(
        "simulated {}x{}x{} in {:.2?}",
        scan.rows(),
        scan.cols(),
        scan.trace_len(),
        started.elapsed()
    );

    let peaks = PeakParams::for_scan(&scan);
    let wiener = WienerParams::default();

    score("mean", &mean_subtract(&scan)?, &truth)?;
    score("svd(v=1)", &svd_remove(&scan, 1)?, &truth)?;
    let window = default_fixed_window(&scan, &peaks)?;
    score("gate", &fixed_gate(&scan, window)?, &truth)?;
    score(
        "wiener",
        &wiener_cancel(&scan, &mean_trace(&scan), wiener)?,
        &truth,
    )?;

    let combined = combined_wiener_gate(&scan, wiener, peaks, None)?;
    println!(
        "combined: {} positions flagged by the Wiener pre-detection",
        combined.flagged_count()
    );
    score("combined", &combined.gated, &truth)?;
    println!("total {:.2?}", started.elapsed());
    Ok(())
}
