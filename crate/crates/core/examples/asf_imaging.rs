//! ASF imaging of the combined-method output: writes a PGM image and the
//! raw CSV, then lists the detected minima.
//!
//! ```bash
//! cargo run --release -p gpr-clutter --example asf_imaging -- /tmp/asf
//! ```

use std::path::PathBuf;

use gpr_clutter::clutter::{combined_wiener_gate, PeakParams, WienerParams};
use gpr_clutter::detect::{default_threshold, detect_targets, DEFAULT_MIN_SEPARATION};
use gpr_clutter::export::{asf_to_csv, pgm_bytes};
use gpr_clutter::imaging::asf_fast;
use gpr_clutter::synth::{default_scene, simulate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stem = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("asf"));

    let scan = simulate(&default_scene())?;
    let out = combined_wiener_gate(
        &scan,
        WienerParams::default(),
        PeakParams::for_scan(&scan),
        None,
    )?;
    let image = asf_fast(&out.gated)?;
    println!(
        "ASF range [{:.4}, {:.4}], mean {:.4}, std {:.4}",
        image.min(),
        image.max(),
        image.mean(),
        image.std()
    );

    let threshold = default_threshold(&image);
    for d in detect_targets(&image, threshold, DEFAULT_MIN_SEPARATION) {
        println!(
            "minimum at ({:>2}, {:>2}) = ({:.2} m, {:.2} m): {:.4}",
            d.m, d.n, d.x, d.y, d.asf_value
        );
    }

    let pgm = stem.with_extension("pgm");
    let csv = stem.with_extension("csv");
    std::fs::write(&pgm, pgm_bytes(&image))?;
    std::fs::write(&csv, asf_to_csv(&image))?;
    println!("wrote {} and {}", pgm.display(), csv.display());
    Ok(())
}
