//! Wiener cancellation of one trace against the grid-average reference:
//! the fitted taps, the fitting region and the energy removed.
//!
//! ```bash
//! cargo run --release -p gpr-clutter --example wiener_cancel
//! ```

use gpr_clutter::clutter::{WienerFit, WienerParams};
use gpr_clutter::cscan::mean_trace;
use gpr_clutter::synth::{default_scene, simulate};
use gpr_clutter::Result;

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn main() -> Result<()> {
    let scene = default_scene();
    let scan = simulate(&scene)?;
    let reference = mean_trace(&scan);
    let params = WienerParams::default();
    let fit = WienerFit::new(&reference, params)?;
    println!(
        "{} taps (lags {}..={}), ridge {}, fitting region {:?}",
        params.filter_len,
        params.lag(0),
        params.lag(params.filter_len - 1),
        params.ridge,
        fit.region()
    );

    // an empty position and one on top of the first target
    let target = &scene.targets[0];
    let on_target = (
        (target.y / scene.dy).round() as usize,
        (target.x / scene.dx).round() as usize,
    );
    for (label, (m, n)) in [("empty", (30, 40)), ("target", on_target)] {
        let d = scan.trace(m, n).samples();
        let w = fit.taps(d)?;
        let e = fit.residual(d)?;
        let main_tap = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(j, v)| (params.lag(j), *v))
            .unwrap();
        println!(
            "{label:>6} ({m:>2}, {n:>2}): largest tap {:.3} at lag {:+}, residual energy {:.2e} of input",
            main_tap.1,
            main_tap.0,
            energy(&e) / energy(d)
        );
    }
    Ok(())
}
