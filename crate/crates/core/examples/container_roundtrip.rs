//! Saves a small C-scan to the CSCN container, reloads it, and shows the
//! header fields and the f32 quantization of the payload.
//!
//! ```bash
//! cargo run -p gpr-clutter --example container_roundtrip
//! ```

use gpr_clutter::cscan::{load_cscan, save_cscan, ScanMeta, HEADER_LEN};
use gpr_clutter::{CScan, Result};

fn main() -> Result<()> {
    let meta = ScanMeta {
        dx: 0.02,
        dy: 0.02,
        epsilon_r: 4.0,
        bandwidth_hz: 8e9,
    };
    let samples: Vec<f64> = (0..2 * 3 * 8).map(|i| (i as f64 * 0.1).sin()).collect();
    let scan = CScan::from_samples(2, 3, 8, 5e-12, &samples, meta)?;

    let bytes = save_cscan(&scan)?;
    println!(
        "{} bytes: {HEADER_LEN}-byte header + {} f32 samples",
        bytes.len(),
        samples.len()
    );
    println!("magic {:?}", std::str::from_utf8(&bytes[..4]).unwrap());

    let back = load_cscan(&bytes)?;
    println!(
        "reloaded {} x {} x {}, dt {:e} s, eps_r {}",
        back.rows(),
        back.cols(),
        back.trace_len(),
        back.dt(),
        back.epsilon_r()
    );
    let worst = scan
        .traces()
        .iter()
        .zip(back.traces())
        .flat_map(|(a, b)| {
            a.samples()
                .iter()
                .zip(b.samples())
                .map(|(x, y)| (x - y).abs())
        })
        .fold(0.0, f64::max);
    println!("largest f32 quantization error {worst:.2e}");

    // a second round trip is exact
    assert_eq!(load_cscan(&save_cscan(&back)?)?, back);

    let truncated = &bytes[..bytes.len() - 4];
    println!("truncated file: {}", load_cscan(truncated).unwrap_err());
    Ok(())
}
