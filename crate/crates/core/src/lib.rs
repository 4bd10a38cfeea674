//! Ground-clutter cancellation and correlation imaging for UWB
//! ground-penetrating radar C-scans.
//!
//! The crate is organized around one payload type, [`CScan`], a grid of
//! time-domain traces:
//!
//! * [`cscan`]: traces, C-scans, normalization and the CSCN container
//! * [`synth`]: deterministic synthetic scenes with known buried targets
//! * [`clutter`]: mean subtraction, SVD removal, time gating, Wiener
//!   cancellation and the combined Wiener + adaptive-gate method
//! * [`imaging`]: average similarity function (ASF) images
//! * [`detect`]: local-minimum detection and scoring against ground truth
//! * [`export`]: PGM and CSV artifacts
//! * [`cli`]: the `gpr-clutter` command-line front end
//!
//! ```
//! use gpr_clutter::{clutter, imaging, synth};
//!
//! let mut scene = synth::default_scene();
//! scene.grid_m = 8;
//! scene.grid_n = 8;
//! scene.targets.clear();
//! let scan = synth::simulate(&scene).unwrap();
//! let cleaned = clutter::mean_subtract(&scan).unwrap();
//! let image = imaging::asf_fast(&cleaned).unwrap();
//! assert_eq!((image.rows(), image.cols()), (8, 8));
//! ```

pub mod cli;
pub mod clutter;
pub mod cscan;
pub mod detect;
pub mod error;
pub mod export;
pub mod imaging;
pub mod synth;

pub use cscan::{CScan, ScanMeta, Trace};
pub use error::{Error, Result};
