//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 I/O error, 4 numerical
//! failure. `--threads` only sizes the worker pool; outputs are identical
//! for any thread count.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::clutter::{
    combined_wiener_gate, default_fixed_window, fixed_gate, mean_subtract, svd_remove,
    wiener_cancel, GateWindow, PeakParams, WienerParams,
};
use crate::cscan::{load_cscan, mean_trace, save_cscan, CScan};
use crate::detect::{
    default_threshold, detect_targets, score_detections, TruthPoint, DEFAULT_MATCH_RADIUS,
    DEFAULT_MIN_SEPARATION,
};
use crate::error::Error;
use crate::export;
use crate::imaging::asf_fast;
use crate::synth::{default_scene, parse_scene, scene_to_text, simulate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gpr-clutter",
    version,
    about = "GPR ground-clutter cancellation toolkit"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scene into a CSCN file plus a ground-truth sidecar.
    Simulate {
        /// Scene file (`key = value` lines); the default scene if omitted.
        spec: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Truth sidecar path [default: <OUT>.truth.csv].
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Print the default scene file.
    Scene,
    /// Apply a clutter-cancellation method.
    Process(ProcessArgs),
    /// Compute the ASF image: PGM for viewing, CSV with raw values.
    Image {
        input: PathBuf,
        #[arg(long)]
        pgm: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Detect targets as ASF minima.
    Detect {
        asf_csv: PathBuf,
        /// ASF threshold [default: mean - 3 std of the image].
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<f64>,
        /// Minimum distance between detections, meters.
        #[arg(long, default_value_t = DEFAULT_MIN_SEPARATION)]
        min_sep: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Score detections against a truth sidecar.
    Compare {
        detections: PathBuf,
        truth: PathBuf,
        /// Match radius, meters.
        #[arg(long, default_value_t = DEFAULT_MATCH_RADIUS)]
        radius: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodId {
    Mean,
    Svd,
    Gate,
    Wiener,
    Combined,
}

#[derive(Debug, clap::Args)]
struct ProcessArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodId,
    #[arg(short, long)]
    out: PathBuf,
    /// Singular components removed per line (svd).
    #[arg(long, default_value_t = 1)]
    svd_v: usize,
    /// Gate end sample (gate) [default: ground peak of the mean trace plus
    /// two pulse widths].
    #[arg(long)]
    gate_end: Option<usize>,
    /// Wiener filter taps (wiener, combined).
    #[arg(long, default_value_t = WienerParams::default().filter_len)]
    wiener_len: usize,
    /// Ridge regularization relative to the mean reference power.
    #[arg(long, default_value_t = WienerParams::default().ridge)]
    wiener_ridge: f64,
    /// Minimum second-peak envelope ratio (combined).
    #[arg(long)]
    peak_ratio: Option<f64>,
    /// Pre-detection ASF threshold (combined) [default: mean - 2 std].
    #[arg(long, allow_hyphen_values = true)]
    asf_threshold: Option<f64>,
    /// Gate-window CSV (combined) [default: <OUT>.windows.csv].
    #[arg(long)]
    windows: Option<PathBuf>,
    /// Print the resolved parameters.
    #[arg(long)]
    dump_params: bool,
}

struct Failure {
    code: i32,
    message: String,
}

type CliResult<T = ()> = Result<T, Failure>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Format(_)
        | Error::Truncated { .. }
        | Error::Parse { .. }
        | Error::Config(_)
        | Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Data(_)
        | Error::DegenerateTrace { .. }
        | Error::DegenerateReference
        | Error::Dimension(_)
        | Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn fail(context: impl std::fmt::Display) -> impl FnOnce(Error) -> Failure {
    move |e| Failure {
        code: exit_code(&e),
        message: format!("{context}: {e}"),
    }
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| fail(path.display())(e.into()))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| fail(path.display())(e.into()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult {
    fs::write(path, bytes).map_err(|e| fail(path.display())(e.into()))
}

fn load(path: &Path) -> CliResult<CScan> {
    load_cscan(&read_bytes(path)?).map_err(fail(path.display()))
}

fn save(path: &Path, c: &CScan) -> CliResult {
    let bytes = save_cscan(c).map_err(fail(path.display()))?;
    write(path, bytes)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_simulate(spec: Option<&Path>, out: &Path, truth: Option<&Path>) -> CliResult {
    let scene = match spec {
        Some(p) => parse_scene(&read_text(p)?).map_err(fail(p.display()))?,
        None => default_scene(),
    };
    let scan = simulate(&scene).map_err(fail("simulate"))?;
    save(out, &scan)?;
    let truth_path = truth.map_or_else(|| with_suffix(out, ".truth.csv"), Path::to_path_buf);
    let points: Vec<TruthPoint> = scene.targets.iter().map(TruthPoint::from).collect();
    write(&truth_path, export::truth_to_csv(&points))
}

fn cmd_process(a: &ProcessArgs) -> CliResult {
    let scan = load(&a.input)?;
    let wiener = WienerParams {
        filter_len: a.wiener_len,
        ridge: a.wiener_ridge,
    };
    let mut peaks = PeakParams::for_scan(&scan);
    if let Some(r) = a.peak_ratio {
        peaks.second_peak_ratio = r;
    }
    let method = format!("{:?}", a.method).to_lowercase();
    let ctx = format!("method {method}");

    let mut params = format!("method = {method}\n");
    let processed = match a.method {
        MethodId::Mean => mean_subtract(&scan).map_err(fail(&ctx))?,
        MethodId::Svd => {
            let _ = writeln!(params, "svd_v = {}", a.svd_v);
            svd_remove(&scan, a.svd_v).map_err(fail(&ctx))?
        }
        MethodId::Gate => {
            let w = match a.gate_end {
                Some(end) => GateWindow::fixed(end),
                None => default_fixed_window(&scan, &peaks).map_err(fail(&ctx))?,
            };
            let _ = writeln!(params, "gate_end = {}", w.end_index);
            fixed_gate(&scan, w).map_err(fail(&ctx))?
        }
        MethodId::Wiener => {
            let _ = writeln!(params, "wiener_len = {}", wiener.filter_len);
            let _ = writeln!(params, "wiener_ridge = {:?}", wiener.ridge);
            wiener_cancel(&scan, &mean_trace(&scan), wiener).map_err(fail(&ctx))?
        }
        MethodId::Combined => {
            let out =
                combined_wiener_gate(&scan, wiener, peaks, a.asf_threshold).map_err(fail(&ctx))?;
            let _ = writeln!(params, "wiener_len = {}", wiener.filter_len);
            let _ = writeln!(params, "wiener_ridge = {:?}", wiener.ridge);
            let _ = writeln!(params, "peak_ratio = {:?}", peaks.second_peak_ratio);
            let _ = writeln!(params, "min_peak_gap = {}", peaks.min_peak_gap);
            let _ = writeln!(params, "fallback_extent = {}", peaks.fallback_extent);
            let _ = writeln!(params, "envelope = {:?}", peaks.envelope);
            let _ = writeln!(params, "asf_threshold = {:?}", out.threshold);
            let _ = writeln!(params, "flagged = {}", out.flagged_count());
            let windows = a
                .windows
                .clone()
                .unwrap_or_else(|| with_suffix(&a.out, ".windows.csv"));
            write(&windows, export::windows_to_csv(scan.cols(), &out.windows))?;
            out.gated
        }
    };
    if a.dump_params {
        print!("{params}");
    }
    save(&a.out, &processed)
}

fn cmd_image(input: &Path, pgm: &Path, csv: &Path) -> CliResult {
    let scan = load(input)?;
    let image = asf_fast(&scan).map_err(fail(input.display()))?;
    write(pgm, export::pgm_bytes(&image))?;
    write(csv, export::asf_to_csv(&image))
}

fn cmd_detect(asf_csv: &Path, threshold: Option<f64>, min_sep: f64, out: &Path) -> CliResult {
    if !(min_sep >= 0.0 && min_sep.is_finite()) {
        return Err(fail("--min-sep")(Error::InvalidParameter(format!(
            "must be a non-negative distance, got {min_sep}"
        ))));
    }
    let image = export::parse_asf_csv(&read_text(asf_csv)?).map_err(fail(asf_csv.display()))?;
    let threshold = threshold.unwrap_or_else(|| default_threshold(&image));
    let detections = detect_targets(&image, threshold, min_sep);
    write(out, export::detections_to_csv(&detections))
}

fn cmd_compare(detections: &Path, truth: &Path, radius: f64, out: &Path) -> CliResult {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(fail("--radius")(Error::InvalidParameter(format!(
            "must be positive, got {radius}"
        ))));
    }
    let d = export::parse_detections_csv(&read_text(detections)?)
        .map_err(fail(detections.display()))?;
    let t = export::parse_truth_csv(&read_text(truth)?).map_err(fail(truth.display()))?;
    write(
        out,
        export::score_report_to_text(&score_detections(&d, &t, radius)),
    )
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Simulate { spec, out, truth } => {
            cmd_simulate(spec.as_deref(), out, truth.as_deref())
        }
        Command::Scene => {
            print!("{}", scene_to_text(&default_scene()));
            Ok(())
        }
        Command::Process(a) => cmd_process(a),
        Command::Image { input, pgm, csv } => cmd_image(input, pgm, csv),
        Command::Detect {
            asf_csv,
            threshold,
            min_sep,
            out,
        } => cmd_detect(asf_csv, *threshold, *min_sep, out),
        Command::Compare {
            detections,
            truth,
            radius,
            out,
        } => cmd_compare(detections, truth, *radius, out),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n.into());
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Failure {
            code: EXIT_USAGE,
            message: format!("cannot start worker pool: {e}"),
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("gpr-clutter: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_usage_codes() {
        assert_eq!(run(["gpr-clutter", "--help"]), EXIT_OK);
        assert_eq!(run(["gpr-clutter", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            run([
                "gpr-clutter",
                "process",
                "x.cscn",
                "--method",
                "median",
                "-o",
                "y"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["gpr-clutter", "--threads", "0", "scene"]), EXIT_USAGE);
    }

    #[test]
    fn missing_input_is_io_error() {
        assert_eq!(
            run([
                "gpr-clutter",
                "image",
                "/nonexistent/a.cscn",
                "--pgm",
                "a",
                "--csv",
                "b"
            ]),
            EXIT_IO
        );
    }

    #[test]
    fn error_classes() {
        assert_eq!(
            exit_code(&Error::Parse {
                line: 1,
                message: String::new()
            }),
            EXIT_USAGE
        );
        assert_eq!(exit_code(&Error::DegenerateReference), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::Numerical(String::new())), EXIT_NUMERICAL);
    }
}
