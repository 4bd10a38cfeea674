//! Text and image artifact formats.
//!
//! All CSV floats use the shortest decimal form that parses back to the
//! same `f64`, so files round-trip exactly and are byte-stable.

use std::fmt::Write;

use crate::clutter::GateWindow;
use crate::detect::{Detection, ScoreReport, TruthPoint};
use crate::error::{Error, Result};
use crate::imaging::{image_minmax_scale, AsfImage};

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn fields(line: usize, s: &str, count: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = s.split(',').map(str::trim).collect();
    if f.len() != count {
        return Err(parse_err(
            line,
            format!("expected {count} comma-separated fields, found {}", f.len()),
        ));
    }
    Ok(f)
}

fn field<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{s}`")))
}

fn finite(line: usize, s: &str, what: &str) -> Result<f64> {
    let v: f64 = field(line, s, what)?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} must be finite, got `{s}`")));
    }
    Ok(v)
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header: &str,
) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == header => Ok(()),
        Some((n, l)) => Err(parse_err(
            n,
            format!("expected header `{header}`, found `{l}`"),
        )),
        None => Err(parse_err(0, format!("missing header `{header}`"))),
    }
}

/// 8-bit binary PGM of the min/max scaled image, `N` wide and `M` high.
pub fn pgm_bytes(a: &AsfImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", a.cols(), a.rows()).into_bytes();
    out.extend(
        image_minmax_scale(a)
            .iter()
            .map(|v| (v * 255.0).round() as u8),
    );
    out
}

/// Raw ASF values: a `rows,cols,dx,dy` block followed by one
/// `m,n,x,y,asf` row per cell.
pub fn asf_to_csv(a: &AsfImage) -> String {
    let mut s = String::from("rows,cols,dx,dy\n");
    let _ = writeln!(s, "{},{},{},{}", a.rows(), a.cols(), num(a.dx), num(a.dy));
    s.push_str("m,n,x,y,asf\n");
    for m in 0..a.rows() {
        for n in 0..a.cols() {
            let _ = writeln!(
                s,
                "{m},{n},{},{},{}",
                num(n as f64 * a.dx),
                num(m as f64 * a.dy),
                num(a.get(m, n))
            );
        }
    }
    s
}

pub fn parse_asf_csv(text: &str) -> Result<AsfImage> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "rows,cols,dx,dy")?;
    let (ln, dims) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing grid dimensions"))?;
    let f = fields(ln, dims, 4)?;
    let rows: usize = field(ln, f[0], "rows")?;
    let cols: usize = field(ln, f[1], "cols")?;
    let dx = finite(ln, f[2], "dx")?;
    let dy = finite(ln, f[3], "dy")?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(ln, "grid dimensions must be positive"));
    }
    expect_header(&mut lines, "m,n,x,y,asf")?;

    let mut values = vec![None; rows * cols];
    for (ln, l) in lines {
        let f = fields(ln, l, 5)?;
        let m: usize = field(ln, f[0], "row index")?;
        let n: usize = field(ln, f[1], "column index")?;
        if m >= rows || n >= cols {
            return Err(parse_err(
                ln,
                format!("cell ({m}, {n}) outside {rows}x{cols} grid"),
            ));
        }
        let slot = &mut values[m * cols + n];
        if slot.is_some() {
            return Err(parse_err(ln, format!("duplicate cell ({m}, {n})")));
        }
        *slot = Some(finite(ln, f[4], "asf value")?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| parse_err(0, format!("missing cell ({}, {})", i / cols, i % cols)))
        })
        .collect::<Result<Vec<f64>>>()?;
    AsfImage::new(rows, cols, values, dx, dy)
}

pub fn detections_to_csv(d: &[Detection]) -> String {
    let mut s = String::from("m,n,x,y,asf\n");
    for p in d {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.m,
            p.n,
            num(p.x),
            num(p.y),
            num(p.asf_value)
        );
    }
    s
}

pub fn parse_detections_csv(text: &str) -> Result<Vec<Detection>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "m,n,x,y,asf")?;
    lines
        .map(|(ln, l)| {
            let f = fields(ln, l, 5)?;
            Ok(Detection {
                m: field(ln, f[0], "row index")?,
                n: field(ln, f[1], "column index")?,
                x: finite(ln, f[2], "x")?,
                y: finite(ln, f[3], "y")?,
                asf_value: finite(ln, f[4], "asf value")?,
            })
        })
        .collect()
}

/// Ground-truth sidecar: `x,y,depth` header and one line per target.
pub fn truth_to_csv(truth: &[TruthPoint]) -> String {
    let mut s = String::from("x,y,depth\n");
    for t in truth {
        let _ = writeln!(s, "{},{},{}", num(t.x), num(t.y), num(t.depth));
    }
    s
}

pub fn parse_truth_csv(text: &str) -> Result<Vec<TruthPoint>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "x,y,depth")?;
    lines
        .map(|(ln, l)| {
            let f = fields(ln, l, 3)?;
            Ok(TruthPoint {
                x: finite(ln, f[0], "x")?,
                y: finite(ln, f[1], "y")?,
                depth: finite(ln, f[2], "depth")?,
            })
        })
        .collect()
}

/// `key,value` summary lines, then the matched pairs.
pub fn score_report_to_text(r: &ScoreReport) -> String {
    let mut s = String::from("key,value\n");
    let _ = writeln!(s, "detection_rate,{}", num(r.detection_rate));
    let _ = writeln!(s, "true_positives,{}", r.true_positives);
    let _ = writeln!(s, "false_negatives,{}", r.false_negatives);
    let _ = writeln!(s, "false_positives,{}", r.false_positives);
    let _ = writeln!(
        s,
        "mean_localization_error,{}",
        num(r.mean_localization_error)
    );
    s.push_str("\ndetection,truth,distance\n");
    for p in &r.matched {
        let _ = writeln!(s, "{},{},{}", p.detection, p.truth, num(p.distance));
    }
    s
}

/// Per-cell gate windows, row-major: `m,n,end_index,source`.
pub fn windows_to_csv(cols: usize, windows: &[GateWindow]) -> String {
    let mut s = String::from("m,n,end_index,source\n");
    for (i, w) in windows.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{}", i / cols, i % cols, w.end_index, w.source);
    }
    s
}

pub fn parse_windows_csv(text: &str) -> Result<Vec<(usize, usize, GateWindow)>> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "m,n,end_index,source")?;
    lines
        .map(|(ln, l)| {
            let f = fields(ln, l, 4)?;
            let source = f[3]
                .parse()
                .map_err(|_| parse_err(ln, format!("unknown gate source `{}`", f[3])))?;
            Ok((
                field(ln, f[0], "row index")?,
                field(ln, f[1], "column index")?,
                GateWindow {
                    end_index: field(ln, f[2], "end index")?,
                    source,
                },
            ))
        })
        .collect()
}
