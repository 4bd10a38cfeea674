//! Target detection on ASF images and scoring against known targets.

use crate::imaging::AsfImage;
use crate::synth::TargetSpec;

/// Default suppression distance and match radius: three 2 cm grid cells.
pub const DEFAULT_MIN_SEPARATION: f64 = 0.06;
pub const DEFAULT_MATCH_RADIUS: f64 = 0.06;
/// Detection threshold, in standard deviations below the image mean.
pub const DEFAULT_THRESHOLD_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub m: usize,
    pub n: usize,
    /// Meters, `n * dx`.
    pub x: f64,
    /// Meters, `m * dy`.
    pub y: f64,
    pub asf_value: f64,
}

/// A known target position (ground truth).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthPoint {
    pub x: f64,
    pub y: f64,
    pub depth: f64,
}

impl From<&TargetSpec> for TruthPoint {
    fn from(t: &TargetSpec) -> Self {
        TruthPoint {
            x: t.x,
            y: t.y,
            depth: t.depth,
        }
    }
}

pub fn default_threshold(a: &AsfImage) -> f64 {
    a.mean() - DEFAULT_THRESHOLD_SIGMAS * a.std()
}

fn is_strict_local_min(a: &AsfImage, m: usize, n: usize) -> bool {
    let v = a.get(m, n);
    let rows = m.saturating_sub(1)..=(m + 1).min(a.rows() - 1);
    rows.flat_map(|i| {
        let cols = n.saturating_sub(1)..=(n + 1).min(a.cols() - 1);
        cols.map(move |j| (i, j))
    })
    .filter(|&(i, j)| (i, j) != (m, n))
    .all(|(i, j)| v < a.get(i, j))
}

/// Strict 8-neighborhood local minima below `threshold`, thinned greedily
/// in ascending value order so that kept detections are at least
/// `min_separation` meters apart. Sorted ascending by value.
pub fn detect_targets(a: &AsfImage, threshold: f64, min_separation: f64) -> Vec<Detection> {
    let mut candidates: Vec<Detection> = (0..a.rows())
        .flat_map(|m| (0..a.cols()).map(move |n| (m, n)))
        .filter(|&(m, n)| a.get(m, n) < threshold && is_strict_local_min(a, m, n))
        .map(|(m, n)| Detection {
            m,
            n,
            x: n as f64 * a.dx,
            y: m as f64 * a.dy,
            asf_value: a.get(m, n),
        })
        .collect();
    candidates.sort_by(|p, q| {
        p.asf_value
            .total_cmp(&q.asf_value)
            .then(p.m.cmp(&q.m))
            .then(p.n.cmp(&q.n))
    });

    let mut kept: Vec<Detection> = Vec::new();
    for c in candidates {
        if kept
            .iter()
            .all(|k| (k.x - c.x).hypot(k.y - c.y) >= min_separation)
        {
            kept.push(c);
        }
    }
    kept
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub detection: usize,
    pub truth: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    /// `TP / (TP + FN)`; 1.0 when there is no truth target.
    pub detection_rate: f64,
    /// Mean distance over matched pairs, meters; 0.0 without matches.
    pub mean_localization_error: f64,
    pub matched: Vec<MatchedPair>,
}

impl ScoreReport {
    /// Indices of truth targets that were matched.
    pub fn matched_truths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.matched.iter().map(|p| p.truth).collect();
        v.sort_unstable();
        v
    }
}

/// One-to-one greedy matching by ascending distance within `match_radius`.
pub fn score_detections(d: &[Detection], truth: &[TruthPoint], match_radius: f64) -> ScoreReport {
    let mut pairs: Vec<MatchedPair> = Vec::new();
    for (di, det) in d.iter().enumerate() {
        for (ti, t) in truth.iter().enumerate() {
            let distance = (det.x - t.x).hypot(det.y - t.y);
            if distance <= match_radius {
                pairs.push(MatchedPair {
                    detection: di,
                    truth: ti,
                    distance,
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.detection.cmp(&b.detection))
            .then(a.truth.cmp(&b.truth))
    });

    let mut used_det = vec![false; d.len()];
    let mut used_truth = vec![false; truth.len()];
    let mut matched = Vec::new();
    for p in pairs {
        if used_det[p.detection] || used_truth[p.truth] {
            continue;
        }
        used_det[p.detection] = true;
        used_truth[p.truth] = true;
        matched.push(p);
    }

    let tp = matched.len();
    let fneg = truth.len() - tp;
    let detection_rate = if truth.is_empty() {
        1.0
    } else {
        tp as f64 / truth.len() as f64
    };
    let mean_localization_error = if tp == 0 {
        0.0
    } else {
        matched.iter().map(|p| p.distance).sum::<f64>() / tp as f64
    };
    ScoreReport {
        true_positives: tp,
        false_negatives: fneg,
        false_positives: d.len() - tp,
        detection_rate,
        mean_localization_error,
        matched,
    }
}
