//! Retention-dip localization.
//!
//! Listener retention curves sampled once per second are searched for dips:
//! local minima flanked by a steep drop and a steep recovery. Dips are found
//! as peaks of the negated curve, their bounds estimated with secant slopes
//! anchored at the peak, and the surrounding transcript window extracted for
//! downstream labeling.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{segment_transcript, word_char_ranges, Episode, Sentence, Span};
use crate::error::{Error, Result};
use crate::jsonl;

pub const DEFAULT_MIN_PROMINENCE: f64 = 0.01;
pub const DEFAULT_MIN_DISTANCE_S: usize = 60;
pub const DEFAULT_BOUNDS_WINDOW_S: usize = 120;
pub const DEFAULT_MIN_LISTENERS: u64 = 100;

/// Seconds of transcript kept before a dip's start when extracting a segment.
pub const PRE_DIP_WINDOW_S: f64 = 60.0;
/// Seconds of transcript kept after a dip's end when extracting a segment.
pub const POST_DIP_WINDOW_S: f64 = 90.0;

/// Listener retention sampled once per second; values are fractions in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionCurve {
    pub episode_id: String,
    #[serde(default)]
    pub listener_count: Option<u64>,
    pub values: Vec<f64>,
}

impl RetentionCurve {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Invalid(format!(
                "retention curve {:?} has no samples",
                self.episode_id
            )));
        }
        for (i, v) in self.values.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(v) {
                return Err(Error::Invalid(format!(
                    "retention curve {:?} sample {i} out of range: {v}",
                    self.episode_id
                )));
            }
        }
        Ok(())
    }
}

/// Loads retention curves from a JSON-lines file and validates them.
pub fn load_retention(path: &Path) -> Result<Vec<RetentionCurve>> {
    let curves: Vec<RetentionCurve> = jsonl::read_records(path)?;
    for curve in &curves {
        curve.validate()?;
    }
    Ok(curves)
}

/// A localized retention dip. Times are whole-second sample indices. Slopes
/// are the extreme secant slopes used to place the bounds; `end_slope <= 0`
/// marks a dip with no observed recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub peak_s: usize,
    pub start_s: usize,
    pub end_s: usize,
    pub start_slope: f64,
    pub end_slope: f64,
}

/// The transcript window around one dip, loosened by the pre/post margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipSegment {
    pub episode_id: String,
    pub window_start_s: f64,
    pub window_end_s: f64,
    pub dip: Dip,
    pub sentences: Vec<Sentence>,
}

/// Word-index distance between predicted dip bounds and a gold span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryError {
    pub start_err_words: usize,
    pub end_err_words: usize,
}

/// Finds dip peaks: local maxima of the negated curve with prominence at
/// least `min_prominence`, greedily keeping the higher-prominence peak when
/// two are closer than `min_distance_s`. Returns peak seconds in ascending
/// order.
pub fn find_dip_peaks(
    curve: &RetentionCurve,
    min_prominence: f64,
    min_distance_s: usize,
) -> Vec<usize> {
    assert!(min_prominence > 0.0, "min_prominence must be positive");
    assert!(min_distance_s >= 1, "min_distance_s must be at least 1");
    let y: Vec<f64> = curve.values.iter().map(|v| -v).collect();
    let mut scored: Vec<(usize, f64)> = local_maxima(&y)
        .into_iter()
        .map(|p| (p, prominence(&y, p)))
        .filter(|&(_, prom)| prom >= min_prominence)
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let mut kept: Vec<usize> = Vec::new();
    for (p, _) in scored {
        if kept.iter().all(|&k| p.abs_diff(k) >= min_distance_s) {
            kept.push(p);
        }
    }
    kept.sort_unstable();
    kept
}

/// Interior local maxima; a flat plateau counts once, at its midpoint.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while n >= 3 && i < n - 1 {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                peaks.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height of a peak above the higher of its two bounding saddles: the signal
/// is walked outward on each side until a strictly higher sample (or the
/// boundary), tracking the minimum along the way.
fn prominence(y: &[f64], peak: usize) -> f64 {
    let h = y[peak];
    let mut left_min = h;
    let mut i = peak;
    while i > 0 {
        i -= 1;
        if y[i] > h {
            break;
        }
        left_min = left_min.min(y[i]);
    }
    let mut right_min = h;
    let mut i = peak;
    while i + 1 < y.len() {
        i += 1;
        if y[i] > h {
            break;
        }
        right_min = right_min.min(y[i]);
    }
    h - left_min.max(right_min)
}

/// Estimates dip bounds with secant slopes anchored at the peak.
///
/// Over candidates `t` within `window_s` seconds of the peak, the start is
/// the `t < peak` minimizing `(curve[peak] - curve[t]) / (peak - t)` and the
/// end is the `t > peak` maximizing `(curve[t] - curve[peak]) / (t - peak)`.
/// Ties break toward the candidate nearest the peak. Fails when the peak sits
/// on a curve boundary and one side has no candidates.
pub fn estimate_dip_bounds(
    curve: &RetentionCurve,
    peak_s: usize,
    window_s: usize,
) -> Result<Dip> {
    assert!(window_s >= 1, "window_s must be at least 1");
    let c = &curve.values;
    let n = c.len();
    if peak_s >= n {
        return Err(Error::Invalid(format!(
            "peak {peak_s}s outside curve of {n} samples"
        )));
    }
    if peak_s == 0 || peak_s == n - 1 {
        return Err(Error::PeakAtBoundary { peak: peak_s });
    }
    let pv = c[peak_s];
    let lo = peak_s.saturating_sub(window_s);
    let hi = (peak_s + window_s).min(n - 1);

    let mut start_s = peak_s - 1;
    let mut start_slope = f64::INFINITY;
    for t in (lo..peak_s).rev() {
        let slope = (pv - c[t]) / ((peak_s - t) as f64);
        if slope < start_slope {
            start_slope = slope;
            start_s = t;
        }
    }
    let mut end_s = peak_s + 1;
    let mut end_slope = f64::NEG_INFINITY;
    for t in (peak_s + 1)..=hi {
        let slope = (c[t] - pv) / ((t - peak_s) as f64);
        if slope > end_slope {
            end_slope = slope;
            end_s = t;
        }
    }
    Ok(Dip {
        peak_s,
        start_s,
        end_s,
        start_slope,
        end_slope,
    })
}

/// Extracts the transcript window `[start_s - 60, end_s + 90]` around a dip,
/// clamped to the episode duration. Sentences overlapping the window at all
/// are included whole.
pub fn extract_segment(dip: &Dip, episode: &Episode) -> DipSegment {
    let duration = episode.duration_s();
    let window_start_s = (dip.start_s as f64 - PRE_DIP_WINDOW_S).max(0.0);
    let window_end_s = (dip.end_s as f64 + POST_DIP_WINDOW_S).min(duration);
    let sentences = segment_transcript(&episode.words)
        .into_iter()
        .filter(|s| {
            let (Some(start), Some(end)) = (s.start_s, s.end_s) else {
                return false;
            };
            start <= window_end_s && end >= window_start_s
        })
        .collect();
    DipSegment {
        episode_id: episode.id.clone(),
        window_start_s,
        window_end_s,
        dip: dip.clone(),
        sentences,
    }
}

/// Word-index error between predicted dip bounds and a gold transcript span.
///
/// Dip start/end times map to the nearest word by time; the gold span's
/// character offsets map to the words containing them.
pub fn boundary_word_error(
    predicted: &DipSegment,
    gold_span: &Span,
    episode: &Episode,
) -> Result<BoundaryError> {
    if episode.words.is_empty() {
        return Err(Error::EmptyInput("transcript"));
    }
    let ranges = word_char_ranges(&episode.words);
    let total_chars = ranges.last().map_or(0, |r| r.1);
    if gold_span.start_char >= gold_span.end_char || gold_span.end_char > total_chars {
        return Err(Error::SpanOutOfBounds {
            start: gold_span.start_char,
            end: gold_span.end_char,
            len: total_chars,
        });
    }
    let pred_start = nearest_word_by_time(&episode.words, predicted.dip.start_s as f64);
    let pred_end = nearest_word_by_time(&episode.words, predicted.dip.end_s as f64);
    let gold_start = word_at_char(&ranges, gold_span.start_char);
    let gold_end = word_at_char(&ranges, gold_span.end_char - 1);
    Ok(BoundaryError {
        start_err_words: pred_start.abs_diff(gold_start),
        end_err_words: pred_end.abs_diff(gold_end),
    })
}

/// Index of the word whose time interval is nearest to `t`; earlier word on
/// ties.
fn nearest_word_by_time(words: &[crate::corpus::TranscriptWord], t: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, w) in words.iter().enumerate() {
        let dist = if t < w.start_s {
            w.start_s - t
        } else if t > w.end_s {
            t - w.end_s
        } else {
            0.0
        };
        if dist < best_dist {
            best_dist = dist;
            best = i;
        }
    }
    best
}

/// Index of the word containing character offset `c`; offsets falling on the
/// joining space map to the following word.
fn word_at_char(ranges: &[(usize, usize)], c: usize) -> usize {
    match ranges.binary_search_by(|&(_, end)| end.cmp(&c)) {
        Ok(i) => (i + 1).min(ranges.len() - 1),
        Err(i) => i.min(ranges.len() - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{SpanSource, TranscriptWord};
    use proptest::prelude::*;

    fn curve(values: Vec<f64>) -> RetentionCurve {
        RetentionCurve {
            episode_id: "ep".into(),
            listener_count: Some(1000),
            values,
        }
    }

    /// Flat curve at `level` with a trapezoid dip: down-ramp over
    /// [a0, a1], flat bottom [a1, a2], up-ramp [a2, a3].
    fn trapezoid(len: usize, level: f64, a0: usize, a1: usize, a2: usize, a3: usize, depth: f64) -> Vec<f64> {
        (0..len)
            .map(|t| {
                let drop = if t <= a0 || t >= a3 {
                    0.0
                } else if t < a1 {
                    depth * (t - a0) as f64 / (a1 - a0) as f64
                } else if t <= a2 {
                    depth
                } else {
                    depth * (a3 - t) as f64 / (a3 - a2) as f64
                };
                level - drop
            })
            .collect()
    }

    #[test]
    fn v_notch_is_detected() {
        let mut values = vec![0.8; 601];
        values[299] = 0.75;
        values[300] = 0.7;
        values[301] = 0.75;
        let peaks = find_dip_peaks(&curve(values), 0.01, 60);
        assert_eq!(peaks, vec![300]);
    }

    #[test]
    fn monotone_curve_has_no_peaks() {
        let values: Vec<f64> = (0..600).map(|t| 1.0 - t as f64 / 1000.0).collect();
        assert!(find_dip_peaks(&curve(values), 0.01, 60).is_empty());
    }

    #[test]
    fn close_peaks_keep_higher_prominence() {
        let mut values = vec![0.8; 400];
        values[200] = 0.6;
        values[210] = 0.7;
        let peaks = find_dip_peaks(&curve(values), 0.01, 60);
        assert_eq!(peaks, vec![200]);
        // Far enough apart, both survive.
        let mut values = vec![0.8; 400];
        values[100] = 0.6;
        values[300] = 0.7;
        let peaks = find_dip_peaks(&curve(values), 0.01, 60);
        assert_eq!(peaks, vec![100, 300]);
    }

    #[test]
    fn plateau_counts_once() {
        let mut values = vec![0.8; 200];
        for v in values.iter_mut().take(106).skip(100) {
            *v = 0.7;
        }
        let peaks = find_dip_peaks(&curve(values), 0.01, 60);
        assert_eq!(peaks, vec![102]);
    }

    #[test]
    fn bounds_recover_planted_ramps() {
        let values = trapezoid(600, 0.9, 290, 300, 310, 320, 0.2);
        let c = curve(values);
        let peaks = find_dip_peaks(&c, 0.01, 60);
        assert_eq!(peaks, vec![305]);
        let dip = estimate_dip_bounds(&c, 305, 120).unwrap();
        assert_eq!(dip.start_s, 290);
        assert_eq!(dip.end_s, 320);
        assert!(dip.start_slope < 0.0);
        assert!(dip.end_slope > 0.0);
    }

    #[test]
    fn bounds_flag_missing_recovery() {
        // Drop with no recovery: end slope stays non-positive.
        let values: Vec<f64> = (0..400)
            .map(|t| if t < 200 { 0.9 } else { 0.9 - 0.1 * ((t - 200) as f64 / 10.0).min(1.0) })
            .collect();
        let dip = estimate_dip_bounds(&curve(values), 220, 120).unwrap();
        assert!(dip.end_slope <= 0.0);
    }

    #[test]
    fn bounds_reject_boundary_peak() {
        let values = vec![0.5; 10];
        assert!(matches!(
            estimate_dip_bounds(&curve(values.clone()), 0, 120),
            Err(Error::PeakAtBoundary { peak: 0 })
        ));
        assert!(matches!(
            estimate_dip_bounds(&curve(values), 9, 120),
            Err(Error::PeakAtBoundary { peak: 9 })
        ));
    }

    fn spoken_words(n: usize) -> Vec<TranscriptWord> {
        (0..n)
            .map(|i| TranscriptWord {
                token: if i % 10 == 9 { format!("w{i}.") } else { format!("w{i}") },
                start_s: i as f64,
                end_s: i as f64 + 1.0,
            })
            .collect()
    }

    #[test]
    fn segment_window_is_loosened_and_clamped() {
        let episode = Episode {
            id: "ep".into(),
            description: String::new(),
            words: spoken_words(400),
            retention_curve_id: None,
        };
        let dip = Dip {
            peak_s: 205,
            start_s: 200,
            end_s: 220,
            start_slope: -0.01,
            end_slope: 0.01,
        };
        let seg = extract_segment(&dip, &episode);
        assert_eq!(seg.window_start_s, 140.0);
        assert_eq!(seg.window_end_s, 310.0);
        // Sentences are 10 words = 10 s each; a sentence touching the window
        // boundary is included whole.
        assert!(seg.sentences.iter().any(|s| s.start_s == Some(140.0)));
        assert!(seg.sentences.iter().all(|s| s.end_s.unwrap() >= 140.0));
        assert!(seg.sentences.iter().all(|s| s.start_s.unwrap() <= 310.0));

        let early_dip = Dip {
            peak_s: 10,
            start_s: 5,
            end_s: 15,
            start_slope: -0.01,
            end_slope: 0.01,
        };
        let seg = extract_segment(&early_dip, &episode);
        assert_eq!(seg.window_start_s, 0.0);
    }

    #[test]
    fn word_error_counts_offsets() {
        let episode = Episode {
            id: "ep".into(),
            description: String::new(),
            words: spoken_words(100),
            retention_curve_id: None,
        };
        let ranges = word_char_ranges(&episode.words);
        // Gold span covers words 20..=39.
        let gold = Span {
            source: SpanSource::Transcript,
            start_char: ranges[20].0,
            end_char: ranges[39].1,
        };
        let dip = Dip {
            peak_s: 25,
            start_s: 15,
            end_s: 39,
            start_slope: -0.01,
            end_slope: 0.01,
        };
        let seg = extract_segment(&dip, &episode);
        let err = boundary_word_error(&seg, &gold, &episode).unwrap();
        // Dip start at 15 s falls inside word 14 ([14,15]) or 15 ([15,16]);
        // time 15.0 touches both, earlier wins: word 14, so 6 words early.
        assert_eq!(err.start_err_words, 6);
        assert_eq!(err.end_err_words, 1);
    }

    #[test]
    fn word_error_requires_transcript() {
        let episode = Episode {
            id: "ep".into(),
            description: String::new(),
            words: vec![],
            retention_curve_id: None,
        };
        let seg = DipSegment {
            episode_id: "ep".into(),
            window_start_s: 0.0,
            window_end_s: 0.0,
            dip: Dip {
                peak_s: 1,
                start_s: 0,
                end_s: 2,
                start_slope: 0.0,
                end_slope: 0.0,
            },
            sentences: vec![],
        };
        let gold = Span {
            source: SpanSource::Transcript,
            start_char: 0,
            end_char: 1,
        };
        assert!(matches!(
            boundary_word_error(&seg, &gold, &episode),
            Err(Error::EmptyInput("transcript"))
        ));
    }

    proptest! {
        #[test]
        fn peaks_are_interior_local_maxima(values in proptest::collection::vec(0.0f64..=1.0, 3..120)) {
            let c = curve(values.clone());
            for p in find_dip_peaks(&c, 0.01, 5) {
                prop_assert!(p > 0 && p + 1 < values.len());
                let y: Vec<f64> = values.iter().map(|v| -v).collect();
                prop_assert!(y[p] >= y[p - 1]);
                prop_assert!(y[p] >= y[p + 1]);
            }
        }

        #[test]
        fn kept_peaks_respect_min_distance(values in proptest::collection::vec(0.0f64..=1.0, 3..120)) {
            let c = curve(values);
            let peaks = find_dip_peaks(&c, 0.01, 7);
            for w in peaks.windows(2) {
                prop_assert!(w[1] - w[0] >= 7);
            }
        }
    }
}
