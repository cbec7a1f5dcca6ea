//! Document-level decoding of per-sentence probabilities.
//!
//! Raw classifier probabilities are noisy at isolated sentences. Transcripts
//! are decoded by Nadaraya-Watson kernel smoothing over sentence positions;
//! descriptions by a single change point splitting the document into a content
//! prefix and an extraneous suffix, with per-sentence thresholding as the
//! fallback when no change point is accepted.
//!
//! The change-point statistic compares Bernoulli likelihoods of the binarized
//! sequence under a two-parameter split against a single global rate:
//! `R_tau = l(H1) - l(H0)`, maximized over `tau`, with `0 * ln 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

pub const DEFAULT_BANDWIDTH: f64 = 1.5;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MIN_LLR: f64 = 2.0;

/// Per-sentence EC probabilities for one document, in sentence order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSequence {
    pub episode_id: String,
    probs: Vec<f64>,
}

impl ProbSequence {
    /// Validates that the sequence is non-empty with probabilities in [0, 1].
    pub fn new(episode_id: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        let episode_id = episode_id.into();
        if probs.is_empty() {
            return Err(Error::EmptyInput("probability sequence"));
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(Error::Invalid(format!(
                    "document {episode_id:?}: probability {i} out of range: {p}"
                )));
            }
        }
        Ok(ProbSequence { episode_id, probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingConfig {
    pub bandwidth: f64,
    pub threshold: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            bandwidth: DEFAULT_BANDWIDTH,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Nadaraya-Watson smoothing over sentence positions with a Gaussian kernel:
/// `out_i = sum_j K((i-j)/h) p_j / sum_j K((i-j)/h)`, `K(u) = exp(-u^2/2)`.
pub fn smooth(seq: &ProbSequence, cfg: &SmoothingConfig) -> ProbSequence {
    assert!(cfg.bandwidth > 0.0, "bandwidth must be positive");
    let p = &seq.probs;
    let n = p.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, &pj) in p.iter().enumerate() {
            let u = (i as f64 - j as f64) / cfg.bandwidth;
            let k = (-0.5 * u * u).exp();
            num += k * pj;
            den += k;
        }
        out.push(num / den);
    }
    ProbSequence {
        episode_id: seq.episode_id.clone(),
        probs: out,
    }
}

/// Labels transcript sentences by thresholding the smoothed sequence:
/// `EC` iff `smooth(seq)_i >= threshold`.
pub fn decode_transcript(seq: &ProbSequence, cfg: &SmoothingConfig) -> Vec<Label> {
    smooth(seq, cfg)
        .probs
        .iter()
        .map(|&p| if p >= cfg.threshold { Label::Ec } else { Label::Content })
        .collect()
}

/// Result of change-point detection. `tau` (1-based: the prefix is sentences
/// `1..=tau`) is present iff the split was accepted; the remaining fields
/// describe the best candidate either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangePointResult {
    pub tau: Option<usize>,
    pub r_tau: f64,
    pub theta_pre: f64,
    pub theta_post: f64,
    pub accepted: bool,
}

/// Bernoulli log-likelihood of a segment with `k` ones out of `n` at its
/// maximum-likelihood rate, with the `0 * ln 0 = 0` convention.
fn segment_ll(k: usize, n: usize) -> f64 {
    let kf = k as f64;
    let nf = n as f64;
    let mut ll = 0.0;
    if k > 0 {
        ll += kf * (kf / nf).ln();
    }
    if k < n {
        ll += (nf - kf) * ((nf - kf) / nf).ln();
    }
    ll
}

/// Finds the best single change point of the binarized sequence
/// (`x_i = 1` iff `p_i >= 0.5`).
///
/// For each `tau` in `[1, N-1]` the statistic is the log-likelihood gain of
/// separate prefix/suffix Bernoulli rates over the global rate. Ties take the
/// smallest `tau`. The split is accepted iff `R_tau >= min_llr` and the
/// suffix rate exceeds the prefix rate (extraneous content trails the
/// document). Fails on sequences shorter than 2.
pub fn detect_change_point(seq: &ProbSequence, min_llr: f64) -> Result<ChangePointResult> {
    let n = seq.probs.len();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "change-point detection needs at least 2 sentences, got {n}"
        )));
    }
    let x: Vec<usize> = seq.probs.iter().map(|&p| usize::from(p >= 0.5)).collect();
    let total: usize = x.iter().sum();
    let ll0 = segment_ll(total, n);

    let mut best_tau = 1;
    let mut best_r = f64::NEG_INFINITY;
    let mut prefix_ones = 0;
    for tau in 1..n {
        prefix_ones += x[tau - 1];
        let r = segment_ll(prefix_ones, tau) + segment_ll(total - prefix_ones, n - tau) - ll0;
        if r > best_r {
            best_r = r;
            best_tau = tau;
        }
    }
    let best_prefix_ones: usize = x[..best_tau].iter().sum();
    let theta_pre = best_prefix_ones as f64 / best_tau as f64;
    let theta_post = (total - best_prefix_ones) as f64 / (n - best_tau) as f64;
    let accepted = best_r >= min_llr && theta_post > theta_pre;
    Ok(ChangePointResult {
        tau: accepted.then_some(best_tau),
        r_tau: best_r,
        theta_pre,
        theta_post,
        accepted,
    })
}

/// Labels description sentences: an accepted change point labels the prefix
/// `Content` and the suffix `EC`; otherwise each sentence is thresholded at
/// 0.5 independently.
pub fn decode_description(seq: &ProbSequence, min_llr: f64) -> Vec<Label> {
    let threshold_labels = |probs: &[f64]| -> Vec<Label> {
        probs
            .iter()
            .map(|&p| if p >= 0.5 { Label::Ec } else { Label::Content })
            .collect()
    };
    if seq.probs.len() < 2 {
        return threshold_labels(&seq.probs);
    }
    let result = detect_change_point(seq, min_llr).expect("length checked");
    match result.tau {
        Some(tau) => (0..seq.probs.len())
            .map(|i| if i < tau { Label::Content } else { Label::Ec })
            .collect(),
        None => threshold_labels(&seq.probs),
    }
}

/// Whether predicted and gold labels agree on every sentence of a document.
pub fn document_match(predicted: &[Label], gold: &[Label]) -> Result<bool> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: gold.len(),
        });
    }
    Ok(predicted == gold)
}

/// One record of a probabilities file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbRecord {
    pub episode_id: String,
    pub sentence_index: usize,
    pub prob: f64,
}

/// One record of a labels file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub episode_id: String,
    pub sentence_index: usize,
    pub label: Label,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(probs: &[f64]) -> ProbSequence {
        ProbSequence::new("ep", probs.to_vec()).unwrap()
    }

    #[test]
    fn sequence_validation() {
        assert!(ProbSequence::new("ep", vec![]).is_err());
        assert!(ProbSequence::new("ep", vec![0.5, 1.2]).is_err());
        assert!(ProbSequence::new("ep", vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn smoothing_suppresses_isolated_spike() {
        let mut probs = vec![0.1; 11];
        probs[5] = 0.9;
        let labels = decode_transcript(&seq(&probs), &SmoothingConfig::default());
        assert!(labels.iter().all(|&l| l == Label::Content));

        let mut probs = vec![0.9; 11];
        probs[5] = 0.1;
        let labels = decode_transcript(&seq(&probs), &SmoothingConfig::default());
        assert!(labels.iter().all(|&l| l == Label::Ec));
    }

    #[test]
    fn smoothing_preserves_blocks() {
        let mut probs = vec![0.05; 16];
        for p in probs.iter_mut().skip(10) {
            *p = 0.95;
        }
        let labels = decode_transcript(&seq(&probs), &SmoothingConfig::default());
        let ec_count = labels.iter().filter(|&&l| l == Label::Ec).count();
        assert!((5..=7).contains(&ec_count), "block roughly preserved: {ec_count}");
        assert!(labels[15] == Label::Ec && labels[0] == Label::Content);
    }

    #[test]
    fn change_point_on_clean_suffix() {
        let r = detect_change_point(&seq(&[0.1, 0.1, 0.9, 0.9]), 0.0).unwrap();
        assert_eq!(r.tau, Some(2));
        assert_eq!(r.theta_pre, 0.0);
        assert_eq!(r.theta_post, 1.0);
        assert!(r.accepted);
        // l(H1) = 0 and l(H0) = 4 ln(1/2), so the gain is 4 ln 2.
        assert!((r.r_tau - 4.0 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn change_point_rejects_wrong_direction() {
        let r = detect_change_point(&seq(&[0.9, 0.9, 0.1, 0.1]), 0.0).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.tau, None);
        assert!(r.theta_pre > r.theta_post);
    }

    #[test]
    fn change_point_rejects_weak_evidence() {
        let r = detect_change_point(&seq(&[0.1, 0.9]), 2.0).unwrap();
        // Best split has R = 2 ln 2 < 2.
        assert!(!r.accepted);
        assert!((r.r_tau - 2.0 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn change_point_needs_two_sentences() {
        assert!(detect_change_point(&seq(&[0.9]), 0.0).is_err());
    }

    #[test]
    fn constant_sequence_has_zero_gain() {
        let r = detect_change_point(&seq(&[0.9, 0.9, 0.9]), 0.0).unwrap();
        assert_eq!(r.r_tau, 0.0);
        // theta_post == theta_pre, so direction check rejects.
        assert!(!r.accepted);
    }

    #[test]
    fn decode_description_prefix_suffix() {
        use Label::{Content as C, Ec as E};
        let labels = decode_description(&seq(&[0.05, 0.1, 0.2, 0.9, 0.95]), 2.0);
        assert_eq!(labels, vec![C, C, C, E, E]);
        // Rejected split falls back to thresholding.
        let labels = decode_description(&seq(&[0.9, 0.1, 0.9, 0.1]), 2.0);
        assert_eq!(labels, vec![E, C, E, C]);
        let labels = decode_description(&seq(&[0.9]), 2.0);
        assert_eq!(labels, vec![E]);
    }

    #[test]
    fn document_match_requires_equal_lengths() {
        use Label::{Content as C, Ec as E};
        assert!(document_match(&[C, E], &[C, E]).unwrap());
        assert!(!document_match(&[C, E], &[C, C]).unwrap());
        assert!(document_match(&[C], &[C, C]).is_err());
    }

    proptest! {
        #[test]
        fn smoothing_stays_in_convex_hull(probs in proptest::collection::vec(0.0f64..=1.0, 1..40)) {
            let s = seq(&probs);
            let out = smooth(&s, &SmoothingConfig::default());
            let lo = probs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for &o in out.probs() {
                prop_assert!(o >= lo - 1e-9 && o <= hi + 1e-9);
            }
        }

        #[test]
        fn tiny_bandwidth_is_identity(probs in proptest::collection::vec(0.0f64..=1.0, 1..40)) {
            let s = seq(&probs);
            let out = smooth(&s, &SmoothingConfig { bandwidth: 1e-3, threshold: 0.5 });
            for (o, p) in out.probs().iter().zip(&probs) {
                prop_assert!((o - p).abs() < 1e-6);
            }
        }

        #[test]
        fn change_point_gain_is_nonnegative(probs in proptest::collection::vec(0.0f64..=1.0, 2..40)) {
            let r = detect_change_point(&seq(&probs), 2.0).unwrap();
            prop_assert!(r.r_tau >= -1e-9);
        }

        #[test]
        fn accepted_decode_is_content_then_ec(probs in proptest::collection::vec(0.0f64..=1.0, 2..40)) {
            let labels = decode_description(&seq(&probs), 1.0);
            let r = detect_change_point(&seq(&probs), 1.0).unwrap();
            if let Some(tau) = r.tau {
                for (i, &l) in labels.iter().enumerate() {
                    prop_assert_eq!(l == Label::Ec, i >= tau);
                }
            }
        }
    }
}
