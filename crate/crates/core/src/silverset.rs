//! Silver training data from retention dips.
//!
//! Episodes with retention curves but no human labels still carry a weak
//! signal: sentences spoken inside a retention dip are far more likely to be
//! extraneous. A classifier trained on the small gold set with dip-position
//! markers prepended to each sentence relabels dip segments; its predictions
//! become silver labels. Negatives are sampled from regions far from every
//! dip.

use serde::{Deserialize, Serialize};

use crate::corpus::{Episode, Label, Sentence};
use crate::dipdetect::Dip;
use crate::error::Result;
use crate::features::{compose_input, TfidfModel};
use crate::linear::LinearModel;

pub const MARKER_IN_DIP: &str = "in-dip";
pub const MARKER_OUTSIDE_DIP: &str = "outside-dip";
pub const DEFAULT_MIN_GAP_S: f64 = 300.0;

/// A sentence with its dip-position marker prepended to the text.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSentence {
    pub sentence: Sentence,
    pub in_dip: bool,
    pub marked_text: String,
}

/// Whether `[a, b]` and `[c, d]` intersect as closed intervals.
fn intervals_overlap(a: f64, b: f64, c: f64, d: f64) -> bool {
    a <= d && c <= b
}

/// Marks each sentence of a dip segment by whether its time span intersects
/// the dip interval `[start_s, end_s]`. Sentences without timings (not from
/// a transcript) count as outside the dip.
pub fn mark_segment(sentences: &[Sentence], dip: &Dip) -> Vec<MarkedSentence> {
    sentences
        .iter()
        .map(|s| {
            let in_dip = match (s.start_s, s.end_s) {
                (Some(a), Some(b)) => {
                    intervals_overlap(a, b, dip.start_s as f64, dip.end_s as f64)
                }
                _ => false,
            };
            let marker = if in_dip { MARKER_IN_DIP } else { MARKER_OUTSIDE_DIP };
            MarkedSentence {
                sentence: s.clone(),
                in_dip,
                marked_text: format!("{marker} {}", s.text),
            }
        })
        .collect()
}

/// Where a silver sample came from: the dip peak for dip-segment samples,
/// absent for sampled negatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilverProvenance {
    pub dip_peak_s: Option<usize>,
}

/// One silver-labeled sentence. `text` is the original sentence text; markers
/// never leak into the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilverSample {
    pub episode_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub start_s: Option<f64>,
    pub end_s: Option<f64>,
    pub label: Label,
    pub prob: f64,
    pub provenance: SilverProvenance,
}

/// Relabels one dip segment with the marker-aware model and emits silver
/// samples carrying the original (marker-free) sentence text.
///
/// With `with_context`, classifier inputs get the previous marked sentence
/// prepended, matching the context-augmented training inputs; the first
/// sentence gets the start token.
pub fn build_silver(
    model: &LinearModel,
    tfidf: &TfidfModel,
    episode_id: &str,
    sentences: &[Sentence],
    dip: &Dip,
    with_context: bool,
) -> Result<Vec<SilverSample>> {
    let marked = mark_segment(sentences, dip);
    let texts: Vec<&str> = marked.iter().map(|m| m.marked_text.as_str()).collect();
    let mut samples = Vec::with_capacity(marked.len());
    for (i, m) in marked.iter().enumerate() {
        let input = compose_input(&texts, i, with_context)?;
        let prob = model.predict_proba(&tfidf.transform(&input));
        samples.push(SilverSample {
            episode_id: episode_id.to_string(),
            sentence_index: m.sentence.index,
            text: m.sentence.text.clone(),
            start_s: m.sentence.start_s,
            end_s: m.sentence.end_s,
            label: if prob >= 0.5 { Label::Ec } else { Label::Content },
            prob,
            provenance: SilverProvenance {
                dip_peak_s: Some(dip.peak_s),
            },
        });
    }
    Ok(samples)
}

/// Distance between closed intervals `[a, b]` and `[c, d]`; zero when they
/// overlap.
fn interval_distance(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (c - b).max(a - d).max(0.0)
}

/// Content-labeled negatives: every transcript sentence whose whole time span
/// lies at least `min_gap_s` from every dip interval. Sentences without
/// timings are never eligible. Callers subsample to whatever ratio they need.
pub fn sample_negatives(
    episode: &Episode,
    sentences: &[Sentence],
    dips: &[Dip],
    min_gap_s: f64,
) -> Vec<SilverSample> {
    sentences
        .iter()
        .filter(|s| {
            let (Some(a), Some(b)) = (s.start_s, s.end_s) else {
                return false;
            };
            dips.iter().all(|d| {
                interval_distance(a, b, d.start_s as f64, d.end_s as f64) >= min_gap_s
            })
        })
        .map(|s| SilverSample {
            episode_id: episode.id.clone(),
            sentence_index: s.index,
            text: s.text.clone(),
            start_s: s.start_s,
            end_s: s.end_s,
            label: Label::Content,
            prob: 0.0,
            provenance: SilverProvenance { dip_peak_s: None },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{segment_transcript, TranscriptWord};
    use crate::features::fit_tfidf;
    use crate::linear::{train, ModelKind, TrainConfig};

    fn sentence(index: usize, text: &str, start_s: f64, end_s: f64) -> Sentence {
        Sentence {
            index,
            text: text.to_string(),
            start_char: 0,
            end_char: text.chars().count(),
            start_s: Some(start_s),
            end_s: Some(end_s),
        }
    }

    fn dip(peak_s: usize, start_s: usize, end_s: usize) -> Dip {
        Dip {
            peak_s,
            start_s,
            end_s,
            start_slope: 0.0,
            end_slope: 0.0,
        }
    }

    #[test]
    fn marks_by_time_overlap() {
        let sents = vec![
            sentence(0, "intro talk.", 0.0, 50.0),
            sentence(1, "buy the thing.", 90.0, 120.0),
            sentence(2, "back to it.", 160.0, 200.0),
        ];
        let marked = mark_segment(&sents, &dip(100, 85, 150));
        assert!(!marked[0].in_dip);
        assert!(marked[1].in_dip);
        assert!(!marked[2].in_dip);
        assert_eq!(marked[1].marked_text, "in-dip buy the thing.");
        assert_eq!(marked[0].marked_text, "outside-dip intro talk.");
    }

    #[test]
    fn boundary_touch_counts_as_in_dip() {
        let sents = vec![sentence(0, "edge.", 0.0, 85.0)];
        let marked = mark_segment(&sents, &dip(100, 85, 150));
        assert!(marked[0].in_dip);
    }

    #[test]
    fn untimed_sentences_are_outside() {
        let mut s = sentence(0, "desc text.", 0.0, 0.0);
        s.start_s = None;
        s.end_s = None;
        let marked = mark_segment(&[s], &dip(100, 85, 150));
        assert!(!marked[0].in_dip);
    }

    #[test]
    fn silver_samples_carry_original_text() {
        let docs = vec![
            "in-dip buy our sponsor product now".to_string(),
            "in-dip use code podcast for discount".to_string(),
            "outside-dip the guest explains the history".to_string(),
            "outside-dip today we discuss the topic".to_string(),
        ];
        let tfidf = fit_tfidf(&docs, 1).unwrap();
        let labels = [Label::Ec, Label::Ec, Label::Content, Label::Content];
        let examples: Vec<_> = docs
            .iter()
            .zip(labels)
            .map(|(d, l)| (tfidf.transform(d), l))
            .collect();
        let cfg = TrainConfig {
            epochs: 200,
            ..TrainConfig::default()
        };
        let model = train(ModelKind::Logistic, &examples, &cfg).unwrap();

        let sents = vec![
            sentence(0, "the guest explains the history", 0.0, 50.0),
            sentence(1, "buy our sponsor product now", 90.0, 120.0),
        ];
        let d = dip(100, 85, 150);
        let samples = build_silver(&model, &tfidf, "ep1", &sents, &d, false).unwrap();
        assert_eq!(samples.len(), 2);
        for s in &samples {
            assert!(!s.text.contains(MARKER_IN_DIP));
            assert!(!s.text.contains(MARKER_OUTSIDE_DIP));
            assert_eq!(s.provenance.dip_peak_s, Some(100));
        }
        assert_eq!(samples[0].label, Label::Content);
        assert_eq!(samples[1].label, Label::Ec);
        assert_eq!(samples[1].text, "buy our sponsor product now");
    }

    #[test]
    fn negatives_respect_min_gap() {
        // 2000 one-second words, a sentence break every 10 words, so
        // sentences tile the timeline in 10 s steps.
        let words: Vec<TranscriptWord> = (0..2000)
            .map(|i| TranscriptWord {
                token: if i % 10 == 9 { "word.".to_string() } else { "word".to_string() },
                start_s: i as f64,
                end_s: (i + 1) as f64,
            })
            .collect();
        let episode = Episode {
            id: "ep1".to_string(),
            description: String::new(),
            words,
            retention_curve_id: None,
        };
        let sents = segment_transcript(&episode.words);
        let dips = vec![dip(1000, 950, 1050)];
        let negs = sample_negatives(&episode, &sents, &dips, 300.0);
        assert!(!negs.is_empty());
        for n in &negs {
            let (a, b) = (n.start_s.unwrap(), n.end_s.unwrap());
            assert!(b <= 650.0 || a >= 1350.0, "sentence at {a}..{b}");
            assert_eq!(n.label, Label::Content);
            assert_eq!(n.provenance.dip_peak_s, None);
        }
        // The sentence ending exactly 300 s before the dip is still eligible.
        assert!(negs.iter().any(|n| n.end_s == Some(650.0)));
        assert!(negs.iter().all(|n| n.end_s != Some(660.0)));
    }

    #[test]
    fn no_dips_means_everything_is_negative() {
        let sents = vec![sentence(0, "talk.", 0.0, 10.0)];
        let episode = Episode {
            id: "ep1".to_string(),
            description: String::new(),
            words: vec![],
            retention_curve_id: None,
        };
        let negs = sample_negatives(&episode, &sents, &[], 300.0);
        assert_eq!(negs.len(), 1);
    }

    #[test]
    fn interval_distance_cases() {
        assert_eq!(interval_distance(0.0, 10.0, 5.0, 15.0), 0.0);
        assert_eq!(interval_distance(0.0, 10.0, 20.0, 30.0), 10.0);
        assert_eq!(interval_distance(20.0, 30.0, 0.0, 10.0), 10.0);
        assert_eq!(interval_distance(0.0, 10.0, 10.0, 20.0), 0.0);
    }
}
