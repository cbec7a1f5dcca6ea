//! Deterministic input builders shared by the benchmarks: probability
//! sequences with a planted high block, labeled sentences drawn from the
//! synthetic corpus, and a retention curve with several planted dips.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ecdetect_core::corpus::{label_sentences, segment_transcript, transcript_text};
use ecdetect_core::synth::{generate, trapezoid_curve, PlantedDip, SynthConfig};
use ecdetect_core::{Label, SpanSource};

/// Noisy probabilities near 0, with one contiguous block near 1.
pub fn probs_with_block(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = n / 3;
    let end = start + n / 6;
    (0..n)
        .map(|i| {
            if (start..end).contains(&i) {
                rng.gen_range(0.85..0.99)
            } else {
                rng.gen_range(0.01..0.15)
            }
        })
        .collect()
}

/// Labeled transcript sentences from a small synthetic corpus.
pub fn labeled_sentences(n_episodes: usize, seed: u64) -> (Vec<String>, Vec<Label>) {
    let corpus = generate(&SynthConfig {
        n_episodes,
        seed,
        ..SynthConfig::default()
    });
    let mut texts = Vec::new();
    let mut labels = Vec::new();
    for ep in &corpus.episodes {
        let sentences = segment_transcript(&ep.words);
        let len = transcript_text(&ep.words).chars().count();
        let spans: Vec<_> = corpus
            .annotations
            .iter()
            .filter(|a| a.episode_id == ep.id && a.source == SpanSource::Transcript)
            .flat_map(|a| a.spans())
            .collect();
        for l in label_sentences(&sentences, &spans, len).unwrap() {
            texts.push(l.sentence.text);
            labels.push(l.label);
        }
    }
    (texts, labels)
}

/// An hour-long retention curve with three planted dips, plus mild noise.
pub fn noisy_curve_with_dips(seed: u64) -> ecdetect_core::RetentionCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = trapezoid_curve(
        "bench",
        3600,
        0.95,
        5000,
        &PlantedDip {
            start_s: 300,
            end_s: 360,
            ramp_s: 6,
            depth: 0.12,
        },
    );
    for dip in [
        PlantedDip { start_s: 1400, end_s: 1470, ramp_s: 8, depth: 0.10 },
        PlantedDip { start_s: 2800, end_s: 2855, ramp_s: 5, depth: 0.15 },
    ] {
        let overlay = trapezoid_curve("o", 3600, 0.95, 5000, &dip);
        for (v, o) in curve.values.iter_mut().zip(&overlay.values) {
            *v = v.min(*o);
        }
    }
    for v in curve.values.iter_mut() {
        *v = (*v + rng.gen_range(-0.002..0.002)).clamp(0.0, 1.0);
    }
    curve
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_are_deterministic_and_well_formed() {
        assert_eq!(probs_with_block(120, 1), probs_with_block(120, 1));
        assert!(probs_with_block(120, 1).iter().all(|p| (0.0..=1.0).contains(p)));

        let (texts, labels) = labeled_sentences(4, 2);
        assert_eq!(texts.len(), labels.len());
        assert!(labels.contains(&Label::Ec) && labels.contains(&Label::Content));

        let curve = noisy_curve_with_dips(3);
        assert_eq!(curve.values.len(), 3601);
        assert!(curve.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
