//! Hot-path benchmarks: change-point search, kernel smoothing, dip peak
//! finding, feature fitting, model training, and summary scoring.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ecdetect_bench::{labeled_sentences, noisy_curve_with_dips, probs_with_block};
use ecdetect_core::dipdetect::{find_dip_peaks, DEFAULT_MIN_DISTANCE_S, DEFAULT_MIN_PROMINENCE};
use ecdetect_core::docdecode::{detect_change_point, smooth, DEFAULT_MIN_LLR};
use ecdetect_core::features::fit_tfidf;
use ecdetect_core::linear::train;
use ecdetect_core::rouge_eval::rouge_l;
use ecdetect_core::{
    FeatureVector, Label, ModelKind, ProbSequence, SmoothingConfig, TrainConfig,
};

fn bench_decoding(c: &mut Criterion) {
    let seq = ProbSequence::new("b", probs_with_block(200, 11)).unwrap();
    c.bench_function("change_point_200_sentences", |b| {
        b.iter(|| detect_change_point(black_box(&seq), DEFAULT_MIN_LLR).unwrap())
    });

    let long = ProbSequence::new("b", probs_with_block(500, 12)).unwrap();
    let cfg = SmoothingConfig::default();
    c.bench_function("smooth_500_sentences", |b| {
        b.iter(|| smooth(black_box(&long), &cfg))
    });
}

fn bench_dip_search(c: &mut Criterion) {
    let curve = noisy_curve_with_dips(13);
    c.bench_function("find_dip_peaks_1h_curve", |b| {
        b.iter(|| find_dip_peaks(black_box(&curve), DEFAULT_MIN_PROMINENCE, DEFAULT_MIN_DISTANCE_S))
    });
}

fn bench_features_and_training(c: &mut Criterion) {
    let (texts, labels) = labeled_sentences(10, 14);
    c.bench_function("fit_tfidf_unigram", |b| {
        b.iter(|| fit_tfidf(black_box(&texts), 1).unwrap())
    });

    let tfidf = fit_tfidf(&texts, 1).unwrap();
    let examples: Vec<(FeatureVector, Label)> = texts
        .iter()
        .zip(&labels)
        .map(|(t, &l)| (tfidf.transform(t), l))
        .collect();
    let cfg = TrainConfig::default();
    let mut group = c.benchmark_group("training");
    group.sample_size(10);
    group.bench_function("logistic_20_epochs", |b| {
        b.iter(|| train(ModelKind::Logistic, black_box(&examples), &cfg).unwrap())
    });
    group.bench_function("svm_20_epochs", |b| {
        b.iter(|| train(ModelKind::Svm, black_box(&examples), &cfg).unwrap())
    });
    group.finish();
}

fn bench_summary_scoring(c: &mut Criterion) {
    let (texts, _) = labeled_sentences(2, 15);
    let candidate = texts[..texts.len() / 2].join(" ");
    let reference = texts[texts.len() / 4..].join(" ");
    c.bench_function("rouge_l_long_summaries", |b| {
        b.iter(|| rouge_l(black_box(&candidate), black_box(&reference), 1.2))
    });
}

criterion_group!(
    benches,
    bench_decoding,
    bench_dip_search,
    bench_features_and_training,
    bench_summary_scoring
);
criterion_main!(benches);
