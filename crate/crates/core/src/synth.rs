//! Synthetic corpus generator with planted ground truth.
//!
//! End-to-end benchmarks need a corpus where the true extraneous spans and
//! the matching retention dips are known by construction. Episodes are built
//! from two disjoint word pools (topical content vs. ad/promo), with
//! off-pool rates controlling how separable the two classes are. Ad blocks
//! are contiguous sentence runs; each gets a trapezoid dip planted in the
//! episode's retention curve over the block's time range.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    word_char_ranges, AnnotationRecord, CharRange, Episode, SpanSource, TranscriptWord,
};
use crate::dipdetect::RetentionCurve;

const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "an", "to", "and", "of", "in", "on", "for", "with", "we", "you", "this", "that",
    "it", "is", "are", "was", "our", "your", "at", "by", "from", "about",
];

const CONTENT_WORDS: &[&str] = &[
    "history", "science", "climate", "ocean", "music", "film", "novel", "author", "guest",
    "interview", "research", "study", "battle", "empire", "city", "village", "election",
    "policy", "economy", "market", "startup", "founder", "galaxy", "planet", "telescope",
    "fossil", "species", "brain", "memory", "language", "dialect", "recipe", "kitchen",
    "harvest", "mountain", "river", "expedition", "artist", "gallery", "symphony", "league",
    "season", "coach", "injury", "courtroom", "verdict", "witness", "archive", "letter",
    "diary", "migration", "border", "treaty", "revolution", "factory", "railway", "harbor",
    "drought", "glacier", "reef", "virus", "vaccine", "therapy", "mystery", "suspect",
    "detective", "poem", "myth", "legend", "temple", "ruin", "manuscript", "philosopher",
    "theory", "experiment", "particle", "orbit", "comet", "drummer", "ballad", "festival",
    "director", "scene", "script", "champion", "tournament", "referee", "explains", "explores",
    "argues", "describes", "recalls", "reveals", "traces", "examines", "ancient", "modern",
    "forgotten", "remarkable", "unexpected", "curious", "wartime", "medieval",
];

const AD_WORDS: &[&str] = &[
    "sponsor", "sponsored", "discount", "code", "promo", "offer", "deal", "save", "savings",
    "percent", "free", "trial", "premium", "subscribe", "subscription", "membership", "upgrade",
    "bundle", "coupon", "checkout", "shipping", "order", "store", "shop", "merch", "patreon",
    "supporters", "donate", "newsletter", "review", "rating", "stars", "follow", "instagram",
    "twitter", "facebook", "youtube", "channel", "link", "website", "click", "download", "app",
    "signup", "bonus", "exclusive", "limited", "partner", "brand", "mattress", "vpn",
    "audiobook",
];

/// Knobs for corpus size and class separability. Off-pool rates are the
/// probability that a non-function word is drawn from the opposite pool,
/// which sets how often a sentence reads like the other class. A small
/// share of transcript ad sentences are "weak" (segue-like, drawn at a
/// much higher off-pool rate) so per-sentence classifiers have a realistic
/// error tail for the document decoder to clean up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_episodes: usize,
    pub seed: u64,
    pub word_duration_s: f64,
    pub function_word_rate: f64,
    pub transcript_ec_offpool: f64,
    pub transcript_content_offpool: f64,
    pub transcript_weak_ec_rate: f64,
    pub transcript_weak_ec_offpool: f64,
    pub description_ec_offpool: f64,
    pub description_content_offpool: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_episodes: 200,
            seed: 7,
            word_duration_s: 0.35,
            function_word_rate: 0.35,
            transcript_ec_offpool: 0.03,
            transcript_content_offpool: 0.005,
            transcript_weak_ec_rate: 0.05,
            transcript_weak_ec_offpool: 0.55,
            description_ec_offpool: 0.06,
            description_content_offpool: 0.005,
        }
    }
}

/// One planted ad block and the dip covering it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedBlock {
    pub start_word: usize,
    pub end_word: usize,
    pub start_sentence: usize,
    pub end_sentence: usize,
    pub dip_start_s: usize,
    pub dip_end_s: usize,
}

/// Ground truth for one episode. Sentence and word ranges are half-open;
/// `description_ec_start` is the first extraneous description sentence, if
/// any (extraneous description sentences always form a suffix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub episode_id: String,
    pub blocks: Vec<PlantedBlock>,
    pub description_ec_start: Option<usize>,
    pub n_description_sentences: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub episodes: Vec<Episode>,
    pub curves: Vec<RetentionCurve>,
    pub annotations: Vec<AnnotationRecord>,
    pub truths: Vec<PlantedTruth>,
}

/// A noiseless trapezoid dip: ramps of `ramp_s` seconds down to a flat
/// bottom, planted over `[start_s, end_s]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedDip {
    pub start_s: usize,
    pub end_s: usize,
    pub ramp_s: usize,
    pub depth: f64,
}

fn trapezoid_depth(sec: usize, start_s: usize, end_s: usize, ramp_s: usize, depth: f64) -> f64 {
    if sec <= start_s || sec >= end_s {
        return 0.0;
    }
    let into = (sec - start_s).min(end_s - sec) as f64;
    depth * (into / ramp_s as f64).min(1.0)
}

/// Builds a flat-base retention curve with one noiseless trapezoid dip.
/// The flat bottom is at least 3 samples wide, so the dip's deepest point is
/// strictly inside `[start_s, end_s]` and boundary estimation can recover
/// the planted corners exactly.
pub fn trapezoid_curve(
    episode_id: &str,
    duration_s: usize,
    base: f64,
    listener_count: u64,
    dip: &PlantedDip,
) -> RetentionCurve {
    assert!(dip.start_s > 0 && dip.end_s < duration_s, "dip must be interior");
    assert!(dip.ramp_s >= 1, "ramp must be at least 1 s");
    assert!(
        dip.end_s - dip.start_s >= 2 * dip.ramp_s + 3,
        "dip too narrow for its ramps"
    );
    assert!(base <= 1.0 && dip.depth > 0.0 && base - dip.depth >= 0.0);
    let values = (0..=duration_s)
        .map(|sec| base - trapezoid_depth(sec, dip.start_s, dip.end_s, dip.ramp_s, dip.depth))
        .collect();
    RetentionCurve {
        episode_id: episode_id.to_string(),
        listener_count: Some(listener_count),
        values,
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence_tokens(
    rng: &mut ChaCha8Rng,
    own: &[&str],
    other: &[&str],
    offpool_rate: f64,
    function_word_rate: f64,
    len: usize,
) -> Vec<String> {
    assert!(len >= 1);
    let mut toks: Vec<String> = (0..len)
        .map(|_| {
            let pool = if rng.gen::<f64>() < function_word_rate {
                FUNCTION_WORDS
            } else if rng.gen::<f64>() < offpool_rate {
                other
            } else {
                own
            };
            (*pool.choose(rng).expect("pools are non-empty")).to_string()
        })
        .collect();
    let first = toks.first_mut().expect("len >= 1");
    *first = capitalize(first);
    let r = rng.gen::<f64>();
    let terminal = if r < 0.06 {
        '!'
    } else if r < 0.10 {
        '?'
    } else {
        '.'
    };
    toks.last_mut().expect("len >= 1").push(terminal);
    toks
}

struct DipParam {
    start_s: usize,
    end_s: usize,
    ramp_s: usize,
    depth: f64,
}

/// Generates a corpus of episodes with transcripts, descriptions, retention
/// curves, gold span annotations, and planted ground truth. Deterministic in
/// the config (including the seed).
///
/// Episode mix: 10% with no ad block, 25% long episodes with one early
/// block (leaving a long clean tail), 45% with one mid-episode block, 20%
/// with two well-separated blocks. Blocks are 4-6 sentences; sentences are
/// 10-14 words spoken back to back. Descriptions are 2-6 topical sentences,
/// 65% of them followed by 1-3 extraneous sentences (30% of those set off
/// with a "---" delimiter).
pub fn generate(cfg: &SynthConfig) -> SynthCorpus {
    assert!(cfg.n_episodes > 0, "n_episodes must be positive");
    assert!(cfg.word_duration_s > 0.0, "word_duration_s must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dur = cfg.word_duration_s;

    let mut episodes = Vec::with_capacity(cfg.n_episodes);
    let mut curves = Vec::with_capacity(cfg.n_episodes);
    let mut annotations = Vec::with_capacity(cfg.n_episodes * 2);
    let mut truths = Vec::with_capacity(cfg.n_episodes);

    for e in 0..cfg.n_episodes {
        let id = format!("ep{e:05}");

        let draw = rng.gen::<f64>();
        let (n_sents, plans): (usize, Vec<(usize, usize)>) = if draw < 0.10 {
            (rng.gen_range(40..=80), Vec::new())
        } else if draw < 0.35 {
            let n = rng.gen_range(140..=220);
            (n, vec![(rng.gen_range(5..=15), rng.gen_range(7..=10))])
        } else if draw < 0.80 {
            let n = rng.gen_range(50..=100);
            let start = rng.gen_range(n / 3..=2 * n / 3);
            (n, vec![(start, rng.gen_range(7..=10))])
        } else {
            let n = rng.gen_range(120..=200);
            let first = (rng.gen_range(8..=20), rng.gen_range(7..=10));
            let start2 = first.0 + first.1 + rng.gen_range(60..=80);
            (n, vec![first, (start2, rng.gen_range(7..=10))])
        };

        let mut words: Vec<TranscriptWord> = Vec::new();
        let mut word_ranges: Vec<(usize, usize)> = vec![(usize::MAX, 0); plans.len()];
        let mut sent_ranges: Vec<(usize, usize)> = vec![(usize::MAX, 0); plans.len()];
        let mut t = 0.0;
        for s in 0..n_sents {
            let block = plans.iter().position(|&(bs, bl)| s >= bs && s < bs + bl);
            let len = rng.gen_range(10..=14);
            let toks = match block {
                Some(_) => {
                    let offpool = if rng.gen::<f64>() < cfg.transcript_weak_ec_rate {
                        cfg.transcript_weak_ec_offpool
                    } else {
                        cfg.transcript_ec_offpool
                    };
                    sentence_tokens(
                        &mut rng,
                        AD_WORDS,
                        CONTENT_WORDS,
                        offpool,
                        cfg.function_word_rate,
                        len,
                    )
                }
                None => sentence_tokens(
                    &mut rng,
                    CONTENT_WORDS,
                    AD_WORDS,
                    cfg.transcript_content_offpool,
                    cfg.function_word_rate,
                    len,
                ),
            };
            let w0 = words.len();
            for token in toks {
                words.push(TranscriptWord {
                    token,
                    start_s: t,
                    end_s: t + dur,
                });
                t += dur;
            }
            if let Some(b) = block {
                word_ranges[b].0 = word_ranges[b].0.min(w0);
                word_ranges[b].1 = words.len();
                sent_ranges[b].0 = sent_ranges[b].0.min(s);
                sent_ranges[b].1 = s + 1;
            }
        }

        let char_ranges = word_char_ranges(&words);
        let transcript_spans: Vec<CharRange> = word_ranges
            .iter()
            .map(|&(w0, w1)| CharRange {
                start: char_ranges[w0].0,
                end: char_ranges[w1 - 1].1,
            })
            .collect();

        let duration = words.last().expect("n_sents >= 1").end_s.ceil() as usize;
        let mut blocks = Vec::with_capacity(plans.len());
        let mut dips = Vec::with_capacity(plans.len());
        for (b, &(w0, w1)) in word_ranges.iter().enumerate() {
            let ds = words[w0].start_s.floor() as usize;
            let de = words[w1 - 1].end_s.ceil() as usize;
            // Blocks are at least 4 x 10 x 0.35 = 14 s, so a 5 s ramp always
            // leaves a flat bottom of 3+ samples.
            let ramp_hi = ((de - ds - 3) / 2).min(8).max(5);
            let ramp_s = rng.gen_range(5..=ramp_hi);
            let depth = rng.gen_range(0.08..0.2);
            dips.push(DipParam {
                start_s: ds,
                end_s: de,
                ramp_s,
                depth,
            });
            blocks.push(PlantedBlock {
                start_word: w0,
                end_word: w1,
                start_sentence: sent_ranges[b].0,
                end_sentence: sent_ranges[b].1,
                dip_start_s: ds,
                dip_end_s: de,
            });
        }

        let start_level = rng.gen_range(0.90..0.97);
        let decay = rng.gen_range(2e-5..6e-5);
        let values: Vec<f64> = (0..=duration)
            .map(|sec| {
                let mut v = start_level - decay * sec as f64 + rng.gen_range(-0.002..0.002);
                for d in &dips {
                    v -= trapezoid_depth(sec, d.start_s, d.end_s, d.ramp_s, d.depth);
                }
                v.clamp(0.0, 1.0)
            })
            .collect();
        let listener_count = if rng.gen::<f64>() < 0.02 {
            rng.gen_range(20u64..100)
        } else {
            rng.gen_range(500u64..50_000)
        };

        let n_content = rng.gen_range(2..=6);
        let n_ec = if rng.gen::<f64>() < 0.35 {
            0
        } else {
            rng.gen_range(1..=3)
        };
        let use_delim = n_ec > 0 && rng.gen::<f64>() < 0.30;
        let mut description = String::new();
        let mut char_len = 0usize;
        let mut desc_spans = Vec::new();
        for j in 0..(n_content + n_ec) {
            let is_ec = j >= n_content;
            if j > 0 {
                let sep = if is_ec && j == n_content && use_delim { " --- " } else { " " };
                description.push_str(sep);
                char_len += sep.len();
            }
            let len = rng.gen_range(8..=14);
            let toks = if is_ec {
                sentence_tokens(
                    &mut rng,
                    AD_WORDS,
                    CONTENT_WORDS,
                    cfg.description_ec_offpool,
                    cfg.function_word_rate,
                    len,
                )
            } else {
                sentence_tokens(
                    &mut rng,
                    CONTENT_WORDS,
                    AD_WORDS,
                    cfg.description_content_offpool,
                    cfg.function_word_rate,
                    len,
                )
            };
            let text = toks.join(" ");
            let start = char_len;
            char_len += text.chars().count();
            description.push_str(&text);
            if is_ec {
                desc_spans.push(CharRange {
                    start,
                    end: char_len,
                });
            }
        }

        episodes.push(Episode {
            id: id.clone(),
            description,
            words,
            retention_curve_id: Some(id.clone()),
        });
        curves.push(RetentionCurve {
            episode_id: id.clone(),
            listener_count: Some(listener_count),
            values,
        });
        annotations.push(AnnotationRecord {
            episode_id: id.clone(),
            source: SpanSource::Transcript,
            spans: transcript_spans,
        });
        annotations.push(AnnotationRecord {
            episode_id: id.clone(),
            source: SpanSource::Description,
            spans: desc_spans,
        });
        truths.push(PlantedTruth {
            episode_id: id,
            blocks,
            description_ec_start: (n_ec > 0).then_some(n_content),
            n_description_sentences: n_content + n_ec,
        });
    }

    SynthCorpus {
        episodes,
        curves,
        annotations,
        truths,
    }
}
