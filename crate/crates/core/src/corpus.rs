//! Episode corpus: types, file loading, sentence segmentation, and span-based
//! sentence labeling.
//!
//! All character offsets in this crate count Unicode scalar values, not bytes.
//! Transcript word times are seconds from episode start.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;

/// Slack allowed between a word's end time and the next word's start time.
/// Forced-alignment output occasionally overlaps adjacent words slightly.
pub const WORD_TIME_EPSILON_S: f64 = 0.5;

/// Sentences running longer than this many tokens without terminal
/// punctuation are force-split.
pub const MAX_SENTENCE_TOKENS: usize = 150;

/// One time-aligned transcript token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptWord {
    #[serde(rename = "t")]
    pub token: String,
    #[serde(rename = "s")]
    pub start_s: f64,
    #[serde(rename = "e")]
    pub end_s: f64,
}

/// A podcast episode with its description and time-aligned transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub words: Vec<TranscriptWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retention_curve_id: Option<String>,
}

impl Episode {
    /// End time of the last transcript word, or 0 for an empty transcript.
    pub fn duration_s(&self) -> f64 {
        self.words.last().map_or(0.0, |w| w.end_s)
    }

    /// Checks the id and word-timing invariants.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidEpisode {
                id: self.id.clone(),
                reason: "empty id".into(),
            });
        }
        for (i, w) in self.words.iter().enumerate() {
            if !w.start_s.is_finite() || !w.end_s.is_finite() || w.start_s > w.end_s {
                return Err(Error::InvalidEpisode {
                    id: self.id.clone(),
                    reason: format!("word {i} has invalid times [{}, {}]", w.start_s, w.end_s),
                });
            }
            if let Some(next) = self.words.get(i + 1) {
                if w.end_s > next.start_s + WORD_TIME_EPSILON_S {
                    return Err(Error::InvalidEpisode {
                        id: self.id.clone(),
                        reason: format!("word {i} ends after word {} starts", i + 1),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Which source text a span or sentence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanSource {
    Description,
    Transcript,
}

impl SpanSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SpanSource::Description => "description",
            SpanSource::Transcript => "transcript",
        }
    }
}

/// A half-open character range `[start_char, end_char)` marking extraneous
/// content in one source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub source: SpanSource,
    pub start_char: usize,
    pub end_char: usize,
}

/// Character range as stored in annotation files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharRange {
    pub start: usize,
    pub end: usize,
}

/// One annotation file record: all extraneous-content spans for one source
/// text of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub episode_id: String,
    pub source: SpanSource,
    pub spans: Vec<CharRange>,
}

impl AnnotationRecord {
    pub fn spans(&self) -> Vec<Span> {
        self.spans
            .iter()
            .map(|r| Span {
                source: self.source,
                start_char: r.start,
                end_char: r.end,
            })
            .collect()
    }
}

/// A segmented sentence. `start_char`/`end_char` index into the source text;
/// `start_s`/`end_s` are set for transcript sentences only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub start_char: usize,
    pub end_char: usize,
    pub start_s: Option<f64>,
    pub end_s: Option<f64>,
}

/// Sentence-level class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "EC")]
    Ec,
    Content,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ec => "EC",
            Label::Content => "Content",
        }
    }
}

/// A sentence with its annotated-character coverage and resulting label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    #[serde(flatten)]
    pub sentence: Sentence,
    pub ec_fraction: f64,
    pub label: Label,
}

/// Loads episodes from a JSON-lines file and validates them. Fails on the
/// first malformed line (with its line number) or duplicate id.
pub fn load_episodes(path: &Path) -> Result<Vec<Episode>> {
    let episodes: Vec<Episode> = jsonl::read_records(path)?;
    let mut seen = HashSet::new();
    for episode in &episodes {
        episode.validate()?;
        if !seen.insert(episode.id.clone()) {
            return Err(Error::DuplicateId(episode.id.clone()));
        }
    }
    Ok(episodes)
}

/// Loads annotation records from a JSON-lines file.
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let records: Vec<AnnotationRecord> = jsonl::read_records(path)?;
    for record in &records {
        for span in &record.spans {
            if span.start >= span.end {
                return Err(Error::Invalid(format!(
                    "episode {:?}: empty or inverted span [{}, {})",
                    record.episode_id, span.start, span.end
                )));
            }
        }
    }
    Ok(records)
}

// Sentence delimiters that are dropped from the segmented text. Terminal
// punctuation (. ! ?) followed by whitespace also ends a sentence but stays
// part of it.
const DASH_DELIM: [char; 3] = ['-', '-', '-'];
const ELLIPSIS_DELIM: [char; 3] = ['.', '.', '.'];
const TRIPLE_SPACE_DELIM: [char; 3] = [' ', ' ', ' '];

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits an episode description into sentences.
///
/// Boundaries are terminal punctuation (`.` `!` `?`) followed by whitespace,
/// plus the delimiters `---`, `...`, and a run of three spaces. Delimiters are
/// excluded from sentence text; fragments that are empty after trimming are
/// dropped. Offsets index the original string in Unicode scalar values.
pub fn segment_description(text: &str) -> Vec<Sentence> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut sentences = Vec::new();
    let mut frag_start = 0;
    let mut i = 0;

    let flush = |start: usize, end: usize, out: &mut Vec<Sentence>| {
        let mut s = start;
        let mut e = end;
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if s < e {
            out.push(Sentence {
                index: out.len(),
                text: chars[s..e].iter().collect(),
                start_char: s,
                end_char: e,
                start_s: None,
                end_s: None,
            });
        }
    };

    while i < n {
        let window = &chars[i..(i + 3).min(n)];
        if window == DASH_DELIM || window == ELLIPSIS_DELIM || window == TRIPLE_SPACE_DELIM {
            flush(frag_start, i, &mut sentences);
            i += 3;
            frag_start = i;
        } else if is_terminal(chars[i]) && (i + 1 == n || chars[i + 1].is_whitespace()) {
            flush(frag_start, i + 1, &mut sentences);
            i += 1;
            frag_start = i;
        } else {
            i += 1;
        }
    }
    flush(frag_start, n, &mut sentences);
    sentences
}

/// The transcript source text: tokens joined by single spaces.
pub fn transcript_text(words: &[TranscriptWord]) -> String {
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&w.token);
    }
    out
}

/// Character range `[start, end)` of each token inside [`transcript_text`].
pub fn word_char_ranges(words: &[TranscriptWord]) -> Vec<(usize, usize)> {
    let mut ranges = Vec::with_capacity(words.len());
    let mut pos = 0;
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            pos += 1;
        }
        let len = w.token.chars().count();
        ranges.push((pos, pos + len));
        pos += len;
    }
    ranges
}

/// Splits a transcript into sentences over the joined token text.
///
/// A sentence ends after a token whose last character is terminal punctuation.
/// Runs longer than [`MAX_SENTENCE_TOKENS`] tokens without punctuation are
/// force-split. Each sentence carries the start time of its first word and the
/// end time of its last word.
pub fn segment_transcript(words: &[TranscriptWord]) -> Vec<Sentence> {
    let ranges = word_char_ranges(words);
    let text: Vec<char> = transcript_text(words).chars().collect();
    let mut sentences = Vec::new();
    let mut first = 0;
    for (i, w) in words.iter().enumerate() {
        let terminal = w.token.chars().last().is_some_and(is_terminal);
        let forced = i + 1 - first >= MAX_SENTENCE_TOKENS;
        if terminal || forced || i + 1 == words.len() {
            let (start_char, _) = ranges[first];
            let (_, end_char) = ranges[i];
            sentences.push(Sentence {
                index: sentences.len(),
                text: text[start_char..end_char].iter().collect(),
                start_char,
                end_char,
                start_s: Some(words[first].start_s),
                end_s: Some(words[i].end_s),
            });
            first = i + 1;
        }
    }
    sentences
}

/// Computes per-sentence extraneous-content fractions from annotated spans
/// and labels each sentence.
///
/// `source_len` is the character length of the source text the sentences and
/// spans index into. A sentence is `EC` iff strictly more than half of its
/// characters are covered by the union of the spans.
pub fn label_sentences(
    sentences: &[Sentence],
    spans: &[Span],
    source_len: usize,
) -> Result<Vec<LabeledSentence>> {
    for span in spans {
        if span.start_char >= span.end_char || span.end_char > source_len {
            return Err(Error::SpanOutOfBounds {
                start: span.start_char,
                end: span.end_char,
                len: source_len,
            });
        }
    }
    let merged = merge_ranges(spans);
    let labeled = sentences
        .iter()
        .map(|sentence| {
            let len = sentence.end_char - sentence.start_char;
            let covered: usize = merged
                .iter()
                .map(|&(s, e)| {
                    let lo = s.max(sentence.start_char);
                    let hi = e.min(sentence.end_char);
                    hi.saturating_sub(lo)
                })
                .sum();
            let ec_fraction = covered as f64 / len as f64;
            let label = if ec_fraction > 0.5 { Label::Ec } else { Label::Content };
            LabeledSentence {
                sentence: sentence.clone(),
                ec_fraction,
                label,
            }
        })
        .collect();
    Ok(labeled)
}

/// Union of possibly overlapping spans as disjoint sorted ranges.
fn merge_ranges(spans: &[Span]) -> Vec<(usize, usize)> {
    let mut ranges: Vec<(usize, usize)> = spans.iter().map(|s| (s.start_char, s.end_char)).collect();
    ranges.sort_unstable();
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(ranges.len());
    for (s, e) in ranges {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}
