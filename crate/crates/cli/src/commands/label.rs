//! `ecdetect label`: attach gold labels to segmented sentences using
//! character-span annotations.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::corpus::{label_sentences, load_annotations, load_episodes, transcript_text};
use ecdetect_core::jsonl::read_records;
use ecdetect_core::{Episode, Sentence, Span, SpanSource};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{group_ordered, LabeledRecord, SentenceRecord};
use crate::Ctx;

pub fn run(
    ctx: &Ctx,
    episodes: &Path,
    sentences: &Path,
    annotations: &Path,
) -> Result<(), CliError> {
    let eps = load_episodes(episodes)?;
    let sentence_rows: Vec<SentenceRecord> = read_records(sentences)?;
    let anns = load_annotations(annotations)?;

    let ep_by_id: HashMap<&str, &Episode> = eps.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut spans_by_key: HashMap<(String, SpanSource), Vec<Span>> = HashMap::new();
    for a in &anns {
        spans_by_key
            .entry((a.episode_id.clone(), a.source))
            .or_default()
            .extend(a.spans());
    }

    let groups = group_ordered(sentence_rows, |r| (r.episode_id.clone(), r.source));
    let labeled: Vec<Vec<LabeledRecord>> = groups
        .par_iter()
        .map(|((episode_id, source), group)| -> Result<Vec<LabeledRecord>, CliError> {
            let Some(ep) = ep_by_id.get(episode_id.as_str()) else {
                return Err(CliError::Schema(format!(
                    "sentences reference unknown episode {episode_id:?}"
                )));
            };
            let source_len = match source {
                SpanSource::Description => ep.description.chars().count(),
                SpanSource::Transcript => transcript_text(&ep.words).chars().count(),
            };
            let no_spans = Vec::new();
            let spans = spans_by_key
                .get(&(episode_id.clone(), *source))
                .unwrap_or(&no_spans);
            let sents: Vec<Sentence> = group.iter().map(|r| r.sentence.clone()).collect();
            let rows = label_sentences(&sents, spans, source_len)?
                .into_iter()
                .map(|labeled| LabeledRecord {
                    episode_id: episode_id.clone(),
                    source: *source,
                    labeled,
                })
                .collect();
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<LabeledRecord> = labeled.into_iter().flatten().collect();
    let header = make_header(
        "label",
        &ctx.settings,
        &[
            ("episodes", episodes),
            ("sentences", sentences),
            ("annotations", annotations),
        ],
    )?;
    write_jsonl(&ctx.output, &header, &rows)
}
