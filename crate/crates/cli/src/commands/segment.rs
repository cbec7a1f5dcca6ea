//! `ecdetect segment`: split one source text of every episode into sentences.

use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::corpus::{load_episodes, segment_description, segment_transcript};
use ecdetect_core::SpanSource;

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::SentenceRecord;
use crate::Ctx;

pub fn run(ctx: &Ctx, episodes: &Path, source: SpanSource) -> Result<(), CliError> {
    let eps = load_episodes(episodes)?;
    let per_episode: Vec<Vec<SentenceRecord>> = eps
        .par_iter()
        .map(|ep| {
            let sentences = match source {
                SpanSource::Description => segment_description(&ep.description),
                SpanSource::Transcript => segment_transcript(&ep.words),
            };
            sentences
                .into_iter()
                .map(|sentence| SentenceRecord {
                    episode_id: ep.id.clone(),
                    source,
                    sentence,
                })
                .collect()
        })
        .collect();
    let rows: Vec<SentenceRecord> = per_episode.into_iter().flatten().collect();
    let header = make_header("segment", &ctx.settings, &[("episodes", episodes)])?;
    write_jsonl(&ctx.output, &header, &rows)
}
