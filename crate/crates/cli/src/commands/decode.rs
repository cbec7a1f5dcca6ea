//! `ecdetect decode`: turn per-sentence probabilities into document-level
//! labels, by change-point splitting (descriptions) or kernel smoothing
//! (transcripts).

use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::docdecode::{decode_description, decode_transcript, ProbSequence};
use ecdetect_core::jsonl::read_records;
use ecdetect_core::SmoothingConfig;

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{group_ordered, LabelRow, ProbRow};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Changepoint,
    Smoothing,
}

pub fn run(ctx: &Ctx, probs: &Path, mode: DecodeMode) -> Result<(), CliError> {
    let rows: Vec<ProbRow> = read_records(probs)?;
    let smoothing = SmoothingConfig {
        bandwidth: ctx.settings.bandwidth,
        threshold: ctx.settings.threshold,
    };
    let groups = group_ordered(rows, |r| (r.episode_id.clone(), r.source));
    let decoded: Vec<Vec<LabelRow>> = groups
        .into_par_iter()
        .map(|((episode_id, source), mut group)| -> Result<Vec<LabelRow>, CliError> {
            group.sort_by_key(|r| r.sentence_index);
            let seq = ProbSequence::new(
                episode_id.clone(),
                group.iter().map(|r| r.prob).collect(),
            )?;
            let labels = match mode {
                DecodeMode::Changepoint => decode_description(&seq, ctx.settings.min_llr),
                DecodeMode::Smoothing => decode_transcript(&seq, &smoothing),
            };
            Ok(group
                .iter()
                .zip(labels)
                .map(|(r, label)| LabelRow {
                    episode_id: episode_id.clone(),
                    source,
                    sentence_index: r.sentence_index,
                    label,
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<LabelRow> = decoded.into_iter().flatten().collect();
    let header = make_header("decode", &ctx.settings, &[("probs", probs)])?;
    write_jsonl(&ctx.output, &header, &rows)
}
