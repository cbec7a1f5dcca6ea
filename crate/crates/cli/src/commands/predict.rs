//! `ecdetect predict`: score sentences with a trained model.
//!
//! Two input shapes: a segmented-sentences file (probability per sentence),
//! or a dip-segments file, where each segment's sentences are first marked
//! by dip position and the output rows are silver samples with the original
//! text.

use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::dipdetect::DipSegment;
use ecdetect_core::features::compose_input;
use ecdetect_core::jsonl::read_records;
use ecdetect_core::silverset::build_silver;
use ecdetect_core::{LinearModel, SilverSample, TfidfModel};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{group_ordered, ModelBundle, ProbRow, SentenceRecord};
use crate::Ctx;

pub fn load_bundle(path: &Path) -> Result<(TfidfModel, LinearModel, bool), CliError> {
    let mut bundles: Vec<ModelBundle> = read_records(path)?;
    if bundles.len() != 1 {
        return Err(CliError::Schema(format!(
            "{}: expected exactly one model record, found {}",
            path.display(),
            bundles.len()
        )));
    }
    let bundle = bundles.pop().expect("length checked");
    let tfidf = TfidfModel::from_json(&bundle.tfidf.to_string())?;
    let model = LinearModel::from_json(&bundle.model.to_string())?;
    Ok((tfidf, model, bundle.with_context))
}

pub fn run_sentences(ctx: &Ctx, model_path: &Path, sentences: &Path) -> Result<(), CliError> {
    let (tfidf, model, with_context) = load_bundle(model_path)?;
    let records: Vec<SentenceRecord> = read_records(sentences)?;
    let groups = group_ordered(records, |r| (r.episode_id.clone(), r.source));
    let scored: Vec<Vec<ProbRow>> = groups
        .par_iter()
        .map(|((episode_id, source), group)| -> Result<Vec<ProbRow>, CliError> {
            let texts: Vec<&str> = group.iter().map(|r| r.sentence.text.as_str()).collect();
            group
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let input = compose_input(&texts, i, with_context)?;
                    Ok(ProbRow {
                        episode_id: episode_id.clone(),
                        source: *source,
                        sentence_index: r.sentence.index,
                        prob: model.predict_proba(&tfidf.transform(&input)),
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<ProbRow> = scored.into_iter().flatten().collect();
    let header = make_header(
        "predict",
        &ctx.settings,
        &[("model", model_path), ("sentences", sentences)],
    )?;
    write_jsonl(&ctx.output, &header, &rows)
}

pub fn run_segments(ctx: &Ctx, model_path: &Path, segments: &Path) -> Result<(), CliError> {
    let (tfidf, model, with_context) = load_bundle(model_path)?;
    let segs: Vec<DipSegment> = read_records(segments)?;
    let scored: Vec<Vec<SilverSample>> = segs
        .par_iter()
        .map(|seg| {
            build_silver(
                &model,
                &tfidf,
                &seg.episode_id,
                &seg.sentences,
                &seg.dip,
                with_context,
            )
            .map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<SilverSample> = scored.into_iter().flatten().collect();
    let header = make_header(
        "predict",
        &ctx.settings,
        &[("model", model_path), ("segments", segments)],
    )?;
    write_jsonl(&ctx.output, &header, &rows)
}
