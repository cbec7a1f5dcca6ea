//! `ecdetect train`: fit TF-IDF features and a linear sentence classifier.
//!
//! Accepts gold labeled-sentence files and silver sample files alike. With
//! context enabled, inputs get the previous sentence of the same document
//! (same episode and source, in file order) prepended.

use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::features::{compose_input, fit_tfidf};
use ecdetect_core::jsonl::read_records;
use ecdetect_core::linear::train;
use ecdetect_core::{Label, ModelKind};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{group_ordered, ModelBundle, TrainRow};
use crate::Ctx;

pub fn run(ctx: &Ctx, input: &Path, kind: ModelKind) -> Result<(), CliError> {
    let rows: Vec<TrainRow> = read_records(input)?;
    if rows.is_empty() {
        return Err(CliError::Schema(format!(
            "{}: no training rows",
            input.display()
        )));
    }
    let with_context = ctx.settings.with_context;
    let groups = group_ordered(rows, |r| (r.episode_id.clone(), r.source));
    let mut inputs: Vec<String> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    for (_, group) in &groups {
        let texts: Vec<&str> = group.iter().map(|r| r.text.as_str()).collect();
        for (i, row) in group.iter().enumerate() {
            inputs.push(compose_input(&texts, i, with_context)?);
            labels.push(row.label);
        }
    }
    let tfidf = fit_tfidf(&inputs, ctx.settings.ngram_max)?;
    let features: Vec<_> = inputs.par_iter().map(|t| tfidf.transform(t)).collect();
    let examples: Vec<_> = features.into_iter().zip(labels).collect();
    let model = train(kind, &examples, &ctx.settings.train_config())?;

    let parse = |json: String| {
        serde_json::from_str(&json)
            .map_err(|e| CliError::Internal(format!("model serialization roundtrip: {e}")))
    };
    let bundle = ModelBundle {
        with_context,
        tfidf: parse(tfidf.to_json())?,
        model: parse(model.to_json())?,
    };
    let header = make_header("train", &ctx.settings, &[("input", input)])?;
    write_jsonl(&ctx.output, &header, &[bundle])
}
