//! `ecdetect rouge`: ROUGE-L of candidate summaries against references,
//! matched by id.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::jsonl::read_records;
use ecdetect_core::rouge_eval::rouge_l;

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{RougeRow, TextRow};
use crate::Ctx;

pub fn run(ctx: &Ctx, candidates: &Path, references: &Path) -> Result<(), CliError> {
    let cands: Vec<TextRow> = read_records(candidates)?;
    let refs: Vec<TextRow> = read_records(references)?;
    if cands.is_empty() {
        return Err(CliError::Schema(format!(
            "{}: no candidate rows",
            candidates.display()
        )));
    }
    if cands.len() != refs.len() {
        return Err(CliError::Schema(format!(
            "candidate and reference row counts differ: {} vs {}",
            cands.len(),
            refs.len()
        )));
    }
    let mut ref_map: HashMap<&str, &str> = HashMap::new();
    for r in &refs {
        if ref_map.insert(&r.id, &r.text).is_some() {
            return Err(CliError::Schema(format!("duplicate reference id {}", r.id)));
        }
    }
    let beta = ctx.settings.beta;
    let rows: Vec<RougeRow> = cands
        .par_iter()
        .map(|c| {
            let Some(reference) = ref_map.get(c.id.as_str()) else {
                return Err(CliError::Schema(format!(
                    "candidate without reference: {}",
                    c.id
                )));
            };
            let score = rouge_l(&c.text, reference, beta);
            Ok(RougeRow {
                id: c.id.clone(),
                precision: score.precision,
                recall: score.recall,
                f_measure: score.f_measure,
            })
        })
        .collect::<Result<_, _>>()?;

    let n = rows.len() as f64;
    let mean = |f: fn(&RougeRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    println!(
        "rouge-l over {} pairs: P {:.4} R {:.4} F {:.4}",
        rows.len(),
        mean(|r| r.precision),
        mean(|r| r.recall),
        mean(|r| r.f_measure)
    );
    let header = make_header(
        "rouge",
        &ctx.settings,
        &[("candidates", candidates), ("references", references)],
    )?;
    write_jsonl(&ctx.output, &header, &rows)
}
