//! `ecdetect eval`: sentence metrics and document accuracy of predicted
//! labels against gold.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Serialize;

use ecdetect_core::jsonl::read_records;
use ecdetect_core::linear::evaluate;
use ecdetect_core::{Label, SpanSource};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::{group_ordered, EvalRow};
use crate::Ctx;

#[derive(Debug, Serialize)]
pub struct MetricsRow {
    pub sentence_precision: f64,
    pub sentence_recall: f64,
    pub sentence_f1: f64,
    pub sentence_accuracy: f64,
    pub document_accuracy: f64,
    pub n_sentences: usize,
    pub n_documents: usize,
    pub pred_ec_fraction: f64,
    pub gold_ec_fraction: f64,
}

type Key = (String, Option<SpanSource>, usize);

fn key(r: &EvalRow) -> Key {
    (r.episode_id.clone(), r.source, r.sentence_index)
}

pub fn run(ctx: &Ctx, pred: &Path, gold: &Path) -> Result<(), CliError> {
    let preds: Vec<EvalRow> = read_records(pred)?;
    let golds: Vec<EvalRow> = read_records(gold)?;
    if preds.is_empty() {
        return Err(CliError::Schema(format!(
            "{}: no prediction rows",
            pred.display()
        )));
    }
    if preds.len() != golds.len() {
        return Err(CliError::Schema(format!(
            "prediction and gold row counts differ: {} vs {}",
            preds.len(),
            golds.len()
        )));
    }
    let mut gold_map: HashMap<Key, Label> = HashMap::new();
    for g in &golds {
        if gold_map.insert(key(g), g.label).is_some() {
            return Err(CliError::Schema(format!(
                "duplicate gold row for {} {:?} sentence {}",
                g.episode_id, g.source, g.sentence_index
            )));
        }
    }
    let mut seen: HashSet<Key> = HashSet::new();
    let mut pairs: Vec<(EvalRow, Label)> = Vec::with_capacity(preds.len());
    for p in preds {
        let k = key(&p);
        if !seen.insert(k.clone()) {
            return Err(CliError::Schema(format!(
                "duplicate prediction row for {} {:?} sentence {}",
                p.episode_id, p.source, p.sentence_index
            )));
        }
        let Some(&gold_label) = gold_map.get(&k) else {
            return Err(CliError::Schema(format!(
                "prediction without gold: {} {:?} sentence {}",
                p.episode_id, p.source, p.sentence_index
            )));
        };
        pairs.push((p, gold_label));
    }

    let pred_labels: Vec<Label> = pairs.iter().map(|(p, _)| p.label).collect();
    let gold_labels: Vec<Label> = pairs.iter().map(|(_, g)| *g).collect();
    let m = evaluate(&pred_labels, &gold_labels)?;

    let ec_fraction = |labels: &[Label]| {
        labels.iter().filter(|&&l| l == Label::Ec).count() as f64 / labels.len() as f64
    };
    let pred_ec_fraction = ec_fraction(&pred_labels);
    let gold_ec_fraction = ec_fraction(&gold_labels);
    let n_sentences = pairs.len();

    let docs = group_ordered(pairs, |(p, _)| (p.episode_id.clone(), p.source));
    let n_documents = docs.len();
    let matched = docs
        .iter()
        .filter(|(_, rows)| rows.iter().all(|(p, g)| p.label == *g))
        .count();
    let document_accuracy = matched as f64 / n_documents as f64;

    let row = MetricsRow {
        sentence_precision: m.precision,
        sentence_recall: m.recall,
        sentence_f1: m.f1,
        sentence_accuracy: m.accuracy,
        document_accuracy,
        n_sentences,
        n_documents,
        pred_ec_fraction,
        gold_ec_fraction,
    };
    println!(
        "sentences {n_sentences}: P {:.4} R {:.4} F1 {:.4}; documents {n_documents}: accuracy {:.4}",
        row.sentence_precision, row.sentence_recall, row.sentence_f1, row.document_accuracy
    );
    let header = make_header("eval", &ctx.settings, &[("pred", pred), ("gold", gold)])?;
    write_jsonl(&ctx.output, &header, &[row])
}
