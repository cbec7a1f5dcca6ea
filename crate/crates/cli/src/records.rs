//! Row schemas for the JSONL files that connect pipeline stages.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use ecdetect_core::{Label, LabeledSentence, Sentence, SpanSource};

/// One segmented sentence (output of `segment`, input to `label`/`predict`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub episode_id: String,
    pub source: SpanSource,
    #[serde(flatten)]
    pub sentence: Sentence,
}

/// A sentence with its gold label (output of `label`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub episode_id: String,
    pub source: SpanSource,
    #[serde(flatten)]
    pub labeled: LabeledSentence,
}

/// Per-sentence classifier probability (output of `predict --sentences`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbRow {
    pub episode_id: String,
    pub source: SpanSource,
    pub sentence_index: usize,
    pub prob: f64,
}

/// Per-sentence decoded label (output of `decode`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelRow {
    pub episode_id: String,
    pub source: SpanSource,
    pub sentence_index: usize,
    pub label: Label,
}

/// What `train` needs from a row: labeled sentence files and silver sample
/// files both satisfy it.
#[derive(Debug, Clone, Deserialize)]
pub struct TrainRow {
    pub episode_id: String,
    #[serde(default)]
    pub source: Option<SpanSource>,
    pub text: String,
    pub label: Label,
}

/// What `eval` needs from a row; accepts both decoded label rows
/// (`sentence_index`) and gold labeled-sentence rows (`index`).
#[derive(Debug, Clone, Deserialize)]
pub struct EvalRow {
    pub episode_id: String,
    #[serde(default)]
    pub source: Option<SpanSource>,
    #[serde(alias = "index")]
    pub sentence_index: usize,
    pub label: Label,
}

/// Input row for `rouge`: one text keyed by id.
#[derive(Debug, Clone, Deserialize)]
pub struct TextRow {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RougeRow {
    pub id: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// The trained artifact: TF-IDF vocabulary plus linear model, with the
/// input-composition flag they were trained under.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelBundle {
    pub with_context: bool,
    pub tfidf: serde_json::Value,
    pub model: serde_json::Value,
}

/// Groups items by key, keys ordered by first appearance, items in input
/// order within each group. Deterministic for any input order.
pub fn group_ordered<T, K, F>(items: Vec<T>, key: F) -> Vec<(K, Vec<T>)>
where
    K: Eq + Hash + Clone,
    F: Fn(&T) -> K,
{
    let mut order: Vec<K> = Vec::new();
    let mut map: HashMap<K, Vec<T>> = HashMap::new();
    for item in items {
        let k = key(&item);
        map.entry(k.clone()).or_insert_with(|| {
            order.push(k.clone());
            Vec::new()
        });
        map.get_mut(&k).expect("just inserted").push(item);
    }
    order
        .into_iter()
        .map(|k| {
            let group = map.remove(&k).expect("keyed by order");
            (k, group)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_preserves_first_appearance_order() {
        let items = vec![("b", 1), ("a", 2), ("b", 3), ("c", 4), ("a", 5)];
        let groups = group_ordered(items, |&(k, _)| k);
        let keys: Vec<&str> = groups.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, vec!["b", "a", "c"]);
        assert_eq!(groups[0].1, vec![("b", 1), ("b", 3)]);
        assert_eq!(groups[1].1, vec![("a", 2), ("a", 5)]);
    }

    #[test]
    fn eval_row_accepts_both_index_spellings() {
        let a: EvalRow =
            serde_json::from_str("{\"episode_id\":\"e\",\"sentence_index\":4,\"label\":\"EC\"}")
                .unwrap();
        let b: EvalRow = serde_json::from_str(
            "{\"episode_id\":\"e\",\"source\":\"description\",\"index\":4,\"label\":\"Content\"}",
        )
        .unwrap();
        assert_eq!(a.sentence_index, 4);
        assert_eq!(b.sentence_index, 4);
        assert_eq!(b.source, Some(SpanSource::Description));
        assert_eq!(a.source, None);
    }
}
