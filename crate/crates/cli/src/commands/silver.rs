//! `ecdetect silver`: assemble the silver training set from scored dip
//! segments plus far-from-dip negatives.
//!
//! Negatives come only from episodes that have dips (the silver pool);
//! eligible sentences are capped at `negative_ratio` times the positive
//! count by even stride subsampling, keeping the output deterministic.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use ecdetect_core::corpus::{load_episodes, segment_transcript};
use ecdetect_core::dipdetect::{Dip, DipSegment};
use ecdetect_core::jsonl::read_records;
use ecdetect_core::silverset::{sample_negatives, MARKER_IN_DIP, MARKER_OUTSIDE_DIP};
use ecdetect_core::{Episode, Label, SilverSample};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::records::group_ordered;
use crate::Ctx;

fn stride_sample<T>(items: Vec<T>, cap: usize) -> Vec<T> {
    if items.len() <= cap {
        return items;
    }
    if cap == 0 {
        return Vec::new();
    }
    let stride = items.len() as f64 / cap as f64;
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    (0..cap)
        .map(|k| {
            let idx = (k as f64 * stride) as usize;
            slots[idx].take().expect("stride > 1 never repeats an index")
        })
        .collect()
}

pub fn run(
    ctx: &Ctx,
    predictions: &Path,
    episodes: &Path,
    dips: &Path,
) -> Result<(), CliError> {
    let preds: Vec<SilverSample> = read_records(predictions)?;
    let eps = load_episodes(episodes)?;
    let segs: Vec<DipSegment> = read_records(dips)?;

    // Overlapping segments can score the same sentence twice; first wins.
    let mut seen = HashSet::new();
    let mut samples: Vec<SilverSample> = Vec::new();
    for p in preds {
        if seen.insert((p.episode_id.clone(), p.sentence_index)) {
            samples.push(p);
        }
    }
    for s in &samples {
        let leaked = s
            .text
            .split_whitespace()
            .any(|t| t == MARKER_IN_DIP || t == MARKER_OUTSIDE_DIP);
        if leaked {
            return Err(CliError::Internal(format!(
                "marker token leaked into silver text for {} sentence {}",
                s.episode_id, s.sentence_index
            )));
        }
    }
    let n_positive = samples.iter().filter(|s| s.label == Label::Ec).count();

    let ep_by_id: HashMap<&str, &Episode> = eps.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut negatives: Vec<SilverSample> = Vec::new();
    for (episode_id, group) in group_ordered(segs, |s| s.episode_id.clone()) {
        let Some(ep) = ep_by_id.get(episode_id.as_str()) else {
            return Err(CliError::Schema(format!(
                "dip segments reference unknown episode {episode_id:?}"
            )));
        };
        let dip_list: Vec<Dip> = group.into_iter().map(|s| s.dip).collect();
        let sentences = segment_transcript(&ep.words);
        negatives.extend(sample_negatives(ep, &sentences, &dip_list, ctx.settings.min_gap_s));
    }
    let cap = (ctx.settings.negative_ratio * n_positive as f64).ceil() as usize;
    samples.extend(stride_sample(negatives, cap));

    let header = make_header(
        "silver",
        &ctx.settings,
        &[
            ("predictions", predictions),
            ("episodes", episodes),
            ("dips", dips),
        ],
    )?;
    write_jsonl(&ctx.output, &header, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_keeps_all_when_under_cap() {
        assert_eq!(stride_sample(vec![1, 2, 3], 5), vec![1, 2, 3]);
        assert_eq!(stride_sample(Vec::<i32>::new(), 0), Vec::<i32>::new());
    }

    #[test]
    fn stride_spreads_evenly() {
        let picked = stride_sample((0..10).collect(), 4);
        assert_eq!(picked, vec![0, 2, 5, 7]);
        let picked = stride_sample((0..100).collect(), 3);
        assert_eq!(picked.len(), 3);
        assert_eq!(picked, vec![0, 33, 66]);
    }
}
