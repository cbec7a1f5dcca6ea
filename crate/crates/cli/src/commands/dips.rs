//! `ecdetect dips`: locate retention dips and extract transcript segments.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use ecdetect_core::corpus::load_episodes;
use ecdetect_core::dipdetect::{
    estimate_dip_bounds, extract_segment, find_dip_peaks, load_retention, DipSegment,
};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::Ctx;

pub fn run(ctx: &Ctx, episodes: &Path, retention: &Path) -> Result<(), CliError> {
    let eps = load_episodes(episodes)?;
    let curves = load_retention(retention)?;
    let mut by_episode = HashMap::new();
    for curve in &curves {
        if by_episode.insert(curve.episode_id.as_str(), curve).is_some() {
            return Err(CliError::Schema(format!(
                "duplicate retention curve for episode {:?}",
                curve.episode_id
            )));
        }
    }
    let s = &ctx.settings;
    let per_episode: Vec<Vec<DipSegment>> = eps
        .par_iter()
        .map(|ep| -> Result<Vec<DipSegment>, CliError> {
            let Some(curve) = by_episode.get(ep.id.as_str()) else {
                return Ok(Vec::new());
            };
            // Curves from too few listeners are noise; skip them whole.
            if curve.listener_count.unwrap_or(0) < s.min_listeners {
                return Ok(Vec::new());
            }
            find_dip_peaks(curve, s.min_prominence, s.min_distance_s)
                .into_iter()
                .map(|peak| {
                    let dip = estimate_dip_bounds(curve, peak, s.bounds_window_s)?;
                    Ok(extract_segment(&dip, ep))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<DipSegment> = per_episode.into_iter().flatten().collect();
    let header = make_header(
        "dips",
        s,
        &[("episodes", episodes), ("retention", retention)],
    )?;
    write_jsonl(&ctx.output, &header, &rows)
}
