//! `ecdetect synth`: generate a synthetic corpus with planted ground truth.
//!
//! Unlike the other subcommands, `--output` names a directory; four JSONL
//! files are written into it.

use std::fs;

use ecdetect_core::synth::{generate, SynthConfig};

use crate::config::CliError;
use crate::header::{make_header, write_jsonl};
use crate::Ctx;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let s = &ctx.settings;
    let cfg = SynthConfig {
        n_episodes: s.n_episodes,
        seed: s.seed,
        word_duration_s: s.word_duration_s,
        ..SynthConfig::default()
    };
    let corpus = generate(&cfg);
    fs::create_dir_all(&ctx.output)
        .map_err(|e| CliError::Schema(format!("{}: {e}", ctx.output.display())))?;
    let header = make_header("synth", s, &[])?;
    write_jsonl(&ctx.output.join("episodes.jsonl"), &header, &corpus.episodes)?;
    write_jsonl(&ctx.output.join("retention.jsonl"), &header, &corpus.curves)?;
    write_jsonl(
        &ctx.output.join("annotations.jsonl"),
        &header,
        &corpus.annotations,
    )?;
    write_jsonl(&ctx.output.join("truth.jsonl"), &header, &corpus.truths)?;
    println!(
        "wrote {} episodes to {}",
        corpus.episodes.len(),
        ctx.output.display()
    );
    Ok(())
}
