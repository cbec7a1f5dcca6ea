//! `ecdetect`: detect extraneous content in podcast descriptions and
//! transcripts.
//!
//! Every subcommand reads JSONL, writes JSONL to `--output`, and prefixes
//! the output with a `_header` line recording tool version, resolved
//! configuration hash, input hashes, and seed, so a stage can be re-run
//! and compared byte for byte (modulo the header timestamp).

mod commands;
mod config;
mod header;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ecdetect_core::{ModelKind, SpanSource};

use commands::decode::DecodeMode;
use config::{CliError, FileConfig, Settings};

pub struct Ctx {
    pub settings: Settings,
    pub output: PathBuf,
}

#[derive(Debug, Parser)]
#[command(name = "ecdetect", version, about = "Extraneous-content detection for podcasts")]
struct Cli {
    /// TOML-free JSON config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (directory for `synth`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceArg {
    Description,
    Transcript,
}

impl From<SourceArg> for SpanSource {
    fn from(s: SourceArg) -> SpanSource {
        match s {
            SourceArg::Description => SpanSource::Description,
            SourceArg::Transcript => SpanSource::Transcript,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Logistic,
    Svm,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> ModelKind {
        match k {
            KindArg::Logistic => ModelKind::Logistic,
            KindArg::Svm => ModelKind::Svm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Changepoint,
    Smoothing,
}

impl From<ModeArg> for DecodeMode {
    fn from(m: ModeArg) -> DecodeMode {
        match m {
            ModeArg::Changepoint => DecodeMode::Changepoint,
            ModeArg::Smoothing => DecodeMode::Smoothing,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find retention dips and cut transcript segments around them.
    Dips {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        retention: PathBuf,
        #[arg(long)]
        min_prominence: Option<f64>,
        #[arg(long)]
        min_distance: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        min_listeners: Option<u64>,
    },
    /// Split descriptions or transcripts into sentences.
    Segment {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long, value_enum)]
        source: SourceArg,
    },
    /// Attach gold labels to segmented sentences from span annotations.
    Label {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        sentences: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
    },
    /// Train a sentence classifier on labeled sentences.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "logistic")]
        kind: KindArg,
        #[arg(long)]
        epochs: Option<u32>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        l2: Option<f64>,
        #[arg(long)]
        ngram_max: Option<u8>,
        #[arg(long)]
        balance: Option<bool>,
        #[arg(long)]
        with_context: Option<bool>,
    },
    /// Score sentences (or dip-segment sentences) with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sentences: Option<PathBuf>,
        #[arg(long)]
        segments: Option<PathBuf>,
    },
    /// Decode per-sentence probabilities into labels.
    Decode {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        min_llr: Option<f64>,
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Assemble a silver training set from dip-segment predictions.
    Silver {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        dips: PathBuf,
        #[arg(long)]
        min_gap: Option<f64>,
        #[arg(long)]
        negative_ratio: Option<f64>,
    },
    /// Sentence metrics and document accuracy against gold labels.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// ROUGE-L of candidate texts against references, matched by id.
    Rouge {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Generate a synthetic corpus with planted ground truth.
    Synth {
        #[arg(long)]
        count: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    let output = cli
        .output
        .ok_or_else(|| CliError::Schema("--output is required".to_string()))?;
    let mut s = Settings::resolve(&file, cli.seed);

    macro_rules! set {
        ($($flag:expr => $field:ident),* $(,)?) => {
            $(if let Some(v) = $flag { s.$field = v; })*
        };
    }

    match cli.command {
        Command::Dips {
            episodes,
            retention,
            min_prominence,
            min_distance,
            window,
            min_listeners,
        } => {
            set!(
                min_prominence => min_prominence,
                min_distance => min_distance_s,
                window => bounds_window_s,
                min_listeners => min_listeners,
            );
            let ctx = Ctx { settings: s, output };
            commands::dips::run(&ctx, &episodes, &retention)
        }
        Command::Segment { episodes, source } => {
            let ctx = Ctx { settings: s, output };
            commands::segment::run(&ctx, &episodes, source.into())
        }
        Command::Label {
            episodes,
            sentences,
            annotations,
        } => {
            let ctx = Ctx { settings: s, output };
            commands::label::run(&ctx, &episodes, &sentences, &annotations)
        }
        Command::Train {
            input,
            kind,
            epochs,
            learning_rate,
            l2,
            ngram_max,
            balance,
            with_context,
        } => {
            set!(
                epochs => epochs,
                learning_rate => learning_rate,
                l2 => l2_lambda,
                ngram_max => ngram_max,
                balance => balance_classes,
                with_context => with_context,
            );
            let ctx = Ctx { settings: s, output };
            commands::train::run(&ctx, &input, kind.into())
        }
        Command::Predict {
            model,
            sentences,
            segments,
        } => {
            let ctx = Ctx { settings: s, output };
            match (sentences, segments) {
                (Some(sent), None) => commands::predict::run_sentences(&ctx, &model, &sent),
                (None, Some(seg)) => commands::predict::run_segments(&ctx, &model, &seg),
                _ => Err(CliError::Schema(
                    "pass exactly one of --sentences or --segments".to_string(),
                )),
            }
        }
        Command::Decode {
            probs,
            mode,
            min_llr,
            bandwidth,
            threshold,
        } => {
            set!(
                min_llr => min_llr,
                bandwidth => bandwidth,
                threshold => threshold,
            );
            let ctx = Ctx { settings: s, output };
            commands::decode::run(&ctx, &probs, mode.into())
        }
        Command::Silver {
            predictions,
            episodes,
            dips,
            min_gap,
            negative_ratio,
        } => {
            set!(
                min_gap => min_gap_s,
                negative_ratio => negative_ratio,
            );
            let ctx = Ctx { settings: s, output };
            commands::silver::run(&ctx, &predictions, &episodes, &dips)
        }
        Command::Eval { pred, gold } => {
            let ctx = Ctx { settings: s, output };
            commands::eval::run(&ctx, &pred, &gold)
        }
        Command::Rouge {
            candidates,
            references,
            beta,
        } => {
            set!(beta => beta);
            let ctx = Ctx { settings: s, output };
            commands::rouge::run(&ctx, &candidates, &references)
        }
        Command::Synth { count } => {
            set!(count => n_episodes);
            let ctx = Ctx { settings: s, output };
            commands::synth::run(&ctx)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecdetect: {e}");
            ExitCode::from(e.code())
        }
    }
}
