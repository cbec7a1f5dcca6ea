//! Config file, resolved settings, and error-to-exit-code mapping.
//!
//! Precedence for every knob: command-line flag > config file > default.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ecdetect_core::dipdetect::{
    DEFAULT_BOUNDS_WINDOW_S, DEFAULT_MIN_DISTANCE_S, DEFAULT_MIN_LISTENERS,
    DEFAULT_MIN_PROMINENCE,
};
use ecdetect_core::docdecode::{DEFAULT_BANDWIDTH, DEFAULT_MIN_LLR, DEFAULT_THRESHOLD};
use ecdetect_core::rouge_eval::DEFAULT_BETA;
use ecdetect_core::silverset::DEFAULT_MIN_GAP_S;
use ecdetect_core::TrainConfig;

/// Errors surfaced to the user. Exit codes: schema and IO problems 2,
/// degenerate data 3, internal failures 1.
#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Degenerate(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) | CliError::Degenerate(m) | CliError::Internal(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<ecdetect_core::Error> for CliError {
    fn from(e: ecdetect_core::Error) -> Self {
        match e {
            ecdetect_core::Error::DegenerateTraining => CliError::Degenerate(e.to_string()),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

/// On-disk config: a flat JSON object; every field optional. Unknown keys
/// are rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub min_prominence: Option<f64>,
    pub min_distance_s: Option<usize>,
    pub bounds_window_s: Option<usize>,
    pub min_listeners: Option<u64>,
    pub epochs: Option<u32>,
    pub learning_rate: Option<f64>,
    pub l2_lambda: Option<f64>,
    pub shuffle: Option<bool>,
    pub balance_classes: Option<bool>,
    pub ngram_max: Option<u8>,
    pub with_context: Option<bool>,
    pub bandwidth: Option<f64>,
    pub threshold: Option<f64>,
    pub min_llr: Option<f64>,
    pub min_gap_s: Option<f64>,
    pub negative_ratio: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    pub n_episodes: Option<usize>,
    pub word_duration_s: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Schema(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Schema(format!("malformed config {}: {e}", path.display())))
    }
}

/// Every knob after precedence resolution. Serialized canonically to form
/// the header's config hash.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub min_prominence: f64,
    pub min_distance_s: usize,
    pub bounds_window_s: usize,
    pub min_listeners: u64,
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub shuffle: bool,
    pub balance_classes: bool,
    pub ngram_max: u8,
    pub with_context: bool,
    pub bandwidth: f64,
    pub threshold: f64,
    pub min_llr: f64,
    pub min_gap_s: f64,
    pub negative_ratio: f64,
    pub beta: f64,
    pub seed: u64,
    pub n_episodes: usize,
    pub word_duration_s: f64,
}

impl Settings {
    /// Defaults overridden by the config file and the global --seed flag.
    /// Command flags are applied on top by each command.
    pub fn resolve(file: &FileConfig, seed_flag: Option<u64>) -> Settings {
        let train = TrainConfig::default();
        Settings {
            min_prominence: file.min_prominence.unwrap_or(DEFAULT_MIN_PROMINENCE),
            min_distance_s: file.min_distance_s.unwrap_or(DEFAULT_MIN_DISTANCE_S),
            bounds_window_s: file.bounds_window_s.unwrap_or(DEFAULT_BOUNDS_WINDOW_S),
            min_listeners: file.min_listeners.unwrap_or(DEFAULT_MIN_LISTENERS),
            epochs: file.epochs.unwrap_or(train.epochs),
            learning_rate: file.learning_rate.unwrap_or(train.learning_rate),
            l2_lambda: file.l2_lambda.unwrap_or(train.l2_lambda),
            shuffle: file.shuffle.unwrap_or(train.shuffle),
            balance_classes: file.balance_classes.unwrap_or(train.balance_classes),
            ngram_max: file.ngram_max.unwrap_or(1),
            with_context: file.with_context.unwrap_or(false),
            bandwidth: file.bandwidth.unwrap_or(DEFAULT_BANDWIDTH),
            threshold: file.threshold.unwrap_or(DEFAULT_THRESHOLD),
            min_llr: file.min_llr.unwrap_or(DEFAULT_MIN_LLR),
            min_gap_s: file.min_gap_s.unwrap_or(DEFAULT_MIN_GAP_S),
            negative_ratio: file.negative_ratio.unwrap_or(2.0),
            beta: file.beta.unwrap_or(DEFAULT_BETA),
            seed: seed_flag.or(file.seed).unwrap_or(0),
            n_episodes: file.n_episodes.unwrap_or(200),
            word_duration_s: file.word_duration_s.unwrap_or(0.35),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            l2_lambda: self.l2_lambda,
            seed: self.seed,
            shuffle: self.shuffle,
            balance_classes: self.balance_classes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{{\"min_prominence\": 0.05, \"typo_key\": 1}}").unwrap();
        let err = FileConfig::load(Some(f.path())).unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("typo_key"));
    }

    #[test]
    fn precedence_flag_over_file_over_default() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{{\"seed\": 11, \"bandwidth\": 2.5}}").unwrap();
        let file = FileConfig::load(Some(f.path())).unwrap();
        let s = Settings::resolve(&file, Some(99));
        assert_eq!(s.seed, 99);
        assert_eq!(s.bandwidth, 2.5);
        assert_eq!(s.threshold, DEFAULT_THRESHOLD);
        let s = Settings::resolve(&file, None);
        assert_eq!(s.seed, 11);
    }

    #[test]
    fn missing_config_file_is_a_schema_error() {
        let err = FileConfig::load(Some(Path::new("/nonexistent/cfg.json"))).unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("/nonexistent/cfg.json"));
    }
}
