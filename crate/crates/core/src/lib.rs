//! Detection of extraneous content (ads, cross-promotions, platform
//! boilerplate) in podcast episode descriptions and transcripts.
//!
//! The pipeline: localize listener-retention dips ([`dipdetect`]), segment
//! and gold-label text ([`corpus`]), featurize and classify sentences
//! ([`features`], [`linear`]), decode whole documents ([`docdecode`]), expand
//! training data from dips ([`silverset`]), and score summaries
//! ([`rouge_eval`]). [`synth`] generates corpora with planted ground truth
//! for end-to-end benchmarks.

pub mod corpus;
pub mod dipdetect;
pub mod docdecode;
pub mod error;
pub mod features;
pub mod jsonl;
pub mod linear;
pub mod rouge_eval;
pub mod silverset;
pub mod synth;

pub use corpus::{
    AnnotationRecord, CharRange, Episode, Label, LabeledSentence, Sentence, Span, SpanSource,
    TranscriptWord,
};
pub use dipdetect::{BoundaryError, Dip, DipSegment, RetentionCurve};
pub use docdecode::{ChangePointResult, LabelRecord, ProbRecord, ProbSequence, SmoothingConfig};
pub use error::{Error, Result};
pub use features::{FeatureVector, TfidfModel};
pub use linear::{LinearModel, Metrics, ModelKind, TrainConfig};
pub use rouge_eval::RougeScore;
pub use silverset::{MarkedSentence, SilverProvenance, SilverSample};
pub use synth::{PlantedBlock, PlantedDip, PlantedTruth, SynthConfig, SynthCorpus};
