//! Training sweeps and the statistics built on them.
//!
//! A sweep trains one fresh learner per seed and yields a
//! [`LearningCurve`] each. Curves reduce to difficulty samples
//! ([`DifficultyTable`]), which feed the rank-sum test, crossing detection
//! between two learners, and transfer measurement.

mod config;
mod export;
mod measures;
mod pairs;
mod training;
mod transfer;
mod wilcoxon;

use thiserror::Error;

use crate::agents::AgentError;
use crate::engine::EngineError;
use crate::transcript::TranscriptError;

pub use config::{AgentSection, ExperimentConfig, GameSection, RunSection};
pub use export::{
    read_curves_csv, read_difficulty_csv, write_curves_csv, write_difficulty_csv, write_pairs_csv,
    CURVE_HEADER, DIFFICULTY_HEADER, PAIR_HEADER,
};
pub use measures::{
    asymptote_point, discounted_return, episodes_to_criterion, per_round_success_rate,
    EpisodeRecord, LearningCurve,
};
pub use pairs::{
    detect_interesting_pairs, difficulty_of, DifficultyMeasure, DifficultyTable, Direction,
    InterestingPair, MeasureSettings,
};
pub use training::{run_training, TrainingRun, DEFAULT_MAX_ATTEMPTS};
pub use transfer::{median, transfer_from_criteria, transfer_index, TransferReport};
pub use wilcoxon::{wilcoxon_rank_sum, wilcoxon_rank_sum_with, Method, MethodChoice, TestResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("no sample for rule `{rule}` and learner `{learner}`")]
    MissingSample { rule: String, learner: String },
    #[error("episode has zero attempts")]
    ZeroAttempts,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
