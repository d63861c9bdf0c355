//! A laboratory for studying how learnable hidden rules are.
//!
//! Blocks sit on a line of cells and a player removes them one at a time
//! into a left or right bucket. A hidden rule, written in a small language
//! ([`rule`]), decides which removals are accepted. The [`engine`] runs
//! seeded episodes with +1/-1 rewards, [`agents`] learn to play, the
//! [`harness`] turns training runs into difficulty statistics, the
//! [`transcript`] store records every session and [`service`] exposes the
//! game over HTTP for human players.

pub mod agents;
pub mod board;
pub mod cli;
pub mod counting;
pub mod engine;
pub mod harness;
pub mod rng;
pub mod rule;
pub mod service;
pub mod transcript;

pub use board::{Board, Bucket, Color};
pub use engine::{new_episode, EpisodeParams, EpisodeState, EpisodeStatus, MoveAttempt, Outcome};
pub use rule::{parse_rule, RuleAst};
