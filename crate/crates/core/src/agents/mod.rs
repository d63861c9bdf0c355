//! Learners for the block game.
//!
//! Every learner follows the same loop as a human player: look at an
//! [`Observation`], pick a [`MoveAttempt`], then see the [`Outcome`].

mod abstraction;
mod qlearn;
mod random;

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, Bucket, Color};
use crate::engine::{EpisodeState, MoveAttempt, Outcome};

pub use abstraction::{
    default_actions, AbstractAction, BoardEndsFeaturizer, DefaultFeaturizer, Featurizer, Selector,
    StateKey,
};
pub use qlearn::QAgent;
pub use random::RandomAgent;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("unknown agent kind `{0}` (expected random or qlearn)")]
    UnknownKind(String),
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
}

/// What a player can see before choosing a move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub board: Board,
    pub last_success: Option<(usize, Color, Bucket)>,
    pub success_count: usize,
    /// Attempts already rejected on the current board.
    pub failures_this_board: BTreeSet<MoveAttempt>,
}

impl Observation {
    pub fn of(state: &EpisodeState) -> Self {
        Self {
            board: state.board().clone(),
            last_success: state
                .successes()
                .last()
                .map(|s| (s.position, s.color, s.bucket)),
            success_count: state.successes().len(),
            failures_this_board: state.failures_this_board().clone(),
        }
    }

    /// Every (occupied position, bucket) pair, in position order.
    pub fn concrete_moves(&self) -> Vec<MoveAttempt> {
        self.board
            .pieces()
            .flat_map(|(p, _)| Bucket::BOTH.map(|b| MoveAttempt::new(p, b)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Random,
    Qlearn,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::Qlearn => "qlearn",
        }
    }
}

impl FromStr for AgentKind {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(AgentKind::Random),
            "qlearn" | "q-learn" | "q_learning" => Ok(AgentKind::Qlearn),
            _ => Err(AgentError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub kind: AgentKind,
    pub alpha: f64,
    pub epsilon0: f64,
    /// Per-episode multiplicative decay of epsilon.
    #[serde(rename = "epsilonDecay")]
    pub epsilon_decay: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Random agent only: skip attempts already rejected on this board.
    #[serde(rename = "avoidRepeats")]
    pub avoid_repeats: bool,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            kind: AgentKind::Qlearn,
            alpha: 0.1,
            epsilon0: 0.2,
            epsilon_decay: 0.995,
            gamma: 0.95,
            seed: 0,
            avoid_repeats: true,
        }
    }
}

impl AgentConfig {
    pub fn with_kind(kind: AgentKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::InvalidConfig(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha={} outside (0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return bad(format!("epsilon0={} outside [0, 1]", self.epsilon0));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return bad(format!(
                "epsilonDecay={} outside (0, 1]",
                self.epsilon_decay
            ));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma={} outside [0, 1)", self.gamma));
        }
        Ok(())
    }
}

/// The act/observe protocol shared by machine and human players.
pub trait Learner {
    /// Picks the next attempt. The board must be nonempty.
    fn select_move(&mut self, obs: &Observation) -> MoveAttempt;

    fn observe(
        &mut self,
        obs: &Observation,
        attempt: MoveAttempt,
        outcome: &Outcome,
        next: &Observation,
    );

    fn end_episode(&mut self);
}

#[derive(Debug, Clone)]
pub enum Agent {
    Random(RandomAgent),
    QLearn(QAgent),
}

pub fn new_agent(config: AgentConfig) -> Result<Agent, AgentError> {
    config.check()?;
    Ok(match config.kind {
        AgentKind::Random => Agent::Random(RandomAgent::new(config)),
        AgentKind::Qlearn => Agent::QLearn(QAgent::new(config)),
    })
}

impl Agent {
    pub fn kind(&self) -> AgentKind {
        match self {
            Agent::Random(_) => AgentKind::Random,
            Agent::QLearn(_) => AgentKind::Qlearn,
        }
    }

    pub fn as_qlearn(&self) -> Option<&QAgent> {
        match self {
            Agent::QLearn(q) => Some(q),
            Agent::Random(_) => None,
        }
    }

    pub fn as_qlearn_mut(&mut self) -> Option<&mut QAgent> {
        match self {
            Agent::QLearn(q) => Some(q),
            Agent::Random(_) => None,
        }
    }
}

impl Learner for Agent {
    fn select_move(&mut self, obs: &Observation) -> MoveAttempt {
        match self {
            Agent::Random(a) => a.select_move(obs),
            Agent::QLearn(a) => a.select_move(obs),
        }
    }

    fn observe(
        &mut self,
        obs: &Observation,
        attempt: MoveAttempt,
        outcome: &Outcome,
        next: &Observation,
    ) {
        match self {
            Agent::Random(a) => a.observe(obs, attempt, outcome, next),
            Agent::QLearn(a) => a.observe(obs, attempt, outcome, next),
        }
    }

    fn end_episode(&mut self) {
        match self {
            Agent::Random(a) => a.end_episode(),
            Agent::QLearn(a) => a.end_episode(),
        }
    }
}
