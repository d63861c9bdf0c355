use std::sync::Arc;

use rayon::prelude::*;

use crate::agents::{new_agent, Agent, AgentConfig, Learner, Observation};
use crate::engine::{new_episode, EpisodeParams, EpisodeStatus};
use crate::rng::stream_seed;
use crate::rule::{canonical_form, RuleAst};
use crate::transcript::{AttemptRecord, SessionRecord, TranscriptStore};

use super::measures::{EpisodeRecord, LearningCurve};
use super::HarnessError;

/// Attempts allowed in one episode before it is abandoned uncleared.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// One rule, one learner configuration, a fixed episode budget.
///
/// For run seed `s` the agent is seeded from sub-stream 0 of `s` and
/// episode `e` draws its board from sub-stream `e`, so every seed is an
/// independent, reproducible training sequence.
#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub rule_id: String,
    pub rule: Arc<RuleAst>,
    pub agent: AgentConfig,
    pub params: EpisodeParams,
    pub episodes: usize,
    pub max_attempts: usize,
}

impl TrainingRun {
    pub fn new(
        rule_id: impl Into<String>,
        rule: impl Into<Arc<RuleAst>>,
        agent: AgentConfig,
        params: EpisodeParams,
        episodes: usize,
    ) -> Self {
        Self {
            rule_id: rule_id.into(),
            rule: rule.into(),
            agent,
            params,
            episodes,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn learner_id(&self) -> &'static str {
        self.agent.kind.name()
    }

    /// A tabula-rasa agent for run seed `seed`.
    pub fn fresh_agent(&self, seed: u64) -> Result<Agent, HarnessError> {
        Ok(new_agent(AgentConfig {
            seed: stream_seed(seed, 0),
            ..self.agent
        })?)
    }

    /// One curve per seed, in seed order. Seeds run in parallel.
    pub fn run(&self, seeds: &[u64]) -> Result<Vec<LearningCurve>, HarnessError> {
        seeds.par_iter().map(|&s| self.run_seed(s)).collect()
    }

    pub fn run_seed(&self, seed: u64) -> Result<LearningCurve, HarnessError> {
        let mut agent = self.fresh_agent(seed)?;
        self.train(&mut agent, seed, 0, None)
    }

    /// Like [`run`](Self::run), also writing one machine session per seed
    /// into `store`.
    pub fn run_recorded(
        &self,
        seeds: &[u64],
        store: &TranscriptStore,
    ) -> Result<Vec<LearningCurve>, HarnessError> {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut agent = self.fresh_agent(seed)?;
                let mut log = Vec::new();
                let curve = self.train(&mut agent, seed, 0, Some(&mut log))?;
                let header = SessionRecord::machine(
                    self.learner_id(),
                    &canonical_form(&self.rule),
                    &self.params,
                    seed,
                );
                store.create_session(&header)?;
                store.append_attempts(&header.session_id, &log)?;
                Ok(curve)
            })
            .collect()
    }

    /// Trains `agent` for the full budget. Episode boards come from
    /// sub-streams `stream_offset + 1 ..= stream_offset + episodes` of `seed`.
    pub fn train(
        &self,
        agent: &mut Agent,
        seed: u64,
        stream_offset: u64,
        mut log: Option<&mut Vec<AttemptRecord>>,
    ) -> Result<LearningCurve, HarnessError> {
        let mut records = Vec::with_capacity(self.episodes);
        for episode in 1..=self.episodes {
            let board_seed = stream_seed(seed, stream_offset + episode as u64);
            let mut state = new_episode(self.rule.clone(), &self.params, board_seed)?;
            let mut rewards = Vec::new();
            while !state.status().is_terminal() && rewards.len() < self.max_attempts {
                let obs = Observation::of(&state);
                let attempt = agent.select_move(&obs);
                let board_before = log.as_ref().map(|_| state.board().pattern());
                let outcome = state.attempt_move(attempt)?;
                let next = Observation::of(&state);
                agent.observe(&obs, attempt, &outcome, &next);
                rewards.push(outcome.reward);
                if let (Some(log), Some(board_before)) = (log.as_deref_mut(), board_before) {
                    log.push(AttemptRecord {
                        episode,
                        attempt: rewards.len(),
                        board_before,
                        position: attempt.position,
                        bucket: attempt.bucket,
                        accepted: outcome.accepted,
                        reward: outcome.reward,
                    });
                }
            }
            agent.end_episode();
            records.push(EpisodeRecord::from_rewards(
                episode,
                &rewards,
                self.params.gamma,
                state.status() == EpisodeStatus::Cleared,
            ));
        }
        Ok(LearningCurve {
            rule_id: self.rule_id.clone(),
            learner_id: self.learner_id().to_string(),
            seed,
            episodes: records,
        })
    }
}

/// Trains a fresh agent per seed on `rule` and returns the curves in seed order.
pub fn run_training(
    rule_id: &str,
    rule: &RuleAst,
    agent: AgentConfig,
    params: &EpisodeParams,
    episodes: usize,
    seeds: &[u64],
) -> Result<Vec<LearningCurve>, HarnessError> {
    if episodes == 0 {
        return Err(HarnessError::InvalidArgument(
            "episodes must be at least 1".into(),
        ));
    }
    TrainingRun::new(rule_id, rule.clone(), agent, *params, episodes).run(seeds)
}
