use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use crate::engine::{MoveAttempt, Outcome};
use crate::rng::SplitMix64;

use super::{
    default_actions, AbstractAction, AgentConfig, DefaultFeaturizer, Featurizer, Learner,
    Observation, StateKey,
};

/// Tabular epsilon-greedy Q-learning over abstract actions.
///
/// When every resolvable abstract action has already been rejected on the
/// current board the agent falls back to a uniform concrete attempt it has
/// not tried yet, so episodes always make progress.
#[derive(Debug, Clone)]
pub struct QAgent {
    config: AgentConfig,
    epsilon: f64,
    table: BTreeMap<(StateKey, AbstractAction), f64>,
    actions: Vec<AbstractAction>,
    featurizer: Arc<dyn Featurizer>,
    rng: SplitMix64,
    last_choice: Option<AbstractAction>,
}

impl QAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self::with_abstraction(config, Arc::new(DefaultFeaturizer), default_actions())
    }

    pub fn with_abstraction(
        config: AgentConfig,
        featurizer: Arc<dyn Featurizer>,
        actions: Vec<AbstractAction>,
    ) -> Self {
        Self {
            epsilon: config.epsilon0,
            config,
            table: BTreeMap::new(),
            actions,
            featurizer,
            rng: SplitMix64::new(config.seed),
            last_choice: None,
        }
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.epsilon = epsilon;
    }

    /// Restores the initial exploration rate, keeping the Q-table.
    pub fn reset_epsilon(&mut self) {
        self.epsilon = self.config.epsilon0;
    }

    pub fn actions(&self) -> &[AbstractAction] {
        &self.actions
    }

    pub fn state_key(&self, obs: &Observation) -> StateKey {
        self.featurizer.featurize(obs)
    }

    pub fn q_value(&self, key: StateKey, action: AbstractAction) -> f64 {
        self.table.get(&(key, action)).copied().unwrap_or(0.0)
    }

    pub fn set_q_value(&mut self, key: StateKey, action: AbstractAction, value: f64) {
        self.table.insert((key, action), value);
    }

    pub fn table(&self) -> &BTreeMap<(StateKey, AbstractAction), f64> {
        &self.table
    }

    fn resolvable(&self, obs: &Observation) -> Vec<(AbstractAction, MoveAttempt)> {
        self.actions
            .iter()
            .filter_map(|a| a.resolve(&obs.board).map(|m| (*a, m)))
            .collect()
    }

    fn max_q(&self, obs: &Observation) -> f64 {
        let key = self.state_key(obs);
        self.resolvable(obs)
            .iter()
            .map(|(a, _)| self.q_value(key, *a))
            .fold(None, |best: Option<f64>, q| {
                Some(best.map_or(q, |b| b.max(q)))
            })
            .unwrap_or(0.0)
    }

    /// Greedy action among `candidates`; first in enumeration order on ties.
    fn greedy(
        &self,
        key: StateKey,
        candidates: &[(AbstractAction, MoveAttempt)],
    ) -> (AbstractAction, MoveAttempt) {
        let mut best = candidates[0];
        let mut best_q = self.q_value(key, best.0);
        for &(a, m) in &candidates[1..] {
            let q = self.q_value(key, a);
            if q > best_q {
                best = (a, m);
                best_q = q;
            }
        }
        best
    }

    /// Writes the table as CSV: state-key fields, action fields, value.
    pub fn export_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "last_bucket",
            "parity",
            "leftmost",
            "rightmost",
            "selector",
            "bucket",
            "value",
        ])?;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".to_string());
        for ((key, action), value) in &self.table {
            w.write_record([
                opt(key.last_bucket.map(|b| b.to_string())),
                key.parity.to_string(),
                opt(key.leftmost.map(|c| c.to_string())),
                opt(key.rightmost.map(|c| c.to_string())),
                action.selector.to_string(),
                action.bucket.to_string(),
                value.to_string(),
            ])?;
        }
        w.flush()
    }
}

impl Learner for QAgent {
    fn select_move(&mut self, obs: &Observation) -> MoveAttempt {
        let candidates = self.resolvable(obs);
        assert!(!candidates.is_empty(), "select_move on an empty board");

        let untried = candidates
            .iter()
            .any(|(_, m)| !obs.failures_this_board.contains(m));
        if !untried {
            let fresh: Vec<_> = obs
                .concrete_moves()
                .into_iter()
                .filter(|m| !obs.failures_this_board.contains(m))
                .collect();
            if !fresh.is_empty() {
                self.last_choice = None;
                return fresh[self.rng.below_usize(fresh.len())];
            }
        }

        let key = self.state_key(obs);
        let (action, attempt) = if self.rng.next_f64() < self.epsilon {
            candidates[self.rng.below_usize(candidates.len())]
        } else {
            self.greedy(key, &candidates)
        };
        self.last_choice = Some(action);
        attempt
    }

    fn observe(
        &mut self,
        obs: &Observation,
        attempt: MoveAttempt,
        outcome: &Outcome,
        next: &Observation,
    ) {
        let chosen = self.last_choice.take();
        let action = chosen
            .filter(|a| a.resolve(&obs.board) == Some(attempt))
            .or_else(|| {
                self.actions
                    .iter()
                    .copied()
                    .find(|a| a.resolve(&obs.board) == Some(attempt))
            });
        let Some(action) = action else {
            return;
        };
        let key = self.state_key(obs);
        let future = if outcome.status.is_terminal() {
            0.0
        } else {
            self.max_q(next)
        };
        let q = self.q_value(key, action);
        let target = f64::from(outcome.reward) + self.config.gamma * future;
        self.set_q_value(key, action, q + self.config.alpha * (target - q));
    }

    fn end_episode(&mut self) {
        self.epsilon *= self.config.epsilon_decay;
        self.last_choice = None;
    }
}
