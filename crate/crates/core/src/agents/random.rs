use std::collections::BTreeSet;

use crate::engine::{MoveAttempt, Outcome};
use crate::rng::SplitMix64;

use super::{AgentConfig, Learner, Observation};

/// Uniform baseline. By default it never repeats an attempt already
/// rejected on the unchanged board.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    avoid_repeats: bool,
    rng: SplitMix64,
    rejected: BTreeSet<MoveAttempt>,
}

impl RandomAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self {
            avoid_repeats: config.avoid_repeats,
            rng: SplitMix64::new(config.seed),
            rejected: BTreeSet::new(),
        }
    }

    pub fn rejected(&self) -> &BTreeSet<MoveAttempt> {
        &self.rejected
    }
}

impl Learner for RandomAgent {
    fn select_move(&mut self, obs: &Observation) -> MoveAttempt {
        let all = obs.concrete_moves();
        assert!(!all.is_empty(), "select_move on an empty board");
        let fresh: Vec<_> = if self.avoid_repeats {
            all.iter()
                .copied()
                .filter(|m| !obs.failures_this_board.contains(m) && !self.rejected.contains(m))
                .collect()
        } else {
            Vec::new()
        };
        let pool = if fresh.is_empty() { &all } else { &fresh };
        pool[self.rng.below_usize(pool.len())]
    }

    fn observe(
        &mut self,
        _obs: &Observation,
        attempt: MoveAttempt,
        outcome: &Outcome,
        _next: &Observation,
    ) {
        if outcome.accepted {
            self.rejected.clear();
        } else {
            self.rejected.insert(attempt);
        }
    }

    fn end_episode(&mut self) {
        self.rejected.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{new_agent, Agent, AgentKind};
    use crate::board::Bucket;
    use crate::engine::EpisodeStatus;

    fn obs(pattern: &str) -> Observation {
        Observation {
            board: pattern.parse().unwrap(),
            last_success: None,
            success_count: 0,
            failures_this_board: BTreeSet::new(),
        }
    }

    #[test]
    fn single_piece_is_a_fair_coin() {
        let o = obs("...R..");
        let mut left = 0usize;
        let n = 10_000;
        for seed in 0..n {
            let mut a = RandomAgent::new(AgentConfig {
                seed,
                ..AgentConfig::with_kind(AgentKind::Random)
            });
            let m = a.select_move(&o);
            assert_eq!(m.position, 4);
            if m.bucket == Bucket::Left {
                left += 1;
            }
        }
        let mean = n as f64 / 2.0;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((left as f64 - mean).abs() <= 3.0 * sd, "left={left}");
    }

    #[test]
    fn avoids_rejected_then_falls_back() {
        let mut o = obs("...R..");
        o.failures_this_board
            .insert(MoveAttempt::new(4, Bucket::Left));
        let mut a = RandomAgent::new(AgentConfig::with_kind(AgentKind::Random));
        for _ in 0..50 {
            assert_eq!(a.select_move(&o), MoveAttempt::new(4, Bucket::Right));
        }
        o.failures_this_board
            .insert(MoveAttempt::new(4, Bucket::Right));
        let m = a.select_move(&o);
        assert_eq!(m.position, 4);
    }

    #[test]
    fn remembers_own_rejections_until_episode_end() {
        let o = obs("...R..");
        let mut a = RandomAgent::new(AgentConfig::with_kind(AgentKind::Random));
        let reject = Outcome {
            accepted: false,
            reward: -1,
            status: EpisodeStatus::InProgress,
        };
        a.observe(&o, MoveAttempt::new(4, Bucket::Right), &reject, &o);
        assert_eq!(a.select_move(&o), MoveAttempt::new(4, Bucket::Left));
        a.end_episode();
        assert!(a.rejected().is_empty());
    }

    #[test]
    fn ignores_learning_parameters() {
        let base = AgentConfig {
            seed: 5,
            ..AgentConfig::with_kind(AgentKind::Random)
        };
        let tweaked = AgentConfig {
            alpha: 0.9,
            epsilon0: 1.0,
            ..base
        };
        let (Agent::Random(mut a), Agent::Random(mut b)) =
            (new_agent(base).unwrap(), new_agent(tweaked).unwrap())
        else {
            panic!("expected random agents");
        };
        let o = obs("RGB.Y.");
        for _ in 0..100 {
            assert_eq!(a.select_move(&o), b.select_move(&o));
        }
    }
}
