use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Per-episode summary of one training episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_index: usize,
    pub attempts: usize,
    pub errors: usize,
    pub reward_sum: i64,
    pub discounted_return: f64,
    pub cleared: bool,
}

impl EpisodeRecord {
    pub fn successes(&self) -> usize {
        self.attempts - self.errors
    }

    /// Builds a record from the reward sequence of one episode.
    pub fn from_rewards(episode_index: usize, rewards: &[i32], gamma: f64, cleared: bool) -> Self {
        let errors = rewards.iter().filter(|r| **r < 0).count();
        Self {
            episode_index,
            attempts: rewards.len(),
            errors,
            reward_sum: rewards.iter().map(|r| i64::from(*r)).sum(),
            discounted_return: discounted_return(rewards, gamma),
            cleared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub rule_id: String,
    pub learner_id: String,
    pub seed: u64,
    pub episodes: Vec<EpisodeRecord>,
}

impl LearningCurve {
    pub fn errors(&self) -> Vec<usize> {
        self.episodes.iter().map(|e| e.errors).collect()
    }
}

pub fn per_round_success_rate(rec: &EpisodeRecord) -> Result<f64, HarnessError> {
    if rec.attempts == 0 {
        return Err(HarnessError::ZeroAttempts);
    }
    Ok(rec.successes() as f64 / rec.attempts as f64)
}

/// `sum_t gamma^t * r_t` with `t` starting at 0.
pub fn discounted_return(rewards: &[i32], gamma: f64) -> f64 {
    rewards
        .iter()
        .rev()
        .fold(0.0, |acc, r| f64::from(*r) + gamma * acc)
}

/// First episode (1-based) that starts a run of `window` episodes, each
/// with at most `max_errors` errors.
pub fn episodes_to_criterion(
    curve: &LearningCurve,
    window: usize,
    max_errors: usize,
) -> Option<usize> {
    let window = window.max(1);
    let mut run = 0;
    for (i, rec) in curve.episodes.iter().enumerate() {
        if rec.errors <= max_errors {
            run += 1;
            if run == window {
                return Some(i + 2 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

fn error_rate(rec: &EpisodeRecord) -> f64 {
    if rec.attempts == 0 {
        0.0
    } else {
        rec.errors as f64 / rec.attempts as f64
    }
}

/// First episode from which every forward moving average (window `window`)
/// of the error rate stays within `eps` of the curve's best moving average.
pub fn asymptote_point(curve: &LearningCurve, eps: f64, window: usize) -> Option<usize> {
    let window = window.max(1);
    let rates: Vec<f64> = curve.episodes.iter().map(error_rate).collect();
    if rates.len() < window {
        return None;
    }
    let mut averages = Vec::with_capacity(rates.len() - window + 1);
    let mut sum: f64 = rates[..window].iter().sum();
    averages.push(sum / window as f64);
    for i in window..rates.len() {
        sum += rates[i] - rates[i - window];
        averages.push(sum / window as f64);
    }
    let best = averages.iter().copied().fold(f64::INFINITY, f64::min);
    // Small slack absorbs drift from the running sum.
    let within = |a: f64| a - best <= eps + 1e-12;
    let mut start = None;
    for (i, a) in averages.iter().enumerate().rev() {
        if within(*a) {
            start = Some(i + 1);
        } else {
            break;
        }
    }
    start
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(errors: &[usize]) -> LearningCurve {
        LearningCurve {
            rule_id: "r".into(),
            learner_id: "l".into(),
            seed: 0,
            episodes: errors
                .iter()
                .enumerate()
                .map(|(i, &e)| EpisodeRecord {
                    episode_index: i + 1,
                    attempts: 3 + e,
                    errors: e,
                    reward_sum: 3 - e as i64,
                    discounted_return: 0.0,
                    cleared: true,
                })
                .collect(),
        }
    }

    #[test]
    fn success_rate() {
        let mut rec = EpisodeRecord::from_rewards(1, &[1; 5], 0.9, true);
        assert_eq!(per_round_success_rate(&rec).unwrap(), 1.0);
        rec = EpisodeRecord::from_rewards(1, &[1, -1, 1, -1, 1, -1, 1, -1, 1, -1], 0.9, true);
        assert_eq!(per_round_success_rate(&rec).unwrap(), 0.5);
        assert_eq!(rec.reward_sum, 0);
        let empty = EpisodeRecord::from_rewards(1, &[], 0.9, false);
        assert!(matches!(
            per_round_success_rate(&empty),
            Err(HarnessError::ZeroAttempts)
        ));
    }

    #[test]
    fn success_rate_matches_reward_identity() {
        for k in 1..6usize {
            for e in 0..6usize {
                let mut rewards = vec![1; k];
                rewards.extend(std::iter::repeat_n(-1, e));
                let rec = EpisodeRecord::from_rewards(1, &rewards, 0.5, true);
                assert_eq!(rec.reward_sum, k as i64 - e as i64);
                let rate = per_round_success_rate(&rec).unwrap();
                assert!((rate - k as f64 / (k + e) as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn discounted() {
        assert_eq!(discounted_return(&[1], 0.3), 1.0);
        assert_eq!(discounted_return(&[-1, 1], 0.5), -0.5);
        let g: f64 = 0.9;
        let n = 17;
        let expected = (1.0 - g.powi(n)) / (1.0 - g);
        assert!((discounted_return(&vec![1; n as usize], g) - expected).abs() < 1e-12);
    }

    #[test]
    fn criterion_examples() {
        assert_eq!(
            episodes_to_criterion(&curve(&[3, 1, 0, 0, 0, 0, 0]), 5, 0),
            Some(3)
        );
        assert_eq!(
            episodes_to_criterion(&curve(&[1, 2, 3, 1, 1, 4]), 5, 0),
            None
        );
        assert_eq!(episodes_to_criterion(&curve(&[0, 0, 0, 0]), 5, 0), None);
        assert_eq!(episodes_to_criterion(&curve(&[2, 1, 1, 1]), 2, 1), Some(2));
    }

    #[test]
    fn asymptote_examples() {
        assert_eq!(asymptote_point(&curve(&[2; 30]), 0.05, 20), Some(1));
        assert_eq!(asymptote_point(&curve(&[2; 10]), 0.05, 20), None);
    }
}
