use rayon::prelude::*;

use crate::agents::{Agent, AgentConfig};
use crate::engine::EpisodeParams;
use crate::rule::RuleAst;

use super::measures::{episodes_to_criterion, LearningCurve};
use super::pairs::MeasureSettings;
use super::training::TrainingRun;
use super::HarnessError;

/// Pre-training boards come from sub-streams above this offset so they
/// never coincide with the evaluation boards.
const PRETRAIN_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    /// Median over seeds of naive minus pre-trained episodes-to-criterion.
    pub index: f64,
    pub differences: Vec<f64>,
    pub naive: Vec<Option<usize>>,
    pub pretrained: Vec<Option<usize>>,
    pub budget: usize,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Median paired difference; criteria never met count as `budget + 1`.
pub fn transfer_from_criteria(
    naive: &[Option<usize>],
    pretrained: &[Option<usize>],
    budget: usize,
) -> (f64, Vec<f64>) {
    let score = |c: &Option<usize>| c.unwrap_or(budget + 1) as f64;
    let diffs: Vec<f64> = naive
        .iter()
        .zip(pretrained)
        .map(|(n, p)| score(n) - score(p))
        .collect();
    (median(&diffs).unwrap_or(0.0), diffs)
}

/// Measures how much `pretrain_episodes` on `rule_from` shortens learning
/// of `rule_to`, relative to a fresh agent on the same boards and seed.
/// The Q-table is carried over and exploration reset before the second phase.
#[allow(clippy::too_many_arguments)]
pub fn transfer_index(
    rule_from: &RuleAst,
    rule_to: &RuleAst,
    agent: AgentConfig,
    params: &EpisodeParams,
    pretrain_episodes: usize,
    episodes: usize,
    seeds: &[u64],
    settings: &MeasureSettings,
) -> Result<TransferReport, HarnessError> {
    let target = TrainingRun::new("to", rule_to.clone(), agent, *params, episodes);
    let pretrain = TrainingRun::new("from", rule_from.clone(), agent, *params, pretrain_episodes);
    let criterion = |c: &LearningCurve| {
        episodes_to_criterion(c, settings.criterion_window, settings.criterion_max_errors)
    };

    let per_seed: Vec<(Option<usize>, Option<usize>)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut naive_agent = target.fresh_agent(seed)?;
            let naive = target.train(&mut naive_agent, seed, 0, None)?;

            let mut agent = pretrain.fresh_agent(seed)?;
            if pretrain_episodes > 0 {
                pretrain.train(&mut agent, seed, PRETRAIN_STREAM_OFFSET, None)?;
            }
            if let Agent::QLearn(q) = &mut agent {
                q.reset_epsilon();
            }
            let after = target.train(&mut agent, seed, 0, None)?;
            Ok((criterion(&naive), criterion(&after)))
        })
        .collect::<Result<_, HarnessError>>()?;

    let (naive, pretrained): (Vec<_>, Vec<_>) = per_seed.into_iter().unzip();
    let (index, differences) = transfer_from_criteria(&naive, &pretrained, episodes);
    Ok(TransferReport {
        index,
        differences,
        naive,
        pretrained,
        budget: episodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_arithmetic() {
        let (index, diffs) = transfer_from_criteria(&[Some(30)], &[Some(12)], 100);
        assert_eq!(index, 18.0);
        assert_eq!(diffs, vec![18.0]);
        let (index, _) = transfer_from_criteria(
            &[None, Some(30), Some(40)],
            &[Some(10), Some(12), None],
            100,
        );
        // differences 91, 18, -61
        assert_eq!(index, 18.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
