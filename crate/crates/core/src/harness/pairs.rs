//! Difficulty tables and detection of rule pairs whose difficulty order
//! reverses between two learners.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::measures::{asymptote_point, episodes_to_criterion, LearningCurve};
use super::wilcoxon::wilcoxon_rank_sum;
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DifficultyMeasure {
    #[default]
    EpisodesToCriterion,
    AsymptotePoint,
}

impl DifficultyMeasure {
    pub fn name(self) -> &'static str {
        match self {
            DifficultyMeasure::EpisodesToCriterion => "episodes_to_criterion",
            DifficultyMeasure::AsymptotePoint => "asymptote_point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSettings {
    pub criterion_window: usize,
    pub criterion_max_errors: usize,
    pub asymptote_eps: f64,
    pub asymptote_window: usize,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        Self {
            criterion_window: 5,
            criterion_max_errors: 0,
            asymptote_eps: 0.05,
            asymptote_window: 20,
        }
    }
}

/// Difficulty of one curve and whether it was censored. A curve that never
/// meets the measure scores its episode budget plus one.
pub fn difficulty_of(
    curve: &LearningCurve,
    measure: DifficultyMeasure,
    settings: &MeasureSettings,
) -> (f64, bool) {
    let found = match measure {
        DifficultyMeasure::EpisodesToCriterion => episodes_to_criterion(
            curve,
            settings.criterion_window,
            settings.criterion_max_errors,
        ),
        DifficultyMeasure::AsymptotePoint => {
            asymptote_point(curve, settings.asymptote_eps, settings.asymptote_window)
        }
    };
    match found {
        Some(e) => (e as f64, false),
        None => ((curve.episodes.len() + 1) as f64, true),
    }
}

/// Difficulty samples keyed by `(rule, learner)`, one value per seed or
/// participant, all under one measure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DifficultyTable {
    pub measure: DifficultyMeasure,
    samples: BTreeMap<(String, String), Vec<f64>>,
}

impl DifficultyTable {
    pub fn new(measure: DifficultyMeasure) -> Self {
        Self {
            measure,
            samples: BTreeMap::new(),
        }
    }

    pub fn from_curves(
        curves: &[LearningCurve],
        measure: DifficultyMeasure,
        settings: &MeasureSettings,
    ) -> Self {
        let mut table = Self::new(measure);
        for c in curves {
            let (d, _) = difficulty_of(c, measure, settings);
            table.push(&c.rule_id, &c.learner_id, d);
        }
        table
    }

    pub fn push(&mut self, rule: &str, learner: &str, value: f64) {
        self.samples
            .entry((rule.to_string(), learner.to_string()))
            .or_default()
            .push(value);
    }

    pub fn insert(
        &mut self,
        rule: &str,
        learner: &str,
        values: Vec<f64>,
    ) -> Result<(), HarnessError> {
        if values.is_empty() {
            return Err(HarnessError::EmptySample);
        }
        self.samples
            .insert((rule.to_string(), learner.to_string()), values);
        Ok(())
    }

    pub fn sample(&self, rule: &str, learner: &str) -> Option<&[f64]> {
        self.samples
            .get(&(rule.to_string(), learner.to_string()))
            .map(Vec::as_slice)
    }

    pub fn rules(&self) -> BTreeSet<&str> {
        self.samples.keys().map(|(r, _)| r.as_str()).collect()
    }

    pub fn learners(&self) -> BTreeSet<&str> {
        self.samples.keys().map(|(_, l)| l.as_str()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &[f64])> {
        self.samples
            .iter()
            .map(|((r, l), v)| (r.as_str(), l.as_str(), v.as_slice()))
    }

    /// Applies `f` to every sample value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            measure: self.measure,
            samples: self
                .samples
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| f(*x)).collect()))
                .collect(),
        }
    }

    /// Merges another table measured the same way.
    pub fn extend(&mut self, other: &DifficultyTable) {
        for ((r, l), v) in &other.samples {
            self.samples
                .entry((r.clone(), l.clone()))
                .or_default()
                .extend(v);
        }
    }
}

/// Which learner finds the pair's first rule harder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Harder for X, easier for Y.
    XFindsAHarder,
    /// Harder for Y, easier for X.
    YFindsAHarder,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::XFindsAHarder => Direction::YFindsAHarder,
            Direction::YFindsAHarder => Direction::XFindsAHarder,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::XFindsAHarder => "x_finds_a_harder",
            Direction::YFindsAHarder => "y_finds_a_harder",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterestingPair {
    pub rule_a: String,
    pub rule_b: String,
    pub direction: Direction,
    pub p_axis_x: f64,
    pub p_axis_y: f64,
}

/// Reports every rule pair `(a, b)`, `a < b`, whose difficulty order is
/// significantly reversed between learners `x` and `y` under one-sided
/// rank-sum tests at level `alpha` on both axes. Sorted by the larger of
/// the two p-values.
pub fn detect_interesting_pairs(
    table: &DifficultyTable,
    x: &str,
    y: &str,
    alpha: f64,
) -> Result<Vec<InterestingPair>, HarnessError> {
    let rules: Vec<&str> = table.rules().into_iter().collect();
    let fetch = |rule: &str, learner: &str| {
        table
            .sample(rule, learner)
            .ok_or_else(|| HarnessError::MissingSample {
                rule: rule.to_string(),
                learner: learner.to_string(),
            })
    };
    for r in &rules {
        fetch(r, x)?;
        fetch(r, y)?;
    }

    let mut pairs = Vec::new();
    for (i, a) in rules.iter().enumerate() {
        for b in &rules[i + 1..] {
            let tx = wilcoxon_rank_sum(fetch(a, x)?, fetch(b, x)?)?;
            let ty = wilcoxon_rank_sum(fetch(a, y)?, fetch(b, y)?)?;
            let found = if tx.p_greater < alpha && ty.p_less < alpha {
                Some((Direction::XFindsAHarder, tx.p_greater, ty.p_less))
            } else if tx.p_less < alpha && ty.p_greater < alpha {
                Some((Direction::YFindsAHarder, tx.p_less, ty.p_greater))
            } else {
                None
            };
            if let Some((direction, p_axis_x, p_axis_y)) = found {
                pairs.push(InterestingPair {
                    rule_a: a.to_string(),
                    rule_b: b.to_string(),
                    direction,
                    p_axis_x,
                    p_axis_y,
                });
            }
        }
    }
    pairs.sort_by(|p, q| {
        p.p_axis_x
            .max(p.p_axis_y)
            .total_cmp(&q.p_axis_x.max(q.p_axis_y))
            .then_with(|| (&p.rule_a, &p.rule_b).cmp(&(&q.rule_a, &q.rule_b)))
    });
    Ok(pairs)
}
