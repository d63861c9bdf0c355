//! CSV formats for curves, difficulty samples and pair reports.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::measures::{EpisodeRecord, LearningCurve};
use super::pairs::{DifficultyMeasure, DifficultyTable, InterestingPair};
use super::HarnessError;

pub const CURVE_HEADER: [&str; 9] = [
    "rule",
    "learner",
    "seed",
    "episode",
    "attempts",
    "errors",
    "reward_sum",
    "discounted_return",
    "cleared",
];

pub const DIFFICULTY_HEADER: [&str; 4] = ["rule", "learner", "seed", "difficulty"];

pub const PAIR_HEADER: [&str; 5] = ["ruleA", "ruleB", "direction", "p_axis_x", "p_axis_y"];

pub fn write_curves_csv<W: Write>(out: W, curves: &[LearningCurve]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for c in curves {
        for e in &c.episodes {
            w.write_record([
                c.rule_id.clone(),
                c.learner_id.clone(),
                c.seed.to_string(),
                e.episode_index.to_string(),
                e.attempts.to_string(),
                e.errors.to_string(),
                e.reward_sum.to_string(),
                e.discounted_return.to_string(),
                e.cleared.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn header_of<R: Read>(r: &mut csv::Reader<R>) -> Result<Vec<String>, HarnessError> {
    Ok(r.headers()?.iter().map(str::to_string).collect())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
) -> Result<T, HarnessError> {
    rec.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| {
        HarnessError::Schema(format!(
            "bad `{name}` value on line {}",
            rec.position().map_or(0, |p| p.line())
        ))
    })
}

/// Reads curves back, grouped by `(rule, learner, seed)` in order of first appearance.
pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<LearningCurve>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    if header_of(&mut r)? != CURVE_HEADER {
        return Err(HarnessError::Schema(format!(
            "expected curve header `{}`",
            CURVE_HEADER.join(",")
        )));
    }
    let mut curves: Vec<LearningCurve> = Vec::new();
    let mut index: BTreeMap<(String, String, u64), usize> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let key = (
            rec[0].to_string(),
            rec[1].to_string(),
            field::<u64>(&rec, 2, "seed")?,
        );
        let episode = EpisodeRecord {
            episode_index: field(&rec, 3, "episode")?,
            attempts: field(&rec, 4, "attempts")?,
            errors: field(&rec, 5, "errors")?,
            reward_sum: field(&rec, 6, "reward_sum")?,
            discounted_return: field(&rec, 7, "discounted_return")?,
            cleared: field(&rec, 8, "cleared")?,
        };
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            curves.push(LearningCurve {
                rule_id: key.0.clone(),
                learner_id: key.1.clone(),
                seed: key.2,
                episodes: Vec::new(),
            });
            curves.len() - 1
        });
        let curve = &mut curves[slot];
        let expected = curve.episodes.len() + 1;
        if episode.episode_index != expected {
            return Err(HarnessError::Schema(format!(
                "curve {}/{}/{}: episode {} where {expected} was expected",
                key.0, key.1, key.2, episode.episode_index
            )));
        }
        curve.episodes.push(episode);
    }
    Ok(curves)
}

pub fn write_difficulty_csv<W: Write>(out: W, table: &DifficultyTable) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIFFICULTY_HEADER)?;
    for (rule, learner, values) in table.iter() {
        for (i, v) in values.iter().enumerate() {
            w.write_record([rule, learner, &i.to_string(), &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_difficulty_csv<R: Read>(
    input: R,
    measure: DifficultyMeasure,
) -> Result<DifficultyTable, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    if header_of(&mut r)? != DIFFICULTY_HEADER {
        return Err(HarnessError::Schema(format!(
            "expected difficulty header `{}`",
            DIFFICULTY_HEADER.join(",")
        )));
    }
    let mut table = DifficultyTable::new(measure);
    for rec in r.records() {
        let rec = rec?;
        let value: f64 = field(&rec, 3, "difficulty")?;
        if !value.is_finite() {
            return Err(HarnessError::NonFinite);
        }
        table.push(&rec[0], &rec[1], value);
    }
    Ok(table)
}

pub fn write_pairs_csv<W: Write>(out: W, pairs: &[InterestingPair]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PAIR_HEADER)?;
    for p in pairs {
        w.write_record([
            p.rule_a.as_str(),
            p.rule_b.as_str(),
            p.direction.name(),
            &p.p_axis_x.to_string(),
            &p.p_axis_y.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
