//! Build a difficulty table from training runs and look for rule pairs
//! whose difficulty order differs between two learners.

use rulegame::agents::{AgentConfig, AgentKind};
use rulegame::harness::{
    detect_interesting_pairs, DifficultyMeasure, DifficultyTable, MeasureSettings, TrainingRun,
};
use rulegame::{parse_rule, EpisodeParams};

fn main() {
    let params = EpisodeParams {
        length: 6,
        k_min: 2,
        k_max: 4,
        colors: 3,
        gamma: 0.95,
    };
    let rules = [
        ("ltr-any", "order=ltr; bucket=any"),
        ("rtl-right", "order=rtl; bucket=right"),
        ("alternate", "order=any; bucket=alternate"),
    ];
    let seeds: Vec<u64> = (1..=12).collect();
    let settings = MeasureSettings::default();
    let mut table = DifficultyTable::new(DifficultyMeasure::EpisodesToCriterion);

    for (id, text) in rules {
        for (learner, alpha) in [("fast", 0.5), ("slow", 0.05)] {
            let agent = AgentConfig {
                alpha,
                ..AgentConfig::with_kind(AgentKind::Qlearn)
            };
            let run = TrainingRun::new(id, parse_rule(text).unwrap(), agent, params, 200);
            let curves: Vec<_> = run
                .run(&seeds)
                .unwrap()
                .into_iter()
                .map(|mut c| {
                    c.learner_id = learner.into();
                    c
                })
                .collect();
            table.extend(&DifficultyTable::from_curves(
                &curves,
                table.measure,
                &settings,
            ));
        }
    }
    for (rule, learner, sample) in table.iter() {
        println!("{rule:<10} {learner:<5} {sample:?}");
    }
    let pairs = detect_interesting_pairs(&table, "fast", "slow", 0.05).unwrap();
    println!("{} interesting pairs", pairs.len());
    for p in pairs {
        println!("  {} / {}: {}", p.rule_a, p.rule_b, p.direction);
    }
}
