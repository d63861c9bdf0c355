//! Train Q-learning and random agents on one rule and compare how fast
//! each reaches five error-free episodes in a row.

use rulegame::agents::{AgentConfig, AgentKind};
use rulegame::harness::{episodes_to_criterion, run_training, wilcoxon_rank_sum};
use rulegame::{parse_rule, EpisodeParams};

fn main() {
    let rule = parse_rule("order=rtl; bucket=right").unwrap();
    let params = EpisodeParams {
        length: 6,
        k_min: 3,
        k_max: 3,
        colors: 4,
        gamma: 0.95,
    };
    let seeds: Vec<u64> = (1..=10).collect();

    let mut samples = Vec::new();
    for kind in [AgentKind::Qlearn, AgentKind::Random] {
        let curves = run_training(
            "rtl",
            &rule,
            AgentConfig::with_kind(kind),
            &params,
            300,
            &seeds,
        )
        .unwrap();
        let scores: Vec<f64> = curves
            .iter()
            .map(|c| episodes_to_criterion(c, 5, 0).map_or(301.0, |e| e as f64))
            .collect();
        let errors: usize = curves[0].episodes[..20].iter().map(|e| e.errors).sum();
        println!(
            "{:<7} criterion {:?}  (seed 1 errors in first 20 episodes: {errors})",
            kind.name(),
            scores
        );
        samples.push(scores);
    }
    let test = wilcoxon_rank_sum(&samples[0], &samples[1]).unwrap();
    println!("one-sided p that qlearn is faster: {:.3e}", test.p_less);
}
