use std::sync::Arc;

use rulegame::agents::{new_agent, AgentConfig, AgentKind, Learner, Observation, QAgent};
use rulegame::engine::MoveAttempt;
use rulegame::{new_episode, parse_rule, Bucket, EpisodeParams, EpisodeState};

fn params() -> EpisodeParams {
    EpisodeParams {
        length: 6,
        k_min: 3,
        k_max: 3,
        colors: 2,
        gamma: 0.9,
    }
}

fn play(
    agent: &mut impl Learner,
    state: &mut EpisodeState,
    limit: usize,
) -> Vec<(MoveAttempt, bool)> {
    let mut log = Vec::new();
    while !state.status().is_terminal() && log.len() < limit {
        let obs = Observation::of(state);
        let m = agent.select_move(&obs);
        let out = state.attempt_move(m).unwrap();
        agent.observe(&obs, m, &out, &Observation::of(state));
        log.push((m, out.accepted));
    }
    agent.end_episode();
    log
}

#[test]
fn random_never_repeats_a_rejection_on_one_board() {
    let rule = Arc::new(parse_rule("order=rtl; bucket=left").unwrap());
    for seed in 0..50 {
        let mut agent = new_agent(AgentConfig {
            seed,
            ..AgentConfig::with_kind(AgentKind::Random)
        })
        .unwrap();
        let mut state = new_episode(rule.clone(), &params(), seed).unwrap();
        let mut rejected_here = std::collections::BTreeSet::new();
        for (m, ok) in play(&mut agent, &mut state, 1000) {
            if ok {
                rejected_here.clear();
            } else {
                assert!(rejected_here.insert(m), "repeated {m:?}");
            }
        }
        assert!(state.status().is_terminal());
    }
}

#[test]
fn greedy_agent_with_empty_table_takes_first_action() {
    let mut agent = QAgent::new(AgentConfig {
        epsilon0: 0.0,
        ..AgentConfig::default()
    });
    let state = EpisodeState::from_board(
        Arc::new(parse_rule("order=any; bucket=any").unwrap()),
        &params(),
        "..R.GR".parse().unwrap(),
    )
    .unwrap();
    assert_eq!(
        agent.select_move(&Observation::of(&state)),
        MoveAttempt::new(3, Bucket::Left)
    );
}

#[test]
fn agents_are_reproducible_from_their_seed() {
    let rule = Arc::new(parse_rule("order=outside-in-left; bucket=farthest").unwrap());
    for kind in [AgentKind::Random, AgentKind::Qlearn] {
        let run = || {
            let mut agent = new_agent(AgentConfig {
                seed: 77,
                ..AgentConfig::with_kind(kind)
            })
            .unwrap();
            (0..30)
                .flat_map(|e| {
                    let mut state = new_episode(rule.clone(), &params(), e).unwrap();
                    play(&mut agent, &mut state, 1000)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn qlearning_stops_erring_on_fixed_rule() {
    let rule = Arc::new(parse_rule("order=rtl; bucket=right").unwrap());
    let mut agent = QAgent::new(AgentConfig {
        seed: 3,
        ..AgentConfig::default()
    });
    let mut errors = Vec::new();
    for e in 0..400 {
        let mut state = new_episode(rule.clone(), &params(), e).unwrap();
        errors.push(
            play(&mut agent, &mut state, 1000)
                .iter()
                .filter(|(_, ok)| !ok)
                .count(),
        );
    }
    let early: usize = errors[..20].iter().sum();
    let late: usize = errors[380..].iter().sum();
    assert!(late * 5 < early, "early {early}, late {late}");
}

#[test]
fn q_table_exports_as_csv() {
    let rule = Arc::new(parse_rule("order=ltr; bucket=nearest").unwrap());
    let mut agent = QAgent::new(AgentConfig::default());
    let mut state = new_episode(rule, &params(), 1).unwrap();
    play(&mut agent, &mut state, 1000);
    let mut buf = Vec::new();
    agent.export_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("last_bucket,parity,leftmost,rightmost,selector,bucket,value")
    );
    assert_eq!(lines.count(), agent.table().len());
}

#[test]
fn bad_configs_rejected() {
    assert!(new_agent(AgentConfig {
        alpha: 0.0,
        ..AgentConfig::default()
    })
    .is_err());
    assert!(new_agent(AgentConfig {
        epsilon0: 1.5,
        ..AgentConfig::default()
    })
    .is_err());
    assert!("sarsa".parse::<AgentKind>().is_err());
}
