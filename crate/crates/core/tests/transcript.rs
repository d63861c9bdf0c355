use rulegame::agents::{AgentConfig, AgentKind};
use rulegame::harness::TrainingRun;
use rulegame::transcript::{
    export_curves, replay, replay_recorded, AttemptRecord, LearnerKind, SessionRecord,
    TranscriptError, TranscriptStore,
};
use rulegame::{parse_rule, Bucket, EpisodeParams};

fn params() -> EpisodeParams {
    EpisodeParams {
        length: 6,
        k_min: 2,
        k_max: 4,
        colors: 3,
        gamma: 0.9,
    }
}

fn recorded_run(
    dir: &std::path::Path,
    kind: AgentKind,
) -> (TranscriptStore, Vec<rulegame::harness::LearningCurve>) {
    let store = TranscriptStore::open(dir).unwrap();
    let rule =
        parse_rule("order=any; bucket=map(red:alternate, green:nearest, default:any)").unwrap();
    let run = TrainingRun::new("mixed", rule, AgentConfig::with_kind(kind), params(), 40);
    let curves = run.run_recorded(&[1, 2, 3], &store).unwrap();
    (store, curves)
}

#[test]
fn machine_sessions_replay_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _) = recorded_run(dir.path(), AgentKind::Qlearn);
    let ids = store.session_ids().unwrap();
    assert_eq!(ids.len(), 3);
    for id in &ids {
        let report = replay_recorded(&store, id).unwrap();
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(report.episodes, 40);
    }
}

#[test]
fn flipped_accept_bit_is_one_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _) = recorded_run(dir.path(), AgentKind::Random);
    let id = &store.session_ids().unwrap()[0];
    let path = store.path(id).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let target = lines
        .iter()
        .position(|l| l.contains("\"accepted\":true"))
        .unwrap();
    lines[target] = lines[target].replace("\"accepted\":true", "\"accepted\":false");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let report = replay_recorded(&store, id).unwrap();
    assert_eq!(report.divergences.len(), 1, "{:?}", report.divergences);
    assert_eq!(report.divergences[0].fields, vec!["accepted"]);
}

#[test]
fn replay_against_other_rule_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _) = recorded_run(dir.path(), AgentKind::Random);
    let id = &store.session_ids().unwrap()[0];
    let other = parse_rule("order=ltr; bucket=left").unwrap();
    let report = replay(&store, id, &other, &params()).unwrap();
    assert!(!report.rule_matches);
    assert!(!report.divergences.is_empty());
}

#[test]
fn exported_curves_equal_harness_curves() {
    let dir = tempfile::tempdir().unwrap();
    let (store, curves) = recorded_run(dir.path(), AgentKind::Qlearn);
    let ids = store.session_ids().unwrap();
    let mut exported = export_curves(&store, &ids).unwrap();
    for c in &mut exported {
        c.rule_id = "mixed".into();
    }
    exported.sort_by_key(|c| c.seed);
    assert_eq!(exported, curves);
}

#[test]
fn unfinished_last_episode_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let store = TranscriptStore::open(dir.path()).unwrap();
    let header = SessionRecord::new(
        LearnerKind::Human,
        "p",
        "order=ltr; bucket=any",
        &params(),
        5,
    );
    store.create_session(&header).unwrap();
    let state = rulegame::new_episode(
        parse_rule("order=ltr; bucket=any").unwrap(),
        &params(),
        rulegame::rng::stream_seed(5, 1),
    )
    .unwrap();
    let first = state.board().leftmost().unwrap();
    store
        .append_attempt(
            &header.session_id,
            &AttemptRecord {
                episode: 1,
                attempt: 1,
                board_before: state.board().pattern(),
                position: first,
                bucket: Bucket::Left,
                accepted: true,
                reward: 1,
            },
        )
        .unwrap();
    assert!(replay_recorded(&store, &header.session_id)
        .unwrap()
        .is_clean());
    assert!(matches!(
        export_curves(&store, std::slice::from_ref(&header.session_id)),
        Err(TranscriptError::IncompleteEpisode(1))
    ));
}

#[test]
fn recording_twice_into_one_store_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    recorded_run(dir.path(), AgentKind::Random);
    let store = TranscriptStore::open(dir.path()).unwrap();
    let rule =
        parse_rule("order=any; bucket=map(red:alternate, green:nearest, default:any)").unwrap();
    let run = TrainingRun::new(
        "mixed",
        rule,
        AgentConfig::with_kind(AgentKind::Random),
        params(),
        40,
    );
    assert!(run.run_recorded(&[1], &store).is_err());
}
