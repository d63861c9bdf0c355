//! Record machine sessions to disk, replay them, and rebuild their curves.

use rulegame::agents::AgentConfig;
use rulegame::harness::TrainingRun;
use rulegame::transcript::{export_curves, replay_recorded, TranscriptStore};
use rulegame::{parse_rule, EpisodeParams};

fn main() {
    let dir = std::env::temp_dir().join(format!("rulegame-example-{}", std::process::id()));
    let store = TranscriptStore::open(&dir).unwrap();
    let rule = parse_rule("order=any; bucket=alternate").unwrap();
    let params = EpisodeParams {
        length: 8,
        k_min: 2,
        k_max: 5,
        colors: 2,
        gamma: 0.9,
    };
    let run = TrainingRun::new("alternate", rule, AgentConfig::default(), params, 25);
    run.run_recorded(&[1, 2], &store).unwrap();

    let ids = store.session_ids().unwrap();
    for id in &ids {
        let report = replay_recorded(&store, id).unwrap();
        println!(
            "{id}: {} attempts, {} divergences",
            report.attempts,
            report.divergences.len()
        );
    }
    for curve in export_curves(&store, &ids).unwrap() {
        let errors: Vec<usize> = curve.errors();
        println!("seed {} errors per episode {:?}", curve.seed, errors);
    }
    println!("first lines of {}:", ids[0]);
    for line in store.raw(&ids[0]).unwrap().lines().take(3) {
        println!("  {line}");
    }
    std::fs::remove_dir_all(dir).ok();
}
