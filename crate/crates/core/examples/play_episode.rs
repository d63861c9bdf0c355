//! Play one episode by hand-written strategy and print every step.

use rulegame::engine::MoveAttempt;
use rulegame::{new_episode, parse_rule, Bucket, EpisodeParams};

fn main() {
    let rule = parse_rule("order=outside-in-left; bucket=farthest").unwrap();
    let params = EpisodeParams {
        length: 10,
        k_min: 4,
        k_max: 6,
        ..EpisodeParams::default()
    };
    let mut episode = new_episode(rule, &params, 7).unwrap();

    // Always try the leftmost block first, then fall back to the rightmost.
    while !episode.status().is_terminal() {
        let board = episode.board().clone();
        let candidates = [board.leftmost(), board.rightmost()];
        for position in candidates.into_iter().flatten() {
            let mut done = false;
            for bucket in Bucket::BOTH {
                let out = episode
                    .attempt_move(MoveAttempt::new(position, bucket))
                    .unwrap();
                println!(
                    "{board}  take {position:>2} -> {:<5} {:+}",
                    bucket.name(),
                    out.reward
                );
                if out.accepted {
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    println!(
        "{:?} after {} attempts",
        episode.status(),
        episode.attempt_count()
    );
}
