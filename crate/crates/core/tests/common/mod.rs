//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls into the engine's rule evaluation.

#![allow(dead_code)]

use rulegame::{Board, Bucket, Color};

/// A removal seen by the oracle: where it was, what it was, where it went.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Removal {
    pub position: usize,
    pub color: Color,
    pub bucket: Bucket,
}

/// Board length the Exhibit 1 oracles are written for.
pub const ORACLE_LENGTH: usize = 6;

fn occupied(initial: &Board, removed: &[Removal]) -> Vec<(usize, Color)> {
    (1..=initial.len())
        .filter_map(|p| initial.get(p).map(|c| (p, c)))
        .filter(|(p, _)| removed.iter().all(|r| r.position != *p))
        .collect()
}

/// Buckets sit just outside both ends of the board.
fn nearest(position: usize, length: usize) -> Vec<Bucket> {
    let dl = position as i64;
    let dr = (length as i64 + 1) - position as i64;
    if dl < dr {
        vec![Bucket::Left]
    } else if dr < dl {
        vec![Bucket::Right]
    } else {
        vec![Bucket::Left, Bucket::Right]
    }
}

fn farthest(position: usize, length: usize) -> Vec<Bucket> {
    let n = nearest(position, length);
    if n.len() == 2 {
        n
    } else if n[0] == Bucket::Left {
        vec![Bucket::Right]
    } else {
        vec![Bucket::Left]
    }
}

/// Brute-force judgement of Exhibit 1 item `item` (1-based) from its
/// plain-language statement. `removed` lists the accepted moves so far.
pub fn exhibit_oracle(
    item: usize,
    initial: &Board,
    removed: &[Removal],
    position: usize,
    bucket: Bucket,
) -> bool {
    let length = initial.len();
    let pieces = occupied(initial, removed);
    let Some(&(_, color)) = pieces.iter().find(|(p, _)| *p == position) else {
        return false;
    };
    let leftmost = pieces.first().map(|(p, _)| *p);
    let rightmost = pieces.last().map(|(p, _)| *p);
    let move_number = removed.len() + 1;
    match item {
        // Left to right, any bucket.
        1 => Some(position) == leftmost,
        // Left to right, nearest bucket.
        2 => Some(position) == leftmost && nearest(position, length).contains(&bucket),
        // Blue left, red right, anything else either side.
        3 => match color {
            Color::Blue => bucket == Bucket::Left,
            Color::Red => bucket == Bucket::Right,
            _ => true,
        },
        // Outside in from the left end, farthest bucket.
        4 => {
            let end = if move_number % 2 == 1 {
                leftmost
            } else {
                rightmost
            };
            Some(position) == end && farthest(position, length).contains(&bucket)
        }
        // A red block at the seventh cell (the last cell on shorter boards)
        // must be the third removal, into the right bucket. Boards with
        // fewer than three blocks have no third removal.
        5 => {
            let special = 7.min(length);
            let active = initial.get(special) == Some(Color::Red) && initial.piece_count() >= 3;
            if !active {
                true
            } else if move_number == 3 {
                position == special && bucket == Bucket::Right
            } else {
                position != special
            }
        }
        // First block anywhere, then alternate buckets.
        6 => match removed.last() {
            None => true,
            Some(prev) => prev.bucket != bucket,
        },
        _ => panic!("Exhibit 1 has six items"),
    }
}

/// Every board of `length` cells over the first `colors` palette colors
/// with between `k_min` and `k_max` pieces.
pub fn all_boards(length: usize, colors: usize, k_min: usize, k_max: usize) -> Vec<Board> {
    let base = colors + 1;
    let total = base.pow(length as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut cells = Vec::with_capacity(length);
        for _ in 0..length {
            let digit = code % base;
            code /= base;
            cells.push(if digit == 0 {
                None
            } else {
                Some(Color::PALETTE[digit - 1])
            });
        }
        let k = cells.iter().filter(|c| c.is_some()).count();
        if (k_min..=k_max).contains(&k) {
            out.push(Board::from_cells(cells));
        }
    }
    out
}

/// Boards with exactly `k` pieces, counted by listing every board.
pub fn enumerate_config_count(length: usize, k: usize, colors: usize) -> u64 {
    all_boards(length, colors, k, k).len() as u64
}

/// Every way to choose `n` of `0..total` indices, in lexicographic order.
pub fn combinations(total: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, total: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..total {
            if total - i < n - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, total, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, total, n, &mut Vec::new(), &mut out);
    out
}

/// One-sided rank-sum p-values `(p_less, p_greater)` for `xs` by listing
/// every assignment of the pooled midranks to the first sample.
pub fn wilcoxon_by_enumeration(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    // Midrank: 1 + (number strictly smaller) + (ties - 1) / 2, kept doubled.
    let doubled: Vec<i64> = pooled
        .iter()
        .map(|v| {
            let below = pooled.iter().filter(|w| *w < v).count() as i64;
            let equal = pooled.iter().filter(|w| *w == v).count() as i64;
            2 * below + equal + 1
        })
        .collect();
    let observed: i64 = doubled[..xs.len()].iter().sum();
    let mut le = 0u64;
    let mut ge = 0u64;
    let mut total = 0u64;
    for pick in combinations(pooled.len(), xs.len()) {
        let s: i64 = pick.iter().map(|&i| doubled[i]).sum();
        total += 1;
        if s <= observed {
            le += 1;
        }
        if s >= observed {
            ge += 1;
        }
    }
    (le as f64 / total as f64, ge as f64 / total as f64)
}

/// `n!` as an exact integer, for small `n`.
pub fn factorial_u128(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Walks every reachable (success prefix, attempt) pair for one Exhibit 1
/// item over all boards with `k_min..=k_max` pieces. Returns
/// `(attempts checked, divergences)`.
pub fn engine_vs_oracle(item: usize, params: &rulegame::EpisodeParams) -> (usize, Vec<String>) {
    use rulegame::engine::MoveAttempt;
    use rulegame::EpisodeState;
    use std::sync::Arc;

    let rules = rulegame::rule::exhibit_rules(params.length);
    let rule = Arc::new(rulegame::parse_rule(&rules[item - 1].1).expect("exhibit rule parses"));

    fn walk(
        item: usize,
        state: &EpisodeState,
        removed: &mut Vec<Removal>,
        checked: &mut usize,
        divergences: &mut Vec<String>,
    ) {
        let length = state.board().len();
        for position in 1..=length {
            for bucket in Bucket::BOTH {
                let expected =
                    exhibit_oracle(item, state.initial_board(), removed, position, bucket);
                let mut next = state.clone();
                let outcome = next
                    .attempt_move(MoveAttempt::new(position, bucket))
                    .expect("attempt on a live episode");
                *checked += 1;
                if outcome.accepted != expected {
                    divergences.push(format!(
                        "item {item} board {} after {:?}: ({position}, {bucket:?}) engine {} oracle {}",
                        state.initial_board(),
                        removed,
                        outcome.accepted,
                        expected
                    ));
                    continue;
                }
                if outcome.accepted && !next.status().is_terminal() {
                    let color = state
                        .board()
                        .get(position)
                        .expect("accepted move has a piece");
                    removed.push(Removal {
                        position,
                        color,
                        bucket,
                    });
                    walk(item, &next, removed, checked, divergences);
                    removed.pop();
                }
            }
        }
    }

    let mut checked = 0;
    let mut divergences = Vec::new();
    for board in all_boards(params.length, params.colors, params.k_min, params.k_max) {
        let state =
            EpisodeState::from_board(rule.clone(), params, board).expect("board fits params");
        if state.status().is_terminal() {
            continue;
        }
        walk(
            item,
            &state,
            &mut Vec::new(),
            &mut checked,
            &mut divergences,
        );
    }
    (checked, divergences)
}

/// Plays `trials` random episodes twice: once with successes only, once with
/// rejected attempts interleaved. After every success the two runs must
/// agree on every possible next attempt. Returns the number of mismatches.
pub fn failure_blindness_mismatches(trials: usize, seed: u64) -> usize {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use rulegame::engine::MoveAttempt;
    use rulegame::{new_episode, EpisodeParams};
    use std::sync::Arc;

    let params = EpisodeParams {
        length: 8,
        k_min: 2,
        k_max: 6,
        colors: 3,
        gamma: 0.9,
    };
    let mut rules: Vec<String> = rulegame::rule::exhibit_rules(params.length)
        .into_iter()
        .map(|(_, t)| t)
        .collect();
    rules.push("order=rtl; bucket=map(red:alternate, default:farthest)".into());
    rules.push(
        "order=outside-in-right; bucket=alternate; when config(RG.B..GR) then move=2, bucket=left"
            .into(),
    );
    let rules: Vec<Arc<rulegame::RuleAst>> = rules
        .iter()
        .map(|t| Arc::new(rulegame::parse_rule(t).expect("rule parses")))
        .collect();

    let mut rng = StdRng::seed_from_u64(seed);
    let mut mismatches = 0;
    for trial in 0..trials {
        let rule = rules[trial % rules.len()].clone();
        let mut clean = new_episode(rule, &params, rng.random()).expect("episode");
        let mut noisy = clean.clone();
        let all: Vec<MoveAttempt> = (1..=params.length)
            .flat_map(|p| Bucket::BOTH.map(|b| MoveAttempt::new(p, b)))
            .collect();
        while !clean.status().is_terminal() {
            let legal = clean.legal_moves();
            let illegal: Vec<MoveAttempt> =
                all.iter().copied().filter(|m| !legal.contains(m)).collect();
            for _ in 0..rng.random_range(0..4) {
                if illegal.is_empty() {
                    break;
                }
                let m = illegal[rng.random_range(0..illegal.len())];
                let out = noisy.attempt_move(m).expect("live episode");
                assert!(!out.accepted, "chosen from the illegal set");
            }
            if clean.legal_moves() != noisy.legal_moves() {
                mismatches += 1;
            }
            for &m in &all {
                let a = clean.clone().attempt_move(m).expect("live").accepted;
                let b = noisy.clone().attempt_move(m).expect("live").accepted;
                if a != b {
                    mismatches += 1;
                }
            }
            let legal: Vec<MoveAttempt> = legal.into_iter().collect();
            let m = legal[rng.random_range(0..legal.len())];
            assert!(clean.attempt_move(m).expect("live").accepted);
            assert!(noisy.attempt_move(m).expect("live").accepted);
        }
        if clean.status() != noisy.status() {
            mismatches += 1;
        }
    }
    mismatches
}

/// Q-learning against random play on "order=ltr; bucket=any" with three
/// pieces on six cells. Returns `(seeds reaching criterion, seeds, p)` where
/// `p` is the one-sided rank-sum p-value that Q-learning needs fewer
/// episodes to criterion.
pub fn learning_comparison(seeds: usize, episodes: usize) -> (usize, usize, f64) {
    use rulegame::agents::{AgentConfig, AgentKind};
    use rulegame::harness::{
        difficulty_of, run_training, wilcoxon_rank_sum, DifficultyMeasure, MeasureSettings,
    };

    let params = rulegame::EpisodeParams {
        length: 6,
        k_min: 3,
        k_max: 3,
        colors: 4,
        gamma: 0.95,
    };
    let rule = rulegame::parse_rule("order=ltr; bucket=any").expect("rule parses");
    let seeds: Vec<u64> = (1..=seeds as u64).collect();
    let settings = MeasureSettings {
        criterion_window: 5,
        criterion_max_errors: 0,
        ..MeasureSettings::default()
    };
    let scores = |kind| {
        let curves = run_training(
            "ltr",
            &rule,
            AgentConfig::with_kind(kind),
            &params,
            episodes,
            &seeds,
        )
        .expect("training runs");
        curves
            .iter()
            .map(|c| difficulty_of(c, DifficultyMeasure::EpisodesToCriterion, &settings))
            .collect::<Vec<_>>()
    };
    let q = scores(AgentKind::Qlearn);
    let r = scores(AgentKind::Random);
    let reached = q.iter().filter(|(_, censored)| !censored).count();
    let qv: Vec<f64> = q.iter().map(|(v, _)| *v).collect();
    let rv: Vec<f64> = r.iter().map(|(v, _)| *v).collect();
    let p = wilcoxon_rank_sum(&qv, &rv)
        .expect("samples are valid")
        .p_less;
    (reached, seeds.len(), p)
}

/// Four rules, two learners. Rule "crossA" is hard for X and easy for Y and
/// "crossB" the reverse; every other pair keeps its order on both axes.
pub fn planted_table() -> rulegame::harness::DifficultyTable {
    use rulegame::harness::{DifficultyMeasure, DifficultyTable};
    let band = |lo: u32| (lo..lo + 10).map(f64::from).collect::<Vec<_>>();
    let mut t = DifficultyTable::new(DifficultyMeasure::EpisodesToCriterion);
    t.insert("crossA", "X", band(60)).unwrap();
    t.insert("crossA", "Y", band(20)).unwrap();
    t.insert("crossB", "X", band(20)).unwrap();
    t.insert("crossB", "Y", band(60)).unwrap();
    // Hardest for both and easiest for both: never part of a reversal.
    t.insert("hard", "X", band(200)).unwrap();
    t.insert("hard", "Y", band(200)).unwrap();
    t.insert("easy", "X", band(1)).unwrap();
    t.insert("easy", "Y", band(1)).unwrap();
    t
}
