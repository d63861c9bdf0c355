//! Seeded episode engine.
//!
//! An episode starts from a random board and advances one attempt at a time.
//! Acceptance is decided by [`is_legal`], which sees the initial board, the
//! current board and the successful moves so far, and nothing else. Rejected
//! attempts are stored for learners but are never passed to the rule.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, Bucket, Color};
use crate::rng::SplitMix64;
use crate::rule::{validate, BucketExpr, Order, RuleAst, SimpleBucket, Trigger};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rule is not valid for these parameters: {}", .0.join("; "))]
    InvalidRule(Vec<String>),
    #[error("episode is already finished")]
    EpisodeFinished,
    #[error("position {position} out of range 1..{length}")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("board has length {found}, expected {expected}")]
    BoardLength { expected: usize, found: usize },
}

/// Board and generation parameters shared by every episode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeParams {
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(rename = "Kmin")]
    pub k_min: usize,
    #[serde(rename = "Kmax")]
    pub k_max: usize,
    #[serde(rename = "C")]
    pub colors: usize,
    pub gamma: f64,
}

impl Default for EpisodeParams {
    fn default() -> Self {
        Self {
            length: 20,
            k_min: 5,
            k_max: 10,
            colors: 4,
            gamma: 0.95,
        }
    }
}

impl EpisodeParams {
    pub fn check(&self) -> Result<(), EngineError> {
        let fail = |m: String| Err(EngineError::InvalidParams(m));
        if self.k_min < 1 || self.k_min > self.k_max {
            return fail(format!(
                "need 1 <= Kmin <= Kmax, got Kmin={} Kmax={}",
                self.k_min, self.k_max
            ));
        }
        if self.k_max > self.length {
            return fail(format!("Kmax={} exceeds L={}", self.k_max, self.length));
        }
        if !(1..=4).contains(&self.colors) {
            return fail(format!("C={} outside 1..4", self.colors));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("gamma={} outside [0, 1)", self.gamma));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MoveAttempt {
    pub position: usize,
    pub bucket: Bucket,
}

impl MoveAttempt {
    pub fn new(position: usize, bucket: Bucket) -> Self {
        Self { position, bucket }
    }
}

impl fmt::Display for MoveAttempt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.position, self.bucket)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeStatus {
    InProgress,
    Cleared,
    Stalemate,
}

impl EpisodeStatus {
    pub fn is_terminal(self) -> bool {
        self != EpisodeStatus::InProgress
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub accepted: bool,
    pub reward: i32,
    pub status: EpisodeStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuccessRecord {
    pub move_index: usize,
    pub position: usize,
    pub color: Color,
    pub bucket: Bucket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FailureRecord {
    pub attempt_index: usize,
    pub position: usize,
    pub bucket: Bucket,
}

/// Nearest and farthest buckets for a cell; both on an exact tie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSets {
    pub nearest: Vec<Bucket>,
    pub farthest: Vec<Bucket>,
}

pub fn distance_semantics(position: usize, length: usize) -> DistanceSets {
    let to_left = position;
    let to_right = length + 1 - position;
    match to_left.cmp(&to_right) {
        std::cmp::Ordering::Less => DistanceSets {
            nearest: vec![Bucket::Left],
            farthest: vec![Bucket::Right],
        },
        std::cmp::Ordering::Greater => DistanceSets {
            nearest: vec![Bucket::Right],
            farthest: vec![Bucket::Left],
        },
        std::cmp::Ordering::Equal => DistanceSets {
            nearest: Bucket::BOTH.to_vec(),
            farthest: Bucket::BOTH.to_vec(),
        },
    }
}

/// Whether a position guard is in force for this initial board. A guard
/// naming move `m` is inert on boards with fewer than `m` pieces.
fn guard_triggered(trigger: &Trigger, move_index: usize, initial: &Board) -> bool {
    match trigger {
        Trigger::At { position, color } => {
            initial.get(*position) == Some(*color) && initial.piece_count() >= move_index
        }
        Trigger::Config(pattern) => pattern == initial,
    }
}

fn simple_allows(
    simple: SimpleBucket,
    bucket: Bucket,
    position: usize,
    length: usize,
    previous: Option<Bucket>,
) -> bool {
    match simple {
        SimpleBucket::Any => true,
        SimpleBucket::Left => bucket == Bucket::Left,
        SimpleBucket::Right => bucket == Bucket::Right,
        SimpleBucket::Nearest => distance_semantics(position, length)
            .nearest
            .contains(&bucket),
        SimpleBucket::Farthest => distance_semantics(position, length)
            .farthest
            .contains(&bucket),
        SimpleBucket::Alternate => previous.is_none_or(|p| p != bucket),
    }
}

/// Decides one attempt. Inputs are the rule, the initial and current boards
/// and the successful moves so far; there is no way to pass rejected attempts.
pub fn is_legal(
    rule: &RuleAst,
    initial: &Board,
    board: &Board,
    successes: &[SuccessRecord],
    attempt: MoveAttempt,
) -> bool {
    let Some(color) = board.get(attempt.position) else {
        return false;
    };
    let move_index = successes.len() + 1;

    let order_ok = match rule.base().order {
        Order::Any => true,
        Order::LeftToRight => board.leftmost() == Some(attempt.position),
        Order::RightToLeft => board.rightmost() == Some(attempt.position),
        Order::OutsideInLeft | Order::OutsideInRight => {
            let odd = move_index % 2 == 1;
            let take_left = odd == (rule.base().order == Order::OutsideInLeft);
            let end = if take_left {
                board.leftmost()
            } else {
                board.rightmost()
            };
            end == Some(attempt.position)
        }
    };
    if !order_ok {
        return false;
    }

    let length = board.len();
    let bucket_ok = match &rule.base().bucket {
        BucketExpr::Simple(simple) => {
            let previous = successes.last().map(|s| s.bucket);
            simple_allows(*simple, attempt.bucket, attempt.position, length, previous)
        }
        map @ BucketExpr::ColorMap { .. } => {
            let previous = successes
                .iter()
                .rev()
                .find(|s| s.color == color)
                .map(|s| s.bucket);
            simple_allows(
                map.for_color(color),
                attempt.bucket,
                attempt.position,
                length,
                previous,
            )
        }
    };
    if !bucket_ok {
        return false;
    }

    rule.guards().iter().all(|guard| {
        let req = guard.requirement;
        if !guard_triggered(&guard.trigger, req.move_index, initial) {
            return true;
        }
        match &guard.trigger {
            Trigger::At { position, .. } => {
                if move_index == req.move_index {
                    attempt.position == *position && attempt.bucket == req.bucket
                } else {
                    attempt.position != *position
                }
            }
            Trigger::Config(_) => move_index < req.move_index || attempt.bucket == req.bucket,
        }
    })
}

/// State of one episode: the MDP state plus the generator state.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeState {
    rule: Arc<RuleAst>,
    params: EpisodeParams,
    board: Board,
    initial_board: Board,
    successes: Vec<SuccessRecord>,
    failures: Vec<FailureRecord>,
    failures_this_board: BTreeSet<MoveAttempt>,
    attempt_count: usize,
    rng_state: u64,
    status: EpisodeStatus,
}

/// Draws an initial board: `K` uniform in `[Kmin, Kmax]`, `K` distinct cells
/// by partial Fisher-Yates, and a uniform color per piece.
pub fn random_board(params: &EpisodeParams, rng: &mut SplitMix64) -> Board {
    let span = (params.k_max - params.k_min + 1) as u64;
    let k = params.k_min + rng.below(span) as usize;
    let mut cells: Vec<usize> = (1..=params.length).collect();
    for i in 0..k {
        let j = i + rng.below_usize(params.length - i);
        cells.swap(i, j);
    }
    let mut board = Board::empty(params.length);
    for &position in &cells[..k] {
        let color = Color::PALETTE[rng.below_usize(params.colors)];
        board.set(position, Some(color));
    }
    board
}

pub fn new_episode(
    rule: impl Into<Arc<RuleAst>>,
    params: &EpisodeParams,
    seed: u64,
) -> Result<EpisodeState, EngineError> {
    let rule = rule.into();
    check_rule(&rule, params)?;
    let mut rng = SplitMix64::new(seed);
    let board = random_board(params, &mut rng);
    Ok(EpisodeState::start(rule, *params, board, rng.state()))
}

fn check_rule(rule: &RuleAst, params: &EpisodeParams) -> Result<(), EngineError> {
    params.check()?;
    let report = validate(rule, params);
    if report.ok {
        Ok(())
    } else {
        Err(EngineError::InvalidRule(report.errors))
    }
}

impl EpisodeState {
    /// Starts an episode from a given board, as when replaying a transcript.
    pub fn from_board(
        rule: impl Into<Arc<RuleAst>>,
        params: &EpisodeParams,
        board: Board,
    ) -> Result<Self, EngineError> {
        let rule = rule.into();
        check_rule(&rule, params)?;
        if board.len() != params.length {
            return Err(EngineError::BoardLength {
                expected: params.length,
                found: board.len(),
            });
        }
        if board.piece_count() > params.k_max {
            return Err(EngineError::InvalidParams(format!(
                "board has {} pieces, more than Kmax={}",
                board.piece_count(),
                params.k_max
            )));
        }
        Ok(Self::start(rule, *params, board, 0))
    }

    fn start(rule: Arc<RuleAst>, params: EpisodeParams, board: Board, rng_state: u64) -> Self {
        let mut state = Self {
            rule,
            params,
            initial_board: board.clone(),
            board,
            successes: Vec::new(),
            failures: Vec::new(),
            failures_this_board: BTreeSet::new(),
            attempt_count: 0,
            rng_state,
            status: EpisodeStatus::InProgress,
        };
        state.status = state.settle();
        state
    }

    fn settle(&self) -> EpisodeStatus {
        if self.board.is_clear() {
            EpisodeStatus::Cleared
        } else if self.candidate_moves().any(|m| self.accepts(m)) {
            EpisodeStatus::InProgress
        } else {
            EpisodeStatus::Stalemate
        }
    }

    fn candidate_moves(&self) -> impl Iterator<Item = MoveAttempt> + '_ {
        self.board.pieces().flat_map(|(position, _)| {
            Bucket::BOTH
                .into_iter()
                .map(move |bucket| MoveAttempt { position, bucket })
        })
    }

    fn accepts(&self, attempt: MoveAttempt) -> bool {
        is_legal(
            &self.rule,
            &self.initial_board,
            &self.board,
            &self.successes,
            attempt,
        )
    }

    pub fn attempt_move(&mut self, attempt: MoveAttempt) -> Result<Outcome, EngineError> {
        if self.status.is_terminal() {
            return Err(EngineError::EpisodeFinished);
        }
        if attempt.position == 0 || attempt.position > self.params.length {
            return Err(EngineError::PositionOutOfRange {
                position: attempt.position,
                length: self.params.length,
            });
        }
        self.attempt_count += 1;
        if self.accepts(attempt) {
            let color = self
                .board
                .take(attempt.position)
                .expect("accepted move addresses a piece");
            self.successes.push(SuccessRecord {
                move_index: self.successes.len() + 1,
                position: attempt.position,
                color,
                bucket: attempt.bucket,
            });
            self.failures_this_board.clear();
            self.status = self.settle();
            Ok(Outcome {
                accepted: true,
                reward: 1,
                status: self.status,
            })
        } else {
            self.failures.push(FailureRecord {
                attempt_index: self.attempt_count,
                position: attempt.position,
                bucket: attempt.bucket,
            });
            self.failures_this_board.insert(attempt);
            Ok(Outcome {
                accepted: false,
                reward: -1,
                status: self.status,
            })
        }
    }

    /// Exactly the attempts [`attempt_move`](Self::attempt_move) would accept.
    pub fn legal_moves(&self) -> BTreeSet<MoveAttempt> {
        if self.status.is_terminal() {
            return BTreeSet::new();
        }
        self.candidate_moves()
            .filter(|m| self.accepts(*m))
            .collect()
    }

    pub fn rule(&self) -> &Arc<RuleAst> {
        &self.rule
    }

    pub fn params(&self) -> &EpisodeParams {
        &self.params
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn initial_board(&self) -> &Board {
        &self.initial_board
    }

    pub fn successes(&self) -> &[SuccessRecord] {
        &self.successes
    }

    pub fn failures(&self) -> &[FailureRecord] {
        &self.failures
    }

    /// Attempts rejected since the board last changed.
    pub fn failures_this_board(&self) -> &BTreeSet<MoveAttempt> {
        &self.failures_this_board
    }

    pub fn attempt_count(&self) -> usize {
        self.attempt_count
    }

    pub fn rng_state(&self) -> u64 {
        self.rng_state
    }

    pub fn status(&self) -> EpisodeStatus {
        self.status
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::parse_rule;

    fn small() -> EpisodeParams {
        EpisodeParams {
            length: 20,
            k_min: 1,
            k_max: 10,
            colors: 4,
            gamma: 0.9,
        }
    }

    fn state(rule: &str, pattern: &str) -> EpisodeState {
        let params = EpisodeParams {
            length: pattern.len(),
            k_min: 1,
            k_max: pattern.len(),
            ..small()
        };
        EpisodeState::from_board(parse_rule(rule).unwrap(), &params, pattern.parse().unwrap())
            .unwrap()
    }

    #[test]
    fn distance_examples() {
        let d = distance_semantics(2, 20);
        assert_eq!(d.nearest, vec![Bucket::Left]);
        assert_eq!(d.farthest, vec![Bucket::Right]);
        let d = distance_semantics(3, 5);
        assert_eq!(d.nearest, Bucket::BOTH.to_vec());
        assert_eq!(d.farthest, Bucket::BOTH.to_vec());
        assert_eq!(distance_semantics(11, 20).nearest, vec![Bucket::Right]);
        assert_eq!(distance_semantics(10, 20).nearest, vec![Bucket::Left]);
    }

    #[test]
    fn left_to_right_forced() {
        let mut s = state("order=ltr; bucket=any", "..R...B.............");
        let out = s.attempt_move(MoveAttempt::new(7, Bucket::Left)).unwrap();
        assert!(!out.accepted);
        assert_eq!(out.reward, -1);
        let out = s.attempt_move(MoveAttempt::new(3, Bucket::Right)).unwrap();
        assert!(out.accepted);
        assert_eq!(out.reward, 1);
        assert_eq!(out.status, EpisodeStatus::InProgress);
    }

    #[test]
    fn nearest_legal_moves() {
        let s = state("order=ltr; bucket=nearest", ".R......G...........");
        assert_eq!(
            s.legal_moves().into_iter().collect::<Vec<_>>(),
            vec![MoveAttempt::new(2, Bucket::Left)]
        );
    }

    #[test]
    fn permissive_rule_moves() {
        let s = state("order=any; bucket=any", "R.G.B.");
        assert_eq!(s.legal_moves().len(), 6);
    }

    #[test]
    fn guard_forces_third_move() {
        let rule = "order=any; bucket=any; when at(7, red) then move=3, bucket=right";
        let mut s = state(rule, "B.G...R...Y.........");
        // guarded piece cannot go first
        assert!(
            !s.attempt_move(MoveAttempt::new(7, Bucket::Right))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(3, Bucket::Left))
                .unwrap()
                .accepted
        );
        // third move must be the red at 7, into the right bucket
        assert!(
            !s.attempt_move(MoveAttempt::new(11, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            !s.attempt_move(MoveAttempt::new(7, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(7, Bucket::Right))
                .unwrap()
                .accepted
        );
        let out = s.attempt_move(MoveAttempt::new(11, Bucket::Left)).unwrap();
        assert_eq!(out.status, EpisodeStatus::Cleared);
    }

    #[test]
    fn guard_inert_when_too_few_pieces() {
        let rule = "order=any; bucket=any; when at(2, red) then move=3, bucket=right";
        let mut s = state(rule, ".R..G.");
        assert!(
            s.attempt_move(MoveAttempt::new(2, Bucket::Left))
                .unwrap()
                .accepted
        );
    }

    #[test]
    fn config_guard_forces_bucket() {
        let rule = "order=any; bucket=any; when config(R.G...) then move=1, bucket=right";
        let mut s = state(rule, "R.G...");
        assert!(
            !s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Right))
                .unwrap()
                .accepted
        );
        let mut other = state(rule, "R.B...");
        assert!(
            other
                .attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
    }

    #[test]
    fn alternate_first_free_then_alternates() {
        let mut s = state("order=any; bucket=alternate", "RGB...");
        assert!(
            s.attempt_move(MoveAttempt::new(2, Bucket::Right))
                .unwrap()
                .accepted
        );
        assert!(
            !s.attempt_move(MoveAttempt::new(1, Bucket::Right))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(3, Bucket::Right))
                .unwrap()
                .accepted
        );
    }

    #[test]
    fn per_color_alternation() {
        let mut s = state(
            "order=any; bucket=map(blue:alternate, default:any)",
            "BRB...",
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(2, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            !s.attempt_move(MoveAttempt::new(3, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(3, Bucket::Right))
                .unwrap()
                .accepted
        );
    }

    #[test]
    fn outside_in() {
        let mut s = state("order=outside-in-left; bucket=any", "R.G.B.");
        assert!(
            !s.attempt_move(MoveAttempt::new(5, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            !s.attempt_move(MoveAttempt::new(3, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(5, Bucket::Left))
                .unwrap()
                .accepted
        );
        let mut s = state("order=outside-in-right; bucket=any", "R.G.B.");
        assert!(
            s.attempt_move(MoveAttempt::new(5, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
    }

    #[test]
    fn empty_cell_is_rejection_not_error() {
        let mut s = state("order=any; bucket=any", "R.....");
        let before = s.board().clone();
        let out = s.attempt_move(MoveAttempt::new(2, Bucket::Left)).unwrap();
        assert!(!out.accepted);
        assert_eq!(s.board(), &before);
        assert_eq!(s.failures().len(), 1);
    }

    #[test]
    fn out_of_range_is_error() {
        let mut s = state("order=any; bucket=any", "R.....");
        assert!(matches!(
            s.attempt_move(MoveAttempt::new(7, Bucket::Left)),
            Err(EngineError::PositionOutOfRange { .. })
        ));
        assert!(s.attempt_move(MoveAttempt::new(0, Bucket::Left)).is_err());
    }

    #[test]
    fn finished_episode_errors() {
        let mut s = state("order=any; bucket=any", "R.....");
        let out = s.attempt_move(MoveAttempt::new(1, Bucket::Left)).unwrap();
        assert_eq!(out.status, EpisodeStatus::Cleared);
        assert!(s.legal_moves().is_empty());
        assert_eq!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left)),
            Err(EngineError::EpisodeFinished)
        );
    }

    #[test]
    fn stalemate_detected() {
        // Both pieces must go left-then-left under a right-only config guard.
        let rule = "order=any; bucket=left; when config(RG....) then move=2, bucket=right";
        let mut s = state(rule, "RG....");
        assert!(
            s.attempt_move(MoveAttempt::new(1, Bucket::Left))
                .unwrap()
                .accepted
        );
        assert_eq!(s.status(), EpisodeStatus::Stalemate);
        assert!(s.legal_moves().is_empty());
    }

    #[test]
    fn determinism_and_piece_bounds() {
        let rule = parse_rule("order=ltr; bucket=any").unwrap();
        let params = EpisodeParams::default();
        let a = new_episode(rule.clone(), &params, 42).unwrap();
        let b = new_episode(rule.clone(), &params, 42).unwrap();
        assert_eq!(a, b);
        for seed in 0..500 {
            let s = new_episode(rule.clone(), &params, seed).unwrap();
            let k = s.board().piece_count();
            assert!((5..=10).contains(&k));
        }
    }

    #[test]
    fn rejects_invalid_setup() {
        let rule = parse_rule("order=any; bucket=any; when at(25, red) then move=3, bucket=right")
            .unwrap();
        assert!(matches!(
            new_episode(rule, &EpisodeParams::default(), 1),
            Err(EngineError::InvalidRule(_))
        ));
        let params = EpisodeParams {
            length: 4,
            ..EpisodeParams::default()
        };
        assert!(matches!(
            new_episode(parse_rule("order=any; bucket=any").unwrap(), &params, 1),
            Err(EngineError::InvalidParams(_))
        ));
    }
}
