//! State and action abstractions for tabular learning.

use std::fmt;

use crate::board::{Board, Bucket, Color};
use crate::engine::MoveAttempt;

use super::Observation;

/// Which piece an abstract action addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    Leftmost,
    Rightmost,
    LeftmostOf(Color),
}

impl Selector {
    pub fn resolve(self, board: &Board) -> Option<usize> {
        match self {
            Selector::Leftmost => board.leftmost(),
            Selector::Rightmost => board.rightmost(),
            Selector::LeftmostOf(c) => board.leftmost_of(c),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Leftmost => f.write_str("leftmost"),
            Selector::Rightmost => f.write_str("rightmost"),
            Selector::LeftmostOf(c) => write!(f, "leftmost_of:{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractAction {
    pub selector: Selector,
    pub bucket: Bucket,
}

impl AbstractAction {
    pub fn new(selector: Selector, bucket: Bucket) -> Self {
        Self { selector, bucket }
    }

    /// The concrete attempt on `board`, or `None` when the selector is masked.
    pub fn resolve(self, board: &Board) -> Option<MoveAttempt> {
        self.selector
            .resolve(board)
            .map(|p| MoveAttempt::new(p, self.bucket))
    }
}

/// LEFTMOST, RIGHTMOST, then LEFTMOST_OF each palette color, each with the
/// left bucket before the right. This is also the greedy tie-break order.
pub fn default_actions() -> Vec<AbstractAction> {
    let selectors = [Selector::Leftmost, Selector::Rightmost]
        .into_iter()
        .chain(Color::PALETTE.into_iter().map(Selector::LeftmostOf));
    selectors
        .flat_map(|s| Bucket::BOTH.map(|b| AbstractAction::new(s, b)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey {
    pub last_bucket: Option<Bucket>,
    pub parity: u8,
    pub leftmost: Option<Color>,
    pub rightmost: Option<Color>,
}

pub trait Featurizer: fmt::Debug + Send + Sync {
    fn featurize(&self, obs: &Observation) -> StateKey;
}

/// Last bucket, success-count parity and the colors at both board ends.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultFeaturizer;

impl Featurizer for DefaultFeaturizer {
    fn featurize(&self, obs: &Observation) -> StateKey {
        StateKey {
            last_bucket: obs.last_success.map(|(_, _, b)| b),
            parity: (obs.success_count % 2) as u8,
            leftmost: obs.board.leftmost().and_then(|p| obs.board.get(p)),
            rightmost: obs.board.rightmost().and_then(|p| obs.board.get(p)),
        }
    }
}

/// Board ends only; history-blind.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoardEndsFeaturizer;

impl Featurizer for BoardEndsFeaturizer {
    fn featurize(&self, obs: &Observation) -> StateKey {
        StateKey {
            last_bucket: None,
            parity: 0,
            ..DefaultFeaturizer.featurize(obs)
        }
    }
}
