//! The hidden-rule language.
//!
//! A rule is one base clause (a removal order and a bucket expression) plus
//! zero or more configuration guards:
//!
//! ```text
//! order=any; bucket=any; when at(7, red) then move=3, bucket=right
//! ```
//!
//! The grammar has no production that refers to rejected attempts, so every
//! expressible rule is blind to failure history. See [`parse_rule`],
//! [`validate`], [`classify_history`], [`canonical_form`] and [`rule_size`].

mod analysis;
mod parser;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::board::{Board, Bucket, Color};

pub use analysis::{
    canonical_form, classify_history, rule_size, validate, HistoryClass, SizeMetric,
    ValidationReport,
};
pub use parser::parse_rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("syntax error at line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("unknown color `{name}` at line {line}, column {column}")]
    UnknownColor {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("color `{0}` appears more than once in a map")]
    DuplicateMapEntry(Color),
    #[error("two guards share the trigger `{0}`")]
    DuplicateTrigger(String),
    #[error("move index must be at least 1")]
    ZeroMoveIndex,
}

/// Which piece may be removed next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Any,
    LeftToRight,
    RightToLeft,
    /// Odd-numbered moves take the leftmost piece, even-numbered the rightmost.
    OutsideInLeft,
    /// Odd-numbered moves take the rightmost piece, even-numbered the leftmost.
    OutsideInRight,
}

impl Order {
    pub const ALL: [Order; 5] = [
        Order::Any,
        Order::LeftToRight,
        Order::RightToLeft,
        Order::OutsideInLeft,
        Order::OutsideInRight,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Order::Any => "any",
            Order::LeftToRight => "ltr",
            Order::RightToLeft => "rtl",
            Order::OutsideInLeft => "outside-in-left",
            Order::OutsideInRight => "outside-in-right",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Order> {
        Self::ALL
            .into_iter()
            .find(|o| o.keyword().eq_ignore_ascii_case(word))
    }
}

/// Bucket requirement without color dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimpleBucket {
    Any,
    Left,
    Right,
    Nearest,
    Farthest,
    /// Opposite of the most recent successful move (per color inside a map);
    /// unconstrained when there is none.
    Alternate,
}

impl SimpleBucket {
    pub const ALL: [SimpleBucket; 6] = [
        SimpleBucket::Any,
        SimpleBucket::Left,
        SimpleBucket::Right,
        SimpleBucket::Nearest,
        SimpleBucket::Farthest,
        SimpleBucket::Alternate,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SimpleBucket::Any => "any",
            SimpleBucket::Left => "left",
            SimpleBucket::Right => "right",
            SimpleBucket::Nearest => "nearest",
            SimpleBucket::Farthest => "farthest",
            SimpleBucket::Alternate => "alternate",
        }
    }

    pub fn from_keyword(word: &str) -> Option<SimpleBucket> {
        Self::ALL
            .into_iter()
            .find(|b| b.keyword().eq_ignore_ascii_case(word))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BucketExpr {
    Simple(SimpleBucket),
    /// Per-color requirement with a mandatory default. Entries are kept
    /// sorted by color name and are pairwise distinct.
    ColorMap {
        entries: Vec<(Color, SimpleBucket)>,
        default: SimpleBucket,
    },
}

impl BucketExpr {
    pub fn color_map(
        entries: impl IntoIterator<Item = (Color, SimpleBucket)>,
        default: SimpleBucket,
    ) -> Result<Self, RuleError> {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by_key(|(c, _)| c.name());
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(RuleError::DuplicateMapEntry(w[0].0));
        }
        Ok(BucketExpr::ColorMap { entries, default })
    }

    /// The simple requirement that applies to a piece of `color`.
    pub fn for_color(&self, color: Color) -> SimpleBucket {
        match self {
            BucketExpr::Simple(b) => *b,
            BucketExpr::ColorMap { entries, default } => entries
                .iter()
                .find(|(c, _)| *c == color)
                .map_or(*default, |(_, b)| *b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub order: Order,
    pub bucket: BucketExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Trigger {
    /// The initial board has `color` at `position`.
    At { position: usize, color: Color },
    /// The initial board is exactly this configuration.
    Config(Board),
}

impl Trigger {
    fn sort_key(&self) -> (u8, usize, usize, String) {
        match self {
            Trigger::At { position, color } => (0, *position, color.index(), String::new()),
            Trigger::Config(board) => (1, 0, 0, board.pattern()),
        }
    }
}

impl Ord for Trigger {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Trigger {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::At { position, color } => write!(f, "at({position}, {color})"),
            Trigger::Config(board) => write!(f, "config({board})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Requirement {
    pub move_index: usize,
    pub bucket: Bucket,
}

/// An exception that applies only when the initial board matches `trigger`.
///
/// For `at` triggers the guarded piece must be exactly the
/// `move_index`-th successful removal, into `bucket`, and may not be removed
/// at any other index. For `config` triggers every successful removal from
/// `move_index` onward must go into `bucket`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfigGuard {
    pub trigger: Trigger,
    pub requirement: Requirement,
}

/// A parsed hidden rule. Construction normalizes map entries and guard
/// order, so structurally equal rules compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleAst {
    base: Clause,
    guards: Vec<ConfigGuard>,
    palette: Vec<Color>,
}

impl RuleAst {
    pub fn new(base: Clause, guards: Vec<ConfigGuard>) -> Result<Self, RuleError> {
        let base = match base.bucket {
            BucketExpr::ColorMap { entries, default } => Clause {
                order: base.order,
                bucket: BucketExpr::color_map(entries, default)?,
            },
            simple => Clause {
                order: base.order,
                bucket: simple,
            },
        };
        let mut guards = guards;
        if guards.iter().any(|g| g.requirement.move_index == 0) {
            return Err(RuleError::ZeroMoveIndex);
        }
        guards.sort_by(|a, b| a.trigger.cmp(&b.trigger));
        if let Some(w) = guards.windows(2).find(|w| w[0].trigger == w[1].trigger) {
            return Err(RuleError::DuplicateTrigger(w[0].trigger.to_string()));
        }

        let mut mentioned = [false; 4];
        if let BucketExpr::ColorMap { entries, .. } = &base.bucket {
            for (c, _) in entries {
                mentioned[c.index()] = true;
            }
        }
        for g in &guards {
            match &g.trigger {
                Trigger::At { color, .. } => mentioned[color.index()] = true,
                Trigger::Config(board) => {
                    for (_, c) in board.pieces() {
                        mentioned[c.index()] = true;
                    }
                }
            }
        }
        let palette = Color::PALETTE
            .into_iter()
            .filter(|c| mentioned[c.index()])
            .collect();

        Ok(Self {
            base,
            guards,
            palette,
        })
    }

    /// A rule with no guards.
    pub fn simple(order: Order, bucket: BucketExpr) -> Result<Self, RuleError> {
        Self::new(Clause { order, bucket }, Vec::new())
    }

    pub fn base(&self) -> &Clause {
        &self.base
    }

    pub fn guards(&self) -> &[ConfigGuard] {
        &self.guards
    }

    /// Colors the rule mentions, in palette order.
    pub fn palette(&self) -> &[Color] {
        &self.palette
    }
}

impl fmt::Display for RuleAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_form(self))
    }
}

impl std::str::FromStr for RuleAst {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rule(s)
    }
}

/// The six example rules from the game description, in canonical text.
///
/// The fifth rule guards the seventh cell; on boards shorter than seven
/// cells the guard moves to the last cell so the rule stays valid.
pub fn exhibit_rules(board_length: usize) -> Vec<(&'static str, String)> {
    let guarded = board_length.clamp(1, 7);
    vec![
        ("item1", "order=ltr; bucket=any".to_string()),
        ("item2", "order=ltr; bucket=nearest".to_string()),
        (
            "item3",
            "order=any; bucket=map(blue:left, red:right, default:any)".to_string(),
        ),
        (
            "item4",
            "order=outside-in-left; bucket=farthest".to_string(),
        ),
        (
            "item5",
            format!("order=any; bucket=any; when at({guarded}, red) then move=3, bucket=right"),
        ),
        ("item6", "order=any; bucket=alternate".to_string()),
    ]
}
