//! Colors, buckets and the one-dimensional board.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Block colors, in palette order. A game with `C` colors uses the first `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
    Yellow,
}

impl Color {
    pub const PALETTE: [Color; 4] = [Color::Red, Color::Green, Color::Blue, Color::Yellow];

    /// First `count` palette colors.
    pub fn palette(count: usize) -> &'static [Color] {
        &Self::PALETTE[..count.min(4)]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
            Color::Blue => 'B',
            Color::Yellow => 'Y',
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Self::PALETTE
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(name))
    }

    pub fn from_letter(ch: char) -> Option<Color> {
        Self::PALETTE
            .into_iter()
            .find(|c| c.letter() == ch.to_ascii_uppercase())
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Left,
    Right,
}

impl Bucket {
    pub const BOTH: [Bucket; 2] = [Bucket::Left, Bucket::Right];

    pub fn name(self) -> &'static str {
        match self {
            Bucket::Left => "left",
            Bucket::Right => "right",
        }
    }

    pub fn opposite(self) -> Bucket {
        match self {
            Bucket::Left => Bucket::Right,
            Bucket::Right => Bucket::Left,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Bucket::Left),
            "right" | "r" => Ok(Bucket::Right),
            other => Err(format!("unknown bucket `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("invalid board character `{ch}` at position {position}")]
    BadChar { ch: char, position: usize },
    #[error("board pattern is empty")]
    Empty,
}

/// A line of cells, position 1 leftmost. Each cell holds at most one block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    cells: Vec<Option<Color>>,
}

impl Board {
    pub fn empty(length: usize) -> Self {
        Self {
            cells: vec![None; length],
        }
    }

    pub fn from_cells(cells: Vec<Option<Color>>) -> Self {
        Self { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Option<Color>] {
        &self.cells
    }

    /// Color at 1-based `position`, `None` when empty or out of range.
    pub fn get(&self, position: usize) -> Option<Color> {
        position
            .checked_sub(1)
            .and_then(|i| self.cells.get(i).copied().flatten())
    }

    pub fn set(&mut self, position: usize, color: Option<Color>) {
        self.cells[position - 1] = color;
    }

    pub fn take(&mut self, position: usize) -> Option<Color> {
        self.cells.get_mut(position.wrapping_sub(1))?.take()
    }

    pub fn piece_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_clear(&self) -> bool {
        self.cells.iter().all(Option::is_none)
    }

    /// Occupied positions with their colors, left to right.
    pub fn pieces(&self) -> impl Iterator<Item = (usize, Color)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (i + 1, c)))
    }

    pub fn leftmost(&self) -> Option<usize> {
        self.cells.iter().position(Option::is_some).map(|i| i + 1)
    }

    pub fn rightmost(&self) -> Option<usize> {
        self.cells.iter().rposition(Option::is_some).map(|i| i + 1)
    }

    pub fn leftmost_of(&self, color: Color) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| *c == Some(color))
            .map(|i| i + 1)
    }

    /// Pattern text over `{R,G,B,Y,.}`.
    pub fn pattern(&self) -> String {
        self.cells
            .iter()
            .map(|c| c.map_or('.', Color::letter))
            .collect()
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern())
    }
}

impl FromStr for Board {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(PatternError::Empty);
        }
        s.chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '.' => Ok(None),
                _ => Color::from_letter(ch)
                    .map(Some)
                    .ok_or(PatternError::BadChar {
                        ch,
                        position: i + 1,
                    }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Board::from_cells)
    }
}
