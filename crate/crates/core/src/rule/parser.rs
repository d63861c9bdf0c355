//! Lexer and recursive-descent parser for rule text.

use crate::board::{Board, Bucket, Color};

use super::{
    BucketExpr, Clause, ConfigGuard, Order, Requirement, RuleAst, RuleError, SimpleBucket, Trigger,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    /// Run of `[A-Za-z0-9_.-]`: keywords, integers and board patterns.
    Word(String),
    Punct(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

fn lex(src: &str) -> Result<Vec<Token>, RuleError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);

    let starts_comment = |i: usize| chars.get(i) == Some(&'-') && chars.get(i + 1) == Some(&'-');

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            i += 1;
            column += 1;
        } else if starts_comment(i) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if matches!(c, '=' | ';' | '(' | ')' | ',' | ':') {
            tokens.push(Token {
                tok: Tok::Punct(c),
                line,
                column,
            });
            i += 1;
            column += 1;
        } else if is_word_char(c) {
            let start_col = column;
            let mut word = String::new();
            while i < chars.len() && is_word_char(chars[i]) && !starts_comment(i) {
                word.push(chars[i]);
                i += 1;
                column += 1;
            }
            tokens.push(Token {
                tok: Tok::Word(word),
                line,
                column: start_col,
            });
        } else {
            return Err(RuleError::Syntax {
                line,
                column,
                expected: "a keyword or punctuation".to_string(),
                found: format!("`{c}`"),
            });
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> RuleError {
        let t = self.peek();
        RuleError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.to_string(),
            found: t.describe(),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn at_punct(&self, p: char) -> bool {
        self.peek().tok == Tok::Punct(p)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), RuleError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn punct(&mut self, p: char) -> Result<(), RuleError> {
        if self.at_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    /// Consumes a word and maps it through `f`, reporting `expected` on failure.
    fn word_as<T>(
        &mut self,
        expected: &str,
        f: impl FnOnce(&str) -> Option<T>,
    ) -> Result<T, RuleError> {
        if let Tok::Word(w) = &self.peek().tok {
            if let Some(v) = f(w) {
                self.bump();
                return Ok(v);
            }
        }
        Err(self.error(expected))
    }

    fn rule(&mut self) -> Result<RuleAst, RuleError> {
        let base = self.clause()?;
        let mut guards = Vec::new();
        while self.at_punct(';') {
            self.bump();
            guards.push(self.guard()?);
        }
        if !matches!(self.peek().tok, Tok::Eof) {
            return Err(self.error("`;` or end of input"));
        }
        RuleAst::new(base, guards)
    }

    fn clause(&mut self) -> Result<Clause, RuleError> {
        self.keyword("order")?;
        self.punct('=')?;
        let order = self.word_as(
            "order keyword (any, ltr, rtl, outside-in-left, outside-in-right)",
            Order::from_keyword,
        )?;
        self.punct(';')?;
        self.keyword("bucket")?;
        self.punct('=')?;
        let bucket = self.bucket()?;
        Ok(Clause { order, bucket })
    }

    fn bucket(&mut self) -> Result<BucketExpr, RuleError> {
        if !self.at_keyword("map") {
            return self.simple().map(BucketExpr::Simple);
        }
        self.bump();
        self.punct('(')?;
        let mut entries = Vec::new();
        loop {
            if self.at_keyword("default") {
                if entries.is_empty() {
                    return Err(self.error("color"));
                }
                self.bump();
                self.punct(':')?;
                let default = self.simple()?;
                self.punct(')')?;
                return BucketExpr::color_map(entries, default);
            }
            let color = self.color()?;
            self.punct(':')?;
            let simple = self.simple()?;
            entries.push((color, simple));
            self.punct(',')?;
        }
    }

    fn simple(&mut self) -> Result<SimpleBucket, RuleError> {
        self.word_as(
            "bucket keyword (any, left, right, nearest, farthest, alternate)",
            SimpleBucket::from_keyword,
        )
    }

    fn color(&mut self) -> Result<Color, RuleError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Word(w) => match Color::from_name(w) {
                Some(c) => {
                    self.bump();
                    Ok(c)
                }
                None => Err(RuleError::UnknownColor {
                    name: w.clone(),
                    line: t.line,
                    column: t.column,
                }),
            },
            _ => Err(self.error("color (red, green, blue, yellow)")),
        }
    }

    fn integer(&mut self) -> Result<usize, RuleError> {
        self.word_as("integer", |w| {
            if w.bytes().all(|b| b.is_ascii_digit()) {
                w.parse().ok()
            } else {
                None
            }
        })
    }

    fn guard(&mut self) -> Result<ConfigGuard, RuleError> {
        self.keyword("when")?;
        let trigger = if self.at_keyword("at") {
            self.bump();
            self.punct('(')?;
            let position = self.integer()?;
            self.punct(',')?;
            let color = self.color()?;
            self.punct(')')?;
            Trigger::At { position, color }
        } else if self.at_keyword("config") {
            self.bump();
            self.punct('(')?;
            let board = self.word_as("board pattern over R, G, B, Y and `.`", |w| {
                w.parse::<Board>().ok()
            })?;
            self.punct(')')?;
            Trigger::Config(board)
        } else {
            return Err(self.error("`at` or `config`"));
        };
        self.keyword("then")?;
        self.keyword("move")?;
        self.punct('=')?;
        let move_index = self.integer()?;
        if move_index == 0 {
            return Err(RuleError::ZeroMoveIndex);
        }
        self.punct(',')?;
        self.keyword("bucket")?;
        self.punct('=')?;
        let bucket = self.word_as("`left` or `right`", |w| {
            match w.to_ascii_lowercase().as_str() {
                "left" => Some(Bucket::Left),
                "right" => Some(Bucket::Right),
                _ => None,
            }
        })?;
        Ok(ConfigGuard {
            trigger,
            requirement: Requirement { move_index, bucket },
        })
    }
}

/// Parses rule text. Keywords are case-insensitive and whitespace, newlines
/// and `--` comments are ignored. Guard positions are range-checked later
/// by [`validate`](super::validate), once the board length is known.
pub fn parse_rule(text: &str) -> Result<RuleAst, RuleError> {
    let tokens = lex(text)?;
    Parser { tokens, pos: 0 }.rule()
}
