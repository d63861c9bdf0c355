//! Static analysis of parsed rules: validation against game parameters,
//! history classification, canonical text and description size.

use std::collections::BTreeSet;
use std::fmt;

use crate::board::Color;
use crate::engine::{distance_semantics, EpisodeParams};

use super::{BucketExpr, Order, RuleAst, SimpleBucket, Trigger};

/// How much play history a rule consults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HistoryClass {
    Static,
    LastSuccess,
    LastSuccessPerColor,
    ConfigGuarded,
}

impl HistoryClass {
    pub fn name(self) -> &'static str {
        match self {
            HistoryClass::Static => "STATIC",
            HistoryClass::LastSuccess => "LAST_SUCCESS",
            HistoryClass::LastSuccessPerColor => "LAST_SUCCESS_PER_COLOR",
            HistoryClass::ConfigGuarded => "CONFIG_GUARDED",
        }
    }
}

impl fmt::Display for HistoryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub history_class: HistoryClass,
    /// Always true: no rule in the language can read rejected attempts.
    pub failure_independent: bool,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status: {}", if self.ok { "ok" } else { "invalid" })?;
        writeln!(f, "history class: {}", self.history_class)?;
        writeln!(
            f,
            "reads failed attempts: {}",
            if self.failure_independent {
                "no"
            } else {
                "yes"
            }
        )?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        Ok(())
    }
}

/// Minimum-description-length style size of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SizeMetric {
    pub term_count: usize,
    pub codebook_count: usize,
    pub canonical_bytes: usize,
}

pub fn classify_history(ast: &RuleAst) -> HistoryClass {
    if !ast.guards().is_empty() {
        return HistoryClass::ConfigGuarded;
    }
    match &ast.base().bucket {
        BucketExpr::Simple(SimpleBucket::Alternate) => HistoryClass::LastSuccess,
        BucketExpr::Simple(_) => HistoryClass::Static,
        BucketExpr::ColorMap { entries, default } => {
            let alternates = *default == SimpleBucket::Alternate
                || entries.iter().any(|(_, b)| *b == SimpleBucket::Alternate);
            if alternates {
                HistoryClass::LastSuccessPerColor
            } else {
                HistoryClass::Static
            }
        }
    }
}

pub fn validate(ast: &RuleAst, params: &EpisodeParams) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    if let Err(e) = params.check() {
        errors.push(e.to_string());
    }
    let length = params.length;
    let in_game = Color::palette(params.colors);

    for c in ast.palette() {
        if !in_game.contains(c) {
            warnings.push(format!(
                "color {c} is outside the {}-color palette and never appears",
                params.colors
            ));
        }
    }

    for guard in ast.guards() {
        let req = guard.requirement;
        let label = format!("guard {}", guard.trigger);
        if req.move_index > params.k_max {
            errors.push(format!(
                "{label}: move index {} out of range 1..{}",
                req.move_index, params.k_max
            ));
        }
        match &guard.trigger {
            Trigger::At { position, color } => {
                let position = *position;
                if position == 0 || position > length {
                    errors.push(format!("{label}: position out of range 1..{length}"));
                    continue;
                }
                let order_bound = match ast.base().order {
                    Order::LeftToRight => Some(position),
                    Order::RightToLeft => Some(length + 1 - position),
                    _ => None,
                };
                match (ast.base().order, order_bound) {
                    (_, Some(bound)) if req.move_index > bound => warnings.push(format!(
                        "{label}: order {} removes this piece by move {bound}, before move {}",
                        ast.base().order.keyword(),
                        req.move_index
                    )),
                    (Order::Any, _) => {}
                    (order, _) => warnings.push(format!(
                        "{label}: order {} may force this piece away from move {}",
                        order.keyword(),
                        req.move_index
                    )),
                }
                let allowed =
                    allowed_buckets(ast.base().bucket.for_color(*color), position, length);
                if !allowed.contains(&req.bucket) {
                    warnings.push(format!(
                        "{label}: base bucket rule never allows {} for this piece",
                        req.bucket
                    ));
                }
            }
            Trigger::Config(board) => {
                if board.len() != length {
                    errors.push(format!(
                        "{label}: pattern length {} does not match board length {length}",
                        board.len()
                    ));
                    continue;
                }
                let k = board.piece_count();
                if k < params.k_min || k > params.k_max {
                    warnings.push(format!(
                        "{label}: pattern has {k} pieces, outside {}..{}, and never triggers",
                        params.k_min, params.k_max
                    ));
                }
                if board.pieces().any(|(_, c)| !in_game.contains(&c)) {
                    warnings.push(format!("{label}: pattern uses colors outside the palette"));
                }
                if req.move_index > k {
                    warnings.push(format!(
                        "{label}: move {} is past the last of {k} pieces",
                        req.move_index
                    ));
                }
            }
        }
    }

    let at_moves: Vec<_> = ast
        .guards()
        .iter()
        .filter(|g| matches!(g.trigger, Trigger::At { .. }))
        .map(|g| g.requirement.move_index)
        .collect();
    let distinct: BTreeSet<_> = at_moves.iter().collect();
    if distinct.len() < at_moves.len() {
        warnings.push("two position guards claim the same move index".to_string());
    }

    ValidationReport {
        ok: errors.is_empty(),
        history_class: classify_history(ast),
        failure_independent: true,
        warnings,
        errors,
    }
}

fn allowed_buckets(
    simple: SimpleBucket,
    position: usize,
    length: usize,
) -> Vec<crate::board::Bucket> {
    use crate::board::Bucket;
    match simple {
        SimpleBucket::Any | SimpleBucket::Alternate => Bucket::BOTH.to_vec(),
        SimpleBucket::Left => vec![Bucket::Left],
        SimpleBucket::Right => vec![Bucket::Right],
        SimpleBucket::Nearest => distance_semantics(position, length).nearest,
        SimpleBucket::Farthest => distance_semantics(position, length).farthest,
    }
}

fn bucket_text(expr: &BucketExpr) -> String {
    match expr {
        BucketExpr::Simple(b) => b.keyword().to_string(),
        BucketExpr::ColorMap { entries, default } => {
            let mut parts: Vec<String> = entries
                .iter()
                .map(|(c, b)| format!("{}:{}", c.name(), b.keyword()))
                .collect();
            parts.push(format!("default:{}", default.keyword()));
            format!("map({})", parts.join(", "))
        }
    }
}

/// Deterministic single-line serialization: lowercase keywords, single
/// spaces, map entries by color name, guards by trigger.
pub fn canonical_form(ast: &RuleAst) -> String {
    let mut out = format!(
        "order={}; bucket={}",
        ast.base().order.keyword(),
        bucket_text(&ast.base().bucket)
    );
    for g in ast.guards() {
        out.push_str(&format!(
            "; when {} then move={}, bucket={}",
            g.trigger,
            g.requirement.move_index,
            g.requirement.bucket.name()
        ));
    }
    out
}

pub fn rule_size(ast: &RuleAst) -> SizeMetric {
    let mut terms = 2; // rule node and order atom
    let mut symbols: BTreeSet<String> = BTreeSet::new();
    symbols.insert(ast.base().order.keyword().to_string());

    match &ast.base().bucket {
        BucketExpr::Simple(b) => {
            terms += 1;
            symbols.insert(b.keyword().to_string());
        }
        BucketExpr::ColorMap { entries, default } => {
            terms += 1 + 2 * entries.len() + 1;
            symbols.insert("map".to_string());
            symbols.insert("default".to_string());
            symbols.insert(default.keyword().to_string());
            for (c, b) in entries {
                symbols.insert(c.name().to_string());
                symbols.insert(b.keyword().to_string());
            }
        }
    }

    for g in ast.guards() {
        // guard node, move index atom, bucket atom
        terms += 3;
        symbols.insert(g.requirement.move_index.to_string());
        symbols.insert(g.requirement.bucket.name().to_string());
        match &g.trigger {
            Trigger::At { position, color } => {
                terms += 3;
                symbols.insert("at".to_string());
                symbols.insert(position.to_string());
                symbols.insert(color.name().to_string());
            }
            Trigger::Config(board) => {
                terms += 2;
                symbols.insert("config".to_string());
                for ch in board.pattern().chars() {
                    symbols.insert(format!("pattern:{ch}"));
                }
            }
        }
    }

    SizeMetric {
        term_count: terms,
        codebook_count: symbols.len(),
        canonical_bytes: canonical_form(ast).len(),
    }
}
