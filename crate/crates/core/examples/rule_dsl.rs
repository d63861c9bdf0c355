//! Parse, check and normalize a rule.
//!
//! cargo run --example rule_dsl -- "order=ltr; bucket=nearest"

use rulegame::rule::{canonical_form, rule_size, validate};
use rulegame::{parse_rule, EpisodeParams};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "ORDER=any; bucket=map(red:right, blue:left, default:any)".into());
    let rule = match parse_rule(&text) {
        Ok(rule) => rule,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    print!("{}", validate(&rule, &EpisodeParams::default()));
    println!("canonical: {}", canonical_form(&rule));
    println!("{:?}", rule_size(&rule));
}
