//! Sizes of the board and rule spaces.

use rulegame::counting::{count_initial_configs, rule_space_upper_bound, scientific};

fn main() {
    for (l, k, c) in [(6, 3, 2), (20, 5, 2), (20, 10, 4)] {
        let n = count_initial_configs(l, k, c);
        println!("boards L={l} K={k} C={c}: {n} ({})", scientific(&n, 3));
    }
    for (l, c) in [(6, 2), (20, 3), (20, 4)] {
        let n = rule_space_upper_bound(l, c);
        println!("rules  L={l} C={c}: {}", scientific(&n, 3));
    }
}
