//! Closed-form counts of boards and rules.

use num_bigint::BigUint;

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the
    // division is always exact.
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

/// Initial boards with exactly `pieces` blocks: `colors^pieces * C(length, pieces)`.
pub fn count_initial_configs(length: u64, pieces: u64, colors: u64) -> BigUint {
    BigUint::from(colors).pow(pieces as u32) * binomial(length, pieces)
}

/// `length! * 2^(colors * length)`: one removal order times a position-color
/// bucket table per order.
pub fn rule_space_upper_bound(length: u64, colors: u64) -> BigUint {
    factorial(length) * (BigUint::from(1u32) << (colors * length))
}

/// Scientific notation with `digits` significant digits, e.g. `2.80e36`.
pub fn scientific(value: &BigUint, digits: usize) -> String {
    let text = value.to_string();
    let digits = digits.max(1);
    if text.len() <= digits {
        let exp = text.len() - 1;
        let mut mantissa = text.clone();
        mantissa.extend(std::iter::repeat_n('0', digits - text.len()));
        return format_mantissa(&mantissa, exp);
    }
    let head: BigUint = text[..digits].parse().expect("decimal digits");
    let round_up = text.as_bytes()[digits] >= b'5';
    let mut head = if round_up { head + 1u32 } else { head }.to_string();
    let mut exp = text.len() - 1;
    if head.len() > digits {
        head.truncate(digits);
        exp += 1;
    }
    format_mantissa(&head, exp)
}

fn format_mantissa(digits: &str, exp: usize) -> String {
    if digits.len() == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    }
}
