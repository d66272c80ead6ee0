//! Locale-free float formatting for reproducible CSV bytes.

/// Format a float with full round-trip fidelity and at least 12
/// significant digits.
///
/// Rust's shortest round-trip representation is used whenever it already
/// carries 12 or more significant digits; shorter values are widened to
/// 12-digit scientific notation (still parsing back to the identical
/// bits). Output never depends on locale or thread scheduling.
pub fn fmt_float(x: f64) -> String {
    let shortest = format!("{x}");
    if significant_digits(&shortest) >= 12 {
        shortest
    } else {
        format!("{x:.11e}")
    }
}

fn significant_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    trimmed.len()
}
