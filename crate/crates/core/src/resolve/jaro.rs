//! Jaro and Jaro-Winkler string similarity over Unicode scalar values.

/// Prefix scaling factor of the Winkler boost.
pub const PREFIX_WEIGHT: f64 = 0.1;
/// Longest common prefix that earns a boost.
pub const MAX_PREFIX: usize = 4;

/// Jaro similarity. Two empty strings are identical (1.0); one empty string
/// against a non-empty one scores 0.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    jaro_chars(&a, &b)
}

fn jaro_chars(a: &[char], b: &[char]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_taken = vec![false; b.len()];
    let mut a_matches = Vec::with_capacity(a.len());
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_taken[j] && b[j] == ca {
                b_taken[j] = true;
                a_matches.push(ca);
                break;
            }
        }
    }
    let m = a_matches.len();
    if m == 0 {
        return 0.0;
    }
    let b_matches = b.iter().zip(&b_taken).filter(|(_, &t)| t).map(|(&c, _)| c);
    let half_transpositions = a_matches.iter().zip(b_matches).filter(|(x, y)| **x != *y).count();
    let m = m as f64;
    let t = half_transpositions as f64 / 2.0;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Length of the common prefix, in characters.
pub fn common_prefix(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
}

/// Jaro-Winkler similarity in `[0, 1]`.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let j = jaro_chars(&ac, &bc);
    let prefix = ac.iter().zip(&bc).take(MAX_PREFIX).take_while(|(x, y)| x == y).count();
    j + prefix as f64 * PREFIX_WEIGHT * (1.0 - j)
}
