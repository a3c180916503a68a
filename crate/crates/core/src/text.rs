//! Small text helpers shared by the parser, resolver and preprocessor.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Removes diacritics (tonos, dialytika, ...) by decomposing and dropping
/// combining marks.
pub fn strip_accents(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

/// Canonical form used for name comparison: accent-free, uppercase,
/// single-spaced.
pub fn fold_name(s: &str) -> String {
    let upper = strip_accents(s).to_uppercase();
    upper.split_whitespace().collect::<Vec<_>>().join(" ")
}
