//! Byte-ratio token estimation.
//!
//! A profile maps text to an approximate token count as
//! `ceil(utf8_len(nfc(text)) / bytes_per_token)`. It stands in for a real
//! tokenizer wherever a deterministic, model-agnostic count is enough.

use std::borrow::Cow;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const DEFAULT_BYTES_PER_TOKEN: f64 = 4.0;
pub const DEFAULT_MESSAGE_OVERHEAD: usize = 4;

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("bytes_per_token must be a positive finite number, got {0}")]
    InvalidRatio(f64),
    #[error("calibration needs at least one sample with a positive token count")]
    EmptyCalibration,
    #[error("calibration sample {path}")]
    SampleIo { path: PathBuf, source: std::io::Error },
    #[error("calibration file: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenCountProfile {
    bytes_per_token: f64,
    per_message_overhead: usize,
}

impl Default for TokenCountProfile {
    fn default() -> Self {
        Self { bytes_per_token: DEFAULT_BYTES_PER_TOKEN, per_message_overhead: DEFAULT_MESSAGE_OVERHEAD }
    }
}

impl TokenCountProfile {
    pub fn new(bytes_per_token: f64, per_message_overhead: usize) -> Result<Self, TokenError> {
        if !(bytes_per_token.is_finite() && bytes_per_token > 0.0) {
            return Err(TokenError::InvalidRatio(bytes_per_token));
        }
        Ok(Self { bytes_per_token, per_message_overhead })
    }

    pub fn bytes_per_token(&self) -> f64 {
        self.bytes_per_token
    }

    pub fn per_message_overhead(&self) -> usize {
        self.per_message_overhead
    }

    /// Token count of `text`. Empty text costs zero tokens.
    pub fn count_tokens(&self, text: &str) -> usize {
        self.tokens_for_bytes(normalized_len(text))
    }

    /// Token count of a text whose normalized UTF-8 length is `bytes`.
    pub fn tokens_for_bytes(&self, bytes: usize) -> usize {
        (bytes as f64 / self.bytes_per_token).ceil() as usize
    }

    /// Largest byte length that still costs at most `tokens`.
    pub fn max_bytes_for(&self, tokens: usize) -> usize {
        let mut b = (tokens as f64 * self.bytes_per_token).floor() as usize;
        while self.tokens_for_bytes(b + 1) <= tokens {
            b += 1;
        }
        while b > 0 && self.tokens_for_bytes(b) > tokens {
            b -= 1;
        }
        b
    }

    /// Token cost of a chat message including its framing overhead.
    pub fn count_message(&self, text: &str) -> usize {
        self.count_tokens(text) + self.per_message_overhead
    }
}

/// UTF-8 byte length after NFC normalization.
pub fn normalized_len(text: &str) -> usize {
    normalize(text).len()
}

pub fn normalize(text: &str) -> Cow<'_, str> {
    if text.is_ascii() {
        Cow::Borrowed(text)
    } else {
        Cow::Owned(text.nfc().collect())
    }
}

/// Fits `bytes_per_token` as total bytes over total reference tokens.
pub fn calibrate<'a, I>(samples: I, per_message_overhead: usize) -> Result<TokenCountProfile, TokenError>
where
    I: IntoIterator<Item = (&'a str, usize)>,
{
    let (bytes, tokens) =
        samples.into_iter().fold((0usize, 0usize), |(b, t), (text, n)| (b + normalized_len(text), t + n));
    if tokens == 0 || bytes == 0 {
        return Err(TokenError::EmptyCalibration);
    }
    TokenCountProfile::new(bytes as f64 / tokens as f64, per_message_overhead)
}

/// Calibrates from a headerless CSV of `path,reference_token_count` rows.
/// Relative paths resolve against the CSV's own directory.
pub fn calibrate_from_csv(csv_path: &Path, per_message_overhead: usize) -> Result<TokenCountProfile, TokenError> {
    let base = csv_path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(csv_path)?;
    let mut samples = Vec::new();
    for row in reader.deserialize::<(PathBuf, usize)>() {
        let (path, count) = row?;
        let path = if path.is_relative() { base.join(path) } else { path };
        let text = fs::read_to_string(&path).map_err(|source| TokenError::SampleIo { path: path.clone(), source })?;
        samples.push((text, count));
    }
    calibrate(samples.iter().map(|(t, n)| (t.as_str(), *n)), per_message_overhead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_profile_examples() {
        let p = TokenCountProfile::default();
        assert_eq!(p.count_tokens(""), 0);
        assert_eq!(p.count_tokens("abcd"), 1);
        assert_eq!(p.count_tokens("abcde"), 2);
        assert_eq!(p.count_tokens(&"x".repeat(1400)), 350);
        assert_eq!(p.count_message("abcd"), 5);
    }

    #[test]
    fn nfc_normalizes_before_counting() {
        let p = TokenCountProfile::default();
        // "é" as e + combining acute (3 bytes) normalizes to U+00E9 (2 bytes).
        let decomposed = "e\u{0301}e\u{0301}";
        assert_eq!(decomposed.len(), 6);
        assert_eq!(normalized_len(decomposed), 4);
        assert_eq!(p.count_tokens(decomposed), 1);
    }

    #[test]
    fn rejects_bad_ratio() {
        assert!(TokenCountProfile::new(0.0, 4).is_err());
        assert!(TokenCountProfile::new(f64::NAN, 4).is_err());
        assert!(TokenCountProfile::new(-1.0, 4).is_err());
    }

    #[test]
    fn max_bytes_is_tight() {
        let p = TokenCountProfile::new(3.7, 0).unwrap();
        for t in 0..200 {
            let b = p.max_bytes_for(t);
            assert!(p.tokens_for_bytes(b) <= t);
            assert!(p.tokens_for_bytes(b + 1) > t);
        }
    }

    #[test]
    fn calibration_from_csv_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), "x".repeat(300)).unwrap();
        std::fs::write(dir.path().join("b.txt"), "y".repeat(200)).unwrap();
        let csv = dir.path().join("cal.csv");
        std::fs::write(&csv, "a.txt,60\nb.txt,40\n").unwrap();
        let p = calibrate_from_csv(&csv, 4).unwrap();
        assert_eq!(p.bytes_per_token(), 5.0);
        assert!(calibrate(std::iter::empty(), 4).is_err());
    }

    proptest! {
        #[test]
        fn monotone_under_append(a in "\\PC{0,80}", b in "\\PC{0,80}") {
            let p = TokenCountProfile::default();
            let ab = format!("{a}{b}");
            prop_assert!(p.count_tokens(&ab) >= p.count_tokens(&a));
        }

        #[test]
        fn ascii_count_matches_ceiling(len in 0usize..5000, ratio in 1.0f64..8.0) {
            let p = TokenCountProfile::new(ratio, 0).unwrap();
            let text = "a".repeat(len);
            let expected = (len as f64 / ratio).ceil() as usize;
            prop_assert_eq!(p.count_tokens(&text), expected);
        }

        #[test]
        fn calibration_recovers_ratio(ratio in 1u32..9, lens in proptest::collection::vec(1usize..400, 1..12)) {
            // Texts whose lengths are exact multiples of the ratio carry no rounding.
            let r = ratio as usize;
            let truth = TokenCountProfile::new(ratio as f64, 4).unwrap();
            let texts: Vec<String> = lens.iter().map(|l| "z".repeat(l * r)).collect();
            let samples: Vec<(&str, usize)> = texts.iter().map(|t| (t.as_str(), truth.count_tokens(t))).collect();
            let fit = calibrate(samples, 4).unwrap();
            prop_assert_eq!(fit.bytes_per_token(), ratio as f64);
        }
    }
}
