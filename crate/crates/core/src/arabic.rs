//! Arabic text normalization, word counting, and answer-letter extraction.
//!
//! Normalization removes tashkeel (U+064B..=U+065F, U+0670) and tatweel
//! (U+0640), composes to NFC, and collapses whitespace. Letter forms are left
//! alone: `أ` and `ا` stay distinct because crossword answers are exact
//! spellings and folding them would corrupt intersections.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Tatweel (kashida), an elongation mark with no letter identity.
pub const TATWEEL: char = '\u{0640}';

/// Superscript alef.
pub const SUPERSCRIPT_ALEF: char = '\u{0670}';

/// Default clue tokens that mark a reversed or scrambled answer.
pub const DEFAULT_REVERSAL_MARKERS: [&str; 3] = ["معكوسة", "مقلوبة", "مبعثرة"];

/// Returns true for code points stripped by [`normalize`].
pub fn is_removed(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{065F}') || c == SUPERSCRIPT_ALEF || c == TATWEEL
}

/// True for letters of the Arabic block (hamza through yeh, plus the
/// extended letters used by Persian/Urdu spellings).
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c, '\u{0621}'..='\u{063A}' | '\u{0641}'..='\u{064A}' | '\u{066E}'..='\u{066F}' | '\u{0671}'..='\u{06D3}')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("answer is empty after normalization")]
    EmptyAnswer,
}

/// Text that has been through [`normalize`].
///
/// Deserializing a `NormalizedText` normalizes the incoming string, so a value
/// of this type never carries diacritics or tatweel.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct NormalizedText(String);

impl NormalizedText {
    pub fn new(raw: &str) -> Self {
        normalize(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.0.split_whitespace()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl From<String> for NormalizedText {
    fn from(raw: String) -> Self {
        normalize(&raw)
    }
}

impl From<&str> for NormalizedText {
    fn from(raw: &str) -> Self {
        normalize(raw)
    }
}

impl From<NormalizedText> for String {
    fn from(text: NormalizedText) -> Self {
        text.0
    }
}

impl AsRef<str> for NormalizedText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Strips diacritics and tatweel, NFC-composes, trims, and collapses runs of
/// whitespace to a single space. Total: empty input gives empty output.
pub fn normalize(raw: &str) -> NormalizedText {
    // Compose before stripping: U+0653..U+0655 are in the removed range, and
    // a decomposed alef + hamza must become أ rather than lose its hamza.
    let composed: String = raw.nfc().filter(|c| !is_removed(*c)).collect();
    let stripped: String = composed.nfc().collect();
    let mut out = String::with_capacity(stripped.len());
    for word in stripped.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().filter(|c| !is_removed(*c)));
    }
    NormalizedText(out)
}

/// Number of maximal non-whitespace runs.
pub fn word_count(text: &NormalizedText) -> usize {
    text.words().count()
}

/// The answer as grid letters: every Unicode scalar except whitespace.
pub fn answer_letters(answer: &NormalizedText) -> Result<Vec<char>, TextError> {
    let letters: Vec<char> = answer
        .as_str()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if letters.is_empty() {
        return Err(TextError::EmptyAnswer);
    }
    Ok(letters)
}

/// True iff any marker occurs as a whole word of `clue`.
pub fn contains_reversal_marker<S: AsRef<str>>(clue: &NormalizedText, markers: &[S]) -> bool {
    markers.iter().any(|m| {
        let marker = normalize(m.as_ref());
        !marker.is_empty() && contains_phrase(clue, &marker)
    })
}

/// True iff the word sequence of `needle` occurs contiguously in `haystack`.
/// An empty needle never matches.
pub fn contains_phrase(haystack: &NormalizedText, needle: &NormalizedText) -> bool {
    let hay: Vec<&str> = haystack.words().map(trim_punctuation).collect();
    let pat: Vec<&str> = needle.words().map(trim_punctuation).collect();
    if pat.is_empty() || pat.len() > hay.len() {
        return false;
    }
    hay.windows(pat.len()).any(|w| w == pat.as_slice())
}

/// Strips leading and trailing punctuation (ASCII and Arabic) from a token so
/// "الذرة،" still matches "الذرة".
fn trim_punctuation(word: &str) -> &str {
    word.trim_matches(|c: char| {
        c.is_ascii_punctuation() || matches!(c, '،' | '؛' | '؟' | '«' | '»' | '“' | '”')
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_harakat() {
        assert_eq!(normalize("مُدَرِّسَة").as_str(), "مدرسة");
    }

    #[test]
    fn strips_tatweel() {
        assert_eq!(normalize("كـتاب").as_str(), "كتاب");
    }

    #[test]
    fn keeps_hamza_forms() {
        assert_eq!(normalize("أسد").as_str(), "أسد");
        assert_ne!(normalize("أسد"), normalize("اسد"));
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize("  دولة \t\n عربية ").as_str(), "دولة عربية");
        assert_eq!(normalize("").as_str(), "");
        assert_eq!(normalize(" \u{064E} ").as_str(), "");
    }

    #[test]
    fn superscript_alef_removed() {
        assert_eq!(normalize("هٰذا").as_str(), "هذا");
    }

    #[test]
    fn word_counts() {
        assert_eq!(word_count(&normalize("مصر")), 1);
        assert_eq!(word_count(&normalize("ل م ي ج")), 4);
        assert_eq!(word_count(&normalize("")), 0);
    }

    #[test]
    fn letters() {
        assert_eq!(
            answer_letters(&normalize("حتفي")).unwrap(),
            vec!['ح', 'ت', 'ف', 'ي']
        );
        assert_eq!(answer_letters(&normalize("در")).unwrap(), vec!['د', 'ر']);
        assert_eq!(
            answer_letters(&normalize("ل م ي ج")).unwrap(),
            vec!['ل', 'م', 'ي', 'ج']
        );
        assert_eq!(
            answer_letters(&normalize("  ")),
            Err(TextError::EmptyAnswer)
        );
    }

    #[test]
    fn reversal_markers() {
        assert!(contains_reversal_marker(
            &normalize("جميل مبعثرة"),
            &DEFAULT_REVERSAL_MARKERS
        ));
        assert!(!contains_reversal_marker(
            &normalize("دولة عربية"),
            &DEFAULT_REVERSAL_MARKERS
        ));
        let none: [&str; 0] = [];
        assert!(!contains_reversal_marker(&normalize("جميل مبعثرة"), &none));
        // whole-word only
        assert!(!contains_reversal_marker(
            &normalize("كلمات معكوسات"),
            &["معكوسة"]
        ));
        assert!(contains_reversal_marker(
            &normalize("نادر معكوسةً"),
            &["معكوسة"]
        ));
    }

    #[test]
    fn phrase_matching() {
        let clue = normalize("الأسد حيوان مفترس");
        assert!(contains_phrase(&clue, &normalize("الأسد")));
        assert!(contains_phrase(&clue, &normalize("حيوان مفترس")));
        assert!(!contains_phrase(&clue, &normalize("أسد")));
        assert!(contains_phrase(
            &normalize("تدور حول النواة، في الذرة"),
            &normalize("النواة")
        ));
    }
}
