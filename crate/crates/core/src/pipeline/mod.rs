//! Clue-answer generation.
//!
//! Two routes produce candidate pairs:
//!
//! * [`text`] segments a document, asks a model for keywords and then for a
//!   clue per keyword, and filters the result locally and with a
//!   groundedness check.
//! * [`keyword`] asks a clue model for each given answer and runs every
//!   result through an acceptability classifier.
//!
//! Both return a [`ValidationReport`]. Passed pairs stay `candidate`; a human
//! reviewer accepts or rejects them later.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClueAnswerPair;
use crate::gateway::{CompletionGateway, CompletionRequest, GatewayError};

pub mod keyword;
pub mod templates;
pub mod text;

pub use keyword::{
    classify, generate_clue, run_path_b, ClassifierKind, ClassifierVerdict, PairRecord,
    HEURISTIC_CLASSIFIER_ID,
};
pub use templates::{PromptLang, PromptTemplate, TemplateName, TemplateSet};
pub use text::{
    extract_keywords, generate_clues, run_path_a, segment, validate, KeywordSet, SourceDocument,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("document has no non-empty paragraphs")]
    EmptyDocument,
    #[error("no answers given")]
    EmptyInput,
    #[error("could not parse model output: {0}")]
    ParseFailure(String),
    #[error("answer has {words} words (at most 3 allowed)")]
    AnswerTooLong { words: usize },
    #[error("paragraph {paragraph} has {chars} characters (limit {limit})")]
    ParagraphTooLong {
        paragraph: usize,
        chars: usize,
        limit: usize,
    },
    #[error("remote classifier selected but no gateway configured")]
    MissingGateway,
    #[error("template: {0}")]
    Template(String),
    #[error("paragraph {paragraph}: {source}")]
    ParagraphGateway {
        paragraph: usize,
        #[source]
        source: GatewayError,
    },
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    TooManyWords,
    ClueContainsAnswer,
    NotGrounded,
    ParseFailure,
    ClassifierReject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub pair: ClueAnswerPair,
    pub reason: RejectReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A paragraph that yielded no pairs because a stage could not run on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphFailure {
    pub paragraph: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub input_count: usize,
    pub passed: Vec<ClueAnswerPair>,
    pub rejected: Vec<Rejection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paragraph_failures: Vec<ParagraphFailure>,
    /// Classifier verdicts by pair id (keyword path only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, ClassifierVerdict>,
}

impl ValidationReport {
    pub fn reject(&mut self, pair: ClueAnswerPair, reason: RejectReason, detail: Option<String>) {
        self.rejected.push(Rejection {
            pair,
            reason,
            detail,
        });
    }

    /// `input_count == passed + rejected`.
    pub fn is_conserved(&self) -> bool {
        self.input_count == self.passed.len() + self.rejected.len()
    }

    pub fn count(&self, reason: RejectReason) -> usize {
        self.rejected.iter().filter(|r| r.reason == reason).count()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.input_count += other.input_count;
        self.passed.extend(other.passed);
        self.rejected.extend(other.rejected);
        self.paragraph_failures.extend(other.paragraph_failures);
        self.verdicts.extend(other.verdicts);
    }

    /// Counts only, for printing next to the pair JSONL.
    pub fn summary(&self) -> ReportSummary {
        let mut rejected = BTreeMap::new();
        for r in &self.rejected {
            *rejected.entry(r.reason).or_insert(0) += 1;
        }
        ReportSummary {
            input_count: self.input_count,
            passed: self.passed.len(),
            rejected,
            paragraph_failures: self.paragraph_failures.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub input_count: usize,
    pub passed: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
    pub paragraph_failures: usize,
}

/// Model and request settings shared by both paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub model: String,
    /// Model used by the remote classifier on the keyword path.
    pub classifier_model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Paragraphs longer than this (in characters) are refused, not truncated.
    pub max_paragraph_chars: usize,
    /// Appended to an answer to form the clue model's prompt.
    pub clue_separator: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            model: "gpt-4".into(),
            classifier_model: "gpt-4".into(),
            temperature: crate::gateway::DEFAULT_TEMPERATURE,
            max_output_tokens: 1024,
            max_paragraph_chars: 6000,
            clue_separator: "\n\n###\n\n".into(),
        }
    }
}

impl PipelineConfig {
    pub(crate) fn request(&self, model: &str, prompt: String) -> CompletionRequest {
        let mut req = CompletionRequest::user(model, prompt);
        req.temperature = self.temperature;
        req.max_output_tokens = self.max_output_tokens;
        req
    }

    pub(crate) fn ask<G: CompletionGateway + ?Sized>(
        &self,
        gateway: &G,
        model: &str,
        prompt: String,
    ) -> Result<String, GatewayError> {
        let req = self.request(model, prompt);
        Ok(gateway.complete(&req)?.content)
    }
}

/// Splits a line like `- Keyword: أسد` or `اللغز: نص` into a lowercased label
/// and its value. Leading list markers and numbering are dropped.
pub(crate) fn split_label(line: &str) -> Option<(String, &str)> {
    let line = line.trim().trim_start_matches(|c: char| {
        matches!(c, '-' | '*' | '•' | '.' | ')') || c.is_numeric() || c.is_whitespace()
    });
    let colon = line.find(':')?;
    let label = line[..colon]
        .trim()
        .trim_start_matches('-')
        .trim()
        .to_lowercase();
    Some((label, line[colon + 1..].trim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(
            split_label("  - Keyword: أسد"),
            Some(("keyword".into(), "أسد"))
        );
        assert_eq!(
            split_label("-اللغز: تشمل الأسد"),
            Some(("اللغز".into(), "تشمل الأسد"))
        );
        assert_eq!(
            split_label("2. Clue: نوع من الحيوانات"),
            Some(("clue".into(), "نوع من الحيوانات"))
        );
        assert_eq!(split_label("no colon here"), None);
    }

    #[test]
    fn summary_counts() {
        let mut r = ValidationReport {
            input_count: 2,
            ..Default::default()
        };
        r.reject(
            ClueAnswerPair::new("a", "x", "y", "t"),
            RejectReason::NotGrounded,
            None,
        );
        r.passed.push(ClueAnswerPair::new("b", "x", "z", "t"));
        assert!(r.is_conserved());
        let s = r.summary();
        assert_eq!(s.rejected.get(&RejectReason::NotGrounded), Some(&1));
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"input_count":2,"passed":1,"rejected":{"not_grounded":1},"paragraph_failures":0}"#
        );
    }
}
