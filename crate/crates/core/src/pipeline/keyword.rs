//! Answer to clue: ask a clue model, then classify the pair.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError, RejectReason, ValidationReport};
use crate::arabic::{contains_phrase, is_arabic_letter, normalize, word_count, NormalizedText};
use crate::dataset::ClueAnswerPair;
use crate::gateway::CompletionGateway;

pub const PATH_B_SOURCE: &str = "path_b";
pub const HEURISTIC_CLASSIFIER_ID: &str = "heuristic-v1";

/// Longest clue, in words, the heuristic accepts.
pub const MAX_CLUE_WORDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[default]
    Heuristic,
    Remote,
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heuristic" => Ok(ClassifierKind::Heuristic),
            "remote" => Ok(ClassifierKind::Remote),
            other => Err(format!(
                "unknown classifier {other:?} (expected heuristic or remote)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierVerdict {
    pub acceptable: bool,
    pub confidence: f64,
    pub classifier_id: String,
    /// Set when the remote reply could not be read as a verdict.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flagged: bool,
}

/// A pair as written to JSONL, with its verdict when one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    #[serde(flatten)]
    pub pair: ClueAnswerPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ClassifierVerdict>,
}

/// Sends `answer + separator` to the clue model and keeps the first
/// non-empty line of the reply as the clue.
pub fn generate_clue<G: CompletionGateway + ?Sized>(
    id: impl Into<String>,
    answer: &NormalizedText,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ClueAnswerPair, PipelineError> {
    let words = word_count(answer);
    if words == 0 {
        return Err(PipelineError::EmptyInput);
    }
    if words > 3 {
        return Err(PipelineError::AnswerTooLong { words });
    }
    let prompt = format!("{}{}", answer, config.clue_separator);
    let reply = config.ask(gateway, &config.model, prompt)?;
    let clue = reply
        .lines()
        .map(normalize)
        .find(|l| !l.is_empty())
        .ok_or_else(|| PipelineError::ParseFailure("empty clue".into()))?;
    let mut pair = ClueAnswerPair::new(id, "", "", PATH_B_SOURCE);
    pair.clue = clue;
    pair.answer = answer.clone();
    Ok(pair)
}

/// The offline rules. `None` means the pair passes all of them.
pub fn heuristic_failure(pair: &ClueAnswerPair) -> Option<&'static str> {
    if pair.clue.is_empty() {
        Some("empty clue")
    } else if pair.clue == pair.answer {
        Some("clue equals answer")
    } else if contains_phrase(&pair.clue, &pair.answer) {
        Some("clue contains answer")
    } else if word_count(&pair.clue) > MAX_CLUE_WORDS {
        Some("clue too long")
    } else if !pair.clue.as_str().chars().any(is_arabic_letter) {
        Some("clue has no Arabic letters")
    } else {
        None
    }
}

fn heuristic_verdict(pair: &ClueAnswerPair) -> ClassifierVerdict {
    ClassifierVerdict {
        acceptable: heuristic_failure(pair).is_none(),
        confidence: 1.0,
        classifier_id: HEURISTIC_CLASSIFIER_ID.into(),
        flagged: false,
    }
}

const RUBRIC_PROMPT: &str = include_str!("../../templates/classifier.txt");

/// Heuristic mode applies the offline rules. Remote mode asks the
/// classifier model, but a pair failing the offline rules is never accepted.
pub fn classify<G: CompletionGateway + ?Sized>(
    pair: &ClueAnswerPair,
    kind: ClassifierKind,
    gateway: Option<&G>,
    config: &PipelineConfig,
) -> Result<ClassifierVerdict, PipelineError> {
    let floor = heuristic_verdict(pair);
    let gateway = match (kind, gateway) {
        (ClassifierKind::Heuristic, _) => return Ok(floor),
        (ClassifierKind::Remote, Some(g)) => g,
        (ClassifierKind::Remote, None) => return Err(PipelineError::MissingGateway),
    };
    let prompt = RUBRIC_PROMPT
        .replace("{answer}", pair.answer.as_str())
        .replace("{clue}", pair.clue.as_str());
    let reply = config.ask(gateway, &config.classifier_model, prompt)?;
    let classifier_id = format!("remote:{}", config.classifier_model);
    let verdict = match parse_judgment(&reply) {
        Some(acceptable) => ClassifierVerdict {
            acceptable,
            confidence: 1.0,
            classifier_id,
            flagged: false,
        },
        None => ClassifierVerdict {
            acceptable: false,
            confidence: 0.5,
            classifier_id,
            flagged: true,
        },
    };
    if !floor.acceptable && verdict.acceptable {
        return Ok(ClassifierVerdict {
            acceptable: false,
            ..verdict
        });
    }
    Ok(verdict)
}

/// Reads "acceptable"/"unacceptable" (or مقبول/غير مقبول) from the first
/// line that contains either.
fn parse_judgment(reply: &str) -> Option<bool> {
    for line in reply.lines() {
        let line = line.to_lowercase();
        if line.contains("unacceptable")
            || line.contains("not acceptable")
            || line.contains("غير مقبول")
        {
            return Some(false);
        }
        if line.contains("acceptable") || line.contains("مقبول") {
            return Some(true);
        }
    }
    None
}

/// Generates and classifies a clue per answer, in input order. Ids are
/// `b{k}`. Per-answer failures become `parse_failure` rejections.
pub fn run_path_b<G: CompletionGateway + ?Sized>(
    answers: &[NormalizedText],
    classifier: ClassifierKind,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ValidationReport, PipelineError> {
    if answers.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut report = ValidationReport {
        input_count: answers.len(),
        ..Default::default()
    };
    for (k, answer) in answers.iter().enumerate() {
        let id = format!("b{k}");
        let pair = match generate_clue(id.clone(), answer, gateway, config) {
            Ok(pair) => pair,
            Err(err) => {
                let mut pair = ClueAnswerPair::new(id, "", "", PATH_B_SOURCE);
                pair.answer = answer.clone();
                report.reject(pair, RejectReason::ParseFailure, Some(err.to_string()));
                continue;
            }
        };
        match classify(&pair, classifier, Some(gateway), config) {
            Ok(verdict) => {
                let acceptable = verdict.acceptable;
                report.verdicts.insert(pair.id.clone(), verdict);
                if acceptable {
                    report.passed.push(pair);
                } else {
                    report.reject(pair, RejectReason::ClassifierReject, None);
                }
            }
            Err(err) => report.reject(pair, RejectReason::ParseFailure, Some(err.to_string())),
        }
    }
    Ok(report)
}

impl ValidationReport {
    /// Passed then rejected pairs, each with its verdict if any.
    pub fn records(&self) -> Vec<PairRecord> {
        self.passed
            .iter()
            .chain(self.rejected.iter().map(|r| &r.pair))
            .map(|pair| PairRecord {
                pair: pair.clone(),
                verdict: self.verdicts.get(&pair.id).cloned(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::ScriptedGateway;

    fn pair(answer: &str, clue: &str) -> ClueAnswerPair {
        ClueAnswerPair::new("x", clue, answer, PATH_B_SOURCE)
    }

    fn heuristic(p: &ClueAnswerPair) -> ClassifierVerdict {
        classify::<ScriptedGateway>(
            p,
            ClassifierKind::Heuristic,
            None,
            &PipelineConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn heuristic_rules() {
        assert!(!heuristic(&pair("مثلث", "مثنى مثلث")).acceptable);
        assert!(heuristic(&pair("قوة", "قدرة")).acceptable);
        assert!(heuristic(&pair("زرافة", "من الحشرات")).acceptable);
        assert!(!heuristic(&pair("قوة", "قوة")).acceptable);
        assert!(!heuristic(&pair("قوة", "power")).acceptable);
        assert!(!heuristic(&pair("قوة", "و و و و و و و و و")).acceptable);
        assert_eq!(heuristic(&pair("قوة", "قدرة")).confidence, 1.0);
    }

    #[test]
    fn remote_verdicts() {
        let cfg = PipelineConfig::default();
        let gw = ScriptedGateway::new(["Unacceptable", "hmm", "Acceptable"]);
        let v = classify(
            &pair("زرافة", "من الحشرات"),
            ClassifierKind::Remote,
            Some(&gw),
            &cfg,
        )
        .unwrap();
        assert!(!v.acceptable);
        let v = classify(
            &pair("قوة", "قدرة"),
            ClassifierKind::Remote,
            Some(&gw),
            &cfg,
        )
        .unwrap();
        assert_eq!((v.acceptable, v.confidence, v.flagged), (false, 0.5, true));
        // the floor overrides a remote yes
        let v = classify(
            &pair("مثلث", "مثنى مثلث"),
            ClassifierKind::Remote,
            Some(&gw),
            &cfg,
        )
        .unwrap();
        assert!(!v.acceptable);
    }

    #[test]
    fn answer_too_long() {
        let gw = ScriptedGateway::new(Vec::<&str>::new());
        let err = generate_clue("b0", &normalize("ل م ي ج"), &gw, &PipelineConfig::default())
            .unwrap_err();
        assert!(matches!(err, PipelineError::AnswerTooLong { words: 4 }));
    }

    #[test]
    fn path_b_records_failures() {
        let gw = ScriptedGateway::new(["في السماء ليلا"]);
        let answers = [normalize("نجوم"), normalize("قوة")];
        let r = run_path_b(
            &answers,
            ClassifierKind::Heuristic,
            &gw,
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(r.passed.len(), 1);
        assert_eq!(r.count(RejectReason::ParseFailure), 1);
        assert!(r.is_conserved());
        let records = r.records();
        let line = serde_json::to_string(&records[0]).unwrap();
        assert!(
            line.contains(
                r#""verdict":{"acceptable":true,"confidence":1.0,"classifier_id":"heuristic-v1"}"#
            ),
            "{line}"
        );
        assert!(matches!(
            run_path_b(
                &[],
                ClassifierKind::Heuristic,
                &gw,
                &PipelineConfig::default()
            ),
            Err(PipelineError::EmptyInput)
        ));
    }
}
