//! Text to clue-answer pairs: segment, extract keywords, write clues,
//! validate.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::templates::{PromptLang, PromptTemplate, TemplateName, TemplateSet};
use super::{
    split_label, ParagraphFailure, PipelineConfig, PipelineError, RejectReason, ValidationReport,
};
use crate::arabic::{contains_phrase, normalize, word_count, NormalizedText};
use crate::dataset::ClueAnswerPair;
use crate::gateway::CompletionGateway;

pub const PATH_A_SOURCE: &str = "path_a";

const KEYWORD_LABELS: [&str; 3] = ["keywords", "keyword", "الكلمات المفتاحية"];
const PAIR_KEYWORD_LABELS: [&str; 2] = ["keyword", "الكلمة المفتاحية"];
const PAIR_CLUE_LABELS: [&str; 2] = ["clue", "اللغز"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDocument {
    pub id: String,
    pub paragraphs: Vec<NormalizedText>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub paragraph: usize,
    pub keywords: Vec<NormalizedText>,
}

/// Splits on blank lines and normalizes each paragraph. The document id is
/// derived from the raw text.
pub fn segment(text: &str) -> Result<SourceDocument, PipelineError> {
    let mut paragraphs = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            push_paragraph(&mut paragraphs, &mut current);
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    push_paragraph(&mut paragraphs, &mut current);
    if paragraphs.is_empty() {
        return Err(PipelineError::EmptyDocument);
    }
    let digest = Sha256::digest(text.as_bytes());
    Ok(SourceDocument {
        id: format!("doc-{}", &hex::encode(digest)[..12]),
        paragraphs,
    })
}

fn push_paragraph(out: &mut Vec<NormalizedText>, buf: &mut String) {
    let p = normalize(buf);
    if !p.is_empty() {
        out.push(p);
    }
    buf.clear();
}

/// Asks for keywords and parses the first `Keywords:` line. Items longer
/// than two words are dropped; duplicates keep their first position.
pub fn extract_keywords<G: CompletionGateway + ?Sized>(
    paragraph_index: usize,
    paragraph: &NormalizedText,
    template: &PromptTemplate,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<KeywordSet, PipelineError> {
    expect_template(template, TemplateName::KeywordExtract)?;
    let prompt = template.render(&[("text", paragraph.as_str())]);
    let reply = config.ask(gateway, &config.model, prompt)?;
    let keywords = parse_keywords(&reply)
        .ok_or_else(|| PipelineError::ParseFailure("no keyword line in reply".into()))?;
    Ok(KeywordSet {
        paragraph: paragraph_index,
        keywords,
    })
}

pub(crate) fn parse_keywords(reply: &str) -> Option<Vec<NormalizedText>> {
    let line = reply.lines().find_map(|line| {
        let cleaned = line.trim().trim_matches(|c| c == '\'' || c == '"');
        split_label(cleaned)
            .filter(|(label, _)| KEYWORD_LABELS.contains(&label.as_str()))
            .map(|(_, v)| v)
    })?;
    let mut out: Vec<NormalizedText> = Vec::new();
    for item in line.split([',', '،']) {
        let kw = normalize(item.trim_matches(|c: char| {
            c.is_whitespace() || matches!(c, '.' | '\'' | '"' | '؛' | ';')
        }));
        if kw.is_empty() || word_count(&kw) > 2 || out.contains(&kw) {
            continue;
        }
        out.push(kw);
    }
    Some(out)
}

/// Asks for one clue per keyword. Pairs whose answer is neither one of the
/// keywords nor a phrase of the paragraph are dropped, as are keywords the
/// model skipped. Ids are `p{paragraph}-{k}`.
pub fn generate_clues<G: CompletionGateway + ?Sized>(
    paragraph: &NormalizedText,
    keywords: &KeywordSet,
    template: &PromptTemplate,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<Vec<ClueAnswerPair>, PipelineError> {
    expect_template(template, TemplateName::ClueGenerate)?;
    if keywords.keywords.is_empty() {
        return Err(PipelineError::ParseFailure(
            "no keywords to write clues for".into(),
        ));
    }
    let joined = keywords
        .keywords
        .iter()
        .map(NormalizedText::as_str)
        .collect::<Vec<_>>()
        .join(", ");
    let prompt = template.render(&[("text", paragraph.as_str()), ("keywords", &joined)]);
    let reply = config.ask(gateway, &config.model, prompt)?;
    let blocks = parse_clue_blocks(&reply);
    if blocks.is_empty() {
        return Err(PipelineError::ParseFailure(
            "no keyword/clue blocks in reply".into(),
        ));
    }
    let mut pairs = Vec::new();
    for (answer, clue) in blocks {
        if !keywords.keywords.contains(&answer) && !contains_phrase(paragraph, &answer) {
            continue;
        }
        let mut pair = ClueAnswerPair::new(
            format!("p{}-{}", keywords.paragraph, pairs.len()),
            "",
            "",
            PATH_A_SOURCE,
        );
        pair.clue = clue;
        pair.answer = answer;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// (answer, clue) blocks in either label order. A label with no partner of
/// the other kind next to it is skipped.
pub(crate) fn parse_clue_blocks(reply: &str) -> Vec<(NormalizedText, NormalizedText)> {
    #[derive(PartialEq)]
    enum Tag {
        Keyword,
        Clue,
    }
    let tagged: Vec<(Tag, NormalizedText)> = reply
        .lines()
        .filter_map(split_label)
        .filter_map(|(label, value)| {
            let value = normalize(value);
            if value.is_empty() {
                return None;
            }
            if PAIR_KEYWORD_LABELS.contains(&label.as_str()) {
                Some((Tag::Keyword, value))
            } else if PAIR_CLUE_LABELS.contains(&label.as_str()) {
                Some((Tag::Clue, value))
            } else {
                None
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < tagged.len() {
        let (a, b) = (&tagged[i], &tagged[i + 1]);
        if a.0 == b.0 {
            i += 1;
            continue;
        }
        let (answer, clue) = if a.0 == Tag::Keyword {
            (&a.1, &b.1)
        } else {
            (&b.1, &a.1)
        };
        out.push((answer.clone(), clue.clone()));
        i += 2;
    }
    out
}

/// Local filters first (answer over three words, clue containing the
/// answer), then one groundedness call for the survivors.
pub fn validate<G: CompletionGateway + ?Sized>(
    pairs: Vec<ClueAnswerPair>,
    paragraph: &NormalizedText,
    template: &PromptTemplate,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ValidationReport, PipelineError> {
    expect_template(template, TemplateName::GroundednessCheck)?;
    let mut report = ValidationReport {
        input_count: pairs.len(),
        ..Default::default()
    };
    let mut survivors = Vec::new();
    for pair in pairs {
        match local_rejection(&pair) {
            Some(reason) => report.reject(pair, reason, None),
            None => survivors.push(pair),
        }
    }
    if survivors.is_empty() {
        return Ok(report);
    }
    let clue_list = survivors
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}. {}", i + 1, p.clue))
        .collect::<Vec<_>>()
        .join("\n");
    let prompt = template.render(&[("text", paragraph.as_str()), ("clues", &clue_list)]);
    let reply = config.ask(gateway, &config.model, prompt)?;
    let clues: Vec<&NormalizedText> = survivors.iter().map(|p| &p.clue).collect();
    let verdicts = parse_verdicts(&reply, &clues);
    for (pair, verdict) in survivors.into_iter().zip(verdicts) {
        match verdict {
            Some(true) => report.passed.push(pair),
            Some(false) => report.reject(pair, RejectReason::NotGrounded, None),
            None => report.reject(
                pair,
                RejectReason::ParseFailure,
                Some("no verdict for this clue".into()),
            ),
        }
    }
    Ok(report)
}

/// The deterministic stage: first failing rule wins.
pub fn local_rejection(pair: &ClueAnswerPair) -> Option<RejectReason> {
    if word_count(&pair.answer) > 3 {
        Some(RejectReason::TooManyWords)
    } else if contains_phrase(&pair.clue, &pair.answer) {
        Some(RejectReason::ClueContainsAnswer)
    } else {
        None
    }
}

fn verdict_token(token: &str) -> Option<bool> {
    let token = token
        .trim_matches(|c: char| {
            c.is_whitespace() || c.is_ascii_punctuation() || matches!(c, '،' | '؛' | '«' | '»')
        })
        .to_lowercase();
    match token.as_str() {
        "true" | "صحيح" | "صح" => Some(true),
        "false" | "خطأ" | "خطا" | "خاطئ" => Some(false),
        _ => None,
    }
}

/// One verdict per clue. A line `<clue>: True` is matched to its clue by
/// text; a bare verdict goes to the first clue still without one.
pub(crate) fn parse_verdicts(reply: &str, clues: &[&NormalizedText]) -> Vec<Option<bool>> {
    let mut out = vec![None; clues.len()];
    for line in reply.lines() {
        let (lhs, token) = match line.rfind(':') {
            Some(i) => (&line[..i], &line[i + 1..]),
            None => ("", line),
        };
        let token = token
            .trim()
            .trim_start_matches(|c: char| c.is_numeric() || matches!(c, '.' | ')' | '-'));
        let Some(verdict) = verdict_token(token) else {
            continue;
        };
        let lhs = normalize(lhs.trim().trim_start_matches(|c: char| {
            c.is_numeric() || c.is_whitespace() || matches!(c, '.' | ')' | '-' | '*')
        }));
        let by_text = clues
            .iter()
            .enumerate()
            .position(|(i, c)| out[i].is_none() && **c == lhs);
        if let Some(slot) = by_text.or_else(|| out.iter().position(Option::is_none)) {
            out[slot] = Some(verdict);
        }
    }
    out
}

fn expect_template(template: &PromptTemplate, name: TemplateName) -> Result<(), PipelineError> {
    if template.name != name {
        return Err(PipelineError::Template(format!(
            "expected a {name:?} template, got {:?}",
            template.name
        )));
    }
    Ok(())
}

/// The whole text route with the built-in templates for `language`.
pub fn run_path_a<G: CompletionGateway + ?Sized>(
    text: &str,
    language: PromptLang,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ValidationReport, PipelineError> {
    run_path_a_with(text, &TemplateSet::builtin(language), gateway, config)
}

/// Paragraphs are processed in order. A paragraph that is too long or whose
/// reply cannot be parsed is listed in `paragraph_failures`; a gateway error
/// aborts the run.
pub fn run_path_a_with<G: CompletionGateway + ?Sized>(
    text: &str,
    templates: &TemplateSet,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ValidationReport, PipelineError> {
    let doc = segment(text)?;
    let mut report = ValidationReport::default();
    for (i, paragraph) in doc.paragraphs.iter().enumerate() {
        let chars = paragraph.as_str().chars().count();
        if chars > config.max_paragraph_chars {
            let err = PipelineError::ParagraphTooLong {
                paragraph: i,
                chars,
                limit: config.max_paragraph_chars,
            };
            report.paragraph_failures.push(ParagraphFailure {
                paragraph: i,
                message: err.to_string(),
            });
            continue;
        }
        match run_paragraph(i, paragraph, templates, gateway, config) {
            Ok(part) => report.merge(part),
            Err(PipelineError::Gateway(source)) => {
                return Err(PipelineError::ParagraphGateway {
                    paragraph: i,
                    source,
                })
            }
            Err(err) => report.paragraph_failures.push(ParagraphFailure {
                paragraph: i,
                message: err.to_string(),
            }),
        }
    }
    Ok(report)
}

fn run_paragraph<G: CompletionGateway + ?Sized>(
    index: usize,
    paragraph: &NormalizedText,
    templates: &TemplateSet,
    gateway: &G,
    config: &PipelineConfig,
) -> Result<ValidationReport, PipelineError> {
    let keywords = extract_keywords(
        index,
        paragraph,
        &templates.keyword_extract,
        gateway,
        config,
    )?;
    let pairs = generate_clues(
        paragraph,
        &keywords,
        &templates.clue_generate,
        gateway,
        config,
    )?;
    validate(
        pairs,
        paragraph,
        &templates.groundedness_check,
        gateway,
        config,
    )
}
