use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateName {
    KeywordExtract,
    ClueGenerate,
    GroundednessCheck,
}

impl TemplateName {
    pub fn required_placeholders(self) -> &'static [&'static str] {
        match self {
            TemplateName::KeywordExtract => &["text"],
            TemplateName::ClueGenerate => &["text", "keywords"],
            TemplateName::GroundednessCheck => &["text", "clues"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptLang {
    En,
    #[default]
    Ar,
}

impl FromStr for PromptLang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(PromptLang::En),
            "ar" => Ok(PromptLang::Ar),
            other => Err(format!(
                "unknown prompt language {other:?} (expected en or ar)"
            )),
        }
    }
}

impl fmt::Display for PromptLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptLang::En => "en",
            PromptLang::Ar => "ar",
        })
    }
}

const PLACEHOLDERS: [&str; 3] = ["text", "keywords", "clues"];

/// A prompt body with `{text}`, `{keywords}`, and `{clues}` slots. Any other
/// brace sequence is literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: TemplateName,
    pub language: PromptLang,
    body: String,
}

impl PromptTemplate {
    pub fn new(
        name: TemplateName,
        language: PromptLang,
        body: impl Into<String>,
    ) -> Result<Self, PipelineError> {
        let body = body.into();
        for slot in name.required_placeholders() {
            if !body.contains(&format!("{{{slot}}}")) {
                return Err(PipelineError::Template(format!(
                    "{name:?} template is missing {{{slot}}}"
                )));
            }
        }
        Ok(PromptTemplate {
            name,
            language,
            body,
        })
    }

    /// The template shipped with the crate.
    pub fn builtin(name: TemplateName, language: PromptLang) -> Self {
        let body = match (name, language) {
            (TemplateName::KeywordExtract, PromptLang::En) => {
                include_str!("../../templates/keyword_extract.en.txt")
            }
            (TemplateName::KeywordExtract, PromptLang::Ar) => {
                include_str!("../../templates/keyword_extract.ar.txt")
            }
            (TemplateName::ClueGenerate, PromptLang::En) => {
                include_str!("../../templates/clue_generate.en.txt")
            }
            (TemplateName::ClueGenerate, PromptLang::Ar) => {
                include_str!("../../templates/clue_generate.ar.txt")
            }
            (TemplateName::GroundednessCheck, PromptLang::En) => {
                include_str!("../../templates/groundedness_check.en.txt")
            }
            (TemplateName::GroundednessCheck, PromptLang::Ar) => {
                include_str!("../../templates/groundedness_check.ar.txt")
            }
        };
        PromptTemplate::new(name, language, body)
            .expect("builtin templates carry their placeholders")
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// Fills placeholders in one pass, so a value that itself contains
    /// `{text}` is not expanded again.
    pub fn render(&self, values: &[(&str, &str)]) -> String {
        let mut out = String::with_capacity(
            self.body.len() + values.iter().map(|(_, v)| v.len()).sum::<usize>(),
        );
        let mut rest = self.body.as_str();
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let slot = after
                .find('}')
                .map(|close| &after[..close])
                .filter(|name| PLACEHOLDERS.contains(name));
            match slot {
                Some(name) => {
                    let value = values
                        .iter()
                        .find(|(k, _)| *k == name)
                        .map_or("", |(_, v)| *v);
                    out.push_str(value);
                    rest = &after[name.len() + 1..];
                }
                None => {
                    out.push('{');
                    rest = after;
                }
            }
        }
        out.push_str(rest);
        out
    }
}

/// The three templates path (a) needs, in one language.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub keyword_extract: PromptTemplate,
    pub clue_generate: PromptTemplate,
    pub groundedness_check: PromptTemplate,
}

impl TemplateSet {
    pub fn builtin(language: PromptLang) -> Self {
        TemplateSet {
            keyword_extract: PromptTemplate::builtin(TemplateName::KeywordExtract, language),
            clue_generate: PromptTemplate::builtin(TemplateName::ClueGenerate, language),
            groundedness_check: PromptTemplate::builtin(TemplateName::GroundednessCheck, language),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for lang in [PromptLang::En, PromptLang::Ar] {
            let set = TemplateSet::builtin(lang);
            assert!(set.keyword_extract.body().contains("{text}"));
            assert!(set.clue_generate.body().contains("{keywords}"));
            assert!(set.groundedness_check.body().contains("{clues}"));
        }
    }

    #[test]
    fn missing_placeholder_rejected() {
        assert!(
            PromptTemplate::new(TemplateName::ClueGenerate, PromptLang::En, "{text} only").is_err()
        );
    }

    #[test]
    fn render_is_single_pass() {
        let t = PromptTemplate::new(
            TemplateName::ClueGenerate,
            PromptLang::En,
            "K={keywords} T={text} {other}",
        )
        .unwrap();
        assert_eq!(
            t.render(&[("text", "{keywords}"), ("keywords", "أ, ب")]),
            "K=أ, ب T={keywords} {other}"
        );
    }
}
