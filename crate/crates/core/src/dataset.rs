//! Clue-answer pair records: loading, saving, preprocessing, and corpus
//! statistics bucketed by answer length.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arabic::{answer_letters, contains_reversal_marker, NormalizedText};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv header must start with clue,answer")]
    MissingHeader,
    #[error("review label line {line}: {message}")]
    Label { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    #[default]
    Candidate,
    Accepted,
    Rejected,
}

impl PairStatus {
    /// Allowed review moves: candidate to accepted/rejected, and back and
    /// forth between accepted and rejected. Staying put is always allowed.
    pub fn can_become(self, next: PairStatus) -> bool {
        use PairStatus::*;
        self == next
            || matches!(
                (self, next),
                (Candidate, Accepted)
                    | (Candidate, Rejected)
                    | (Accepted, Rejected)
                    | (Rejected, Accepted)
            )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairStatus::Candidate => "candidate",
            PairStatus::Accepted => "accepted",
            PairStatus::Rejected => "rejected",
        }
    }
}

impl std::str::FromStr for PairStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "candidate" => Ok(PairStatus::Candidate),
            "accepted" => Ok(PairStatus::Accepted),
            "rejected" => Ok(PairStatus::Rejected),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// One clue and the exact answer it defines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClueAnswerPair {
    pub id: String,
    pub clue: NormalizedText,
    pub answer: NormalizedText,
    pub source: String,
    #[serde(default)]
    pub status: PairStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_doc: Option<String>,
}

impl ClueAnswerPair {
    pub fn new(id: impl Into<String>, clue: &str, answer: &str, source: impl Into<String>) -> Self {
        ClueAnswerPair {
            id: id.into(),
            clue: NormalizedText::new(clue),
            answer: NormalizedText::new(answer),
            source: source.into(),
            status: PairStatus::Candidate,
            origin_doc: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFormat {
    Jsonl,
    Csv,
}

impl PairFormat {
    /// `.csv` selects CSV, anything else JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => PairFormat::Csv,
            _ => PairFormat::Jsonl,
        }
    }
}

/// What happened to each input record during [`load_pairs`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub loaded: usize,
    /// Records whose clue or answer normalized to nothing.
    pub skipped_empty: usize,
    /// 1-based line numbers of records that could not be parsed.
    pub malformed: Vec<usize>,
}

impl LoadReport {
    pub fn skipped(&self) -> usize {
        self.skipped_empty + self.malformed.len()
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<String>,
    clue: String,
    answer: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    status: Option<PairStatus>,
    #[serde(default)]
    origin_doc: Option<String>,
}

pub fn load_pairs(
    path: &Path,
    format: PairFormat,
) -> Result<(Vec<ClueAnswerPair>, LoadReport), DatasetError> {
    if !path.exists() {
        return Err(DatasetError::FileNotFound(path.display().to_string()));
    }
    let default_source = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let file = fs::File::open(path)?;
    match format {
        PairFormat::Jsonl => read_jsonl(BufReader::new(file), &default_source),
        PairFormat::Csv => read_csv(file, &default_source),
    }
}

pub fn read_jsonl<R: BufRead>(
    reader: R,
    default_source: &str,
) -> Result<(Vec<ClueAnswerPair>, LoadReport), DatasetError> {
    let mut builder = Collector::new(default_source);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(&line) {
            Ok(raw) => builder.push(idx + 1, raw),
            Err(_) => builder.report.malformed.push(idx + 1),
        }
    }
    Ok(builder.finish())
}

fn read_csv<R: io::Read>(
    reader: R,
    default_source: &str,
) -> Result<(Vec<ClueAnswerPair>, LoadReport), DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0).map(str::trim) != Some("clue")
        || headers.get(1).map(str::trim) != Some("answer")
    {
        return Err(DatasetError::MissingHeader);
    }
    let source_col = headers.iter().position(|h| h.trim() == "source");
    let mut builder = Collector::new(default_source);
    for (idx, record) in rdr.records().enumerate() {
        // header is line 1
        let line = idx + 2;
        match record {
            Ok(rec) if rec.len() >= 2 => builder.push(
                line,
                RawRecord {
                    id: None,
                    clue: rec[0].to_string(),
                    answer: rec[1].to_string(),
                    source: source_col.and_then(|c| rec.get(c)).map(str::to_string),
                    status: None,
                    origin_doc: None,
                },
            ),
            _ => builder.report.malformed.push(line),
        }
    }
    Ok(builder.finish())
}

struct Collector<'a> {
    default_source: &'a str,
    pairs: Vec<ClueAnswerPair>,
    ids: HashSet<String>,
    report: LoadReport,
}

impl<'a> Collector<'a> {
    fn new(default_source: &'a str) -> Self {
        Collector {
            default_source,
            pairs: Vec::new(),
            ids: HashSet::new(),
            report: LoadReport::default(),
        }
    }

    fn push(&mut self, line: usize, raw: RawRecord) {
        let clue = NormalizedText::new(&raw.clue);
        let answer = NormalizedText::new(&raw.answer);
        if clue.is_empty() || answer.is_empty() {
            self.report.skipped_empty += 1;
            return;
        }
        let id = raw.id.unwrap_or_else(|| format!("r{line}"));
        if !self.ids.insert(id.clone()) {
            self.report.malformed.push(line);
            return;
        }
        self.pairs.push(ClueAnswerPair {
            id,
            clue,
            answer,
            source: raw
                .source
                .unwrap_or_else(|| self.default_source.to_string()),
            status: raw.status.unwrap_or_default(),
            origin_doc: raw.origin_doc,
        });
        self.report.loaded += 1;
    }

    fn finish(self) -> (Vec<ClueAnswerPair>, LoadReport) {
        (self.pairs, self.report)
    }
}

/// Writes one JSON object per pair, LF-terminated.
pub fn write_jsonl<W: Write>(mut out: W, pairs: &[ClueAnswerPair]) -> io::Result<()> {
    for pair in pairs {
        serde_json::to_writer(&mut out, pair)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_pairs(path: &Path, pairs: &[ClueAnswerPair]) -> io::Result<()> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, pairs)?;
    fs::write(path, buf)
}

/// Drops exact (clue, answer) duplicates and pairs whose clue carries a
/// reversal marker. Survivors keep their first-occurrence order.
pub fn preprocess<S: AsRef<str>>(pairs: Vec<ClueAnswerPair>, markers: &[S]) -> Vec<ClueAnswerPair> {
    let mut seen = HashSet::new();
    pairs
        .into_iter()
        .filter(|p| !contains_reversal_marker(&p.clue, markers))
        .filter(|p| seen.insert((p.clue.clone(), p.answer.clone())))
        .collect()
}

/// Per answer-length counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBucket {
    pub all_pairs: usize,
    pub unique_answers: usize,
    pub unique_pairs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total_pairs: usize,
    pub unique_answers: usize,
    pub unique_pairs: usize,
    /// Keyed by answer length in grid letters.
    pub length_histogram: BTreeMap<usize, LengthBucket>,
}

pub fn compute_stats(pairs: &[ClueAnswerPair]) -> DatasetStats {
    let mut stats = DatasetStats::default();
    let mut answers = HashSet::new();
    let mut unique = HashSet::new();
    for pair in pairs {
        let len = answer_letters(&pair.answer).map(|l| l.len()).unwrap_or(0);
        let bucket = stats.length_histogram.entry(len).or_default();
        bucket.all_pairs += 1;
        if answers.insert(pair.answer.clone()) {
            bucket.unique_answers += 1;
        }
        if unique.insert((pair.clue.clone(), pair.answer.clone())) {
            bucket.unique_pairs += 1;
        }
        stats.total_pairs += 1;
    }
    stats.unique_answers = answers.len();
    stats.unique_pairs = unique.len();
    stats
}

/// The quality dimensions a human reviewer scores a pair on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewCriterion {
    CoherenceRelevance,
    WordplayCreativity,
    UnambiguitySpecificity,
    LinguisticsGrammar,
    UniversalKnowledge,
}

impl ReviewCriterion {
    pub const ALL: [ReviewCriterion; 5] = [
        ReviewCriterion::CoherenceRelevance,
        ReviewCriterion::WordplayCreativity,
        ReviewCriterion::UnambiguitySpecificity,
        ReviewCriterion::LinguisticsGrammar,
        ReviewCriterion::UniversalKnowledge,
    ];
}

/// One human judgement of one pair, stored one per line in JSONL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewLabel {
    pub pair_id: String,
    pub acceptable: bool,
    /// Criteria the pair falls short on. Empty for a clean accept.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed: Vec<ReviewCriterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn read_labels<R: BufRead>(reader: R) -> Result<Vec<ReviewLabel>, DatasetError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let label = serde_json::from_str(&line).map_err(|e| DatasetError::Label {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(label);
    }
    Ok(out)
}

pub fn write_labels<W: Write>(mut out: W, labels: &[ReviewLabel]) -> io::Result<()> {
    for label in labels {
        serde_json::to_writer(&mut out, label)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
