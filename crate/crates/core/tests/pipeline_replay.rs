mod common;

use cwgen::arabic::normalize;
use cwgen::dataset::{load_pairs, PairFormat};
use cwgen::gateway::{ReplayGateway, ScriptedGateway, Transcript};
use cwgen::pipeline::{
    run_path_a, run_path_b, ClassifierKind, PipelineConfig, PipelineError, PromptLang,
    RejectReason, HEURISTIC_CLASSIFIER_ID,
};

use common::fixture;

fn atom_text() -> String {
    std::fs::read_to_string(fixture("atom.txt")).unwrap()
}

#[test]
fn path_a_matches_golden_pairs() {
    let gateway = ReplayGateway::load(&fixture("atom_transcript.jsonl")).unwrap();
    let report = run_path_a(
        &atom_text(),
        PromptLang::Ar,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    let (golden, _) = load_pairs(&fixture("atom_golden.jsonl"), PairFormat::Jsonl).unwrap();
    assert_eq!(report.passed, golden);
    assert!(report.is_conserved());
    assert!(report.paragraph_failures.is_empty());
}

#[test]
fn ungrounded_clues_are_all_rejected() {
    let gateway = ReplayGateway::load(&fixture("atom_transcript_ungrounded.jsonl")).unwrap();
    let report = run_path_a(
        &atom_text(),
        PromptLang::Ar,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    assert!(report.passed.is_empty());
    assert_eq!(report.rejected.len(), 10);
    assert_eq!(report.count(RejectReason::NotGrounded), 10);
}

#[test]
fn path_a_replay_misses_abort_the_run() {
    let gateway = ReplayGateway::new(Transcript::new());
    let err = run_path_a(
        &atom_text(),
        PromptLang::Ar,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap_err();
    assert!(
        matches!(err, PipelineError::ParagraphGateway { paragraph: 0, .. }),
        "{err}"
    );
}

#[test]
fn unparseable_keyword_reply_is_a_paragraph_failure() {
    let gateway = ScriptedGateway::new(["لا أعرف"]);
    let report = run_path_a(
        &atom_text(),
        PromptLang::Ar,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    assert!(report.passed.is_empty());
    assert_eq!(report.paragraph_failures.len(), 1);
    assert_eq!(report.paragraph_failures[0].paragraph, 0);
}

#[test]
fn english_templates_drive_the_same_flow() {
    let replies = [
        "Keywords: الذرة, النواة",
        "Keyword: الذرة\nClue: أصغر جزء من العنصر\n\nKeyword: النواة\nClue: مركز تدور حوله الإلكترونات",
        "1. أصغر جزء من العنصر: True\n2. مركز تدور حوله الإلكترونات: False",
    ];
    let gateway = ScriptedGateway::new(replies);
    let report = run_path_a(
        &atom_text(),
        PromptLang::En,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    assert_eq!(report.passed.len(), 1);
    assert_eq!(report.passed[0].answer, normalize("الذرة"));
    assert_eq!(report.count(RejectReason::NotGrounded), 1);
    let prompts = gateway.requests();
    assert!(
        prompts[0].messages[0].content.contains("keywords"),
        "{}",
        prompts[0].messages[0].content
    );
}

fn answers() -> Vec<cwgen::arabic::NormalizedText> {
    ["نجوم", "قوة", "زرافة"]
        .iter()
        .map(|a| normalize(a))
        .collect()
}

#[test]
fn path_b_heuristic_replay() {
    let gateway = ReplayGateway::load(&fixture("keyword_transcript.jsonl")).unwrap();
    let report = run_path_b(
        &answers(),
        ClassifierKind::Heuristic,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    // The offline rules cannot tell that giraffes are not insects.
    let passed: Vec<&str> = report.passed.iter().map(|p| p.answer.as_str()).collect();
    assert_eq!(passed, ["نجوم", "قوة", "زرافة"]);
    assert_eq!(report.verdicts.len(), 3);
    assert!(report
        .verdicts
        .values()
        .all(|v| v.classifier_id == HEURISTIC_CLASSIFIER_ID));
}

#[test]
fn path_b_remote_replay() {
    let gateway = ReplayGateway::load(&fixture("keyword_transcript.jsonl")).unwrap();
    let report = run_path_b(
        &answers(),
        ClassifierKind::Remote,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    let passed: Vec<&str> = report.passed.iter().map(|p| p.answer.as_str()).collect();
    assert_eq!(passed, ["نجوم", "قوة"]);
    assert_eq!(report.rejected.len(), 1);
    assert_eq!(report.rejected[0].pair.answer, normalize("زرافة"));
    assert_eq!(report.rejected[0].reason, RejectReason::ClassifierReject);
    assert!(report.is_conserved());
}

#[test]
fn path_b_missing_transcript_entry_is_a_parse_failure() {
    let gateway = ReplayGateway::load(&fixture("keyword_transcript.jsonl")).unwrap();
    let list = vec![normalize("نجوم"), normalize("قمر")];
    let report = run_path_b(
        &list,
        ClassifierKind::Heuristic,
        &gateway,
        &PipelineConfig::default(),
    )
    .unwrap();
    assert_eq!(report.passed.len(), 1);
    assert_eq!(report.count(RejectReason::ParseFailure), 1);
    assert_eq!(report.rejected[0].pair.answer, normalize("قمر"));
}
