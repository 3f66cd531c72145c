//! Rebuilds the replay transcripts under `tests/fixtures/`.
//!
//! The replies are scripted, then recorded against the exact prompts the
//! pipeline sends, so a template edit only needs
//! `cargo test --test regen_fixtures -- --ignored`.

use std::path::PathBuf;

use cwgen::arabic::normalize;
use cwgen::dataset::ClueAnswerPair;
use cwgen::gateway::{RecordingGateway, ScriptedGateway, Transcript};
use cwgen::pipeline::{
    classify, run_path_a, run_path_b, ClassifierKind, PipelineConfig, PromptLang,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

const ATOM_PAIRS: [(&str, &str); 10] = [
    ("الذرة", "أصغر جزء من العنصر الكيميائي يمكن الوصول إليه"),
    (
        "العنصر الكيميائي",
        "يتكون من الذرات ويحتفظ بالخصائص الكيميائية",
    ),
    ("الخصائص الكيميائية", "يحتفظ بها العنصر الكيميائي"),
    ("الإلكترونات", "تدور حول النواة في الذرة"),
    ("النواة", "تتكون من البروتونات والنيوترونات في الذرة"),
    ("البروتونات", "تتواجد في النواة وتحمل شحنة موجبة"),
    ("النيوترونات", "تتواجد في النواة ولا تحمل شحنة"),
    (
        "العناصر",
        "تتكون من الذرات وتختلف بحسب عدد البروتونات في النواة",
    ),
    ("النظائر", "صور مختلفة للعنصر نفسه"),
    (
        "تفاعل كيميائي",
        "يمكن أن يخوضه العنصر بحسب خصائصه الكيميائية",
    ),
];

fn atom_replies() -> Vec<String> {
    let keywords = ATOM_PAIRS
        .iter()
        .map(|(a, _)| *a)
        .collect::<Vec<_>>()
        .join(", ");
    let clues = ATOM_PAIRS
        .iter()
        .map(|(a, c)| format!("الكلمة المفتاحية: {a}\nاللغز: {c}"))
        .collect::<Vec<_>>()
        .join("\n\n");
    let verdicts = ATOM_PAIRS
        .iter()
        .map(|(_, c)| format!("{c}: صحيح"))
        .collect::<Vec<_>>()
        .join("\n");
    vec![format!("الكلمات المفتاحية: {keywords}"), clues, verdicts]
}

#[test]
#[ignore]
fn regenerate_atom_transcript() {
    let text = std::fs::read_to_string(fixture("atom.txt")).unwrap();
    let recorder = RecordingGateway::new(ScriptedGateway::new(atom_replies()));
    let report = run_path_a(&text, PromptLang::Ar, &recorder, &PipelineConfig::default()).unwrap();
    assert_eq!(report.passed.len(), 10);
    recorder
        .transcript()
        .save(&fixture("atom_transcript.jsonl"))
        .unwrap();

    // Same paragraph, every groundedness verdict negative.
    let mut replies = atom_replies();
    replies[2] = ATOM_PAIRS
        .iter()
        .map(|(_, c)| format!("{c}: خطأ"))
        .collect::<Vec<_>>()
        .join("\n");
    let recorder = RecordingGateway::new(ScriptedGateway::new(replies));
    let report = run_path_a(&text, PromptLang::Ar, &recorder, &PipelineConfig::default()).unwrap();
    assert_eq!(report.passed.len(), 0);
    recorder
        .transcript()
        .save(&fixture("atom_transcript_ungrounded.jsonl"))
        .unwrap();
}

#[test]
#[ignore]
fn regenerate_keyword_transcript() {
    let config = PipelineConfig::default();
    let mut transcript = Transcript::new();

    let answers = [normalize("نجوم"), normalize("قوة"), normalize("زرافة")];
    let recorder = RecordingGateway::new(ScriptedGateway::new([
        "في السماء ليلا",
        "قدرة",
        "من الحشرات",
    ]));
    run_path_b(&answers, ClassifierKind::Heuristic, &recorder, &config).unwrap();
    transcript.merge(recorder.into_transcript());

    let recorder = RecordingGateway::new(ScriptedGateway::new([
        "acceptable",
        "acceptable",
        "unacceptable",
    ]));
    for (answer, clue) in [
        ("نجوم", "في السماء ليلا"),
        ("قوة", "قدرة"),
        ("زرافة", "من الحشرات"),
    ] {
        let pair = ClueAnswerPair::new("x", clue, answer, "path_b");
        classify(&pair, ClassifierKind::Remote, Some(&recorder), &config).unwrap();
    }
    transcript.merge(recorder.into_transcript());
    transcript
        .save(&fixture("keyword_transcript.jsonl"))
        .unwrap();
}
