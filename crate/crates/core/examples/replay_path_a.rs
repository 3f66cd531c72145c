//! Runs the text route (keywords, clues, validation) over a paragraph about
//! atoms, answering every model call from a recorded transcript.
//!
//! Point `CWGEN_API_KEY` (and optionally `CWGEN_API_BASE`) at a real
//! endpoint and pass `--live` to call the model instead.
//!
//! ```sh
//! cargo run --example replay_path_a
//! ```

use std::path::PathBuf;

use cwgen::gateway::{CompletionGateway, LiveGateway, ReplayGateway};
use cwgen::pipeline::{run_path_a, PipelineConfig, PromptLang};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let text = std::fs::read_to_string(fixtures.join("atom.txt"))?;
    let gateway: Box<dyn CompletionGateway> = if std::env::args().any(|a| a == "--live") {
        Box::new(LiveGateway::from_env())
    } else {
        Box::new(ReplayGateway::load(
            &fixtures.join("atom_transcript.jsonl"),
        )?)
    };

    let report = run_path_a(&text, PromptLang::Ar, &gateway, &PipelineConfig::default())?;
    for pair in &report.passed {
        println!("{:<22} {}", pair.answer, pair.clue);
    }
    for r in &report.rejected {
        println!("rejected ({:?}): {}", r.reason, r.pair.answer);
    }
    eprintln!("{}", serde_json::to_string_pretty(&report.summary())?);
    Ok(())
}
