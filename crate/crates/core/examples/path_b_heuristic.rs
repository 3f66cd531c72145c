//! The keyword route: write one clue per answer, then judge each pair.
//!
//! Clue generation is scripted here so the example runs offline; the judge
//! is the rule-based classifier.
//!
//! ```sh
//! cargo run --example path_b_heuristic
//! ```

use cwgen::arabic::normalize;
use cwgen::gateway::ScriptedGateway;
use cwgen::pipeline::{run_path_b, ClassifierKind, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let answers: Vec<_> = ["نجوم", "قوة", "بحر", "ليل"]
        .iter()
        .map(|a| normalize(a))
        .collect();
    let gateway = ScriptedGateway::new(["تلمع في السماء ليلا", "قدرة على التأثير", "بحر واسع", ""]);
    let report = run_path_b(
        &answers,
        ClassifierKind::Heuristic,
        &gateway,
        &PipelineConfig::default(),
    )?;
    for record in report.records() {
        let verdict = record.verdict.map_or("-".to_string(), |v| {
            if v.acceptable {
                "ok".into()
            } else {
                "no".into()
            }
        });
        println!(
            "{:<4} {:<8} {}",
            verdict, record.pair.answer, record.pair.clue
        );
    }
    for r in &report.rejected {
        println!(
            "rejected {}: {:?} {}",
            r.pair.answer,
            r.reason,
            r.detail.as_deref().unwrap_or("")
        );
    }
    Ok(())
}
