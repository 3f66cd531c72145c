//! Lays out fifteen physics answers on a 13x13 grid and prints the grid,
//! the score breakdown, and why the search stopped.
//!
//! ```sh
//! cargo run --release --example generate_layout -- 42
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use cwgen::dataset::{load_pairs, PairFormat};
use cwgen::render::render_text;
use cwgen::schema::{generate, verify_layout, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/physics.jsonl");
    let (answers, _) = load_pairs(&path, PairFormat::Jsonl)?;

    let mut config = GeneratorConfig::new(13, 13);
    config.min_answers = 8;
    config.max_duration = 30.0;
    config.seed = seed;
    let layout = generate(&config, &answers, &BTreeSet::new())?;

    print!("{}", render_text(&layout, true));
    let s = layout.score;
    println!(
        "placed {} of {}, stop: {}",
        layout.placements.len(),
        answers.len(),
        layout.stop_reason.as_str()
    );
    println!(
        "fw={} ll={} fr={:.3} lr={:.3} score={:.4}",
        s.fw, s.ll, s.fr, s.lr, s.score
    );
    assert!(verify_layout(&layout).is_empty());
    Ok(())
}
