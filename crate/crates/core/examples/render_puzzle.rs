//! Generates a small puzzle and writes it three ways: a text grid, an SVG
//! file, and the puzzle JSON consumed by the review UI.
//!
//! ```sh
//! cargo run --example render_puzzle -- /tmp/puzzle
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use cwgen::dataset::ClueAnswerPair;
use cwgen::render::{render, RenderFormat};
use cwgen::schema::{generate, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;
    let pairs = vec![
        ClueAnswerPair::new("p0", "مكان للقراءة والاستعارة", "مكتبة", "demo"),
        ClueAnswerPair::new("p1", "ما نقرؤه", "كتاب", "demo"),
        ClueAnswerPair::new("p2", "مدخل البيت", "باب", "demo"),
        ClueAnswerPair::new("p3", "ثمر النخيل", "تمر", "demo"),
    ];
    let mut config = GeneratorConfig::new(7, 7);
    config.min_answers = 3;
    let layout = generate(&config, &pairs, &BTreeSet::new())?;

    print!("{}", render(&layout, &pairs, RenderFormat::Text, true)?);
    std::fs::write(
        out.join("puzzle.svg"),
        render(&layout, &pairs, RenderFormat::Svg, false)?,
    )?;
    std::fs::write(
        out.join("puzzle.json"),
        render(&layout, &pairs, RenderFormat::Json, false)?,
    )?;
    println!("wrote {}/puzzle.svg and puzzle.json", out.display());
    Ok(())
}
