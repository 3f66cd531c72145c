//! Loads a clue-answer file, strips diacritics and tatweel, drops duplicates
//! and reversal clues, and writes the result as JSONL to stdout.
//!
//! ```sh
//! cargo run --example normalize_dataset -- pairs.csv
//! ```

use std::path::PathBuf;

use cwgen::arabic::DEFAULT_REVERSAL_MARKERS;
use cwgen::dataset::{load_pairs, preprocess, write_jsonl, ClueAnswerPair, PairFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = match std::env::args().nth(1).map(PathBuf::from) {
        Some(path) => {
            let (pairs, report) = load_pairs(&path, PairFormat::from_path(&path))?;
            eprintln!("loaded {}, skipped {}", report.loaded, report.skipped());
            pairs
        }
        None => vec![
            ClueAnswerPair::new("a", "مَوْتِي", "حَتْفِي", "demo"),
            ClueAnswerPair::new("b", "موتي", "حتـــفي", "demo"),
            ClueAnswerPair::new("c", "كلمة معكوسة", "ابر", "demo"),
        ],
    };
    let before = pairs.len();
    let kept = preprocess(pairs, &DEFAULT_REVERSAL_MARKERS);
    eprintln!("{before} in, {} out", kept.len());
    write_jsonl(std::io::stdout().lock(), &kept)?;
    Ok(())
}
