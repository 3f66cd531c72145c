//! Prints the answer-length histogram of a pair file.
//!
//! ```sh
//! cargo run --example dataset_stats -- tests/fixtures/physics.jsonl
//! ```

use std::path::PathBuf;

use cwgen::dataset::{compute_stats, load_pairs, PairFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/physics.jsonl")
        });
    let (pairs, _) = load_pairs(&path, PairFormat::from_path(&path))?;
    let stats = compute_stats(&pairs);
    println!(
        "{} pairs, {} unique answers, {} unique pairs",
        stats.total_pairs, stats.unique_answers, stats.unique_pairs
    );
    println!(
        "{:>6} {:>8} {:>8} {:>8}",
        "len", "pairs", "answers", "unique"
    );
    for (len, b) in &stats.length_histogram {
        println!(
            "{len:>6} {:>8} {:>8} {:>8}",
            b.all_pairs, b.unique_answers, b.unique_pairs
        );
    }
    Ok(())
}
