//! Runs several seeded searches at once and keeps the best. The winner only
//! depends on the seeds, so repeated runs agree.
//!
//! ```sh
//! cargo run --release --example parallel_layout -- 8
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use cwgen::dataset::{load_pairs, PairFormat};
use cwgen::schema::{generate, generate_parallel, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let jobs = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(4);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/physics.jsonl");
    let (answers, _) = load_pairs(&path, PairFormat::Jsonl)?;
    let mut config = GeneratorConfig::new(11, 11);
    config.min_answers = 15;
    config.max_rebuilds = 40;
    let none = BTreeSet::new();

    for seed in 0..jobs as u64 {
        let mut c = config.clone();
        c.seed = seed;
        let l = generate(&c, &answers, &none)?;
        println!(
            "seed {seed}: {} words, score {:.4}",
            l.placements.len(),
            l.score.score
        );
    }
    let started = Instant::now();
    let best = generate_parallel(&config, &answers, &none, jobs)?;
    println!(
        "best of {jobs}: {} words, score {:.4} in {:.2?}",
        best.placements.len(),
        best.score.score,
        started.elapsed()
    );
    Ok(())
}
