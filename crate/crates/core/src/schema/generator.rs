use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{
    Board, CrosswordLayout, GeneratorConfig, LayoutScore, Placement, SchemaError, Slot, StopReason,
};
use crate::arabic::answer_letters;
use crate::dataset::ClueAnswerPair;

/// Generator RNG. Seeds go through `SeedableRng::seed_from_u64`, and the
/// stream is fixed by the algorithm, so a seed means the same thing on every
/// platform.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3) via seed_from_u64";

const TIE_EPSILON: f64 = 1e-12;

/// An answer ready for placement.
#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    id: String,
    letters: Vec<char>,
    weight: f64,
}

/// Dedupes answers by letter sequence (first occurrence wins), drops answers
/// shorter than two letters, and checks there is something to work with.
fn prepare(
    config: &GeneratorConfig,
    answers: &[ClueAnswerPair],
    preferred: &BTreeSet<String>,
) -> Result<Vec<Candidate>, SchemaError> {
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for pair in answers {
        let Ok(letters) = answer_letters(&pair.answer) else {
            continue;
        };
        if letters.len() < 2 || !seen.insert(letters.clone()) {
            continue;
        }
        let weight = if preferred.contains(&pair.id) {
            config.preferred_weight
        } else {
            1.0
        };
        candidates.push(Candidate {
            id: pair.id.clone(),
            letters,
            weight,
        });
    }
    if candidates.len() < config.min_answers {
        return Err(SchemaError::InsufficientAnswers {
            needed: config.min_answers,
            available: candidates.len(),
        });
    }
    let longest = config.rows.max(config.cols);
    candidates.retain(|c| c.letters.len() <= longest);
    if candidates.is_empty() {
        return Err(SchemaError::NoLayoutFound);
    }
    Ok(candidates)
}

/// Builds a layout from `answers` by seeded stochastic search.
///
/// The first word goes at a random legal slot starting in the middle third
/// of the grid. After that each step samples an unplaced answer (preferred
/// ids weigh `preferred_weight`, others 1) and puts it wherever the score
/// ends up highest, breaking ties at random. `stall_limit` consecutive
/// samples with nowhere to go count as a stall: the `remove_batch` most
/// recent words come off, and after `removals_per_build` stalls in one build
/// the grid is cleared, which counts as one rebuild.
///
/// The search stops at the first satisfied criterion. When enough answers are
/// placed, or the fill ratio threshold is reached with at least two words,
/// the layout that met it is returned. When the rebuild or time budget runs
/// out, the best-scoring layout seen is returned.
///
/// With a fixed config, answer list, and seed the result is identical from
/// run to run unless the time limit is what ends the search.
pub fn generate(
    config: &GeneratorConfig,
    answers: &[ClueAnswerPair],
    preferred: &BTreeSet<String>,
) -> Result<CrosswordLayout, SchemaError> {
    config.validate()?;
    let candidates = prepare(config, answers, preferred)?;
    Ok(Search::new(config, candidates).run())
}

/// Runs `jobs` independent searches with seeds `seed, seed+1, ...` on scoped
/// threads and returns the highest score, lowest seed first on ties. The
/// outcome does not depend on which thread finishes first.
pub fn generate_parallel(
    config: &GeneratorConfig,
    answers: &[ClueAnswerPair],
    preferred: &BTreeSet<String>,
    jobs: usize,
) -> Result<CrosswordLayout, SchemaError> {
    config.validate()?;
    let jobs = jobs.max(1);
    let candidates = prepare(config, answers, preferred)?;
    let results: Vec<CrosswordLayout> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|k| {
                let mut cfg = config.clone();
                cfg.seed = config.seed.wrapping_add(k);
                let candidates = candidates.clone();
                scope.spawn(move || Search::new(&cfg, candidates).run())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search thread panicked"))
            .collect()
    });
    let mut best: Option<CrosswordLayout> = None;
    for layout in results {
        if best
            .as_ref()
            .is_none_or(|b| layout.score.score > b.score.score)
        {
            best = Some(layout);
        }
    }
    Ok(best.expect("at least one job"))
}

struct Search<'a> {
    config: &'a GeneratorConfig,
    candidates: Vec<Candidate>,
    rng: ChaCha8Rng,
    board: Board,
    /// Candidate index of each placement on the board, in order.
    placed_order: Vec<usize>,
    placed: Vec<bool>,
    /// Board version at which a candidate was last found to have no slot.
    dead_at: Vec<Option<u64>>,
    version: u64,
    best: Option<(LayoutScore, Board)>,
    rebuilds: u32,
}

impl<'a> Search<'a> {
    fn new(config: &'a GeneratorConfig, candidates: Vec<Candidate>) -> Self {
        let n = candidates.len();
        Search {
            config,
            candidates,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            board: Board::new(config.rows, config.cols),
            placed_order: Vec::new(),
            placed: vec![false; n],
            dead_at: vec![None; n],
            version: 0,
            best: None,
            rebuilds: 0,
        }
    }

    fn run(mut self) -> CrosswordLayout {
        let started = Instant::now();
        let budget = self.config.duration();
        let stall_limit = self.config.stall_limit;
        let mut failures = 0u32;
        let mut stalls = 0u32;

        self.place_first();
        loop {
            if started.elapsed() >= budget {
                return self.finish_best(StopReason::TimeLimit);
            }
            if self.board.is_empty() {
                self.place_first();
                continue;
            }

            let unplaced: Vec<usize> = (0..self.candidates.len())
                .filter(|&i| !self.placed[i])
                .collect();
            let complete = unplaced.is_empty();
            if !complete {
                if unplaced
                    .iter()
                    .all(|&i| self.dead_at[i] == Some(self.version))
                {
                    failures = stall_limit;
                } else {
                    let idx = self.sample(&unplaced);
                    if self.try_extend(idx) {
                        failures = 0;
                        if let Some(reason) = self.satisfied() {
                            return self.finish_current(reason);
                        }
                    } else {
                        failures += 1;
                    }
                }
            }

            if complete || failures >= stall_limit {
                failures = 0;
                stalls += 1;
                if complete || stalls > self.config.removals_per_build {
                    if self.rebuilds >= self.config.max_rebuilds {
                        return self.finish_best(StopReason::RebuildLimit);
                    }
                    self.rebuilds += 1;
                    stalls = 0;
                    self.clear();
                } else {
                    self.remove_recent();
                }
            }
        }
    }

    fn sample(&mut self, pool: &[usize]) -> usize {
        let weights = pool.iter().map(|&i| self.candidates[i].weight);
        let dist = WeightedIndex::new(weights).expect("weights are positive");
        pool[dist.sample(&mut self.rng)]
    }

    fn in_band(&self, row: usize, col: usize) -> bool {
        let (rows, cols) = (self.config.rows, self.config.cols);
        (rows / 3..rows - rows / 3).contains(&row) && (cols / 3..cols - cols / 3).contains(&col)
    }

    fn place_first(&mut self) {
        let pool: Vec<usize> = (0..self.candidates.len()).collect();
        let idx = self.sample(&pool);
        let letters = &self.candidates[idx].letters;
        let slots = self
            .board
            .legal_slots(letters)
            .expect("candidate fits the grid");
        let len = letters.len();
        let mut central: Vec<Slot> = slots
            .iter()
            .copied()
            .filter(|s| self.in_band(s.row, s.col))
            .collect();
        if central.is_empty() {
            central = slots
                .iter()
                .copied()
                .filter(|s| {
                    (0..len).any(|i| {
                        let (r, c) = s.cell(i);
                        self.in_band(r, c)
                    })
                })
                .collect();
        }
        if central.is_empty() {
            central = slots;
        }
        let slot = central[self.rng.gen_range(0..central.len())];
        self.commit(idx, slot);
    }

    /// Places candidate `idx` at its best-scoring legal slot, if any.
    fn try_extend(&mut self, idx: usize) -> bool {
        if self.dead_at[idx] == Some(self.version) {
            return false;
        }
        let letters = &self.candidates[idx].letters;
        let slots = self
            .board
            .legal_slots(letters)
            .expect("candidate fits the grid");
        if slots.is_empty() {
            self.dead_at[idx] = Some(self.version);
            return false;
        }
        let scored: Vec<(Slot, f64)> = slots
            .iter()
            .map(|&s| (s, self.board.score_with(letters, s).score))
            .collect();
        let top = scored
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<Slot> = scored
            .iter()
            .filter(|&&(_, s)| top - s <= TIE_EPSILON)
            .map(|&(slot, _)| slot)
            .collect();
        let slot = ties[self.rng.gen_range(0..ties.len())];
        self.commit(idx, slot);
        true
    }

    fn commit(&mut self, idx: usize, slot: Slot) {
        let cand = &self.candidates[idx];
        self.board
            .place(Placement::new(cand.id.clone(), cand.letters.clone(), slot));
        self.placed[idx] = true;
        self.placed_order.push(idx);
        self.version += 1;
        let score = self.board.score();
        if self
            .best
            .as_ref()
            .is_none_or(|(b, _)| score.score > b.score)
        {
            self.best = Some((score, self.board.clone()));
        }
    }

    fn remove_recent(&mut self) {
        for _ in 0..self.config.remove_batch {
            if self.board.pop().is_none() {
                break;
            }
            let idx = self
                .placed_order
                .pop()
                .expect("placement order tracks the board");
            self.placed[idx] = false;
        }
        self.version += 1;
    }

    fn clear(&mut self) {
        self.board.clear();
        self.placed_order.clear();
        self.placed.iter_mut().for_each(|p| *p = false);
        self.version += 1;
    }

    fn satisfied(&self) -> Option<StopReason> {
        let n = self.board.placements().len();
        if n >= self.config.min_answers {
            return Some(StopReason::MinAnswersMet);
        }
        if n >= 2 && self.board.score().fr >= self.config.min_fill_ratio {
            return Some(StopReason::FillRatioMet);
        }
        None
    }

    fn finish_current(self, stop_reason: StopReason) -> CrosswordLayout {
        layout_of(&self.board, stop_reason)
    }

    fn finish_best(self, stop_reason: StopReason) -> CrosswordLayout {
        let (_, board) = self.best.expect("first placement always succeeds");
        layout_of(&board, stop_reason)
    }
}

fn layout_of(board: &Board, stop_reason: StopReason) -> CrosswordLayout {
    CrosswordLayout {
        grid: board.grid().clone(),
        placements: board.placements().to_vec(),
        score: board.score(),
        stop_reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(answers: &[&str]) -> Vec<ClueAnswerPair> {
        answers
            .iter()
            .enumerate()
            .map(|(i, a)| ClueAnswerPair::new(format!("a{i}"), "تعريف", a, "test"))
            .collect()
    }

    #[test]
    fn dedup_leaves_too_few() {
        let cfg = GeneratorConfig::new(5, 5);
        let err = generate(&cfg, &pairs(&["اب", "اب"]), &BTreeSet::new()).unwrap_err();
        assert_eq!(
            err,
            SchemaError::InsufficientAnswers {
                needed: 2,
                available: 1
            }
        );
    }

    #[test]
    fn nothing_fits() {
        let cfg = GeneratorConfig::new(3, 3);
        let err = generate(&cfg, &pairs(&["مدرسة", "مكتبة"]), &BTreeSet::new()).unwrap_err();
        assert_eq!(err, SchemaError::NoLayoutFound);
    }

    #[test]
    fn crossing_pair_meets_min_answers() {
        let cfg = GeneratorConfig::new(7, 7);
        let layout = generate(&cfg, &pairs(&["بيت", "ليل"]), &BTreeSet::new()).unwrap();
        assert_eq!(layout.stop_reason, StopReason::MinAnswersMet);
        assert_eq!(layout.score.fw, 2);
        assert!(layout.score.ll >= 1);
    }

    #[test]
    fn first_word_starts_in_central_band() {
        for seed in 0..20 {
            let mut cfg = GeneratorConfig::new(9, 9);
            cfg.seed = seed;
            let layout = generate(&cfg, &pairs(&["بيت", "ليل"]), &BTreeSet::new()).unwrap();
            let first = &layout.placements[0];
            assert!(
                (3..6).contains(&first.row) && (3..6).contains(&first.col),
                "seed {seed}: {first:?}"
            );
        }
    }

    #[test]
    fn invalid_config() {
        let mut cfg = GeneratorConfig::new(5, 5);
        cfg.min_answers = 1;
        assert!(matches!(
            generate(&cfg, &pairs(&["بيت", "ليل"]), &BTreeSet::new()),
            Err(SchemaError::InvalidConfig(_))
        ));
    }
}
