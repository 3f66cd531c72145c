//! Crossword layout construction.
//!
//! A layout is an open grid (no pre-placed blocks) holding answers across and
//! down. Layouts are scored as
//!
//! ```text
//! score = (FW + 0.5 * LL) * FR * LR
//! ```
//!
//! where FW counts placed words, LL counts cells shared by two words, FR is
//! filled cells over the area of the smallest rectangle covering them, and LR
//! is LL over filled cells. [`generate`] searches for a high-scoring layout by
//! seeded random construction with removals and full rebuilds.
//!
//! Internally "across" runs toward increasing column index. Right-to-left
//! display is the renderer's job.

mod board;
mod generator;
pub(crate) mod json;
mod legal;
mod score;
mod verify;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use board::Board;
pub use generator::{generate, generate_parallel, RNG_ALGORITHM};
pub use legal::legal_placements;
pub use score::{score_layout, score_layout_with, LetterCountPolicy, LETTER_COUNT_POLICY};
pub use verify::{verify_layout, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Across,
    Down,
}

impl Direction {
    /// (row step, column step)
    pub fn step(self) -> (usize, usize) {
        match self {
            Direction::Across => (0, 1),
            Direction::Down => (1, 0),
        }
    }

    pub fn other(self) -> Direction {
        match self {
            Direction::Across => Direction::Down,
            Direction::Down => Direction::Across,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Across => "across",
            Direction::Down => "down",
        })
    }
}

/// Where a word would go: first-letter coordinates plus direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub row: usize,
    pub col: usize,
    pub direction: Direction,
}

impl Slot {
    pub fn new(row: usize, col: usize, direction: Direction) -> Self {
        Slot {
            row,
            col,
            direction,
        }
    }

    /// Cell `i` of a word starting here.
    pub fn cell(&self, i: usize) -> (usize, usize) {
        let (dr, dc) = self.direction.step();
        (self.row + dr * i, self.col + dc * i)
    }

    pub fn fits(&self, len: usize, rows: usize, cols: usize) -> bool {
        let (dr, dc) = self.direction.step();
        len > 0 && self.row + dr * (len - 1) < rows && self.col + dc * (len - 1) < cols
    }
}

/// A word placed on the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub answer_id: String,
    pub letters: Vec<char>,
    pub row: usize,
    pub col: usize,
    pub direction: Direction,
}

impl Placement {
    pub fn new(answer_id: impl Into<String>, letters: Vec<char>, slot: Slot) -> Self {
        Placement {
            answer_id: answer_id.into(),
            letters,
            row: slot.row,
            col: slot.col,
            direction: slot.direction,
        }
    }

    pub fn slot(&self) -> Slot {
        Slot::new(self.row, self.col, self.direction)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `(row, col, letter)` for each letter in reading order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, char)> + '_ {
        let slot = self.slot();
        self.letters.iter().enumerate().map(move |(i, &ch)| {
            let (r, c) = slot.cell(i);
            (r, c, ch)
        })
    }

    pub fn in_bounds(&self, rows: usize, cols: usize) -> bool {
        self.slot().fits(self.letters.len(), rows, cols)
    }
}

/// Row-major cells; `None` is an empty (block) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Option<char>>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize) -> Self {
        Grid {
            rows,
            cols,
            cells: vec![None; rows * cols],
        }
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Option<char>>) -> Option<Self> {
        (cells.len() == rows * cols).then_some(Grid { rows, cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<char> {
        if row < self.rows && col < self.cols {
            self.cells[row * self.cols + col]
        } else {
            None
        }
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Option<char>) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn cells(&self) -> &[Option<char>] {
        &self.cells
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_blank(&self) -> bool {
        self.cells.iter().all(Option::is_none)
    }

    /// Inclusive `(min_row, max_row, min_col, max_col)` of the filled cells.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c).is_some() {
                    bbox = Some(match bbox {
                        None => (r, r, c, c),
                        Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
                    });
                }
            }
        }
        bbox
    }

    /// Grid holding exactly the letters of `placements`. Fails on a clash or
    /// an out-of-bounds placement.
    pub fn from_placements(
        rows: usize,
        cols: usize,
        placements: &[Placement],
    ) -> Result<Self, SchemaError> {
        let mut grid = Grid::new(rows, cols);
        for p in placements {
            if !p.in_bounds(rows, cols) {
                return Err(SchemaError::InconsistentState(format!(
                    "placement {} out of bounds",
                    p.answer_id
                )));
            }
            for (r, c, ch) in p.cells() {
                match grid.get(r, c) {
                    Some(existing) if existing != ch => {
                        return Err(SchemaError::InconsistentState(format!(
                            "placements disagree at ({r}, {c}): {existing} vs {ch}"
                        )))
                    }
                    _ => grid.set(r, c, Some(ch)),
                }
            }
        }
        Ok(grid)
    }
}

/// Score components and the combined score.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LayoutScore {
    pub fw: usize,
    pub ll: usize,
    pub fr: f64,
    pub lr: f64,
    pub score: f64,
}

impl LayoutScore {
    /// Builds the score from raw counts. All ratios are zero on an empty grid.
    pub fn from_counts(fw: usize, ll: usize, filled: usize, bbox_area: usize) -> Self {
        if filled == 0 || bbox_area == 0 {
            return LayoutScore {
                fw,
                ll,
                ..Default::default()
            };
        }
        let fr = filled as f64 / bbox_area as f64;
        let lr = ll as f64 / filled as f64;
        let score = (fw as f64 + 0.5 * ll as f64) * fr * lr;
        LayoutScore {
            fw,
            ll,
            fr,
            lr,
            score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MinAnswersMet,
    FillRatioMet,
    RebuildLimit,
    TimeLimit,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MinAnswersMet => "min_answers_met",
            StopReason::FillRatioMet => "fill_ratio_met",
            StopReason::RebuildLimit => "rebuild_limit",
            StopReason::TimeLimit => "time_limit",
        }
    }
}

/// Search parameters. The four stopping criteria are `min_answers`,
/// `min_fill_ratio`, `max_rebuilds`, and `max_duration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub rows: usize,
    pub cols: usize,
    pub min_answers: usize,
    pub min_fill_ratio: f64,
    pub max_rebuilds: u32,
    /// Seconds.
    pub max_duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_preferred_weight")]
    pub preferred_weight: f64,
    #[serde(default = "default_stall_limit")]
    pub stall_limit: u32,
    #[serde(default = "default_remove_batch")]
    pub remove_batch: usize,
    /// Stalls tolerated within one build before the grid is cleared.
    #[serde(default = "default_removals_per_build")]
    pub removals_per_build: u32,
}

fn default_preferred_weight() -> f64 {
    3.0
}
fn default_stall_limit() -> u32 {
    50
}
fn default_remove_batch() -> usize {
    1
}
fn default_removals_per_build() -> u32 {
    3
}

impl GeneratorConfig {
    pub fn new(rows: usize, cols: usize) -> Self {
        GeneratorConfig {
            rows,
            cols,
            min_answers: 2,
            min_fill_ratio: 1.0,
            max_rebuilds: 100,
            max_duration: 10.0,
            seed: 0,
            preferred_weight: default_preferred_weight(),
            stall_limit: default_stall_limit(),
            remove_batch: default_remove_batch(),
            removals_per_build: default_removals_per_build(),
        }
    }

    pub fn duration(&self) -> Duration {
        Duration::from_secs_f64(self.max_duration.max(0.0))
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let bad = |msg: &str| Err(SchemaError::InvalidConfig(msg.to_string()));
        if self.rows == 0 || self.cols == 0 {
            return bad("rows and cols must be positive");
        }
        if self.min_answers < 2 {
            return bad("min_answers must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.min_fill_ratio) {
            return bad("min_fill_ratio must lie in [0, 1]");
        }
        if self.max_rebuilds == 0 {
            return bad("max_rebuilds must be positive");
        }
        if !self.max_duration.is_finite() || self.max_duration <= 0.0 {
            return bad("max_duration must be a positive number of seconds");
        }
        if !self.preferred_weight.is_finite() || self.preferred_weight < 1.0 {
            return bad("preferred_weight must be at least 1");
        }
        if self.stall_limit == 0 || self.remove_batch == 0 {
            return bad("stall_limit and remove_batch must be positive");
        }
        Ok(())
    }
}

/// A finished layout: grid, placements in insertion order, score, and the
/// criterion that ended the search.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosswordLayout {
    pub grid: Grid,
    pub placements: Vec<Placement>,
    pub score: LayoutScore,
    pub stop_reason: StopReason,
}

impl CrosswordLayout {
    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    /// Canonical JSON text, byte-stable for equal layouts.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemaError {
    #[error("word of length {len} does not fit a {rows}x{cols} grid")]
    WordTooLong {
        len: usize,
        rows: usize,
        cols: usize,
    },
    #[error("word of length {0} is too short to place (minimum 2)")]
    WordTooShort(usize),
    #[error("need at least {needed} distinct answers of length >= 2, got {available}")]
    InsufficientAnswers { needed: usize, available: usize },
    #[error("no answer fits the grid")]
    NoLayoutFound,
    #[error("inconsistent layout: {0}")]
    InconsistentState(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}
