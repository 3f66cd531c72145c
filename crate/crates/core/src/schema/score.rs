use super::{Grid, LayoutScore, Placement, SchemaError};

/// What "total letter count" means in the LR denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetterCountPolicy {
    /// Number of filled grid cells. Shared cells count once.
    FilledCells,
    /// Sum of placed word lengths. Shared cells count once per word.
    WordLetters,
}

/// The policy used everywhere in this crate, including the generator.
pub const LETTER_COUNT_POLICY: LetterCountPolicy = LetterCountPolicy::FilledCells;

/// Scores a layout from scratch.
///
/// LL is the number of cells covered by two or more placements. FR uses the
/// smallest rectangle covering every filled cell.
pub fn score_layout(grid: &Grid, placements: &[Placement]) -> Result<LayoutScore, SchemaError> {
    score_layout_with(grid, placements, LETTER_COUNT_POLICY)
}

pub fn score_layout_with(
    grid: &Grid,
    placements: &[Placement],
    policy: LetterCountPolicy,
) -> Result<LayoutScore, SchemaError> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut coverage = vec![0u32; rows * cols];
    for p in placements {
        if !p.in_bounds(rows, cols) {
            return Err(SchemaError::InconsistentState(format!(
                "placement {} out of bounds",
                p.answer_id
            )));
        }
        for (r, c, ch) in p.cells() {
            if grid.get(r, c) != Some(ch) {
                return Err(SchemaError::InconsistentState(format!(
                    "placement {} has {ch} at ({r}, {c}) but the grid does not",
                    p.answer_id
                )));
            }
            coverage[r * cols + c] += 1;
        }
    }
    let ll = coverage.iter().filter(|&&n| n >= 2).count();
    let filled = grid.filled_count();
    let area = grid
        .bounding_box()
        .map_or(0, |(r0, r1, c0, c1)| (r1 - r0 + 1) * (c1 - c0 + 1));
    let mut score = LayoutScore::from_counts(placements.len(), ll, filled, area);
    if policy == LetterCountPolicy::WordLetters && filled > 0 {
        let letters: usize = placements.iter().map(Placement::len).sum();
        score.lr = ll as f64 / letters as f64;
        score.score = (score.fw as f64 + 0.5 * ll as f64) * score.fr * score.lr;
    }
    Ok(score)
}
