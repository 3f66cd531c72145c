use super::{Board, Grid, Placement, SchemaError, Slot};

/// All slots where `word` can legally join the layout described by `grid`
/// and `placements`. See [`Board::is_legal`] for the rules. On an empty
/// layout every in-bounds slot qualifies.
pub fn legal_placements(
    word: &[char],
    grid: &Grid,
    placements: &[Placement],
) -> Result<Vec<Slot>, SchemaError> {
    Board::from_parts(grid, placements)?.legal_slots(word)
}
