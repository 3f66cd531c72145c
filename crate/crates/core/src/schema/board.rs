use super::{Direction, Grid, LayoutScore, Placement, SchemaError, Slot};

/// A grid together with the placements that produced it and per-cell
/// coverage, kept in sync so score deltas are cheap to evaluate.
#[derive(Debug, Clone)]
pub struct Board {
    grid: Grid,
    across: Vec<bool>,
    down: Vec<bool>,
    placements: Vec<Placement>,
    filled: usize,
    linked: usize,
    bbox: Option<(usize, usize, usize, usize)>,
}

impl Board {
    pub fn new(rows: usize, cols: usize) -> Self {
        Board {
            grid: Grid::new(rows, cols),
            across: vec![false; rows * cols],
            down: vec![false; rows * cols],
            placements: Vec::new(),
            filled: 0,
            linked: 0,
            bbox: None,
        }
    }

    /// Rebuilds a board from existing placements. Rejects clashes, overlaps
    /// in the same direction, and placements that disagree with `grid`.
    pub fn from_parts(grid: &Grid, placements: &[Placement]) -> Result<Self, SchemaError> {
        let mut board = Board::new(grid.rows(), grid.cols());
        for p in placements {
            if !p.in_bounds(grid.rows(), grid.cols()) {
                return Err(SchemaError::InconsistentState(format!(
                    "placement {} out of bounds",
                    p.answer_id
                )));
            }
            for (r, c, ch) in p.cells() {
                if grid.get(r, c) != Some(ch) {
                    return Err(SchemaError::InconsistentState(format!(
                        "placement {} expects {ch} at ({r}, {c})",
                        p.answer_id
                    )));
                }
                if board.covered(r, c, p.direction) {
                    return Err(SchemaError::InconsistentState(format!(
                        "placement {} overlaps another {} word at ({r}, {c})",
                        p.answer_id, p.direction
                    )));
                }
            }
            board.place(p.clone());
        }
        if board.grid != *grid {
            return Err(SchemaError::InconsistentState(
                "grid has letters no placement covers".into(),
            ));
        }
        Ok(board)
    }

    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn linked(&self) -> usize {
        self.linked
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.grid.cols() + col
    }

    pub fn covered(&self, row: usize, col: usize, dir: Direction) -> bool {
        let i = self.idx(row, col);
        match dir {
            Direction::Across => self.across[i],
            Direction::Down => self.down[i],
        }
    }

    fn occupied(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.grid.rows()
            && (col as usize) < self.grid.cols()
            && self.grid.get(row as usize, col as usize).is_some()
    }

    pub fn score(&self) -> LayoutScore {
        LayoutScore::from_counts(
            self.placements.len(),
            self.linked,
            self.filled,
            bbox_area(self.bbox),
        )
    }

    /// Score the board would have after adding `word` at `slot`. The slot is
    /// assumed legal.
    pub fn score_with(&self, word: &[char], slot: Slot) -> LayoutScore {
        let mut new_cells = 0;
        let mut crossings = 0;
        for i in 0..word.len() {
            let (r, c) = slot.cell(i);
            if self.grid.get(r, c).is_some() {
                crossings += 1;
            } else {
                new_cells += 1;
            }
        }
        let (r1, c1) = slot.cell(word.len() - 1);
        let bbox = merge_bbox(self.bbox, (slot.row, r1, slot.col, c1));
        LayoutScore::from_counts(
            self.placements.len() + 1,
            self.linked + crossings,
            self.filled + new_cells,
            bbox_area(Some(bbox)),
        )
    }

    /// Adds a placement without checking legality.
    pub fn place(&mut self, placement: Placement) {
        for (r, c, ch) in placement.cells() {
            let i = self.idx(r, c);
            let before = self.across[i] as usize + self.down[i] as usize;
            match placement.direction {
                Direction::Across => self.across[i] = true,
                Direction::Down => self.down[i] = true,
            }
            let after = self.across[i] as usize + self.down[i] as usize;
            if before == 0 {
                self.filled += 1;
                self.grid.set(r, c, Some(ch));
            } else if before == 1 && after == 2 {
                self.linked += 1;
            }
        }
        let (r1, c1) = placement.slot().cell(placement.len() - 1);
        self.bbox = Some(merge_bbox(
            self.bbox,
            (placement.row, r1, placement.col, c1),
        ));
        self.placements.push(placement);
    }

    /// Removes and returns the most recent placement.
    pub fn pop(&mut self) -> Option<Placement> {
        let placement = self.placements.pop()?;
        for (r, c, _) in placement.cells() {
            let i = self.idx(r, c);
            let before = self.across[i] as usize + self.down[i] as usize;
            match placement.direction {
                Direction::Across => self.across[i] = false,
                Direction::Down => self.down[i] = false,
            }
            let after = self.across[i] as usize + self.down[i] as usize;
            if after == 0 {
                self.filled -= 1;
                self.grid.set(r, c, None);
            } else if before == 2 {
                self.linked -= 1;
            }
        }
        self.bbox = self.grid.bounding_box();
        Some(placement)
    }

    pub fn clear(&mut self) {
        *self = Board::new(self.grid.rows(), self.grid.cols());
    }

    /// Whether `word` may go at `slot`:
    /// it fits; the cells just before and after it are empty; every occupied
    /// cell it crosses holds the same letter and is not already part of a word
    /// in the same direction; every new cell has empty neighbours across the
    /// word's axis (so no accidental perpendicular run appears); and, unless
    /// the board is empty, it shares at least one cell with the layout.
    pub fn is_legal(&self, word: &[char], slot: Slot) -> bool {
        let len = word.len();
        if !slot.fits(len, self.rows(), self.cols()) {
            return false;
        }
        let (dr, dc) = slot.direction.step();
        let (dr, dc) = (dr as isize, dc as isize);
        let (r0, c0) = (slot.row as isize, slot.col as isize);
        if self.occupied(r0 - dr, c0 - dc)
            || self.occupied(r0 + dr * len as isize, c0 + dc * len as isize)
        {
            return false;
        }
        // perpendicular offsets
        let (pr, pc) = (dc, dr);
        let mut shares = false;
        for (i, &ch) in word.iter().enumerate() {
            let (r, c) = slot.cell(i);
            match self.grid.get(r, c) {
                Some(existing) => {
                    if existing != ch || self.covered(r, c, slot.direction) {
                        return false;
                    }
                    shares = true;
                }
                None => {
                    let (ri, ci) = (r as isize, c as isize);
                    if self.occupied(ri - pr, ci - pc) || self.occupied(ri + pr, ci + pc) {
                        return false;
                    }
                }
            }
        }
        shares || self.placements.is_empty()
    }

    /// Every legal slot for `word`, sorted by (row, col, direction).
    pub fn legal_slots(&self, word: &[char]) -> Result<Vec<Slot>, SchemaError> {
        let (rows, cols) = (self.rows(), self.cols());
        if word.len() < 2 {
            return Err(SchemaError::WordTooShort(word.len()));
        }
        if word.len() > rows.max(cols) {
            return Err(SchemaError::WordTooLong {
                len: word.len(),
                rows,
                cols,
            });
        }
        let mut slots = Vec::new();
        if self.placements.is_empty() {
            for r in 0..rows {
                for c in 0..cols {
                    for dir in [Direction::Across, Direction::Down] {
                        let slot = Slot::new(r, c, dir);
                        if slot.fits(word.len(), rows, cols) {
                            slots.push(slot);
                        }
                    }
                }
            }
            return Ok(slots);
        }
        // Any legal slot shares a cell, so anchor candidates on matching
        // letters already on the board.
        for r in 0..rows {
            for c in 0..cols {
                let Some(ch) = self.grid.get(r, c) else {
                    continue;
                };
                for (i, _) in word.iter().enumerate().filter(|(_, &w)| w == ch) {
                    if c >= i && !self.covered(r, c, Direction::Across) {
                        slots.push(Slot::new(r, c - i, Direction::Across));
                    }
                    if r >= i && !self.covered(r, c, Direction::Down) {
                        slots.push(Slot::new(r - i, c, Direction::Down));
                    }
                }
            }
        }
        slots.sort();
        slots.dedup();
        slots.retain(|&slot| self.is_legal(word, slot));
        Ok(slots)
    }
}

fn merge_bbox(
    bbox: Option<(usize, usize, usize, usize)>,
    add: (usize, usize, usize, usize),
) -> (usize, usize, usize, usize) {
    match bbox {
        None => add,
        Some((r0, r1, c0, c1)) => (r0.min(add.0), r1.max(add.1), c0.min(add.2), c1.max(add.3)),
    }
}

fn bbox_area(bbox: Option<(usize, usize, usize, usize)>) -> usize {
    bbox.map_or(0, |(r0, r1, c0, c1)| (r1 - r0 + 1) * (c1 - c0 + 1))
}
