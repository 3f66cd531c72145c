//! Puzzle output: clue numbering, right-to-left text, SVG, and the puzzle
//! JSON bundle read by the review UI.
//!
//! Layouts are stored left-to-right (an across word's letters run toward
//! higher column indices). Display mirrors the columns, so internal column
//! `cols - 1` is drawn leftmost and an across word starts at its rightmost
//! cell. Puzzle JSON keeps internal coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClueAnswerPair;
use crate::schema::{CrosswordLayout, Direction, LayoutScore};

pub const BLOCK_GLYPH: &str = "■";
pub const HIDDEN_GLYPH: &str = "_";

/// SVG cell edge in user units.
const CELL: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("no clue for answer {0}")]
    MissingClue(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
    Json,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "svg" => Ok(RenderFormat::Svg),
            "json" => Ok(RenderFormat::Json),
            other => Err(format!(
                "unknown format {other:?} (expected text, svg, or json)"
            )),
        }
    }
}

/// Internal column shown at display position `display_col` (and back).
pub fn mirror_col(col: usize, cols: usize) -> usize {
    cols - 1 - col
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberedCell {
    pub row: usize,
    pub col: usize,
    pub num: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Numbering {
    /// Numbered cells in scan order.
    pub cells: Vec<NumberedCell>,
    /// Clue number of each placement, by placement index.
    pub by_placement: Vec<u32>,
    /// (number, placement index), ascending.
    pub across: Vec<(u32, usize)>,
    pub down: Vec<(u32, usize)>,
}

/// Scans rows top to bottom and, within a row, display order (right to
/// left). Each cell where a placement starts takes the next number; an
/// across and a down word starting on one cell share it.
pub fn number_clues(layout: &CrosswordLayout) -> Result<Numbering, RenderError> {
    let grid = &layout.grid;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut starts: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, p) in layout.placements.iter().enumerate() {
        if !p.in_bounds(rows, cols) {
            return Err(RenderError::InvalidLayout(format!(
                "placement {} leaves the grid",
                p.answer_id
            )));
        }
        if p.cells().any(|(r, c, ch)| grid.get(r, c) != Some(ch)) {
            return Err(RenderError::InvalidLayout(format!(
                "placement {} disagrees with the grid",
                p.answer_id
            )));
        }
        let at = starts.entry((p.row, p.col)).or_default();
        if at
            .iter()
            .any(|&j| layout.placements[j].direction == p.direction)
        {
            return Err(RenderError::InvalidLayout(format!(
                "two {} words start at ({}, {})",
                p.direction, p.row, p.col
            )));
        }
        at.push(i);
    }

    let mut numbering = Numbering {
        by_placement: vec![0; layout.placements.len()],
        ..Default::default()
    };
    let mut next = 1;
    for row in 0..rows {
        for col in (0..cols).rev() {
            let Some(here) = starts.get(&(row, col)) else {
                continue;
            };
            numbering.cells.push(NumberedCell {
                row,
                col,
                num: next,
            });
            for &i in here {
                numbering.by_placement[i] = next;
                match layout.placements[i].direction {
                    Direction::Across => numbering.across.push((next, i)),
                    Direction::Down => numbering.down.push((next, i)),
                }
            }
            next += 1;
        }
    }
    Ok(numbering)
}

/// One line per row, cells separated by spaces, in display order.
pub fn render_text(layout: &CrosswordLayout, reveal: bool) -> String {
    let grid = &layout.grid;
    let mut out = String::new();
    for row in 0..grid.rows() {
        let line: Vec<String> = (0..grid.cols())
            .rev()
            .map(|col| match grid.get(row, col) {
                None => BLOCK_GLYPH.to_string(),
                Some(ch) if reveal => ch.to_string(),
                Some(_) => HIDDEN_GLYPH.to_string(),
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// SVG 1.1 grid. Letters are `<text class="letter">` (only when `reveal`),
/// clue numbers are `<text class="num">` in each cell's top-right corner.
pub fn export_svg(layout: &CrosswordLayout, numbering: &Numbering, reveal: bool) -> String {
    let grid = &layout.grid;
    let (rows, cols) = (grid.rows(), grid.cols());
    let (w, h) = (cols * CELL, rows * CELL);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" direction="rtl">"#
    );
    let _ = writeln!(
        svg,
        "<style>.block{{fill:#222}}.cell{{fill:#fff;stroke:#222;stroke-width:1}}.letter{{font:24px sans-serif;text-anchor:middle;dominant-baseline:central}}.num{{font:10px sans-serif;text-anchor:end}}</style>"
    );
    for row in 0..rows {
        for col in 0..cols {
            let x = mirror_col(col, cols) * CELL;
            let y = row * CELL;
            let class = if grid.get(row, col).is_some() {
                "cell"
            } else {
                "block"
            };
            let _ = writeln!(
                svg,
                r#"<rect class="{class}" x="{x}" y="{y}" width="{CELL}" height="{CELL}"/>"#
            );
        }
    }
    for n in &numbering.cells {
        let x = mirror_col(n.col, cols) * CELL + CELL - 3;
        let y = n.row * CELL + 11;
        let _ = writeln!(svg, r#"<text class="num" x="{x}" y="{y}">{}</text>"#, n.num);
    }
    if reveal {
        for row in 0..rows {
            for col in 0..cols {
                let Some(ch) = grid.get(row, col) else {
                    continue;
                };
                let x = mirror_col(col, cols) * CELL + CELL / 2;
                let y = row * CELL + CELL / 2 + 2;
                let _ = writeln!(
                    svg,
                    r#"<text class="letter" x="{x}" y="{y}">{}</text>"#,
                    escape_xml(&ch.to_string())
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleGrid {
    pub rows: usize,
    pub cols: usize,
    /// Empty cells as `[row, col]`.
    pub blocks: Vec<[usize; 2]>,
    pub numbers: Vec<NumberedCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClueEntry {
    pub num: u32,
    pub clue: String,
    pub len: usize,
    pub answer_id: String,
    pub row: usize,
    pub col: usize,
}

/// The bundle the review UI renders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleJson {
    pub grid: PuzzleGrid,
    pub across: Vec<ClueEntry>,
    pub down: Vec<ClueEntry>,
    /// Rows of single letters, `"#"` for empty cells, internal column order.
    pub solution: Vec<Vec<String>>,
    pub score: LayoutScore,
}

pub fn export_puzzle_json(
    layout: &CrosswordLayout,
    pairs: &[ClueAnswerPair],
    numbering: &Numbering,
) -> Result<PuzzleJson, RenderError> {
    let clues: HashMap<&str, &str> = pairs
        .iter()
        .map(|p| (p.id.as_str(), p.clue.as_str()))
        .collect();
    let entries = |list: &[(u32, usize)]| -> Result<Vec<ClueEntry>, RenderError> {
        list.iter()
            .map(|&(num, i)| {
                let p = &layout.placements[i];
                let clue = clues
                    .get(p.answer_id.as_str())
                    .ok_or_else(|| RenderError::MissingClue(p.answer_id.clone()))?;
                Ok(ClueEntry {
                    num,
                    clue: clue.to_string(),
                    len: p.len(),
                    answer_id: p.answer_id.clone(),
                    row: p.row,
                    col: p.col,
                })
            })
            .collect()
    };
    let grid = &layout.grid;
    let mut blocks = Vec::new();
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            if grid.get(row, col).is_none() {
                blocks.push([row, col]);
            }
        }
    }
    Ok(PuzzleJson {
        grid: PuzzleGrid {
            rows: grid.rows(),
            cols: grid.cols(),
            blocks,
            numbers: numbering.cells.clone(),
        },
        across: entries(&numbering.across)?,
        down: entries(&numbering.down)?,
        solution: crate::schema::json::cell_rows(grid),
        score: layout.score,
    })
}

/// Numbers the layout and renders it in `format`.
pub fn render(
    layout: &CrosswordLayout,
    pairs: &[ClueAnswerPair],
    format: RenderFormat,
    reveal: bool,
) -> Result<String, RenderError> {
    match format {
        RenderFormat::Text => Ok(render_text(layout, reveal)),
        RenderFormat::Svg => Ok(export_svg(layout, &number_clues(layout)?, reveal)),
        RenderFormat::Json => {
            let puzzle = export_puzzle_json(layout, pairs, &number_clues(layout)?)?;
            Ok(serde_json::to_string(&puzzle).expect("puzzle serializes"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{score_layout, Grid, Placement, Slot, StopReason};

    fn layout(rows: usize, cols: usize, placements: Vec<Placement>) -> CrosswordLayout {
        let grid = Grid::from_placements(rows, cols, &placements).unwrap();
        let score = score_layout(&grid, &placements).unwrap();
        CrosswordLayout {
            grid,
            placements,
            score,
            stop_reason: StopReason::MinAnswersMet,
        }
    }

    fn p(id: &str, w: &str, r: usize, c: usize, d: Direction) -> Placement {
        Placement::new(id, w.chars().collect(), Slot::new(r, c, d))
    }

    #[test]
    fn empty_grid_text() {
        assert_eq!(render_text(&layout(2, 2, vec![]), true), "■ ■\n■ ■\n");
    }

    #[test]
    fn rtl_mirroring() {
        let l = layout(1, 2, vec![p("a", "در", 0, 0, Direction::Across)]);
        let line = render_text(&l, true);
        // د is internal column 0, so it is the last glyph written: rightmost.
        assert_eq!(line, "ر د\n");
        assert_eq!(render_text(&l, false), "_ _\n");
        let n = number_clues(&l).unwrap();
        assert_eq!(
            n.cells,
            vec![NumberedCell {
                row: 0,
                col: 0,
                num: 1
            }]
        );
    }

    #[test]
    fn shared_start_number() {
        let l = layout(
            3,
            3,
            vec![
                p("a", "بيت", 0, 0, Direction::Across),
                p("b", "بحر", 0, 0, Direction::Down),
            ],
        );
        let n = number_clues(&l).unwrap();
        assert_eq!(n.cells.len(), 1);
        assert_eq!(n.by_placement, vec![1, 1]);
    }

    #[test]
    fn missing_clue() {
        let l = layout(3, 3, vec![p("a", "بيت", 0, 0, Direction::Across)]);
        let n = number_clues(&l).unwrap();
        assert_eq!(
            export_puzzle_json(&l, &[], &n),
            Err(RenderError::MissingClue("a".into()))
        );
    }

    #[test]
    fn svg_letters_only_when_revealed() {
        let l = layout(
            3,
            3,
            vec![
                p("a", "بيت", 1, 0, Direction::Across),
                p("b", "ليل", 0, 1, Direction::Down),
            ],
        );
        let n = number_clues(&l).unwrap();
        assert_eq!(
            export_svg(&l, &n, true)
                .matches(r#"class="letter""#)
                .count(),
            5
        );
        assert_eq!(
            export_svg(&l, &n, false)
                .matches(r#"class="letter""#)
                .count(),
            0
        );
    }
}
