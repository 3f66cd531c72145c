//! Layout JSON:
//!
//! ```json
//! {"rows":R,"cols":C,"cells":[["م","#",...],...],
//!  "placements":[{"answer_id":"...","row":r,"col":c,"dir":"across"}],
//!  "score":{"fw":..,"ll":..,"fr":..,"lr":..,"score":..},
//!  "stop_reason":"min_answers_met"}
//! ```
//!
//! `"#"` marks an empty cell. Placements carry no letters; on load each one
//! reads its letters from the grid, from its start cell up to the next empty
//! cell or the edge.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CrosswordLayout, Direction, Grid, LayoutScore, Placement, StopReason};

pub const EMPTY_CELL: &str = "#";

#[derive(Serialize, Deserialize)]
struct LayoutWire {
    rows: usize,
    cols: usize,
    cells: Vec<Vec<String>>,
    placements: Vec<PlacementWire>,
    score: LayoutScore,
    stop_reason: StopReason,
}

#[derive(Serialize, Deserialize)]
struct PlacementWire {
    answer_id: String,
    row: usize,
    col: usize,
    dir: Direction,
}

pub(crate) fn cell_rows(grid: &Grid) -> Vec<Vec<String>> {
    (0..grid.rows())
        .map(|r| {
            (0..grid.cols())
                .map(|c| {
                    grid.get(r, c)
                        .map_or_else(|| EMPTY_CELL.to_string(), |ch| ch.to_string())
                })
                .collect()
        })
        .collect()
}

impl Serialize for CrosswordLayout {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LayoutWire {
            rows: self.grid.rows(),
            cols: self.grid.cols(),
            cells: cell_rows(&self.grid),
            placements: self
                .placements
                .iter()
                .map(|p| PlacementWire {
                    answer_id: p.answer_id.clone(),
                    row: p.row,
                    col: p.col,
                    dir: p.direction,
                })
                .collect(),
            score: self.score,
            stop_reason: self.stop_reason,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CrosswordLayout {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = LayoutWire::deserialize(deserializer)?;
        if wire.cells.len() != wire.rows || wire.cells.iter().any(|row| row.len() != wire.cols) {
            return Err(D::Error::custom("cells do not match rows x cols"));
        }
        let mut flat = Vec::with_capacity(wire.rows * wire.cols);
        for cell in wire.cells.iter().flatten() {
            if cell == EMPTY_CELL {
                flat.push(None);
                continue;
            }
            let mut chars = cell.chars();
            match (chars.next(), chars.next()) {
                (Some(ch), None) => flat.push(Some(ch)),
                _ => {
                    return Err(D::Error::custom(format!(
                        "cell {cell:?} is not a single letter or \"#\""
                    )))
                }
            }
        }
        let grid = Grid::from_cells(wire.rows, wire.cols, flat).expect("length checked");
        let mut placements = Vec::with_capacity(wire.placements.len());
        for p in wire.placements {
            let (dr, dc) = p.dir.step();
            let mut letters = Vec::new();
            let (mut r, mut c) = (p.row, p.col);
            while let Some(ch) = grid.get(r, c) {
                letters.push(ch);
                r += dr;
                c += dc;
            }
            if letters.is_empty() {
                return Err(D::Error::custom(format!(
                    "placement {} starts on an empty cell",
                    p.answer_id
                )));
            }
            placements.push(Placement {
                answer_id: p.answer_id,
                letters,
                row: p.row,
                col: p.col,
                direction: p.dir,
            });
        }
        Ok(CrosswordLayout {
            grid,
            placements,
            score: wire.score,
            stop_reason: wire.stop_reason,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{score_layout, Slot};
    use super::*;

    #[test]
    fn round_trip() {
        let placements = vec![
            Placement::new(
                "a",
                "بيت".chars().collect(),
                Slot::new(1, 0, Direction::Across),
            ),
            Placement::new(
                "b",
                "ليل".chars().collect(),
                Slot::new(0, 1, Direction::Down),
            ),
        ];
        let grid = Grid::from_placements(3, 4, &placements).unwrap();
        let score = score_layout(&grid, &placements).unwrap();
        let layout = CrosswordLayout {
            grid,
            placements,
            score,
            stop_reason: StopReason::FillRatioMet,
        };
        let text = layout.to_json();
        assert!(text.starts_with("{\"rows\":3,\"cols\":4,\"cells\":[[\"#\",\"ل\",\"#\",\"#\"]"));
        assert!(text.contains("\"dir\":\"down\""));
        assert!(text.ends_with("\"stop_reason\":\"fill_ratio_met\"}"));
        let back = CrosswordLayout::from_json(&text).unwrap();
        assert_eq!(back, layout);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_bad_cells() {
        let bad = r##"{"rows":1,"cols":2,"cells":[["ab","#"]],"placements":[],"score":{"fw":0,"ll":0,"fr":0.0,"lr":0.0,"score":0.0},"stop_reason":"time_limit"}"##;
        assert!(CrosswordLayout::from_json(bad).is_err());
        let short = r##"{"rows":2,"cols":2,"cells":[["#","#"]],"placements":[],"score":{"fw":0,"ll":0,"fr":0.0,"lr":0.0,"score":0.0},"stop_reason":"time_limit"}"##;
        assert!(CrosswordLayout::from_json(short).is_err());
    }
}
