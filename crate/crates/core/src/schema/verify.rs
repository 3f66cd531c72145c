use std::fmt;

use super::{score_layout, CrosswordLayout, Direction, LayoutScore};

/// One way a layout can be wrong.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    OutOfBounds {
        answer_id: String,
    },
    TooShort {
        answer_id: String,
    },
    LetterMismatch {
        answer_id: String,
        row: usize,
        col: usize,
    },
    UncoveredLetter {
        row: usize,
        col: usize,
    },
    /// A maximal run of two or more letters that is not exactly one placed word.
    GhostRun {
        row: usize,
        col: usize,
        direction: Direction,
        len: usize,
    },
    Disconnected {
        components: usize,
    },
    ScoreMismatch {
        stored: LayoutScore,
        recomputed: LayoutScore,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfBounds { answer_id } => {
                write!(f, "placement {answer_id} leaves the grid")
            }
            Violation::TooShort { answer_id } => {
                write!(f, "placement {answer_id} is shorter than 2 letters")
            }
            Violation::LetterMismatch {
                answer_id,
                row,
                col,
            } => {
                write!(
                    f,
                    "placement {answer_id} disagrees with the grid at ({row}, {col})"
                )
            }
            Violation::UncoveredLetter { row, col } => {
                write!(f, "letter at ({row}, {col}) belongs to no placement")
            }
            Violation::GhostRun {
                row,
                col,
                direction,
                len,
            } => {
                write!(
                    f,
                    "{direction} run of {len} at ({row}, {col}) is not a placed word"
                )
            }
            Violation::Disconnected { components } => {
                write!(f, "layout splits into {components} islands")
            }
            Violation::ScoreMismatch { stored, recomputed } => {
                write!(
                    f,
                    "stored score {stored:?} differs from recomputed {recomputed:?}"
                )
            }
        }
    }
}

/// Checks bounds, letters, soundness (every maximal run of two or more
/// letters is exactly one placed word), connectivity, and the stored score.
/// An empty result means the layout is valid.
pub fn verify_layout(layout: &CrosswordLayout) -> Vec<Violation> {
    let grid = &layout.grid;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut violations = Vec::new();
    let mut covered = vec![false; rows * cols];
    let mut letters_ok = true;

    for p in &layout.placements {
        if p.len() < 2 {
            violations.push(Violation::TooShort {
                answer_id: p.answer_id.clone(),
            });
        }
        if !p.in_bounds(rows, cols) {
            violations.push(Violation::OutOfBounds {
                answer_id: p.answer_id.clone(),
            });
            letters_ok = false;
            continue;
        }
        for (r, c, ch) in p.cells() {
            covered[r * cols + c] = true;
            if grid.get(r, c) != Some(ch) {
                violations.push(Violation::LetterMismatch {
                    answer_id: p.answer_id.clone(),
                    row: r,
                    col: c,
                });
                letters_ok = false;
            }
        }
    }

    for r in 0..rows {
        for c in 0..cols {
            if grid.get(r, c).is_some() && !covered[r * cols + c] {
                violations.push(Violation::UncoveredLetter { row: r, col: c });
            }
        }
    }

    for direction in [Direction::Across, Direction::Down] {
        for (row, col, len) in runs(layout, direction) {
            let matches = layout
                .placements
                .iter()
                .filter(|p| {
                    p.direction == direction && p.row == row && p.col == col && p.len() == len
                })
                .count();
            if matches != 1 {
                violations.push(Violation::GhostRun {
                    row,
                    col,
                    direction,
                    len,
                });
            }
        }
    }

    let components = count_components(layout);
    if components > 1 {
        violations.push(Violation::Disconnected { components });
    }

    if letters_ok {
        if let Ok(recomputed) = score_layout(grid, &layout.placements) {
            if !scores_match(&layout.score, &recomputed) {
                violations.push(Violation::ScoreMismatch {
                    stored: layout.score,
                    recomputed,
                });
            }
        }
    }
    violations
}

fn scores_match(a: &LayoutScore, b: &LayoutScore) -> bool {
    const TOL: f64 = 1e-12;
    a.fw == b.fw
        && a.ll == b.ll
        && (a.fr - b.fr).abs() <= TOL
        && (a.lr - b.lr).abs() <= TOL
        && (a.score - b.score).abs() <= TOL
}

/// Maximal runs of >= 2 letters as (row, col, len).
fn runs(layout: &CrosswordLayout, direction: Direction) -> Vec<(usize, usize, usize)> {
    let grid = &layout.grid;
    let (outer, inner) = match direction {
        Direction::Across => (grid.rows(), grid.cols()),
        Direction::Down => (grid.cols(), grid.rows()),
    };
    let at = |o: usize, i: usize| match direction {
        Direction::Across => grid.get(o, i),
        Direction::Down => grid.get(i, o),
    };
    let mut out = Vec::new();
    for o in 0..outer {
        let mut i = 0;
        while i < inner {
            if at(o, i).is_none() {
                i += 1;
                continue;
            }
            let start = i;
            while i < inner && at(o, i).is_some() {
                i += 1;
            }
            if i - start >= 2 {
                out.push(match direction {
                    Direction::Across => (o, start, i - start),
                    Direction::Down => (start, o, i - start),
                });
            }
        }
    }
    out
}

/// Placements are linked when they share a cell.
fn count_components(layout: &CrosswordLayout) -> usize {
    let n = layout.placements.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    let cols = layout.grid.cols();
    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for (k, p) in layout.placements.iter().enumerate() {
        for (r, c, _) in p.cells() {
            if let Some(&other) = owner.get(&(r * cols + c)) {
                let (a, b) = (find(&mut parent, k), find(&mut parent, other));
                parent[a] = b;
            } else {
                owner.insert(r * cols + c, k);
            }
        }
    }
    (0..n).filter(|&k| find(&mut parent, k) == k).count()
}

#[cfg(test)]
mod tests {
    use super::super::{Grid, Placement, Slot, StopReason};
    use super::*;

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
    fn valid_cross() {
        let l = layout(
            5,
            5,
            vec![
                p("a", "بيت", 1, 0, Direction::Across),
                p("b", "ليل", 0, 1, Direction::Down),
            ],
        );
        assert!(verify_layout(&l).is_empty());
    }

    #[test]
    fn adjacent_parallel_word_makes_ghost_run() {
        let l = layout(
            5,
            5,
            vec![
                p("a", "بيت", 1, 0, Direction::Across),
                p("b", "ليل", 0, 1, Direction::Down),
                p("c", "لم", 2, 1, Direction::Across),
            ],
        );
        // "لم" at (2,1)-(2,2) sits under "يت": column 2 now holds ت over م,
        // a two-letter down run nobody placed.
        let v = verify_layout(&l);
        assert!(
            v.contains(&Violation::GhostRun {
                row: 1,
                col: 2,
                direction: Direction::Down,
                len: 2
            }),
            "{v:?}"
        );
    }

    #[test]
    fn score_mismatch_detected() {
        let mut l = layout(
            5,
            5,
            vec![
                p("a", "بيت", 1, 0, Direction::Across),
                p("b", "ليل", 0, 1, Direction::Down),
            ],
        );
        l.score.score += 0.5;
        assert!(matches!(
            verify_layout(&l).as_slice(),
            [Violation::ScoreMismatch { .. }]
        ));
    }

    #[test]
    fn islands_detected() {
        let l = layout(
            5,
            5,
            vec![
                p("a", "بيت", 0, 0, Direction::Across),
                p("b", "ليل", 4, 0, Direction::Across),
            ],
        );
        assert_eq!(
            verify_layout(&l),
            vec![Violation::Disconnected { components: 2 }]
        );
    }

    #[test]
    fn uncovered_letter() {
        let mut l = layout(3, 3, vec![p("a", "بيت", 0, 0, Direction::Across)]);
        l.grid.set(2, 2, Some('x'));
        l.score = score_layout(&l.grid, &l.placements).unwrap();
        assert_eq!(
            verify_layout(&l),
            vec![Violation::UncoveredLetter { row: 2, col: 2 }]
        );
    }
}
