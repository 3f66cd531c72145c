#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cwgen::dataset::ClueAnswerPair;
use cwgen::schema::{CrosswordLayout, Direction};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn pairs(words: &[&str]) -> Vec<ClueAnswerPair> {
    words
        .iter()
        .enumerate()
        .map(|(i, w)| ClueAnswerPair::new(format!("w{i}"), "تعريف", w, "test"))
        .collect()
}

/// A few common letters, so random words cross often.
pub const SMALL_ALPHABET: [char; 5] = ['ا', 'ل', 'م', 'ن', 'ر'];

pub const ARABIC_LETTERS: [char; 28] = [
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع', 'غ',
    'ف', 'ق', 'ك', 'ل', 'م', 'ن', 'ه', 'و', 'ي',
];

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[char], min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// Distinct random words.
pub fn random_words(
    rng: &mut ChaCha8Rng,
    n: usize,
    alphabet: &[char],
    min: usize,
    max: usize,
) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let w = random_word(rng, alphabet, min, max);
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// The layout score computed from its definitions, on a plain char grid.
pub fn oracle_score(
    rows: usize,
    cols: usize,
    placed: &[(Vec<char>, usize, usize, Direction)],
) -> (usize, usize, f64, f64, f64) {
    let mut count = vec![0usize; rows * cols];
    for (w, r, c, d) in placed {
        for i in 0..w.len() {
            let (rr, cc) = match d {
                Direction::Across => (*r, c + i),
                Direction::Down => (r + i, *c),
            };
            count[rr * cols + cc] += 1;
        }
    }
    let filled = count.iter().filter(|&&n| n > 0).count();
    let ll = count.iter().filter(|&&n| n >= 2).count();
    if filled == 0 {
        return (0, 0, 0.0, 0.0, 0.0);
    }
    let (mut r0, mut r1, mut c0, mut c1) = (usize::MAX, 0, usize::MAX, 0);
    for r in 0..rows {
        for c in 0..cols {
            if count[r * cols + c] > 0 {
                r0 = r0.min(r);
                r1 = r1.max(r);
                c0 = c0.min(c);
                c1 = c1.max(c);
            }
        }
    }
    let area = (r1 - r0 + 1) * (c1 - c0 + 1);
    let fw = placed.len();
    let fr = filled as f64 / area as f64;
    let lr = ll as f64 / filled as f64;
    (fw, ll, fr, lr, (fw as f64 + 0.5 * ll as f64) * fr * lr)
}

/// (word index, row, col, direction)
pub type OraclePlacement = (usize, usize, usize, Direction);

fn cells(len: usize, r: usize, c: usize, d: Direction) -> impl Iterator<Item = (usize, usize)> {
    (0..len).map(move |i| match d {
        Direction::Across => (r, c + i),
        Direction::Down => (r + i, c),
    })
}

/// Every maximal run of two or more letters, per direction, is exactly one
/// placed word.
pub fn sound(rows: usize, cols: usize, words: &[Vec<char>], layout: &[OraclePlacement]) -> bool {
    let mut grid = vec![false; rows * cols];
    for &(w, r, c, d) in layout {
        for (rr, cc) in cells(words[w].len(), r, c, d) {
            grid[rr * cols + cc] = true;
        }
    }
    for d in [Direction::Across, Direction::Down] {
        let (outer, inner) = if d == Direction::Across {
            (rows, cols)
        } else {
            (cols, rows)
        };
        for o in 0..outer {
            let mut i = 0;
            while i < inner {
                let at = |i: usize| {
                    if d == Direction::Across {
                        grid[o * cols + i]
                    } else {
                        grid[i * cols + o]
                    }
                };
                if !at(i) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < inner && at(i) {
                    i += 1;
                }
                if i - start < 2 {
                    continue;
                }
                // Words of this direction lying on the run: exactly one, spanning it.
                let on_run: Vec<_> = layout
                    .iter()
                    .filter(|&&(_, r, c, dd)| {
                        let (line, pos) = if d == Direction::Across {
                            (r, c)
                        } else {
                            (c, r)
                        };
                        dd == d && line == o && (start..i).contains(&pos)
                    })
                    .collect();
                let exact = |&&(w, r, c, _): &&OraclePlacement| {
                    (if d == Direction::Across { c } else { r }) == start
                        && words[w].len() == i - start
                };
                if on_run.len() != 1 || !exact(&on_run[0]) {
                    return false;
                }
            }
        }
    }
    true
}

/// All sound, connected layouts of any subset of `words`, found by growing
/// from every single placement and adding words that share a cell. Returns
/// each feasible layout as a sorted placement set, with its score.
pub fn enumerate_layouts(
    rows: usize,
    cols: usize,
    words: &[Vec<char>],
) -> Vec<(BTreeSet<OraclePlacement>, f64)> {
    let mut seen: HashSet<BTreeSet<OraclePlacement>> = HashSet::new();
    let mut feasible = Vec::new();
    let mut stack: Vec<BTreeSet<OraclePlacement>> = Vec::new();
    for w in 0..words.len() {
        for d in [Direction::Across, Direction::Down] {
            for r in 0..rows {
                for c in 0..cols {
                    let fits = match d {
                        Direction::Across => c + words[w].len() <= cols,
                        Direction::Down => r + words[w].len() <= rows,
                    };
                    if fits {
                        stack.push(BTreeSet::from([(w, r, c, d)]));
                    }
                }
            }
        }
    }
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let layout: Vec<OraclePlacement> = state.iter().copied().collect();
        let mut letters: Vec<Option<char>> = vec![None; rows * cols];
        for &(w, r, c, d) in &layout {
            for (i, (rr, cc)) in cells(words[w].len(), r, c, d).enumerate() {
                letters[rr * cols + cc] = Some(words[w][i]);
            }
        }
        if sound(rows, cols, words, &layout) {
            let placed: Vec<_> = layout
                .iter()
                .map(|&(w, r, c, d)| (words[w].clone(), r, c, d))
                .collect();
            feasible.push((state.clone(), oracle_score(rows, cols, &placed).4));
        }
        let used: HashSet<usize> = layout.iter().map(|p| p.0).collect();
        for w in (0..words.len()).filter(|w| !used.contains(w)) {
            for d in [Direction::Across, Direction::Down] {
                for r in 0..rows {
                    for c in 0..cols {
                        let fits = match d {
                            Direction::Across => c + words[w].len() <= cols,
                            Direction::Down => r + words[w].len() <= rows,
                        };
                        if !fits {
                            continue;
                        }
                        let mut shares = false;
                        let mut consistent = true;
                        for (i, (rr, cc)) in cells(words[w].len(), r, c, d).enumerate() {
                            match letters[rr * cols + cc] {
                                Some(ch) if ch == words[w][i] => shares = true,
                                Some(_) => consistent = false,
                                None => {}
                            }
                        }
                        if shares && consistent {
                            let mut next = state.clone();
                            next.insert((w, r, c, d));
                            if !seen.contains(&next) {
                                stack.push(next);
                            }
                        }
                    }
                }
            }
        }
    }
    feasible
}

/// The layout's placements in oracle form, mapping answer ids `w{i}` to `i`.
pub fn as_oracle_set(layout: &CrosswordLayout) -> BTreeSet<OraclePlacement> {
    layout
        .placements
        .iter()
        .map(|p| {
            (
                p.answer_id.trim_start_matches('w').parse().unwrap(),
                p.row,
                p.col,
                p.direction,
            )
        })
        .collect()
}
