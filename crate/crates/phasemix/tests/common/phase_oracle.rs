//! Straight-line reimplementation of the phase rules, operating on a raw
//! FEN placement field instead of the library's board type. Used to
//! cross-check the divider without sharing any of its code.

/// 8x8 character grid, `grid[rank][file]`, '.' for empty, FEN letters
/// otherwise; rank 0 is the white back rank.
fn grid_of(fen: &str) -> [[char; 8]; 8] {
    let placement = fen.split_whitespace().next().unwrap();
    let mut grid = [['.'; 8]; 8];
    let mut rank = 7usize;
    let mut file = 0usize;
    for c in placement.chars() {
        if c == '/' {
            rank -= 1;
            file = 0;
        } else if let Some(d) = c.to_digit(10) {
            file += d as usize;
        } else {
            grid[rank][file] = c;
            file += 1;
        }
    }
    grid
}

pub fn major_minor_count(fen: &str) -> u32 {
    let mut n = 0;
    for row in grid_of(fen) {
        for c in row {
            if matches!(c, 'q' | 'r' | 'b' | 'n' | 'Q' | 'R' | 'B' | 'N') {
                n += 1;
            }
        }
    }
    n
}

pub fn backrank_sparse(fen: &str) -> bool {
    let grid = grid_of(fen);
    let white = grid[0].iter().filter(|c| c.is_ascii_uppercase()).count();
    let black = grid[7].iter().filter(|c| c.is_ascii_lowercase()).count();
    white < 4 || black < 4
}

/// Score for one 2x2 window with `w` white and `b` black pieces whose
/// lower rank is `y` (1-indexed).
fn score(w: u32, b: u32, y: i32) -> i32 {
    if w == 0 && b == 0 {
        return 0;
    }
    if b == 0 {
        return match w {
            1 => 9 - y,
            2 if y > 2 => y,
            3 | 4 if y > 1 => y + 2,
            _ => 0,
        };
    }
    if w == 0 {
        return match b {
            1 => 1 + y,
            2 if y < 6 => 8 - y,
            3 | 4 if y < 7 => 10 - y,
            _ => 0,
        };
    }
    match (w, b) {
        (1, 1) => 5 + (3 - y).abs(),
        (2, 1) => 4 + y,
        (3, 1) => 5 + y,
        (1, 2) => 10 - y,
        (2, 2) => 7,
        (1, 3) => 11 - y,
        _ => 0,
    }
}

pub fn mixedness(fen: &str) -> i32 {
    let grid = grid_of(fen);
    let mut total = 0;
    for y in 1..=7i32 {
        for x in 1..=7i32 {
            let mut white = 0;
            let mut black = 0;
            for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let c = grid[(y - 1 + dy) as usize][(x - 1 + dx) as usize];
                if c.is_ascii_uppercase() {
                    white += 1;
                } else if c != '.' {
                    black += 1;
                }
            }
            total += score(white, black, y);
        }
    }
    total
}

/// 0 opening, 1 middlegame, 2 endgame, straight from the rules.
pub fn phase_index(fen: &str) -> usize {
    let count = major_minor_count(fen);
    if count <= 6 {
        2
    } else if count <= 10 || backrank_sparse(fen) || mixedness(fen) > 150 {
        1
    } else {
        0
    }
}
