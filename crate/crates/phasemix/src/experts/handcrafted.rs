//! Handcrafted evaluator: material plus piece-square terms, with optional
//! mobility and king/pawn endgame heuristics. Exists so the search and the
//! arena are exercisable with zero training, and as the synthetic "strong
//! expert" for mixture experiments.

use super::Evaluation;
use crate::board::{Color, Move, PieceKind, Position, Square};

const MATERIAL: [i32; 6] = [100, 300, 320, 500, 900, 0];

// Modest center/advancement tables, white perspective, a1 first.
#[rustfmt::skip]
const PAWN_PST: [i32; 64] = [
     0,  0,  0,  0,  0,  0,  0,  0,
     2,  2,  2, -4, -4,  2,  2,  2,
     1,  1,  4,  6,  6,  4,  1,  1,
     2,  2,  8, 12, 12,  8,  2,  2,
     4,  6, 12, 16, 16, 12,  6,  4,
     8, 10, 16, 20, 20, 16, 10,  8,
    20, 20, 20, 20, 20, 20, 20, 20,
     0,  0,  0,  0,  0,  0,  0,  0,
];
#[rustfmt::skip]
const KNIGHT_PST: [i32; 64] = [
    -16, -8, -6, -4, -4, -6, -8, -16,
     -8,  0,  2,  4,  4,  2,  0,  -8,
     -6,  2,  8, 10, 10,  8,  2,  -6,
     -4,  4, 10, 14, 14, 10,  4,  -4,
     -4,  4, 10, 14, 14, 10,  4,  -4,
     -6,  2,  8, 10, 10,  8,  2,  -6,
     -8,  0,  2,  4,  4,  2,  0,  -8,
    -16, -8, -6, -4, -4, -6, -8, -16,
];
#[rustfmt::skip]
const KING_CENTER_PST: [i32; 64] = [
    -12, -8, -6, -4, -4, -6, -8, -12,
     -8, -2,  0,  2,  2,  0, -2,  -8,
     -6,  0,  4,  6,  6,  4,  0,  -6,
     -4,  2,  6, 10, 10,  6,  2,  -4,
     -4,  2,  6, 10, 10,  6,  2,  -4,
     -6,  0,  4,  6,  6,  4,  0,  -6,
     -8, -2,  0,  2,  2,  0, -2,  -8,
    -12, -8, -6, -4, -4, -6, -8, -12,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Handcrafted {
    /// Add a mobility term (pseudo-move count difference).
    pub mobility: bool,
    /// Add endgame king activity and passed-pawn terms.
    pub king_pawn: bool,
}

impl Handcrafted {
    /// Material + piece-square tables only.
    pub fn baseline() -> Handcrafted {
        Handcrafted {
            mobility: false,
            king_pawn: false,
        }
    }

    /// Baseline plus mobility and king/pawn heuristics; strictly better
    /// informed, used as the synthetic strong endgame expert.
    pub fn strong() -> Handcrafted {
        Handcrafted {
            mobility: true,
            king_pawn: true,
        }
    }

    /// Centipawn score from white's perspective.
    fn score_white(&self, p: &Position) -> i32 {
        let mut score = 0;
        let mut piece_total = 0;
        for i in 0..64u8 {
            let sq = Square(i);
            if let Some(piece) = p.piece_at(sq) {
                piece_total += 1;
                let rel = match piece.color {
                    Color::White => sq,
                    Color::Black => sq.mirror(),
                };
                let mut v = MATERIAL[piece.kind.index()];
                v += match piece.kind {
                    PieceKind::Pawn => PAWN_PST[rel.index()],
                    PieceKind::Knight | PieceKind::Bishop => KNIGHT_PST[rel.index()],
                    _ => 0,
                };
                match piece.color {
                    Color::White => score += v,
                    Color::Black => score -= v,
                }
            }
        }

        if self.king_pawn {
            // Endgame weight grows as material leaves the board.
            let endgame = (32 - piece_total).max(0) as i32;
            for color in [Color::White, Color::Black] {
                let sign = if color == Color::White { 1 } else { -1 };
                let king = p.king_square(color);
                let rel = match color {
                    Color::White => king,
                    Color::Black => king.mirror(),
                };
                score += sign * KING_CENTER_PST[rel.index()] * endgame / 16;
                for (sq, piece) in p.squares_of(color) {
                    if piece.kind == PieceKind::Pawn {
                        if self.is_passed(p, sq, color) {
                            let advance = match color {
                                Color::White => sq.rank() as i32,
                                Color::Black => 7 - sq.rank() as i32,
                            };
                            score += sign * (10 + advance * advance * 4) * (endgame + 8) / 16;
                        }
                    }
                }
            }
        }

        if self.mobility {
            score += 2 * (self.mobility_count(p, Color::White) - self.mobility_count(p, Color::Black));
        }
        score
    }

    fn is_passed(&self, p: &Position, sq: Square, color: Color) -> bool {
        let dir: i8 = if color == Color::White { 1 } else { -1 };
        let mut rank = sq.rank() as i8 + dir;
        while (0..8).contains(&rank) {
            for df in -1..=1i8 {
                let file = sq.file() as i8 + df;
                if (0..8).contains(&file) {
                    if let Some(piece) = p.piece_at(Square::new(file as u8, rank as u8)) {
                        if piece.color != color && piece.kind == PieceKind::Pawn {
                            return false;
                        }
                    }
                }
            }
            rank += dir;
        }
        true
    }

    /// Piece mobility approximated by destination-square counts; cheap and
    /// side-symmetric.
    fn mobility_count(&self, p: &Position, color: Color) -> i32 {
        let mut count = 0;
        for (from, piece) in p.squares_of(color) {
            if piece.kind == PieceKind::Pawn || piece.kind == PieceKind::King {
                continue;
            }
            for to in 0..64u8 {
                let to = Square(to);
                if to == from {
                    continue;
                }
                if p.piece_at(to).is_some_and(|q| q.color == color) {
                    continue;
                }
                if piece_reaches(p, from, piece.kind, to) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn evaluate(&self, p: &Position) -> Evaluation {
        let white_score = self.score_white(p) as f64;
        let stm_score = match p.side_to_move() {
            Color::White => white_score,
            Color::Black => -white_score,
        };
        let value = (stm_score / 350.0).tanh();
        let draw = (1.0 - value.abs()) / 2.0;
        let wdl = [(1.0 + value - draw) / 2.0, draw, (1.0 - value - draw) / 2.0];

        let moves = p.legal_moves();
        let scores: Vec<f64> = moves.iter().map(|m| self.move_score(p, m)).collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| ((s - max) / 100.0).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let policy = moves
            .into_iter()
            .zip(exps.into_iter().map(|e| e / sum))
            .collect();

        // Rough remaining-length guess: longer with more material on board.
        let pieces = (0..64u8).filter(|&i| p.piece_at(Square(i)).is_some()).count();
        Evaluation {
            value: wdl[0] - wdl[2],
            wdl,
            policy,
            plys_to_end: 10.0 + 2.0 * pieces as f64,
        }
    }

    fn move_score(&self, p: &Position, mv: &Move) -> f64 {
        let mut s = 0.0;
        if mv.is_capture {
            let victim = if mv.is_en_passant {
                PieceKind::Pawn
            } else {
                p.piece_at(mv.to).map(|q| q.kind).unwrap_or(PieceKind::Pawn)
            };
            let attacker = p.piece_at(mv.from).map(|q| q.kind).unwrap_or(PieceKind::Pawn);
            s += MATERIAL[victim.index()] as f64 - MATERIAL[attacker.index()] as f64 / 10.0;
        }
        if let Some(promo) = mv.promotion {
            s += MATERIAL[promo.index()] as f64 / 2.0;
        }
        // Mild centralization preference.
        let file = mv.to.file() as f64 - 3.5;
        let rank = mv.to.rank() as f64 - 3.5;
        s -= 2.0 * (file.abs() + rank.abs());
        s
    }
}

fn piece_reaches(p: &Position, from: Square, kind: PieceKind, to: Square) -> bool {
    let df = to.file() as i8 - from.file() as i8;
    let dr = to.rank() as i8 - from.rank() as i8;
    match kind {
        PieceKind::Knight => (df.abs() == 1 && dr.abs() == 2) || (df.abs() == 2 && dr.abs() == 1),
        PieceKind::Bishop => df.abs() == dr.abs() && df != 0 && ray_clear(p, from, to),
        PieceKind::Rook => (df == 0) != (dr == 0) && ray_clear(p, from, to),
        PieceKind::Queen => {
            (df.abs() == dr.abs() || (df == 0) != (dr == 0))
                && (df, dr) != (0, 0)
                && ray_clear(p, from, to)
        }
        _ => false,
    }
}

fn ray_clear(p: &Position, from: Square, to: Square) -> bool {
    let df = (to.file() as i8 - from.file() as i8).signum();
    let dr = (to.rank() as i8 - from.rank() as i8).signum();
    let mut file = from.file() as i8 + df;
    let mut rank = from.rank() as i8 + dr;
    while (file, rank) != (to.file() as i8, to.rank() as i8) {
        if p.piece_at(Square::new(file as u8, rank as u8)).is_some() {
            return false;
        }
        file += df;
        rank += dr;
    }
    true
}
