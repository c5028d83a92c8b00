//! Pseudo-legal generation with a king-safety filter. Square-centric array
//! scans; no precomputed attack tables.

use super::{Color, Move, Piece, PieceKind, Position, Square};

const KNIGHT_OFFSETS: [(i8, i8); 8] = [
    (-2, -1),
    (-2, 1),
    (-1, -2),
    (-1, 2),
    (1, -2),
    (1, 2),
    (2, -1),
    (2, 1),
];
const KING_OFFSETS: [(i8, i8); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];
const BISHOP_DIRS: [(i8, i8); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];
const ROOK_DIRS: [(i8, i8); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

type Board = [Option<Piece>; 64];

fn shift(sq: Square, df: i8, dr: i8) -> Option<Square> {
    let file = sq.file() as i8 + df;
    let rank = sq.rank() as i8 + dr;
    if (0..8).contains(&file) && (0..8).contains(&rank) {
        Some(Square::new(file as u8, rank as u8))
    } else {
        None
    }
}

fn is_attacked(board: &Board, sq: Square, by: Color) -> bool {
    // Knights.
    for &(df, dr) in &KNIGHT_OFFSETS {
        if let Some(s) = shift(sq, df, dr) {
            if board[s.index()] == Some(Piece::new(by, PieceKind::Knight)) {
                return true;
            }
        }
    }
    // King.
    for &(df, dr) in &KING_OFFSETS {
        if let Some(s) = shift(sq, df, dr) {
            if board[s.index()] == Some(Piece::new(by, PieceKind::King)) {
                return true;
            }
        }
    }
    // Pawns: a white pawn attacks from one rank below.
    let pawn_dr = match by {
        Color::White => -1,
        Color::Black => 1,
    };
    for df in [-1, 1] {
        if let Some(s) = shift(sq, df, pawn_dr) {
            if board[s.index()] == Some(Piece::new(by, PieceKind::Pawn)) {
                return true;
            }
        }
    }
    // Sliders.
    for &(df, dr) in &BISHOP_DIRS {
        let mut cur = sq;
        while let Some(s) = shift(cur, df, dr) {
            if let Some(p) = board[s.index()] {
                if p.color == by && (p.kind == PieceKind::Bishop || p.kind == PieceKind::Queen) {
                    return true;
                }
                break;
            }
            cur = s;
        }
    }
    for &(df, dr) in &ROOK_DIRS {
        let mut cur = sq;
        while let Some(s) = shift(cur, df, dr) {
            if let Some(p) = board[s.index()] {
                if p.color == by && (p.kind == PieceKind::Rook || p.kind == PieceKind::Queen) {
                    return true;
                }
                break;
            }
            cur = s;
        }
    }
    false
}

fn board_of(p: &Position) -> Board {
    std::array::from_fn(|i| p.piece_at(Square(i as u8)))
}

pub fn in_check(p: &Position, color: Color) -> bool {
    let board = board_of(p);
    is_attacked(&board, p.king_square(color), color.opposite())
}

pub fn attackers_to(p: &Position, sq: Square, by: Color) -> Vec<Square> {
    let board = board_of(p);
    p.squares_of(by)
        .filter(|&(from, piece)| attacks(&board, from, piece, sq))
        .map(|(from, _)| from)
        .collect()
}

fn attacks(board: &Board, from: Square, piece: Piece, target: Square) -> bool {
    let df = target.file() as i8 - from.file() as i8;
    let dr = target.rank() as i8 - from.rank() as i8;
    match piece.kind {
        PieceKind::Pawn => {
            let dir = if piece.color == Color::White { 1 } else { -1 };
            dr == dir && df.abs() == 1
        }
        PieceKind::Knight => (df.abs() == 1 && dr.abs() == 2) || (df.abs() == 2 && dr.abs() == 1),
        PieceKind::King => df.abs() <= 1 && dr.abs() <= 1 && (df, dr) != (0, 0),
        PieceKind::Bishop => df.abs() == dr.abs() && df != 0 && clear_ray(board, from, target),
        PieceKind::Rook => (df == 0) != (dr == 0) && clear_ray(board, from, target),
        PieceKind::Queen => {
            (df.abs() == dr.abs() || (df == 0) != (dr == 0))
                && (df, dr) != (0, 0)
                && clear_ray(board, from, target)
        }
    }
}

fn clear_ray(board: &Board, from: Square, to: Square) -> bool {
    let df = (to.file() as i8 - from.file() as i8).signum();
    let dr = (to.rank() as i8 - from.rank() as i8).signum();
    let mut cur = from;
    loop {
        cur = match shift(cur, df, dr) {
            Some(s) => s,
            None => return false,
        };
        if cur == to {
            return true;
        }
        if board[cur.index()].is_some() {
            return false;
        }
    }
}

pub fn legal_moves(p: &Position) -> Vec<Move> {
    let board = board_of(p);
    let us = p.side_to_move();
    let mut moves = Vec::with_capacity(48);
    pseudo_moves(p, &board, &mut moves);
    moves.retain(|mv| {
        let mut scratch = board;
        let piece = scratch[mv.from.index()].unwrap();
        if mv.is_en_passant {
            scratch[Square::new(mv.to.file(), mv.from.rank()).index()] = None;
        }
        scratch[mv.from.index()] = None;
        scratch[mv.to.index()] = Some(piece);
        let king = if piece.kind == PieceKind::King {
            mv.to
        } else {
            p.king_square(us)
        };
        !is_attacked(&scratch, king, us.opposite())
    });
    moves
}

fn pseudo_moves(p: &Position, board: &Board, out: &mut Vec<Move>) {
    let us = p.side_to_move();
    for (from, piece) in p.squares_of(us) {
        match piece.kind {
            PieceKind::Pawn => pawn_moves(p, board, from, us, out),
            PieceKind::Knight => step_moves(board, from, us, &KNIGHT_OFFSETS, out),
            PieceKind::King => {
                step_moves(board, from, us, &KING_OFFSETS, out);
                castle_moves(p, board, from, us, out);
            }
            PieceKind::Bishop => slide_moves(board, from, us, &BISHOP_DIRS, out),
            PieceKind::Rook => slide_moves(board, from, us, &ROOK_DIRS, out),
            PieceKind::Queen => {
                slide_moves(board, from, us, &BISHOP_DIRS, out);
                slide_moves(board, from, us, &ROOK_DIRS, out);
            }
        }
    }
}

fn push(out: &mut Vec<Move>, from: Square, to: Square, capture: bool) {
    out.push(Move {
        from,
        to,
        promotion: None,
        is_capture: capture,
        is_castle: false,
        is_en_passant: false,
    });
}

fn step_moves(board: &Board, from: Square, us: Color, offsets: &[(i8, i8)], out: &mut Vec<Move>) {
    for &(df, dr) in offsets {
        if let Some(to) = shift(from, df, dr) {
            match board[to.index()] {
                Some(p) if p.color == us => {}
                occ => push(out, from, to, occ.is_some()),
            }
        }
    }
}

fn slide_moves(board: &Board, from: Square, us: Color, dirs: &[(i8, i8)], out: &mut Vec<Move>) {
    for &(df, dr) in dirs {
        let mut cur = from;
        while let Some(to) = shift(cur, df, dr) {
            match board[to.index()] {
                None => {
                    push(out, from, to, false);
                    cur = to;
                }
                Some(p) => {
                    if p.color != us {
                        push(out, from, to, true);
                    }
                    break;
                }
            }
        }
    }
}

fn pawn_moves(p: &Position, board: &Board, from: Square, us: Color, out: &mut Vec<Move>) {
    let dir: i8 = if us == Color::White { 1 } else { -1 };
    let start_rank = if us == Color::White { 1 } else { 6 };
    let promo_rank = if us == Color::White { 7 } else { 0 };

    let emit = |from: Square, to: Square, capture: bool, ep: bool, out: &mut Vec<Move>| {
        if to.rank() == promo_rank {
            for kind in [
                PieceKind::Knight,
                PieceKind::Bishop,
                PieceKind::Rook,
                PieceKind::Queen,
            ] {
                out.push(Move {
                    from,
                    to,
                    promotion: Some(kind),
                    is_capture: capture,
                    is_castle: false,
                    is_en_passant: false,
                });
            }
        } else {
            out.push(Move {
                from,
                to,
                promotion: None,
                is_capture: capture,
                is_castle: false,
                is_en_passant: ep,
            });
        }
    };

    if let Some(to) = shift(from, 0, dir) {
        if board[to.index()].is_none() {
            emit(from, to, false, false, out);
            if from.rank() == start_rank {
                if let Some(to2) = shift(from, 0, 2 * dir) {
                    if board[to2.index()].is_none() {
                        emit(from, to2, false, false, out);
                    }
                }
            }
        }
    }
    for df in [-1, 1] {
        if let Some(to) = shift(from, df, dir) {
            match board[to.index()] {
                Some(piece) if piece.color != us => emit(from, to, true, false, out),
                None if p.en_passant() == Some(to) => {
                    out.push(Move {
                        from,
                        to,
                        promotion: None,
                        is_capture: true,
                        is_castle: false,
                        is_en_passant: true,
                    });
                }
                _ => {}
            }
        }
    }
}

fn castle_moves(p: &Position, board: &Board, from: Square, us: Color, out: &mut Vec<Move>) {
    let rank = if us == Color::White { 0 } else { 7 };
    if from != Square::new(4, rank) {
        return;
    }
    let rights = p.castling();
    let (king_side, queen_side) = match us {
        Color::White => (rights.white_king, rights.white_queen),
        Color::Black => (rights.black_king, rights.black_queen),
    };
    let them = us.opposite();
    if is_attacked(board, from, them) {
        return;
    }
    if king_side
        && board[Square::new(5, rank).index()].is_none()
        && board[Square::new(6, rank).index()].is_none()
        && board[Square::new(7, rank).index()] == Some(Piece::new(us, PieceKind::Rook))
        && !is_attacked(board, Square::new(5, rank), them)
        && !is_attacked(board, Square::new(6, rank), them)
    {
        out.push(Move {
            from,
            to: Square::new(6, rank),
            promotion: None,
            is_capture: false,
            is_castle: true,
            is_en_passant: false,
        });
    }
    if queen_side
        && board[Square::new(3, rank).index()].is_none()
        && board[Square::new(2, rank).index()].is_none()
        && board[Square::new(1, rank).index()].is_none()
        && board[Square::new(0, rank).index()] == Some(Piece::new(us, PieceKind::Rook))
        && !is_attacked(board, Square::new(3, rank), them)
        && !is_attacked(board, Square::new(2, rank), them)
    {
        out.push(Move {
            from,
            to: Square::new(2, rank),
            promotion: None,
            is_capture: false,
            is_castle: true,
            is_en_passant: false,
        });
    }
}
