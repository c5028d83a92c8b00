//! Position -> 52-plane input encoding and the fixed policy index space.
//!
//! Planes are written from the player-to-move perspective: with black to
//! move the board is mirrored vertically and colors are swapped, so P1 is
//! always the side to move. Policy indices use the same mirroring.

use crate::board::{Color, Move, PieceKind, Position, Square, HISTORY_LEN};
use crate::Scalar;

pub const PLANES: usize = 52;
pub const PLANE_CELLS: usize = 64;
pub const INPUT_DIM: usize = PLANES * PLANE_CELLS;

/// From/to pairs (64*64) plus dedicated under-promotion slots.
pub const POLICY_DIM: usize = 4096 + 384;

// Plane layout, in input-table order.
const P1_PIECES: usize = 0;
const P2_PIECES: usize = 6;
const REPETITIONS: usize = 12;
const EN_PASSANT: usize = 14;
const P1_CASTLING: usize = 15;
const P2_CASTLING: usize = 17;
const NO_PROGRESS: usize = 19;
const LAST_MOVES: usize = 20;
const IS_960: usize = 36;
const P1_ALL: usize = 37;
const P2_ALL: usize = 38;
const CHECKERBOARD: usize = 39;
const MATERIAL_DIFF: usize = 40;
const OPPOSITE_BISHOPS: usize = 45;
const CHECKERS: usize = 46;
const MATERIAL_COUNT: usize = 47;

/// Planes that hold one value broadcast across all 64 cells.
pub const SCALAR_PLANES: [usize; 19] = [
    12, 13, 15, 16, 17, 18, 19, 36, 40, 41, 42, 43, 44, 45, 47, 48, 49, 50, 51,
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneStack<T> {
    data: Vec<T>,
}

impl<T: Scalar> PlaneStack<T> {
    pub fn zeros() -> PlaneStack<T> {
        PlaneStack {
            data: vec![T::zero(); INPUT_DIM],
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn plane(&self, idx: usize) -> &[T] {
        &self.data[idx * PLANE_CELLS..(idx + 1) * PLANE_CELLS]
    }

    /// Value at (plane, file, rank) in the encoded (perspective) frame.
    pub fn at(&self, plane: usize, file: u8, rank: u8) -> T {
        self.data[plane * PLANE_CELLS + (rank as usize) * 8 + file as usize]
    }

    /// Text dump, one plane per block, rows from rank 8 down to rank 1.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for plane in 0..PLANES {
            out.push_str(&format!("plane {plane}\n"));
            for rank in (0..8u8).rev() {
                let row: Vec<String> = (0..8u8)
                    .map(|file| format!("{}", self.at(plane, file, rank).to_f64_lossy()))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Square as seen from the mover's perspective.
fn perspective(sq: Square, side: Color) -> Square {
    match side {
        Color::White => sq,
        Color::Black => sq.mirror(),
    }
}

pub fn encode_planes<T: Scalar>(p: &Position) -> PlaneStack<T> {
    let mut data = vec![T::zero(); INPUT_DIM];
    let us = p.side_to_move();
    let them = us.opposite();
    let one = T::one();

    let set = |plane: usize, sq: Square, data: &mut Vec<T>| {
        data[plane * PLANE_CELLS + sq.index()] = one;
    };
    let fill = |plane: usize, value: T, data: &mut Vec<T>| {
        for cell in &mut data[plane * PLANE_CELLS..(plane + 1) * PLANE_CELLS] {
            *cell = value;
        }
    };

    for i in 0..64u8 {
        let sq = Square(i);
        if let Some(piece) = p.piece_at(sq) {
            let rel = perspective(sq, us);
            let offset = if piece.color == us { P1_PIECES } else { P2_PIECES };
            set(offset + piece.kind.index(), rel, &mut data);
            set(if piece.color == us { P1_ALL } else { P2_ALL }, rel, &mut data);
        }
    }

    let reps = p.repetition_count();
    if reps >= 2 {
        fill(REPETITIONS, one, &mut data);
    }
    if reps >= 3 {
        fill(REPETITIONS + 1, one, &mut data);
    }

    if let Some(ep) = p.en_passant() {
        set(EN_PASSANT, perspective(ep, us), &mut data);
    }

    let c = p.castling();
    let (p1_k, p1_q, p2_k, p2_q) = match us {
        Color::White => (c.white_king, c.white_queen, c.black_king, c.black_queen),
        Color::Black => (c.black_king, c.black_queen, c.white_king, c.white_queen),
    };
    for (plane, flag) in [
        (P1_CASTLING, p1_k),
        (P1_CASTLING + 1, p1_q),
        (P2_CASTLING, p2_k),
        (P2_CASTLING + 1, p2_q),
    ] {
        if flag {
            fill(plane, one, &mut data);
        }
    }

    fill(NO_PROGRESS, T::from_usize(p.halfmove_clock() as usize), &mut data);

    // Most recent move first; shorter histories leave trailing planes zero.
    for (i, &(from, to)) in p.history().iter().rev().enumerate().take(HISTORY_LEN) {
        set(LAST_MOVES + 2 * i, perspective(from, us), &mut data);
        set(LAST_MOVES + 2 * i + 1, perspective(to, us), &mut data);
    }

    // IS_960 stays all-zero: the variant is out of scope.
    let _ = IS_960;

    for rank in 0..8u8 {
        for file in 0..8u8 {
            if (file + rank) % 2 == 1 {
                set(CHECKERBOARD, Square::new(file, rank), &mut data);
            }
        }
    }

    let count_of = |color: Color, kind: PieceKind| -> i32 {
        (0..64u8)
            .filter(|&i| p.piece_at(Square(i)) == Some(crate::board::Piece::new(color, kind)))
            .count() as i32
    };
    const COUNTED: [PieceKind; 5] = [
        PieceKind::Pawn,
        PieceKind::Knight,
        PieceKind::Bishop,
        PieceKind::Rook,
        PieceKind::Queen,
    ];
    for (i, kind) in COUNTED.into_iter().enumerate() {
        let ours = count_of(us, kind);
        let theirs = count_of(them, kind);
        fill(MATERIAL_DIFF + i, T::from_f64((ours - theirs) as f64), &mut data);
        fill(MATERIAL_COUNT + i, T::from_usize(ours as usize), &mut data);
    }

    let bishops: Vec<(Color, Square)> = (0..64u8)
        .filter_map(|i| {
            p.piece_at(Square(i))
                .filter(|piece| piece.kind == PieceKind::Bishop)
                .map(|piece| (piece.color, Square(i)))
        })
        .collect();
    if let [(ca, sa), (cb, sb)] = bishops.as_slice() {
        let square_colors_differ = (sa.file() + sa.rank()) % 2 != (sb.file() + sb.rank()) % 2;
        if ca != cb && square_colors_differ {
            fill(OPPOSITE_BISHOPS, one, &mut data);
        }
    }

    for sq in p.checkers() {
        set(CHECKERS, perspective(sq, us), &mut data);
    }

    PlaneStack { data }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("policy index {0} does not correspond to a legal move")]
    NoSuchMove(usize),
}

/// Deterministic policy index of a legal move, in the mover's perspective
/// frame. Queen promotions share the plain from/to slot; under-promotions
/// (always relative rank 7 to 8) get dedicated slots keyed by origin file,
/// target file and piece.
pub fn encode_policy(mv: &Move, p: &Position) -> usize {
    let us = p.side_to_move();
    let from = perspective(mv.from, us);
    let to = perspective(mv.to, us);
    match mv.promotion {
        Some(kind) if kind != PieceKind::Queen => {
            let piece_idx = match kind {
                PieceKind::Knight => 0,
                PieceKind::Bishop => 1,
                PieceKind::Rook => 2,
                _ => unreachable!(),
            };
            4096 + ((from.file() as usize) * 8 + to.file() as usize) * 3 + piece_idx
        }
        _ => (from.index()) * 64 + to.index(),
    }
}

/// Inverse of `encode_policy` over the legal moves of `p`.
pub fn decode_policy(index: usize, p: &Position) -> Result<Move, PolicyError> {
    p.legal_moves()
        .into_iter()
        .find(|m| encode_policy(m, p) == index)
        .ok_or(PolicyError::NoSuchMove(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Position;

    #[test]
    fn start_position_planes() {
        let p = Position::start();
        let s: PlaneStack<f64> = encode_planes(&p);
        // 8 pawns on relative rank 2.
        let pawn_row: f64 = (0..8).map(|f| s.at(P1_PIECES, f, 1)).sum();
        assert_eq!(pawn_row, 8.0);
        // Castling planes all ones, no-progress all zeros.
        for plane in [P1_CASTLING, P1_CASTLING + 1, P2_CASTLING, P2_CASTLING + 1] {
            assert!(s.plane(plane).iter().all(|&v| v == 1.0));
        }
        assert!(s.plane(NO_PROGRESS).iter().all(|&v| v == 0.0));
        assert!(s.plane(EN_PASSANT).iter().all(|&v| v == 0.0));
        // Empty history: all 16 last-move planes zero.
        for i in 0..16 {
            assert!(s.plane(LAST_MOVES + i).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn black_to_move_is_mirrored() {
        let p = Position::start();
        let mv = p.parse_uci_move("e2e4").unwrap();
        let next = p.apply_move(&mv).unwrap();
        let s: PlaneStack<f64> = encode_planes(&next);
        // P1 is black; its pawns sit on relative rank 2 after mirroring.
        let pawn_row: f64 = (0..8).map(|f| s.at(P1_PIECES, f, 1)).sum();
        assert_eq!(pawn_row, 8.0);
        // Last move planes mark e2/e4 in mirrored coordinates: e7/e5.
        assert_eq!(s.at(LAST_MOVES, 4, 6), 1.0);
        assert_eq!(s.at(LAST_MOVES + 1, 4, 4), 1.0);
    }

    #[test]
    fn mirror_consistency() {
        let fens = [
            Position::START_FEN,
            "r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R w KQkq - 4 4",
            "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 17 40",
        ];
        for fen in fens {
            let p = Position::from_fen(fen).unwrap();
            let flipped = p.color_flip_mirror();
            let a: PlaneStack<f64> = encode_planes(&p);
            let b: PlaneStack<f64> = encode_planes(&flipped);
            assert_eq!(a.as_slice(), b.as_slice(), "{fen}");
        }
    }

    #[test]
    fn scalar_planes_are_constant() {
        let p = Position::from_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 17 40").unwrap();
        let s: PlaneStack<f64> = encode_planes(&p);
        for plane in SCALAR_PLANES {
            let first = s.plane(plane)[0];
            assert!(
                s.plane(plane).iter().all(|&v| v == first),
                "plane {plane} not constant"
            );
        }
        assert!(s.plane(NO_PROGRESS).iter().all(|&v| v == 17.0));
    }

    #[test]
    fn material_planes() {
        // White: K + P + R; black: K + R + N.
        let p = Position::from_fen("4k3/8/8/8/3n4/8/4P3/R3K2r w - - 0 1").unwrap();
        let s: PlaneStack<f64> = encode_planes(&p);
        assert_eq!(s.plane(MATERIAL_DIFF)[0], 1.0); // pawn diff
        assert_eq!(s.plane(MATERIAL_DIFF + 1)[0], -1.0); // knight diff
        assert_eq!(s.plane(MATERIAL_DIFF + 3)[0], 0.0); // rook diff
        assert_eq!(s.plane(MATERIAL_COUNT)[0], 1.0);
        assert_eq!(s.plane(MATERIAL_COUNT + 3)[0], 1.0);
    }

    #[test]
    fn opposite_bishops_plane() {
        let yes = Position::from_fen("2b1k3/8/8/8/8/8/8/2B1K3 w - - 0 1").unwrap();
        let s: PlaneStack<f64> = encode_planes(&yes);
        assert_eq!(s.plane(OPPOSITE_BISHOPS)[0], 1.0);
        // Same-colored bishops: plane stays zero.
        let no = Position::from_fen("1b2k3/8/8/8/8/8/8/2B1K3 w - - 0 1").unwrap();
        let s: PlaneStack<f64> = encode_planes(&no);
        assert_eq!(s.plane(OPPOSITE_BISHOPS)[0], 0.0);
    }

    #[test]
    fn checkers_plane_marks_attackers() {
        let p = Position::from_fen("4k3/8/8/8/8/8/4r3/4K3 w - - 0 1").unwrap();
        let s: PlaneStack<f64> = encode_planes(&p);
        assert_eq!(s.at(CHECKERS, 4, 1), 1.0);
        assert_eq!(s.plane(CHECKERS).iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn policy_definitional_indices() {
        let p = Position::start();
        let mv = p.parse_uci_move("e2e4").unwrap();
        let e2 = Square::from_name("e2").unwrap().index();
        let e4 = Square::from_name("e4").unwrap().index();
        assert_eq!(encode_policy(&mv, &p), e2 * 64 + e4);
        assert_eq!(decode_policy(e2 * 64 + e4, &p).unwrap(), mv);

        let promo = Position::from_fen("8/4P1k1/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        let knight = promo.parse_uci_move("e7e8n").unwrap();
        let idx = encode_policy(&knight, &promo);
        assert!(idx >= 4096 && idx < POLICY_DIM);
        let queen = promo.parse_uci_move("e7e8q").unwrap();
        assert!(encode_policy(&queen, &promo) < 4096);
    }

    #[test]
    fn policy_round_trip_all_legal_moves() {
        for fen in [
            Position::START_FEN,
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R b KQkq - 0 1",
            "8/P6k/8/8/8/8/p6K/8 w - - 0 1",
            "8/P6k/8/8/8/8/p6K/8 b - - 0 1",
        ] {
            let p = Position::from_fen(fen).unwrap();
            for mv in p.legal_moves() {
                let idx = encode_policy(&mv, &p);
                assert!(idx < POLICY_DIM);
                assert_eq!(decode_policy(idx, &p).unwrap(), mv, "{fen} {}", mv.to_uci());
            }
        }
    }

    #[test]
    fn illegal_index_errors() {
        let p = Position::start();
        // h8h8 is never a move.
        assert_eq!(
            decode_policy(63 * 64 + 63, &p),
            Err(PolicyError::NoSuchMove(63 * 64 + 63))
        );
    }
}
