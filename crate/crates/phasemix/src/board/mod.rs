//! Chess rules kernel: position representation, legal move generation,
//! FEN/PGN interchange and terminal detection.
//!
//! `Position` and `Move` are immutable values; `apply_move` returns a new
//! position rather than mutating in place, so both types are safe to share
//! across threads.

mod fen;
mod movegen;
mod pgn;
mod san;
mod zobrist;

pub use fen::FenError;
pub use pgn::{parse_pgn, write_pgn, GameRecord, GameResult, PgnError, PgnReader};
pub use san::SanError;

use std::fmt;

/// Number of half-moves kept in the history window (feeds the encoder's
/// last-move planes).
pub const HISTORY_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub const ALL: [PieceKind; 6] = [
        PieceKind::Pawn,
        PieceKind::Knight,
        PieceKind::Bishop,
        PieceKind::Rook,
        PieceKind::Queen,
        PieceKind::King,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Piece {
    pub kind: PieceKind,
    pub color: Color,
}

impl Piece {
    pub fn new(color: Color, kind: PieceKind) -> Piece {
        Piece { kind, color }
    }

    fn to_char(self) -> char {
        let c = match self.kind {
            PieceKind::Pawn => 'p',
            PieceKind::Knight => 'n',
            PieceKind::Bishop => 'b',
            PieceKind::Rook => 'r',
            PieceKind::Queen => 'q',
            PieceKind::King => 'k',
        };
        match self.color {
            Color::White => c.to_ascii_uppercase(),
            Color::Black => c,
        }
    }

    fn from_char(c: char) -> Option<Piece> {
        let color = if c.is_ascii_uppercase() {
            Color::White
        } else {
            Color::Black
        };
        let kind = match c.to_ascii_lowercase() {
            'p' => PieceKind::Pawn,
            'n' => PieceKind::Knight,
            'b' => PieceKind::Bishop,
            'r' => PieceKind::Rook,
            'q' => PieceKind::Queen,
            'k' => PieceKind::King,
            _ => return None,
        };
        Some(Piece { kind, color })
    }
}

/// Board square, 0..64 with a1 = 0, b1 = 1, ..., h8 = 63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(pub u8);

impl Square {
    pub fn new(file: u8, rank: u8) -> Square {
        debug_assert!(file < 8 && rank < 8);
        Square(rank * 8 + file)
    }

    pub fn file(self) -> u8 {
        self.0 % 8
    }

    pub fn rank(self) -> u8 {
        self.0 / 8
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Vertical mirror (rank flip), used for the player-to-move perspective.
    pub fn mirror(self) -> Square {
        Square(self.0 ^ 56)
    }

    pub fn from_name(s: &str) -> Option<Square> {
        let bytes = s.as_bytes();
        if bytes.len() != 2 {
            return None;
        }
        let file = bytes[0].wrapping_sub(b'a');
        let rank = bytes[1].wrapping_sub(b'1');
        if file < 8 && rank < 8 {
            Some(Square::new(file, rank))
        } else {
            None
        }
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            (b'a' + self.file()) as char,
            (b'1' + self.rank()) as char
        )
    }
}

/// A chess move. Ordering is (origin, target, promotion), which fixes the
/// deterministic order of `legal_moves`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub is_capture: bool,
    pub is_castle: bool,
    pub is_en_passant: bool,
}

impl Move {
    /// Long-algebraic (UCI) text: "e2e4", "e7e8q".
    pub fn to_uci(&self) -> String {
        let mut s = format!("{}{}", self.from, self.to);
        if let Some(p) = self.promotion {
            s.push(match p {
                PieceKind::Knight => 'n',
                PieceKind::Bishop => 'b',
                PieceKind::Rook => 'r',
                PieceKind::Queen => 'q',
                _ => unreachable!(),
            });
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ongoing,
    WhiteWin,
    BlackWin,
    Draw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CastlingRights {
    pub white_king: bool,
    pub white_queen: bool,
    pub black_king: bool,
    pub black_queen: bool,
}

impl CastlingRights {
    pub fn any(&self) -> bool {
        self.white_king || self.white_queen || self.black_king || self.black_queen
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BoardError {
    #[error("illegal move {0} in this position")]
    IllegalMove(String),
    #[error(transparent)]
    Fen(#[from] FenError),
}

/// Full chess state plus an eight-move history window and the repetition
/// trail needed for threefold detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    board: [Option<Piece>; 64],
    side: Color,
    castling: CastlingRights,
    en_passant: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
    /// Most recent move last; at most `HISTORY_LEN` entries.
    history: Vec<(Square, Square)>,
    /// Position keys since the last irreversible move, current key last.
    rep_keys: Vec<u64>,
}

impl Position {
    pub const START_FEN: &'static str =
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

    pub fn start() -> Position {
        Position::from_fen(Position::START_FEN).expect("start FEN is valid")
    }

    pub fn from_fen(text: &str) -> Result<Position, FenError> {
        fen::parse_fen(text)
    }

    pub fn to_fen(&self) -> String {
        fen::to_fen(self)
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    pub fn side_to_move(&self) -> Color {
        self.side
    }

    pub fn castling(&self) -> CastlingRights {
        self.castling
    }

    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Half-moves played since the game start implied by the move counters.
    pub fn ply(&self) -> u32 {
        (self.fullmove_number - 1) * 2 + if self.side == Color::Black { 1 } else { 0 }
    }

    /// Last moves, most recent last; empty for positions built from bare FEN.
    pub fn history(&self) -> &[(Square, Square)] {
        &self.history
    }

    pub fn squares_of(&self, color: Color) -> impl Iterator<Item = (Square, Piece)> + '_ {
        (0..64u8).filter_map(move |i| {
            self.board[i as usize]
                .filter(|p| p.color == color)
                .map(|p| (Square(i), p))
        })
    }

    pub fn king_square(&self, color: Color) -> Square {
        for i in 0..64u8 {
            if self.board[i as usize] == Some(Piece::new(color, PieceKind::King)) {
                return Square(i);
            }
        }
        unreachable!("position invariant: one king per color")
    }

    pub fn repetition_key(&self) -> u64 {
        zobrist::key(self)
    }

    /// How many times the current placement has occurred along the game
    /// line, counting the current occurrence. Bare-FEN positions start at 1.
    pub fn repetition_count(&self) -> u32 {
        let key = *self.rep_keys.last().expect("rep_keys never empty");
        self.rep_keys.iter().filter(|&&k| k == key).count() as u32
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = movegen::legal_moves(self);
        moves.sort_unstable();
        moves
    }

    pub fn in_check(&self) -> bool {
        movegen::in_check(self, self.side)
    }

    /// Squares of opponent pieces currently giving check to the side to move.
    pub fn checkers(&self) -> Vec<Square> {
        movegen::attackers_to(self, self.king_square(self.side), self.side.opposite())
    }

    pub fn apply_move(&self, mv: &Move) -> Result<Position, BoardError> {
        if !self.legal_moves().contains(mv) {
            return Err(BoardError::IllegalMove(mv.to_uci()));
        }
        Ok(self.apply_move_unchecked(mv))
    }

    /// State update without the legality membership test; callers must pass
    /// a move obtained from `legal_moves` on this position.
    pub fn apply_move_unchecked(&self, mv: &Move) -> Position {
        let mut next = self.clone();
        let piece = next.board[mv.from.index()].expect("move origin occupied");

        let irreversible = mv.is_capture || piece.kind == PieceKind::Pawn;
        if irreversible {
            next.halfmove_clock = 0;
        } else {
            next.halfmove_clock += 1;
        }
        if self.side == Color::Black {
            next.fullmove_number += 1;
        }

        if mv.is_en_passant {
            // Captured pawn sits on the origin rank, target file.
            let cap = Square::new(mv.to.file(), mv.from.rank());
            next.board[cap.index()] = None;
        }
        next.board[mv.from.index()] = None;
        next.board[mv.to.index()] = match mv.promotion {
            Some(kind) => Some(Piece::new(piece.color, kind)),
            None => Some(piece),
        };
        if mv.is_castle {
            let rank = mv.from.rank();
            let (rook_from, rook_to) = if mv.to.file() == 6 {
                (Square::new(7, rank), Square::new(5, rank))
            } else {
                (Square::new(0, rank), Square::new(3, rank))
            };
            let rook = next.board[rook_from.index()].take();
            next.board[rook_to.index()] = rook;
        }

        next.update_castling_rights(mv, piece);

        next.en_passant = None;
        if piece.kind == PieceKind::Pawn {
            let from_rank = mv.from.rank() as i8;
            let to_rank = mv.to.rank() as i8;
            if (from_rank - to_rank).abs() == 2 {
                next.en_passant = Some(Square::new(mv.from.file(), ((from_rank + to_rank) / 2) as u8));
            }
        }

        next.side = self.side.opposite();

        next.history.push((mv.from, mv.to));
        if next.history.len() > HISTORY_LEN {
            next.history.remove(0);
        }
        if irreversible {
            next.rep_keys.clear();
        }
        next.rep_keys.push(zobrist::key(&next));
        next
    }

    fn update_castling_rights(&mut self, mv: &Move, piece: Piece) {
        if piece.kind == PieceKind::King {
            match piece.color {
                Color::White => {
                    self.castling.white_king = false;
                    self.castling.white_queen = false;
                }
                Color::Black => {
                    self.castling.black_king = false;
                    self.castling.black_queen = false;
                }
            }
        }
        for sq in [mv.from, mv.to] {
            match sq.0 {
                0 => self.castling.white_queen = false,
                7 => self.castling.white_king = false,
                56 => self.castling.black_queen = false,
                63 => self.castling.black_king = false,
                _ => {}
            }
        }
    }

    pub fn outcome(&self) -> Outcome {
        if self.legal_moves().is_empty() {
            if self.in_check() {
                return match self.side {
                    Color::White => Outcome::BlackWin,
                    Color::Black => Outcome::WhiteWin,
                };
            }
            return Outcome::Draw;
        }
        if self.halfmove_clock >= 100 || self.repetition_count() >= 3 || self.insufficient_material()
        {
            return Outcome::Draw;
        }
        Outcome::Ongoing
    }

    fn insufficient_material(&self) -> bool {
        let mut minors: Vec<(PieceKind, Square)> = Vec::new();
        for i in 0..64u8 {
            if let Some(p) = self.board[i as usize] {
                match p.kind {
                    PieceKind::King => {}
                    PieceKind::Knight | PieceKind::Bishop => minors.push((p.kind, Square(i))),
                    _ => return false,
                }
            }
        }
        match minors.as_slice() {
            [] => true,
            [(_, _)] => true,
            [(PieceKind::Bishop, a), (PieceKind::Bishop, b)] => {
                // Same-colored bishops cannot force mate.
                (a.file() + a.rank()) % 2 == (b.file() + b.rank()) % 2
            }
            _ => false,
        }
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = movegen::legal_moves(self);
        if depth == 1 {
            return moves.len() as u64;
        }
        let mut total = 0;
        for mv in &moves {
            total += self.apply_perft(mv).perft(depth - 1);
        }
        total
    }

    /// Lightweight apply for perft: skips history/repetition bookkeeping.
    fn apply_perft(&self, mv: &Move) -> Position {
        let mut next = self.clone();
        next.history.clear();
        next.rep_keys.clear();
        next.rep_keys.push(0);
        let piece = next.board[mv.from.index()].expect("move origin occupied");
        if mv.is_en_passant {
            let cap = Square::new(mv.to.file(), mv.from.rank());
            next.board[cap.index()] = None;
        }
        next.board[mv.from.index()] = None;
        next.board[mv.to.index()] = match mv.promotion {
            Some(kind) => Some(Piece::new(piece.color, kind)),
            None => Some(piece),
        };
        if mv.is_castle {
            let rank = mv.from.rank();
            let (rook_from, rook_to) = if mv.to.file() == 6 {
                (Square::new(7, rank), Square::new(5, rank))
            } else {
                (Square::new(0, rank), Square::new(3, rank))
            };
            let rook = next.board[rook_from.index()].take();
            next.board[rook_to.index()] = rook;
        }
        next.update_castling_rights(mv, piece);
        next.en_passant = None;
        if piece.kind == PieceKind::Pawn {
            let from_rank = mv.from.rank() as i8;
            let to_rank = mv.to.rank() as i8;
            if (from_rank - to_rank).abs() == 2 {
                next.en_passant =
                    Some(Square::new(mv.from.file(), ((from_rank + to_rank) / 2) as u8));
            }
        }
        next.side = self.side.opposite();
        next
    }

    /// Flip colors and mirror ranks; used by symmetry tests and the encoder.
    pub fn color_flip_mirror(&self) -> Position {
        let mut board = [None; 64];
        for i in 0..64u8 {
            if let Some(p) = self.board[i as usize] {
                board[Square(i).mirror().index()] =
                    Some(Piece::new(p.color.opposite(), p.kind));
            }
        }
        let mut next = Position {
            board,
            side: self.side.opposite(),
            castling: CastlingRights {
                white_king: self.castling.black_king,
                white_queen: self.castling.black_queen,
                black_king: self.castling.white_king,
                black_queen: self.castling.white_queen,
            },
            en_passant: self.en_passant.map(Square::mirror),
            halfmove_clock: self.halfmove_clock,
            fullmove_number: self.fullmove_number,
            history: self
                .history
                .iter()
                .map(|&(a, b)| (a.mirror(), b.mirror()))
                .collect(),
            rep_keys: Vec::new(),
        };
        next.rep_keys.push(zobrist::key(&next));
        next
    }

    pub fn san(&self, mv: &Move) -> String {
        san::to_san(self, mv)
    }

    pub fn parse_san(&self, text: &str) -> Result<Move, SanError> {
        san::parse_san(self, text)
    }

    pub fn parse_uci_move(&self, text: &str) -> Result<Move, BoardError> {
        self.legal_moves()
            .into_iter()
            .find(|m| m.to_uci() == text)
            .ok_or_else(|| BoardError::IllegalMove(text.to_string()))
    }

    pub(crate) fn set_board(
        board: [Option<Piece>; 64],
        side: Color,
        castling: CastlingRights,
        en_passant: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) -> Position {
        let mut p = Position {
            board,
            side,
            castling,
            en_passant,
            halfmove_clock,
            fullmove_number,
            history: Vec::new(),
            rep_keys: Vec::new(),
        };
        p.rep_keys.push(zobrist::key(&p));
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_position_has_20_moves() {
        assert_eq!(Position::start().legal_moves().len(), 20);
    }

    #[test]
    fn e2e4_matches_textbook_fen() {
        let p = Position::start();
        let mv = p.parse_uci_move("e2e4").unwrap();
        let next = p.apply_move(&mv).unwrap();
        assert_eq!(
            next.to_fen(),
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1"
        );
        assert_eq!(next.history(), &[(Square::from_name("e2").unwrap(), Square::from_name("e4").unwrap())]);
    }

    #[test]
    fn illegal_move_rejected() {
        let p = Position::start();
        let bogus = Move {
            from: Square::from_name("e2").unwrap(),
            to: Square::from_name("e5").unwrap(),
            promotion: None,
            is_capture: false,
            is_castle: false,
            is_en_passant: false,
        };
        assert!(matches!(p.apply_move(&bogus), Err(BoardError::IllegalMove(_))));
    }

    #[test]
    fn stalemate_has_no_moves_and_draws() {
        let p = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1").unwrap();
        assert!(p.legal_moves().is_empty());
        assert!(!p.in_check());
        assert_eq!(p.outcome(), Outcome::Draw);
    }

    #[test]
    fn back_rank_mate_is_win_for_mating_side() {
        // White rook delivers mate on the back rank.
        let p = Position::from_fen("6k1/5ppp/8/8/8/8/8/4R1K1 w - - 0 1").unwrap();
        let mv = p.parse_uci_move("e1e8").unwrap();
        let next = p.apply_move(&mv).unwrap();
        assert_eq!(next.outcome(), Outcome::WhiteWin);
    }

    #[test]
    fn fifty_move_rule_draws() {
        let p = Position::from_fen("8/8/8/4k3/8/8/4P3/4K3 w - - 100 80").unwrap();
        assert_eq!(p.outcome(), Outcome::Draw);
    }

    #[test]
    fn castling_relocates_rook_and_clears_rights() {
        let p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1").unwrap();
        let mv = p.parse_uci_move("e1g1").unwrap();
        assert!(mv.is_castle);
        let next = p.apply_move(&mv).unwrap();
        assert_eq!(
            next.piece_at(Square::from_name("f1").unwrap()),
            Some(Piece::new(Color::White, PieceKind::Rook))
        );
        assert_eq!(next.piece_at(Square::from_name("h1").unwrap()), None);
        assert!(!next.castling().white_king);
        assert!(!next.castling().white_queen);
        assert!(next.castling().black_king);
    }

    #[test]
    fn en_passant_capture_available_and_correct() {
        let p = Position::from_fen(
            "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 2",
        )
        .unwrap();
        let ep = p
            .legal_moves()
            .into_iter()
            .find(|m| m.is_en_passant)
            .expect("en passant available");
        assert_eq!(ep.to_uci(), "d4e3");
        let next = p.apply_move(&ep).unwrap();
        assert_eq!(next.piece_at(Square::from_name("e4").unwrap()), None);
    }

    #[test]
    fn threefold_repetition_draws() {
        let mut p = Position::start();
        for uci in [
            "g1f3", "g8f6", "f3g1", "f6g8", "g1f3", "g8f6", "f3g1", "f6g8",
        ] {
            assert_eq!(p.outcome(), Outcome::Ongoing);
            let mv = p.parse_uci_move(uci).unwrap();
            p = p.apply_move(&mv).unwrap();
        }
        assert_eq!(p.repetition_count(), 3);
        assert_eq!(p.outcome(), Outcome::Draw);
    }

    #[test]
    fn insufficient_material_draws() {
        for fen in [
            "8/8/8/4k3/8/8/8/4K3 w - - 0 1",
            "8/8/8/4k3/8/8/4B3/4K3 w - - 0 1",
            "8/8/8/4k3/8/8/4N3/4K3 b - - 0 1",
        ] {
            assert_eq!(Position::from_fen(fen).unwrap().outcome(), Outcome::Draw, "{fen}");
        }
        // Opposite-colored bishops can still mate in theory: not a draw.
        let p = Position::from_fen("8/8/8/4k3/8/8/3BB3/4K3 w - - 0 1").unwrap();
        assert_eq!(p.outcome(), Outcome::Ongoing);
    }

    #[test]
    fn history_window_caps_at_eight() {
        let mut p = Position::start();
        for uci in [
            "g1f3", "g8f6", "f3g1", "f6g8", "g1f3", "g8f6", "f3g1", "f6g8", "e2e4",
        ] {
            let mv = p.parse_uci_move(uci).unwrap();
            p = p.apply_move(&mv).unwrap();
        }
        assert_eq!(p.history().len(), HISTORY_LEN);
        let last = p.history().last().unwrap();
        assert_eq!(last.0, Square::from_name("e2").unwrap());
        assert_eq!(last.1, Square::from_name("e4").unwrap());
    }
}
