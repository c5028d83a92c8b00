//! Six-field FEN parsing and serialization.

use super::{CastlingRights, Color, Piece, PieceKind, Position, Square};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FenError {
    #[error("expected 6 FEN fields, found {0}")]
    FieldCount(usize),
    #[error("illegal piece character '{0}'")]
    BadPiece(char),
    #[error("rank {0} does not describe exactly 8 files")]
    BadRank(usize),
    #[error("expected 8 ranks, found {0}")]
    RankCount(usize),
    #[error("side to move must be 'w' or 'b', found '{0}'")]
    BadSide(String),
    #[error("invalid castling field '{0}'")]
    BadCastling(String),
    #[error("invalid en-passant square '{0}'")]
    BadEnPassant(String),
    #[error("invalid counter '{0}'")]
    BadCounter(String),
    #[error("{0:?} has {1} kings, expected exactly one")]
    KingCount(Color, usize),
}

pub fn parse_fen(text: &str) -> Result<Position, FenError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(FenError::FieldCount(fields.len()));
    }

    let ranks: Vec<&str> = fields[0].split('/').collect();
    if ranks.len() != 8 {
        return Err(FenError::RankCount(ranks.len()));
    }
    let mut board = [None; 64];
    for (i, rank_text) in ranks.iter().enumerate() {
        let rank = 7 - i as u8;
        let mut file = 0u8;
        for c in rank_text.chars() {
            if let Some(d) = c.to_digit(10) {
                if d == 0 || d > 8 {
                    return Err(FenError::BadPiece(c));
                }
                file += d as u8;
            } else {
                let piece = Piece::from_char(c).ok_or(FenError::BadPiece(c))?;
                if file >= 8 {
                    return Err(FenError::BadRank(8 - rank as usize));
                }
                board[Square::new(file, rank).index()] = Some(piece);
                file += 1;
            }
            if file > 8 {
                return Err(FenError::BadRank(8 - rank as usize));
            }
        }
        if file != 8 {
            return Err(FenError::BadRank(8 - rank as usize));
        }
    }

    for color in [Color::White, Color::Black] {
        let kings = board
            .iter()
            .flatten()
            .filter(|p| p.color == color && p.kind == PieceKind::King)
            .count();
        if kings != 1 {
            return Err(FenError::KingCount(color, kings));
        }
    }

    let side = match fields[1] {
        "w" => Color::White,
        "b" => Color::Black,
        s => return Err(FenError::BadSide(s.to_string())),
    };

    let mut castling = CastlingRights::default();
    if fields[2] != "-" {
        for c in fields[2].chars() {
            match c {
                'K' => castling.white_king = true,
                'Q' => castling.white_queen = true,
                'k' => castling.black_king = true,
                'q' => castling.black_queen = true,
                _ => return Err(FenError::BadCastling(fields[2].to_string())),
            }
        }
    }

    let en_passant = if fields[3] == "-" {
        None
    } else {
        let sq = Square::from_name(fields[3])
            .ok_or_else(|| FenError::BadEnPassant(fields[3].to_string()))?;
        if sq.rank() != 2 && sq.rank() != 5 {
            return Err(FenError::BadEnPassant(fields[3].to_string()));
        }
        Some(sq)
    };

    let halfmove = fields[4]
        .parse::<u32>()
        .map_err(|_| FenError::BadCounter(fields[4].to_string()))?;
    let fullmove = fields[5]
        .parse::<u32>()
        .map_err(|_| FenError::BadCounter(fields[5].to_string()))?;
    if fullmove < 1 {
        return Err(FenError::BadCounter(fields[5].to_string()));
    }

    Ok(Position::set_board(
        board, side, castling, en_passant, halfmove, fullmove,
    ))
}

pub fn to_fen(p: &Position) -> String {
    let mut out = String::new();
    for rank in (0..8u8).rev() {
        let mut empty = 0;
        for file in 0..8u8 {
            match p.piece_at(Square::new(file, rank)) {
                Some(piece) => {
                    if empty > 0 {
                        out.push(char::from_digit(empty, 10).unwrap());
                        empty = 0;
                    }
                    out.push(piece.to_char());
                }
                None => empty += 1,
            }
        }
        if empty > 0 {
            out.push(char::from_digit(empty, 10).unwrap());
        }
        if rank > 0 {
            out.push('/');
        }
    }
    out.push(' ');
    out.push(match p.side_to_move() {
        Color::White => 'w',
        Color::Black => 'b',
    });
    out.push(' ');
    let c = p.castling();
    if c.any() {
        if c.white_king {
            out.push('K');
        }
        if c.white_queen {
            out.push('Q');
        }
        if c.black_king {
            out.push('k');
        }
        if c.black_queen {
            out.push('q');
        }
    } else {
        out.push('-');
    }
    out.push(' ');
    match p.en_passant() {
        Some(sq) => out.push_str(&sq.to_string()),
        None => out.push('-'),
    }
    out.push_str(&format!(" {} {}", p.halfmove_clock(), p.fullmove_number()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_round_trips() {
        let p = parse_fen(Position::START_FEN).unwrap();
        assert_eq!(to_fen(&p), Position::START_FEN);
        assert!(p.history().is_empty());
    }

    #[test]
    fn three_man_position() {
        let fen = "8/8/8/4k3/8/8/4P3/4K3 w - - 0 1";
        let p = parse_fen(fen).unwrap();
        assert_eq!(p.side_to_move(), Color::White);
        assert_eq!(to_fen(&p), fen);
    }

    #[test]
    fn rank_overflow_rejected() {
        assert!(matches!(
            parse_fen("8/8/9/8/8/8/8/8 w - - 0 1"),
            Err(FenError::BadPiece('9'))
        ));
        assert!(matches!(
            parse_fen("ppppppppp/8/8/8/4k3/8/8/4K3 w - - 0 1"),
            Err(FenError::BadRank(_))
        ));
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            parse_fen("8/8/8/4k3/8/8/4P3/4K3 w - -"),
            Err(FenError::FieldCount(4))
        ));
        assert!(matches!(
            parse_fen("8/8/8/4kx2/8/8/4P3/4K3 w - - 0 1"),
            Err(FenError::BadPiece('x'))
        ));
        assert!(matches!(
            parse_fen("8/8/8/4k3/2K5/8/4P3/4K3 w - - 0 1"),
            Err(FenError::KingCount(Color::White, 2))
        ));
        assert!(matches!(
            parse_fen("8/8/8/4k3/8/8/4P3/4K3 w - e5 0 1"),
            Err(FenError::BadEnPassant(_))
        ));
    }

    #[test]
    fn round_trip_misc_positions() {
        for fen in [
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
            "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 2",
            "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 17 40",
        ] {
            assert_eq!(to_fen(&parse_fen(fen).unwrap()), fen);
        }
    }
}
